"""
Tag-based certificate signature.

vk = (A, A′, D, u) with A′ = −A·R; a signature on message bits μ under tag id is
(v1, v2) with [A | A′ + id·G]·(v1; v2) = u + D·μ mod q and both halves short.
"""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..core.encoding import Decoder, Encoder
from ..core.lattice import BitVector, IntVector, ZqMatrix, ZqVector, gadget_matrix, inf_norm
from ..core.params import ParamSet
from ..core.samplers import (GTrapdoor, RngHandle, sample_d, sample_dgauss_array, trapdoor_gen_ternary,
                             trapdoor_norm_bound)
from ..errors import DimensionError, RangeError, SamplingError, TraceSigError

logger = logging.getLogger(__name__)

MAX_SIGN_ATTEMPTS = 64

Bits = Union[BitVector, np.ndarray]


@dataclass(eq=False)
class TagSigPublicKey:
    A: ZqMatrix
    A_prime: ZqMatrix
    D: ZqMatrix
    u: ZqVector

    @property
    def modulus(self) -> int:
        return self.A.modulus

    def tagged_matrix(self, tag: int) -> ZqMatrix:
        """[A | A′ + tag·G]."""
        gadget = gadget_matrix(self.A.rows, self.modulus).scale(tag)
        return self.A.hstack(self.A_prime + gadget)

    def target(self, msg_bits: Bits) -> ZqVector:
        """u + D·μ."""
        return self.u + self.D.matvec(msg_bits)

    def encode(self, enc: Encoder) -> None:
        enc.zq_matrix(self.A).zq_matrix(self.A_prime).zq_matrix(self.D).zq_vector(self.u)

    @classmethod
    def decode(cls, dec: Decoder) -> "TagSigPublicKey":
        return cls(dec.zq_matrix(), dec.zq_matrix(), dec.zq_matrix(), dec.zq_vector())


@dataclass(eq=False)
class TagSigKeypair:
    vk: TagSigPublicKey
    sk: GTrapdoor


@dataclass(eq=False)
class TagSignature:
    ident: int
    v1: IntVector
    v2: IntVector

    def encode(self, enc: Encoder) -> None:
        enc.u32(self.ident).int_vector(self.v1).int_vector(self.v2)

    @classmethod
    def decode(cls, dec: Decoder) -> "TagSignature":
        return cls(dec.u32(), dec.int_vector(), dec.int_vector())


def tagsig_keygen(pp: ParamSet, rng: RngHandle) -> TagSigKeypair:
    """Ternary trapdoor R for (A, A′ = −A·R), uniform D and u."""
    A, A_prime, R = trapdoor_gen_ternary(pp.n, pp.m_1, pp.m_2, pp.q, rng,
                                         norm_bound=trapdoor_norm_bound(pp.m_1, pp.m_2, "ternary"))
    D = ZqMatrix(rng.uniform_zq((pp.n, pp.ybits_len), pp.q), pp.q)
    u = ZqVector(rng.uniform_zq(pp.n, pp.q), pp.q)
    logger.debug("Tag signature key: A %s, D %s, ||R||_2 = %.1f", A.shape, D.shape, R.spectral_norm)
    return TagSigKeypair(TagSigPublicKey(A, A_prime, D, u), R)


def tagsig_sign(pp: ParamSet, keypair: TagSigKeypair, ident: int, msg_bits: Bits, rng: RngHandle,
                max_attempts: int = MAX_SIGN_ATTEMPTS) -> TagSignature:
    """
    Shift-then-preimage signing: r ← D_{σ_com}, (w1, w2) ← SampleD on u + D·μ − A·r,
    v1 = w1 + r, v2 = w2, resampled until ‖v1‖∞ ≤ β1 and ‖v2‖∞ ≤ β2.

    Raises:
        RangeError: If ident is outside [1, N].
        SamplingError: If the norm bounds are missed max_attempts times.
    """
    if not 1 <= ident <= pp.N:
        raise RangeError(f"tag {ident} outside [1, {pp.N}]")
    vk = keypair.vk
    matrix = vk.tagged_matrix(ident)
    base = vk.target(msg_bits)
    for attempt in range(1, max_attempts + 1):
        shift = sample_dgauss_array(pp.sigma_com, pp.m_1, rng)
        target = base - vk.A.matvec(shift)
        w = sample_d(matrix, keypair.sk, ident, target, pp.sigma_sign, rng).entries
        v1 = w[:pp.m_1] + shift
        v2 = w[pp.m_1:]
        if inf_norm(v1) <= pp.beta_1 and inf_norm(v2) <= pp.beta_2:
            if attempt > 1:
                logger.debug("Tag signature accepted after %d attempts", attempt)
            return TagSignature(ident, IntVector(v1, bound=pp.beta_1), IntVector(v2, bound=pp.beta_2))
    raise SamplingError(f"tag signature missed the norm bounds {max_attempts} times; "
                        "sigma_sign is misconfigured for beta_1/beta_2")


def tagsig_verify(pp: ParamSet, vk: TagSigPublicKey, sig: TagSignature, msg_bits: Bits) -> bool:
    """Norm bounds and the exact identity [A | A′ + id·G]·(v1; v2) = u + D·μ."""
    try:
        if not 1 <= sig.ident <= pp.N:
            return False
        if len(sig.v1) != pp.m_1 or len(sig.v2) != pp.m_2:
            return False
        if inf_norm(sig.v1) > pp.beta_1 or inf_norm(sig.v2) > pp.beta_2:
            return False
        bits = msg_bits.entries if isinstance(msg_bits, BitVector) else np.asarray(msg_bits)
        if bits.shape[0] != vk.D.cols:
            raise DimensionError(f"message has {bits.shape[0]} bits, expected {vk.D.cols}")
        lhs = vk.tagged_matrix(sig.ident).matvec(np.concatenate([sig.v1.entries, sig.v2.entries]))
        return lhs == vk.target(msg_bits)
    except TraceSigError as e:
        logger.debug("Malformed tag signature: %s", e)
        return False
