"""
GPV identity-based encryption.
Identities are OTS verification keys hashed to Z_{q′}^n; the opening authority
extracts identity keys with its binary trapdoor on B.
"""

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from ..core.encoding import ArtifactMixin, Decoder, Encoder
from ..core.lattice import IntVector, ZqMatrix, ZqVector, centered, matvec_mod, reduce
from ..core.oracles import OracleTag, ro_zq_vector
from ..core.params import ParamSet
from ..core.samplers import GTrapdoor, RngHandle, sample_bounded_error, sample_d
from ..errors import DimensionError, RangeError

logger = logging.getLogger(__name__)

EXTRACT_DOMAIN = b"tracesig/ibe-extract/v1"


@dataclass(eq=False)
class IbeCiphertext:
    """c = (Bᵀ; vᵀ)·r + e_c + (0, …, 0, scale·id) over q′, length m_B + 1."""

    c: ZqVector

    def __len__(self) -> int:
        return len(self.c)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IbeCiphertext):
            return NotImplemented
        return self.c == other.c

    __hash__ = None


@dataclass(eq=False)
class IbeUserKey:
    """e_vk with B·e_vk = H_GPV(vk) mod q′."""

    vk: bytes
    e_vk: IntVector


@dataclass(eq=False)
class IbeRandomness:
    r: np.ndarray
    e_c: np.ndarray


@dataclass(eq=False)
class OpeningKey(ArtifactMixin):
    """osk: the binary trapdoor of B plus the seed that makes extraction deterministic."""

    trapdoor: GTrapdoor
    extract_seed: bytes
    _cache: Dict[bytes, IbeUserKey] = field(default_factory=dict, repr=False)

    MAGIC = b"TOSK"

    def to_bytes(self) -> bytes:
        enc = Encoder()
        self.trapdoor.encode(enc)
        return enc.raw(self.extract_seed).getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "OpeningKey":
        dec = Decoder(data)
        trapdoor = GTrapdoor.decode(dec)
        seed = dec.raw()
        dec.done()
        return cls(trapdoor, seed)


def ibe_identity(vk: bytes, n: int, q_prime: int) -> ZqVector:
    """v = H_GPV(vk) ∈ Z_{q′}^n."""
    return ro_zq_vector(OracleTag.GPV, vk, n, q_prime)


def ibe_extract(B: ZqMatrix, osk: OpeningKey, vk: bytes, sigma: float) -> IbeUserKey:
    """
    Sample e_vk ← D^{m_B}_σ with B·e_vk = H_GPV(vk), seeded by hash(extract seed ‖ vk).

    Raises:
        WidthError: If sigma is below the sampler floor for the trapdoor.
    """
    cached = osk._cache.get(vk)
    if cached is not None:
        return cached
    rng = RngHandle(hashlib.sha3_256(EXTRACT_DOMAIN + osk.extract_seed + vk).digest())
    target = ibe_identity(vk, B.rows, B.modulus)
    key = IbeUserKey(vk, sample_d(B, osk.trapdoor, 1, target, sigma, rng))
    osk._cache[vk] = key
    return key


def ibe_encrypt_with(B: ZqMatrix, vk: bytes, ident: int, r: np.ndarray, e_c: np.ndarray,
                     scale: int) -> IbeCiphertext:
    """Deterministic encryption for given randomness (r, e_c)."""
    q_prime = B.modulus
    n, m_B = B.shape
    r = reduce(r, q_prime)
    if r.shape[0] != n or np.asarray(e_c).shape[0] != m_B + 1:
        raise DimensionError(f"randomness shapes ({r.shape[0]}, {np.asarray(e_c).shape[0]}) "
                             f"do not fit B of shape {B.shape}")
    v = ibe_identity(vk, n, q_prime)
    stacked = np.vstack([B.T.entries, v.entries[None, :]])
    body = np.mod(matvec_mod(stacked, r, q_prime) + np.asarray(e_c, dtype=np.int64), q_prime)
    body[-1] = (body[-1] + scale * int(ident)) % q_prime
    return IbeCiphertext(ZqVector(body, q_prime))


def ibe_encrypt_full(pp: ParamSet, B: ZqMatrix, vk: bytes, ident: int,
                     rng: RngHandle) -> Tuple[IbeCiphertext, IbeRandomness]:
    """Encrypt id ∈ {0..N} under identity vk; also returns the randomness for the signing witness."""
    if not 0 <= ident <= pp.N:
        raise RangeError(f"plaintext {ident} outside [0, {pp.N}]")
    r = rng.uniform_zq(pp.n, pp.q_prime)
    e_c = sample_bounded_error(pp.alpha_gpv * pp.q_prime, pp.B_gpv, pp.m_B + 1, rng).entries
    return ibe_encrypt_with(B, vk, ident, r, e_c, pp.ibe_scale), IbeRandomness(r, e_c)


def ibe_encrypt(pp: ParamSet, B: ZqMatrix, vk: bytes, ident: int, rng: RngHandle) -> IbeCiphertext:
    return ibe_encrypt_full(pp, B, vk, ident, rng)[0]


def _inner_value(c: IbeCiphertext, key: IbeUserKey) -> int:
    """(−e_vkᵀ | 1)·c mod q′."""
    q_prime = c.c.modulus
    body = c.c.entries
    if body.shape[0] != len(key.e_vk) + 1:
        raise DimensionError(f"ciphertext length {body.shape[0]} does not fit key length {len(key.e_vk)}")
    head = int(np.dot(key.e_vk.entries, body[:-1]))
    return (int(body[-1]) - head) % q_prime


def ibe_decrypt(c: IbeCiphertext, key: IbeUserKey, N: int) -> Optional[int]:
    """
    Round (−e_vkᵀ | 1)·c to the nearest multiple of q′/(2(N+1)), ties toward zero.

    Returns:
        The plaintext in {0..N}, or None when the rounded value falls outside it.
    """
    try:
        value = _inner_value(c, key)
    except DimensionError as e:
        logger.debug("Undecryptable ciphertext: %s", e)
        return None
    q_prime = c.c.modulus
    slots = 2 * (N + 1)
    numerator = value * slots
    rounded, remainder = divmod(numerator, q_prime)
    if 2 * remainder > q_prime:
        rounded += 1
    rounded %= slots
    return rounded if rounded <= N else None


def decryption_noise(c: IbeCiphertext, key: IbeUserKey, ident: int, scale: int) -> int:
    """Centered (−e_vkᵀ | 1)·c − scale·id, the quantity the correctness margin bounds."""
    q_prime = c.c.modulus
    return int(centered((_inner_value(c, key) - scale * ident) % q_prime, q_prime))
