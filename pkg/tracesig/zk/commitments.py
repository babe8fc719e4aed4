"""
Commitments for the Σ-protocol.
BDLOP-structured commitment matrices B1, B2 stored as their uniform sub-blocks,
and the hash-based auxiliary string commitment AuxCom.
"""

import hashlib
import hmac
from dataclasses import dataclass
from functools import cached_property
from typing import Tuple

import numpy as np

from ..core.encoding import Encoder, fingerprint
from ..core.lattice import ZqMatrix, ZqVector, matvec_mod, reduce
from ..core.samplers import RngHandle
from ..errors import DimensionError

AUX_DOMAIN = b"tracesig/auxcom/v1"
AUX_OPENING_BYTES = 32


@dataclass(eq=False)
class BdlopMatrix:
    """
    B = [[I_l1, top], [0, I_w | bottom]] of shape (l1 + w) × (l1 + l2 + w).

    top is l1 × (l2 + w), bottom is w × l2, both uniform mod q.
    """

    l1: int
    l2: int
    width: int
    top: np.ndarray
    bottom: np.ndarray
    modulus: int

    @property
    def rows(self) -> int:
        return self.l1 + self.width

    @property
    def cols(self) -> int:
        return self.l1 + self.l2 + self.width

    def apply(self, s: np.ndarray) -> np.ndarray:
        """B·s mod q for a short signed (or canonical) vector s."""
        s = reduce(s, self.modulus)
        if s.shape[0] != self.cols:
            raise DimensionError(f"commitment randomness has length {s.shape[0]}, expected {self.cols}")
        head, middle, tail = s[: self.l1], s[self.l1: self.l1 + self.width], s[self.l1 + self.width:]
        upper = np.mod(head + matvec_mod(self.top, s[self.l1:], self.modulus), self.modulus)
        lower = np.mod(middle + matvec_mod(self.bottom, tail, self.modulus), self.modulus)
        return np.concatenate([upper, lower])

    def dense(self) -> ZqMatrix:
        out = np.zeros((self.rows, self.cols), dtype=np.int64)
        out[: self.l1, : self.l1] = np.eye(self.l1, dtype=np.int64)
        out[: self.l1, self.l1:] = self.top
        out[self.l1:, self.l1: self.l1 + self.width] = np.eye(self.width, dtype=np.int64)
        out[self.l1:, self.l1 + self.width:] = self.bottom
        return ZqMatrix(out, self.modulus)

    def encode(self, enc: Encoder) -> None:
        enc.u32(self.l1).u32(self.l2).u32(self.width)
        enc.zq_matrix(ZqMatrix(self.top, self.modulus))
        enc.zq_matrix(ZqMatrix(self.bottom, self.modulus))


@dataclass(eq=False)
class BdlopCrs:
    """crs = (AuxCom, B1, B2, σ1, σ2, p) plus the rejection constant and repetition count."""

    B1: BdlopMatrix
    B2: BdlopMatrix
    sigma_1: float
    sigma_2: float
    p: int
    M_rej: float
    kappa: int
    modulus: int

    @property
    def l1(self) -> int:
        return self.B1.l1

    @property
    def l2(self) -> int:
        return self.B1.l2

    def to_bytes(self) -> bytes:
        enc = Encoder().u64(self.modulus).f64(self.sigma_1).f64(self.sigma_2)
        enc.u32(self.p).f64(self.M_rej).u32(self.kappa)
        self.B1.encode(enc)
        self.B2.encode(enc)
        return enc.getvalue()

    @cached_property
    def fingerprint(self) -> bytes:
        return fingerprint(self.to_bytes())


def bdlop_setup(l1: int, l2: int, n_cols: int, ell_cols: int, modulus: int, rng: RngHandle,
                sigma_1: float, sigma_2: float, p: int, m_rej: float, kappa: int) -> BdlopCrs:
    """Sample the uniform sub-blocks of B1 (for n′ variables) and B2 (for ℓ triples)."""

    def _matrix(width: int) -> BdlopMatrix:
        top = rng.uniform_zq((l1, l2 + width), modulus)
        bottom = rng.uniform_zq((width, l2), modulus)
        return BdlopMatrix(l1, l2, width, top, bottom, modulus)

    return BdlopCrs(_matrix(n_cols), _matrix(ell_cols), sigma_1, sigma_2, p, m_rej, kappa, modulus)


def bdlop_commit(matrix: BdlopMatrix, s: np.ndarray, msg: ZqVector) -> ZqVector:
    """B·s + (0^{l1} ‖ msg) mod q."""
    if msg.modulus != matrix.modulus:
        raise DimensionError(f"message modulus {msg.modulus} differs from {matrix.modulus}")
    if len(msg) != matrix.width:
        raise DimensionError(f"message length {len(msg)}, expected {matrix.width}")
    out = matrix.apply(s)
    out[matrix.l1:] = np.mod(out[matrix.l1:] + msg.entries, matrix.modulus)
    return ZqVector(out, matrix.modulus)


@dataclass(frozen=True)
class AuxCommitment:
    digest: bytes


@dataclass(frozen=True)
class AuxOpening:
    rho: bytes


def _aux_digest(payload: bytes, rho: bytes) -> bytes:
    return hashlib.sha3_256(AUX_DOMAIN + rho + payload).digest()


def aux_commit(payload: bytes, rng: RngHandle) -> Tuple[AuxCommitment, AuxOpening]:
    rho = rng.bytes(AUX_OPENING_BYTES)
    return AuxCommitment(_aux_digest(payload, rho)), AuxOpening(rho)


def aux_verify(com: AuxCommitment, payload: bytes, opening: AuxOpening) -> bool:
    if len(opening.rho) != AUX_OPENING_BYTES:
        return False
    return hmac.compare_digest(com.digest, _aux_digest(payload, opening.rho))
