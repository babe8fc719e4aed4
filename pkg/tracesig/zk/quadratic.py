"""
Σ-protocol for quadratic relations.

Statement: (A, y, M) with A x = y mod q and x[h] = x[i]·x[j] for every (h, i, j) in M.
The prover commits to x and a masking vector r with the first BDLOP matrix, to the
linear/constant coefficients of the quadratic check with the second, and seals the
transcript in a hash commitment. Responses are rejection-sampled.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.encoding import Decoder, Encoder, fingerprint
from ..core.lattice import SparseZqMatrix, ZqVector, l2_norm_sq, mulmod, reduce
from ..core.samplers import RngHandle, rejection_prob, sample_dgauss_array
from ..errors import DimensionError, RangeError, TraceSigError, UsageError
from .commitments import (AUX_OPENING_BYTES, AuxCommitment, AuxOpening, BdlopCrs, BdlopMatrix,
                          aux_commit, aux_verify)

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class QuadraticStatement:
    """
    A over Z_q (sparse), target y and the product triples.

    Triples are stored 0-based as an (ℓ, 3) int64 array of (h, i, j).
    """

    A: SparseZqMatrix
    y: ZqVector
    triples: np.ndarray

    def __post_init__(self):
        self.triples = np.asarray(self.triples, dtype=np.int64).reshape(-1, 3)
        if self.A.shape[0] != len(self.y):
            raise DimensionError(f"A has {self.A.shape[0]} rows but y has length {len(self.y)}")
        if self.A.modulus != self.y.modulus:
            raise DimensionError("A and y use different moduli")
        if self.triples.size and (self.triples.min() < 0 or self.triples.max() >= self.n_vars):
            raise DimensionError("triple index outside the witness")

    @property
    def modulus(self) -> int:
        return self.A.modulus

    @property
    def n_vars(self) -> int:
        return self.A.shape[1]

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    @property
    def n_triples(self) -> int:
        return int(self.triples.shape[0])

    def to_bytes(self) -> bytes:
        return Encoder().sparse(self.A).zq_vector(self.y).int_matrix(self.triples).getvalue()

    @cached_property
    def fingerprint(self) -> bytes:
        return fingerprint(self.to_bytes())


@dataclass(eq=False)
class QuadraticWitness:
    x: ZqVector

    def __len__(self) -> int:
        return len(self.x)


def witness_check(stmt: QuadraticStatement, wit: QuadraticWitness) -> bool:
    """A x = y and every triple product holds modulo q."""
    if len(wit.x) != stmt.n_vars:
        raise DimensionError(f"witness has length {len(wit.x)}, statement expects {stmt.n_vars}")
    if wit.x.modulus != stmt.modulus:
        return False
    x = wit.x.entries
    if stmt.A.matvec(x) != stmt.y:
        return False
    if stmt.n_triples:
        h, i, j = stmt.triples.T
        if not np.array_equal(x[h], mulmod(x[i], x[j], stmt.modulus)):
            return False
    return True


def _embed(matrix: BdlopMatrix, randomness: np.ndarray, msg: np.ndarray) -> np.ndarray:
    out = matrix.apply(randomness)
    out[matrix.l1:] = np.mod(out[matrix.l1:] + msg, matrix.modulus)
    return out


def _quadratic_terms(stmt: QuadraticStatement, x: np.ndarray, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """a_t = r_h − x_i r_j − x_j r_i and b_t = r_i r_j for each triple t."""
    q = stmt.modulus
    h, i, j = stmt.triples.T
    a = np.mod(r[h] - mulmod(x[i], r[j], q) - mulmod(x[j], r[i], q), q)
    b = mulmod(r[i], r[j], q)
    return a, b


def _aux_payload(q: int, parts: Sequence[np.ndarray]) -> bytes:
    enc = Encoder()
    for part in parts:
        enc.zq_vector(ZqVector(part, q))
    return enc.getvalue()


@dataclass(eq=False)
class ProverState:
    """Everything the prover keeps between commit and respond."""

    x: np.ndarray
    r: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    s3: np.ndarray
    s4: np.ndarray
    c1: np.ndarray
    c3: np.ndarray
    opening: AuxOpening
    modulus: int
    sigma_2: float
    m_rej: float
    p: int


@dataclass(eq=False)
class SigmaResponse:
    """(c1, c3, ρ, z0, z1, z2)."""

    c1: np.ndarray
    c3: np.ndarray
    rho: bytes
    z0: np.ndarray
    z1: np.ndarray
    z2: np.ndarray

    def to_bytes(self, modulus: int) -> bytes:
        enc = Encoder().zq_vector(ZqVector(self.c1, modulus)).zq_vector(ZqVector(self.c3, modulus))
        enc.fixed(self.rho).zq_vector(ZqVector(self.z0, modulus))
        return enc.int_array(self.z1).int_array(self.z2).getvalue()

    @classmethod
    def from_bytes(cls, data: bytes, modulus: int) -> "SigmaResponse":
        dec = Decoder(data)
        c1, c3 = dec.zq_vector(), dec.zq_vector()
        rho = dec.fixed(AUX_OPENING_BYTES)
        z0 = dec.zq_vector()
        z1, z2 = dec.int_array(), dec.int_array()
        dec.done()
        for vector in (c1, c3, z0):
            if vector.modulus != modulus:
                raise DimensionError(f"response modulus {vector.modulus}, expected {modulus}")
        return cls(c1.entries, c3.entries, rho, z0.entries, z1, z2)


def sigma_commit(crs: BdlopCrs, stmt: QuadraticStatement, wit: QuadraticWitness,
                 rng: RngHandle) -> Tuple[AuxCommitment, ProverState]:
    """First move: sample r and the commitment randomness, return com_aux."""
    q = stmt.modulus
    if crs.modulus != q:
        raise DimensionError(f"commitment key modulus {crs.modulus} differs from statement modulus {q}")
    if crs.B1.width != stmt.n_vars or crs.B2.width != stmt.n_triples:
        raise DimensionError(f"commitment key sized for ({crs.B1.width}, {crs.B2.width}), "
                             f"statement has ({stmt.n_vars}, {stmt.n_triples})")
    x = wit.x.entries
    r = rng.uniform_zq(stmt.n_vars, q)
    t = stmt.A.matvec(r).entries
    s1 = sample_dgauss_array(crs.sigma_1, crs.B1.cols, rng)
    s2 = sample_dgauss_array(crs.sigma_2, crs.B1.cols, rng)
    s3 = sample_dgauss_array(crs.sigma_1, crs.B2.cols, rng)
    s4 = sample_dgauss_array(crs.sigma_2, crs.B2.cols, rng)
    c1 = _embed(crs.B1, s1, x)
    c2 = _embed(crs.B1, s2, r)
    a, b = _quadratic_terms(stmt, x, r)
    c3 = _embed(crs.B2, s3, a)
    c4 = _embed(crs.B2, s4, b)
    com, opening = aux_commit(_aux_payload(q, (t, c1, c2, c3, c4)), rng)
    state = ProverState(x, r, s1, s2, s3, s4, c1, c3, opening, q, crs.sigma_2, crs.M_rej, crs.p)
    return com, state


def sigma_respond(state: ProverState, challenge: int, rng: RngHandle) -> Optional[SigmaResponse]:
    """
    Third move for challenge ch ∈ [−p, p].

    Returns:
        The response, or None when rejection sampling aborts.
    """
    challenge = int(challenge)
    if abs(challenge) > state.p:
        raise RangeError(f"challenge {challenge} outside [-{state.p}, {state.p}]")
    q = state.modulus
    z0 = np.mod(mulmod(state.x, challenge % q, q) + state.r, q)
    shift = np.concatenate([challenge * state.s1, challenge * state.s3])
    z1 = challenge * state.s1 + state.s2
    z2 = challenge * state.s3 - state.s4
    accept = rejection_prob(shift, np.concatenate([z1, z2]), state.sigma_2, state.m_rej)
    if rng.uniform() >= accept:
        logger.debug("Response for challenge %d rejected (p=%.3f)", challenge, accept)
        return None
    return SigmaResponse(state.c1, state.c3, state.opening.rho, z0, z1, z2)


def response_norm_bound(crs: BdlopCrs, length: int) -> float:
    """2·√len·(σ2 + p·σ1)."""
    return 2.0 * np.sqrt(length) * (crs.sigma_2 + crs.p * crs.sigma_1)


def sigma_verify(crs: BdlopCrs, stmt: QuadraticStatement, com: AuxCommitment, challenge: int,
                 rsp: SigmaResponse) -> bool:
    """Recompute (t, c2, c4) from the response and check the opening and the norms."""
    try:
        q = stmt.modulus
        challenge = int(challenge)
        if abs(challenge) > crs.p:
            return False
        if (rsp.c1.shape[0] != crs.B1.rows or rsp.c3.shape[0] != crs.B2.rows
                or rsp.z0.shape[0] != stmt.n_vars
                or rsp.z1.shape[0] != crs.B1.cols or rsp.z2.shape[0] != crs.B2.cols):
            return False
        for bound, z in ((response_norm_bound(crs, crs.B1.cols), rsp.z1),
                         (response_norm_bound(crs, crs.B2.cols), rsp.z2)):
            if l2_norm_sq(z) > bound * bound:
                return False
        ch = challenge % q
        z0 = rsp.z0
        h, i, j = stmt.triples.T
        d = np.mod(mulmod(z0[h], ch, q) - mulmod(z0[i], z0[j], q), q)
        t = np.mod(stmt.A.matvec(z0).entries - mulmod(stmt.y.entries, ch, q), q)
        c2 = np.mod(_embed(crs.B1, rsp.z1, z0) - mulmod(rsp.c1, ch, q), q)
        c4 = np.mod(mulmod(rsp.c3, ch, q) - crs.B2.apply(rsp.z2), q)
        c4[crs.B2.l1:] = np.mod(c4[crs.B2.l1:] - d, q)
        payload = _aux_payload(q, (t, rsp.c1, c2, rsp.c3, c4))
        return aux_verify(com, payload, AuxOpening(rsp.rho))
    except (TraceSigError, ValueError, IndexError) as e:
        logger.debug("Malformed Σ-protocol response: %s", e)
        return False


def sigma_extract(crs: BdlopCrs, stmt: QuadraticStatement, com: AuxCommitment,
                  transcripts: List[Tuple[int, SigmaResponse]]) -> Optional[QuadraticWitness]:
    """
    Special-soundness extractor from three accepting transcripts on one commitment.

    Every transcript must verify against com. x̂ = (z0 − z0′)·(ch − ch′)⁻¹, and the
    third transcript must agree on the masking vector.

    Raises:
        UsageError: If fewer than three transcripts are given or two challenges coincide.
    """
    if len(transcripts) < 3:
        raise UsageError("extraction needs three transcripts")
    challenges = [int(ch) for ch, _ in transcripts[:3]]
    if len(set(challenges)) != 3:
        raise UsageError(f"extraction needs distinct challenges, got {challenges}")
    q = stmt.modulus
    (ch_a, rsp_a), (ch_b, rsp_b), (ch_c, rsp_c) = transcripts[:3]
    if not all(sigma_verify(crs, stmt, com, ch, rsp) for ch, rsp in transcripts[:3]):
        logger.debug("A transcript does not verify against the auxiliary commitment")
        return None
    inverse = pow((ch_a - ch_b) % q, -1, q)
    x = mulmod(np.mod(rsp_a.z0 - rsp_b.z0, q), inverse, q)
    r_a = np.mod(rsp_a.z0 - mulmod(x, ch_a % q, q), q)
    r_c = np.mod(rsp_c.z0 - mulmod(x, ch_c % q, q), q)
    if not np.array_equal(r_a, r_c):
        return None
    witness = QuadraticWitness(ZqVector(x, q))
    return witness if witness_check(stmt, witness) else None
