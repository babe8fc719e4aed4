"""
Non-interactive signatures of knowledge.
Generalized Unruh transform over the quadratic Σ-protocol: κ repetitions, four
distinct challenges each, length-preserving hashes of all four responses and one
disclosed response selected by the challenge oracle.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.encoding import DIGEST_SIZE, Decoder, Encoder
from ..core.oracles import OraclePair, ro_challenge_indices, ro_response_hash
from ..core.samplers import RngHandle
from ..errors import EncodingError, ProvingError, TraceSigError, WitnessError
from .commitments import AuxCommitment, BdlopCrs
from .quadratic import (QuadraticStatement, QuadraticWitness, SigmaResponse, sigma_commit, sigma_respond,
                        sigma_verify, witness_check)

logger = logging.getLogger(__name__)

CHALLENGES_PER_REPETITION = 4
MAX_RESTARTS = 1024


@dataclass(frozen=True)
class SokContext:
    """Everything H1 binds besides the transcript: crs fingerprint, message, ρ, statement fingerprint."""

    crs_fingerprint: bytes
    message: bytes
    extra: bytes
    statement: bytes

    def to_bytes(self) -> bytes:
        return Encoder().raw(self.crs_fingerprint).raw(self.message).raw(self.extra).raw(self.statement).getvalue()


@dataclass(frozen=True)
class Repetition:
    com: bytes
    challenges: Tuple[int, ...]
    hashes: Tuple[bytes, ...]
    response: bytes


@dataclass(frozen=True)
class NizkProof:
    kappa: int
    p: int
    crs_fingerprint: bytes
    repetitions: Tuple[Repetition, ...]

    def to_bytes(self) -> bytes:
        enc = Encoder().u32(self.kappa).u32(self.p).fixed(self.crs_fingerprint)
        for rep in self.repetitions:
            enc.fixed(rep.com)
            for ch in rep.challenges:
                enc.i16(ch)
            for digest in rep.hashes:
                enc.raw(digest)
            enc.raw(rep.response)
        return enc.getvalue()

    @classmethod
    def from_bytes(cls, data: bytes) -> "NizkProof":
        dec = Decoder(data)
        proof = cls.decode(dec)
        dec.done()
        return proof

    @classmethod
    def decode(cls, dec: Decoder) -> "NizkProof":
        kappa, p = dec.u32(), dec.u32()
        if not 1 <= kappa <= 4096:
            raise EncodingError(f"implausible repetition count {kappa}")
        crs_fp = dec.fixed(DIGEST_SIZE)
        reps = []
        for _ in range(kappa):
            com = dec.fixed(DIGEST_SIZE)
            challenges = tuple(dec.i16() for _ in range(CHALLENGES_PER_REPETITION))
            hashes = tuple(dec.raw() for _ in range(CHALLENGES_PER_REPETITION))
            reps.append(Repetition(com, challenges, hashes, dec.raw()))
        return cls(kappa, p, crs_fp, tuple(reps))

    def hash_bytes(self) -> int:
        return sum(len(digest) for rep in self.repetitions for digest in rep.hashes)

    def response_bytes(self) -> int:
        return sum(len(rep.response) for rep in self.repetitions)


def _challenge_input(context: SokContext, coms: Sequence[bytes], challenges: Sequence[Sequence[int]],
                     hashes: Sequence[Sequence[bytes]]) -> bytes:
    enc = Encoder().fixed(context.to_bytes())
    for com, chs, hs in zip(coms, challenges, hashes):
        enc.fixed(com)
        for ch in chs:
            enc.i16(ch)
        for digest in hs:
            enc.raw(digest)
    return enc.getvalue()


def _run_repetition(crs: BdlopCrs, stmt: QuadraticStatement, wit: QuadraticWitness, rng: RngHandle,
                    index: int) -> Tuple[AuxCommitment, Tuple[int, ...], List[bytes]]:
    q = stmt.modulus
    pool = np.arange(-crs.p, crs.p + 1)
    for attempt in range(1, MAX_RESTARTS + 1):
        com, state = sigma_commit(crs, stmt, wit, rng)
        challenges = tuple(int(ch) for ch in rng.permutation(pool)[:CHALLENGES_PER_REPETITION])
        responses: List[Optional[SigmaResponse]] = [sigma_respond(state, ch, rng) for ch in challenges]
        if all(rsp is not None for rsp in responses):
            if attempt > 1:
                logger.debug("Repetition %d accepted after %d attempts", index, attempt)
            return com, challenges, [rsp.to_bytes(q) for rsp in responses]
    raise ProvingError(f"repetition {index} aborted {MAX_RESTARTS} times")


def nizk_prove(crs: BdlopCrs, stmt: QuadraticStatement, wit: QuadraticWitness, context: SokContext,
               oracles: OraclePair, rng: RngHandle) -> NizkProof:
    """
    Prove knowledge of wit for stmt, bound to context.

    Raises:
        WitnessError: If the witness does not satisfy the statement.
        ProvingError: If a repetition exhausts its restart budget.
    """
    if crs.p < 2:
        raise ProvingError("four distinct challenges need p >= 2")
    if not witness_check(stmt, wit):
        raise WitnessError("witness does not satisfy the statement")
    base = rng.spawn("unruh")
    coms, challenges, hashes, responses = [], [], [], []
    for index in range(crs.kappa):
        com, chs, encoded = _run_repetition(crs, stmt, wit, base.child("repetition", index), index)
        coms.append(com.digest)
        challenges.append(chs)
        hashes.append(tuple(ro_response_hash(oracles.response, rsp) for rsp in encoded))
        responses.append(encoded)
    selected = ro_challenge_indices(oracles.challenge, _challenge_input(context, coms, challenges, hashes),
                                    crs.kappa)
    reps = tuple(Repetition(coms[i], challenges[i], hashes[i], responses[i][selected[i] - 1])
                 for i in range(crs.kappa))
    proof = NizkProof(crs.kappa, crs.p, crs.fingerprint, reps)
    logger.info("Proof ready: %d repetitions, %d response bytes, %d hash bytes",
                crs.kappa, proof.response_bytes(), proof.hash_bytes())
    return proof


def nizk_verify(crs: BdlopCrs, stmt: QuadraticStatement, proof: NizkProof, context: SokContext,
                oracles: OraclePair) -> bool:
    """All-or-nothing check of every repetition; False on any malformed field."""
    try:
        if proof.kappa != crs.kappa or proof.p != crs.p or len(proof.repetitions) != crs.kappa:
            return False
        if proof.crs_fingerprint != crs.fingerprint or context.crs_fingerprint != crs.fingerprint:
            return False
        for rep in proof.repetitions:
            if len(rep.challenges) != CHALLENGES_PER_REPETITION or len(set(rep.challenges)) != len(rep.challenges):
                return False
            if any(abs(ch) > crs.p for ch in rep.challenges):
                return False
        selected = ro_challenge_indices(
            oracles.challenge,
            _challenge_input(context, [rep.com for rep in proof.repetitions],
                             [rep.challenges for rep in proof.repetitions],
                             [rep.hashes for rep in proof.repetitions]),
            crs.kappa)
        for rep, j in zip(proof.repetitions, selected):
            if rep.hashes[j - 1] != ro_response_hash(oracles.response, rep.response):
                return False
            rsp = SigmaResponse.from_bytes(rep.response, stmt.modulus)
            if not sigma_verify(crs, stmt, AuxCommitment(rep.com), rep.challenges[j - 1], rsp):
                return False
        return True
    except (TraceSigError, ValueError, IndexError) as e:
        logger.debug("Malformed proof: %s", e)
        return False
