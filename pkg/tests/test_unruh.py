import dataclasses

import pytest

from tracesig.core.lattice import ZqVector
from tracesig.core.oracles import CLAIM_ORACLES, SIGN_ORACLES
from tracesig.core.samplers import RngHandle
from tracesig.errors import ProvingError, WitnessError
from tracesig.zk.quadratic import QuadraticWitness
from tracesig.zk.unruh import NizkProof, SokContext, nizk_prove, nizk_verify


@pytest.fixture(scope="module")
def proved(small_relation, make_crs):
    compiled, witness = small_relation
    stmt = compiled.statement
    crs = make_crs(stmt)
    context = SokContext(crs.fingerprint, b"hello", b"rho", stmt.fingerprint)
    proof = nizk_prove(crs, stmt, witness, context, SIGN_ORACLES, RngHandle(31))
    return crs, stmt, witness, context, proof


def test_honest_proof_verifies(proved):
    crs, stmt, _, context, proof = proved
    assert nizk_verify(crs, stmt, proof, context, SIGN_ORACLES)
    assert len(proof.repetitions) == crs.kappa
    for rep in proof.repetitions:
        assert len(set(rep.challenges)) == 4
        assert all(abs(ch) <= crs.p for ch in rep.challenges)


def test_proof_is_bound_to_its_message_and_extra_input(proved):
    crs, stmt, _, context, proof = proved
    assert not nizk_verify(crs, stmt, proof, dataclasses.replace(context, message=b"hellp"), SIGN_ORACLES)
    assert not nizk_verify(crs, stmt, proof, dataclasses.replace(context, extra=b"other"), SIGN_ORACLES)


def test_oracle_pairs_are_not_interchangeable(proved):
    crs, stmt, _, context, proof = proved
    assert not nizk_verify(crs, stmt, proof, context, CLAIM_ORACLES)


def test_proof_is_bound_to_its_crs(proved, make_crs):
    crs, stmt, _, context, proof = proved
    other = make_crs(stmt, seed=4)
    assert not nizk_verify(other, stmt, proof, context, SIGN_ORACLES)
    assert not nizk_verify(other, stmt, proof, dataclasses.replace(context, crs_fingerprint=other.fingerprint),
                           SIGN_ORACLES)
    assert not nizk_verify(crs, stmt, proof, dataclasses.replace(context, crs_fingerprint=bytes(32)), SIGN_ORACLES)


def test_byte_round_trip_and_sizes(proved):
    crs, stmt, _, context, proof = proved
    data = proof.to_bytes()
    restored = NizkProof.from_bytes(data)
    assert restored == proof
    assert nizk_verify(crs, stmt, restored, context, SIGN_ORACLES)
    assert proof.hash_bytes() > 3 * proof.response_bytes() // 2
    assert len(data) > proof.hash_bytes() + proof.response_bytes()


def test_tampered_repetition_is_rejected(proved):
    crs, stmt, _, context, proof = proved
    first = proof.repetitions[0]
    swapped = dataclasses.replace(first, challenges=first.challenges[::-1])
    tampered = dataclasses.replace(proof, repetitions=(swapped,) + proof.repetitions[1:])
    assert not nizk_verify(crs, stmt, tampered, context, SIGN_ORACLES)
    cut = dataclasses.replace(proof, repetitions=proof.repetitions[1:])
    assert not nizk_verify(crs, stmt, cut, context, SIGN_ORACLES)


def test_invalid_witness_is_refused(small_relation, make_crs):
    compiled, witness = small_relation
    stmt = compiled.statement
    crs = make_crs(stmt)
    x = witness.x.entries.copy()
    x[0] ^= 1
    context = SokContext(crs.fingerprint, b"", b"", stmt.fingerprint)
    with pytest.raises(WitnessError):
        nizk_prove(crs, stmt, QuadraticWitness(ZqVector(x, stmt.modulus)), context, SIGN_ORACLES, RngHandle(1))


def test_challenge_range_below_two_cannot_prove(small_relation, make_crs):
    compiled, witness = small_relation
    stmt = compiled.statement
    crs = make_crs(stmt, p=1)
    context = SokContext(crs.fingerprint, b"", b"", stmt.fingerprint)
    with pytest.raises(ProvingError):
        nizk_prove(crs, stmt, witness, context, SIGN_ORACLES, RngHandle(1))
