import numpy as np
import pytest

from tracesig.core.samplers import RngHandle
from tracesig.errors import CapacityError, JoinRejectedError, TraceSigError, WitnessError
from tracesig.scheme.gpv_ibe import OpeningKey
from tracesig.scheme.hashsig import usersig_keygen
from tracesig.scheme.registry import Registry
from tracesig.scheme.traceable import (Certificate, ClaimProof, GroupPublicKey, GroupSignature, JoinRequest,
                                       JoinResponse, TracingTrapdoor, UserSecret, audit_open, claim, claim_verify,
                                       join_gm_process, join_user_finalize, join_user_request, open_signature,
                                       reveal, sign, size_report, trace, verify)


@pytest.fixture(scope="module")
def trapdoors(toy_group):
    return {ident: toy_group.reveal(ident) for ident in sorted(toy_group.members)}


@pytest.fixture(scope="module")
def first_claim(toy_group):
    return toy_group.claim(0)


def test_every_signature_verifies_and_opens_to_its_signer(toy_group):
    gpk = toy_group.gpk
    for entry in toy_group.signed:
        assert verify(gpk, entry.message, entry.signature)
        assert open_signature(gpk, toy_group.osk, entry.message, entry.signature) == entry.signer


def test_signature_is_bound_to_its_message(toy_group):
    entry = toy_group.signed[0]
    assert not verify(toy_group.gpk, entry.message + b"!", entry.signature)
    assert open_signature(toy_group.gpk, toy_group.osk, entry.message + b"!", entry.signature) is None


def test_audit_cross_checks_the_registry(toy_group):
    entry = toy_group.signed[1]
    result = audit_open(toy_group.gpk, toy_group.osk, toy_group.registry, entry.message, entry.signature)
    assert (result.ident, result.registered) == (entry.signer, True)
    assert result.transcript.ident == entry.signer
    partial = Registry(toy_group.pp.N, [toy_group.registry.find(1)])
    result = audit_open(toy_group.gpk, toy_group.osk, partial, entry.message, entry.signature)
    assert (result.ident, result.registered) == (entry.signer, False)
    result = audit_open(toy_group.gpk, toy_group.osk, toy_group.registry, b"other", entry.signature)
    assert (result.ident, result.registered) == (None, False)


def test_revealed_trapdoor_is_the_one_way_image_of_the_secret(toy_group, trapdoors):
    for ident, trapdoor in trapdoors.items():
        assert trapdoor is not None
        assert trapdoor.x == toy_group.gpk.F.matvec(toy_group.members[ident].usk.z)


def test_reveal_of_an_unknown_member_is_none(toy_group):
    assert reveal(toy_group.gpk, toy_group.osk, toy_group.registry, toy_group.pp.N + 1, RngHandle(1)) is None
    assert reveal(toy_group.gpk, toy_group.osk, toy_group.registry, 0, RngHandle(1)) is None


def test_trace_matches_exactly_the_signer(toy_group, trapdoors):
    for ident, trapdoor in trapdoors.items():
        for entry in toy_group.signed:
            assert trace(toy_group.gpk, trapdoor, entry.signature) == (entry.signer == ident)


def test_claim_proves_authorship(toy_group, first_claim):
    entry = toy_group.signed[0]
    assert first_claim is not None
    assert claim_verify(toy_group.gpk, entry.message, entry.signature, first_claim)
    assert not claim_verify(toy_group.gpk, b"other", entry.signature, first_claim)
    other = toy_group.signed[1]
    assert not claim_verify(toy_group.gpk, other.message, other.signature, first_claim)
    restored = ClaimProof.from_artifact(first_claim.to_artifact())
    assert claim_verify(toy_group.gpk, entry.message, entry.signature, restored)


def test_non_signer_cannot_claim(toy_group):
    entry = toy_group.signed[0]
    outsider = toy_group.members[2]
    assert claim(toy_group.gpk, outsider.usk, outsider.cert, entry.message, entry.signature, RngHandle(1)) is None


def test_mismatched_credential_cannot_sign(toy_group):
    one, two = toy_group.members[1], toy_group.members[2]
    with pytest.raises(WitnessError):
        sign(toy_group.gpk, one.usk, two.cert, b"m", RngHandle(1))


def test_artifacts_round_trip_and_still_verify(toy_group):
    entry = toy_group.signed[2]
    gpk = GroupPublicKey.from_artifact(toy_group.gpk.to_artifact())
    assert gpk.to_bytes() == toy_group.gpk.to_bytes()
    sig = GroupSignature.from_artifact(entry.signature.to_artifact())
    assert verify(gpk, entry.message, sig)
    osk = OpeningKey.from_artifact(toy_group.osk.to_artifact())
    assert open_signature(gpk, osk, entry.message, sig) == entry.signer
    member = toy_group.members[entry.signer]
    assert UserSecret.from_artifact(member.usk.to_artifact()).z == member.usk.z
    cert = Certificate.from_artifact(member.cert.to_artifact())
    assert (cert.ident, cert.y, cert.v1, cert.v2) == (member.cert.ident, member.cert.y, member.cert.v1,
                                                      member.cert.v2)
    trapdoor = TracingTrapdoor(gpk.F.matvec(member.usk.z))
    assert TracingTrapdoor.from_artifact(trapdoor.to_artifact()).x == trapdoor.x


def test_tampered_signatures_never_verify(toy_group):
    entry = toy_group.signed[0]
    data = entry.signature.to_bytes()
    rng = np.random.default_rng(5)
    for position in rng.choice(len(data), size=40, replace=False):
        damaged = bytearray(data)
        damaged[position] ^= 1 << int(rng.integers(0, 8))
        try:
            sig = GroupSignature.from_bytes(bytes(damaged))
        except (TraceSigError, ValueError):
            continue
        assert not verify(toy_group.gpk, entry.message, sig)


def test_join_rejects_a_replayed_request(toy_group):
    t = toy_group.registry.find(1)
    partial = Registry(toy_group.pp.N, [t])
    with pytest.raises(JoinRejectedError):
        join_gm_process(toy_group.gpk, toy_group.gsk, partial, JoinRequest(t.ybits, t.user_vk, t.user_sig),
                        RngHandle(1))


def test_join_rejects_a_forged_user_signature(toy_group):
    rng = RngHandle(71)
    request, _ = join_user_request(toy_group.gpk, usersig_keygen(rng), rng)
    forged = JoinRequest(request.ybits, usersig_keygen(RngHandle(72)).vk, request.user_sig)
    with pytest.raises(JoinRejectedError):
        join_gm_process(toy_group.gpk, toy_group.gsk, Registry(toy_group.pp.N), forged, rng)


def test_full_group_refuses_new_members(toy_group):
    rng = RngHandle(73)
    request, _ = join_user_request(toy_group.gpk, usersig_keygen(rng), rng)
    with pytest.raises(CapacityError):
        join_gm_process(toy_group.gpk, toy_group.gsk, toy_group.registry, request, rng)


def test_user_refuses_a_certificate_for_someone_else(toy_group):
    rng = RngHandle(74)
    _, pending = join_user_request(toy_group.gpk, usersig_keygen(rng), rng)
    cert = toy_group.registry.find(1).cert
    with pytest.raises(JoinRejectedError):
        join_user_finalize(toy_group.gpk, pending, JoinResponse(cert))


def test_size_report(toy_group):
    pp = toy_group.pp
    report = size_report(pp, toy_group.gpk)
    assert report["gpk_bytes"] == len(toy_group.gpk.to_bytes())
    assert report["sign_statement"]["variables"] == pp.n_sign
    assert report["claim_statement"]["triples"] == pp.ell_claim
    assert report["sign_hash_bytes"] > report["sign_response_bytes"]
    assert "gpk_bytes" not in size_report(pp)
