"""
Desk-scale acceptance runs: five members, fifty signatures, the full tamper sweep.
Run with `pytest -m slow`.
"""

import itertools

import numpy as np
import pytest

from tracesig.core.lattice import BitVector, ZqMatrix, ZqVector
from tracesig.core.params import preset, validate_params
from tracesig.core.samplers import RngHandle
from tracesig.errors import TraceSigError
from tracesig.scheme.gpv_ibe import ibe_decrypt, ibe_encrypt, ibe_extract
from tracesig.scheme.harness import HonestHarness
from tracesig.scheme.signatures import TagSigKeypair, tagsig_sign, tagsig_verify
from tracesig.scheme.traceable import GroupSignature, prepare_sign, trace, verify
from tracesig.zk.quadratic import sigma_commit, sigma_extract, sigma_respond, witness_check
from tracesig.zk.relations import SIGN_KIND, assemble_witness, lift_and_binarize

pytestmark = pytest.mark.slow

MEMBERS = 5
SIGNATURES = 50


@pytest.fixture(scope="module")
def desk():
    pp = preset("desk")
    harness = HonestHarness(pp, RngHandle(2025))
    for _ in range(MEMBERS):
        harness.add_member()
    for index in range(SIGNATURES):
        signer = index % MEMBERS + 1
        harness.sign(signer, f"desk message {index} from {signer}".encode())
    for ident in range(1, MEMBERS + 1):
        harness.reveal(ident)
    return harness


def test_desk_parameters_validate():
    pp = preset("desk")
    report = validate_params(pp)
    assert report.passed, report.format()
    assert "[PASS] q prime" in report.format()
    assert (pp.N, pp.kappa) == (7, 8)


def test_certificate_signatures_are_exact(desk):
    pp = desk.pp
    keypair = TagSigKeypair(desk.gpk.tagsig, desk.gsk.trapdoor)
    rng = RngHandle(1)
    for trial in range(20):
        bits = BitVector(rng.bits(pp.ybits_len))
        ident = trial % pp.N + 1
        assert tagsig_verify(pp, keypair.vk, tagsig_sign(pp, keypair, ident, bits, rng), bits)


def test_sign_open_trace_and_claim_correctness(desk):
    for index, entry in enumerate(desk.signed):
        assert verify(desk.gpk, entry.message, entry.signature)
        assert desk.open(index) == entry.signer
        assert trace(desk.gpk, desk.members[entry.signer].trapdoor, entry.signature)
        desk.claim(index)
    assert all(desk.check().values())


def test_cross_trace_rejects_every_other_member(desk):
    for owner, signer in itertools.permutations(range(1, MEMBERS + 1), 2):
        signature = next(s.signature for s in desk.signed if s.signer == signer)
        assert not trace(desk.gpk, desk.members[owner].trapdoor, signature)


def test_reveal_recovers_every_planted_secret(desk):
    for member in desk.members.values():
        assert member.trapdoor.x == desk.gpk.F.matvec(member.usk.z)


def test_single_byte_corruptions_never_verify(desk):
    entry = desk.signed[0]
    data = entry.signature.to_bytes()
    rng = np.random.default_rng(6)
    for _ in range(1000):
        damaged = bytearray(data)
        position = int(rng.integers(0, len(data)))
        damaged[position] = (damaged[position] + int(rng.integers(1, 256))) % 256
        try:
            signature = GroupSignature.from_bytes(bytes(damaged))
        except (TraceSigError, ValueError):
            continue
        assert not verify(desk.gpk, entry.message, signature)


def test_extraction_on_one_hundred_small_statements(make_crs):
    rng = RngHandle(3)
    for _ in range(100):
        A = ZqMatrix(rng.uniform_zq((3, 8), 17), 17)
        x = rng.integers(-1, 2, size=8)
        compiled = lift_and_binarize(A, A.matvec(ZqVector.from_signed(x, 17)), 1, 1_000_003)
        stmt = compiled.statement
        assert stmt.n_vars <= 64
        crs = make_crs(stmt)
        com, state = sigma_commit(crs, stmt, assemble_witness(compiled, {"x": x}), rng)
        transcripts = []
        for challenge in (-1, 0, 2):
            rsp = None
            while rsp is None:
                rsp = sigma_respond(state, challenge, rng)
            transcripts.append((challenge, rsp))
        extracted = sigma_extract(crs, stmt, com, transcripts)
        assert extracted is not None and witness_check(stmt, extracted)


def test_abort_rate_at_desk_width(desk):
    entry = desk.signed[0]
    member = desk.members[entry.signer]
    crs = desk.gpk.crs(SIGN_KIND)
    rng = RngHandle(4)
    instance = prepare_sign(desk.gpk, member.usk, member.cert, rng)
    _, state = sigma_commit(crs, instance.compiled.statement, instance.witness, rng)
    trials = 10_000
    aborts = sum(sigma_respond(state, 1, rng) is None for _ in range(trials))
    assert abs(aborts / trials - (1 - 1 / crs.M_rej)) < 0.05


def test_gpv_round_trip_for_every_id(desk):
    pp = desk.pp
    rng = RngHandle(5)
    for trial in range(100):
        vk = rng.bytes(32)
        key = ibe_extract(desk.gpk.B, desk.osk, vk, pp.sigma_gpv)
        for ident in range(pp.N + 1):
            assert ibe_decrypt(ibe_encrypt(pp, desk.gpk.B, vk, ident, rng), key, pp.N) == ident
