import json

import pytest

from tracesig.main import TraceSig
from tracesig.scheme.traceable import GroupSignature
from tracesig.utils.file_utils import read_artifact_file, read_json_file, sidecar_path


def make_app(path, seed=42, config=None):
    config_path = path / "config.json"
    if config is not None:
        config_path.write_text(json.dumps(config))
    return TraceSig(keystore=str(path / "store"), config_path=str(config_path), seed=seed)


@pytest.fixture(scope="module")
def group(tmp_path_factory):
    """A toy group with one member (id 1) whose signature on b"hello group" is sig.bin."""
    root = tmp_path_factory.mktemp("facade")
    app = make_app(root)
    assert app.setup(preset_name="toy")[0]
    assert app.keygen()[0]
    assert app.join_request("alice", str(root / "req.bin"))[0]
    ok, _, ident = app.join_approve(str(root / "req.bin"), str(root / "resp.bin"))
    assert (ok, ident) == (True, 1)
    ok, _, ident = app.join_finish("alice", str(root / "resp.bin"))
    assert (ok, ident) == (True, 1)
    assert app.sign(1, b"hello group", str(root / "sig.bin"))[0]
    return app, root


def test_setup_applies_config_overrides(tmp_path):
    app = make_app(tmp_path, config={"params": {"kappa": 6}})
    ok, _, pp = app.setup(preset_name="toy")
    assert ok
    assert (pp.kappa, pp.N) == (6, 3)
    assert app.keystore.load_params() == pp


def test_invalid_group_size_fails_cleanly(tmp_path):
    ok, message, payload = make_app(tmp_path).setup(preset_name="toy", group_size=4)
    assert not ok
    assert "2^ell - 1" in message
    assert payload is None


def test_seeded_keygen_is_reproducible(tmp_path):
    first, second = make_app(tmp_path / "a"), make_app(tmp_path / "b")
    for app in (first, second):
        assert app.setup(preset_name="toy")[0]
        assert app.keygen()[0]
    assert first.keystore.load_gpk().to_bytes() == second.keystore.load_gpk().to_bytes()


def test_operations_without_keys_fail(tmp_path):
    ok, message, _ = make_app(tmp_path).keygen()
    assert not ok
    assert "keygen failed" in message


def test_signature_lifecycle(group):
    app, root = group
    sig = str(root / "sig.bin")
    assert app.verify(b"hello group", sig) == (True, "valid", True)
    assert app.verify(b"hello world", sig)[2] is False
    assert app.open(b"hello group", sig)[2] == 1
    audit = app.audit(b"hello group", sig)[2]
    assert (audit.ident, audit.registered) == (1, True)
    ok, _, trapdoor = app.reveal(1, str(root / "trd.bin"))
    assert ok and trapdoor is not None
    assert app.trace(str(root / "trd.bin"), sig)[2] is True
    assert app.claim(1, b"hello group", sig, str(root / "claim.bin"))[2] is not None
    assert app.claim_verify(b"hello group", sig, str(root / "claim.bin"))[2] is True


def test_second_approval_of_a_request_is_a_rejection(group):
    app, root = group
    ok, _, payload = app.join_approve(str(root / "req.bin"), str(root / "resp2.bin"))
    assert not ok
    assert payload == {"rejected": True}


def test_reveal_of_unknown_member(group):
    app, root = group
    assert app.reveal(3, str(root / "none.bin")) == (True, "no tracing trapdoor for id 3", None)


def test_report_lists_constraints_sizes_and_artifacts(group):
    app, _ = group
    ok, _, payload = app.report()
    assert ok
    assert payload["constraints"].passed
    assert "gpk_bytes" in payload["sizes"]
    assert {row["file"] for row in payload["artifacts"]} >= {"params.bin", "gpk.bin", "registry.bin"}


def test_demo_runs_the_whole_lifecycle(tmp_path):
    ok, message, steps = make_app(tmp_path).demo(members=2)
    assert ok, message
    assert sum(step.op == "reveal" for step in steps) == 2


def test_written_artifacts_carry_sidecar_fields(group):
    app, root = group
    assert read_json_file(sidecar_path(str(root / "req.bin")))["name"] == "alice"
    assert read_json_file(sidecar_path(str(root / "resp.bin")))["id"] == 1
    assert app.reveal(1, str(root / "trd_sidecar.bin"))[0]
    assert read_json_file(sidecar_path(str(root / "trd_sidecar.bin")))["role"] == "tracing trapdoor"


def test_seeded_signatures_use_fresh_one_time_material(group):
    app, root = group
    first = app.sign(1, b"hello group", str(root / "sig_again.bin"))[2]
    second = app.sign(1, b"second message", str(root / "sig_second.bin"))[2]
    original = read_artifact_file(str(root / "sig.bin"), GroupSignature)
    assert first.to_bytes() == original.to_bytes()
    assert second.vk != original.vk
    assert second.rho != original.rho
    assert second.t != original.t
    assert app.verify(b"second message", str(root / "sig_second.bin"))[2] is True
