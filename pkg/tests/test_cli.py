import pytest

from tracesig.cli.cli import EXIT_ERROR, EXIT_OK, EXIT_REJECTED, run


class Workspace:
    def __init__(self, root):
        self.root = root
        self.globals = ["--keystore", str(root / "store"), "--seed", "42", "--config", str(root / "absent.json")]

    def path(self, name):
        return str(self.root / name)

    def run(self, *argv):
        return run(self.globals + list(argv))


@pytest.fixture(scope="module")
def ws(tmp_path_factory):
    ws = Workspace(tmp_path_factory.mktemp("cli"))
    (ws.root / "msg.txt").write_bytes(b"meeting at noon")
    (ws.root / "other.txt").write_bytes(b"meeting at one")
    steps = [
        ("setup", "--preset", "toy"),
        ("keygen",),
        ("join-request", "--name", "alice", "--out", ws.path("req.bin")),
        ("join-approve", "--request", ws.path("req.bin"), "--out", ws.path("resp.bin")),
        ("join-finish", "--name", "alice", "--response", ws.path("resp.bin")),
        ("sign", "--as", "1", "--msg", ws.path("msg.txt"), "--out", ws.path("sig.bin")),
    ]
    for step in steps:
        assert ws.run(*step) == EXIT_OK, step
    return ws


def test_verify(ws, capsys):
    assert ws.run("verify", "--msg", ws.path("msg.txt"), "--sig", ws.path("sig.bin")) == EXIT_OK
    assert "valid=true" in capsys.readouterr().out
    assert ws.run("verify", "--msg", ws.path("other.txt"), "--sig", ws.path("sig.bin")) == EXIT_REJECTED
    assert "valid=false" in capsys.readouterr().out


def test_open_and_audit(ws, capsys):
    assert ws.run("open", "--msg", ws.path("msg.txt"), "--sig", ws.path("sig.bin")) == EXIT_OK
    assert "id=1" in capsys.readouterr().out
    assert ws.run("audit", "--msg", ws.path("msg.txt"), "--sig", ws.path("sig.bin")) == EXIT_OK
    assert "id=1 registered=true" in capsys.readouterr().out


def test_reveal_and_trace(ws, capsys):
    assert ws.run("reveal", "--id", "1", "--out", ws.path("trd.bin")) == EXIT_OK
    assert ws.run("trace", "--trapdoor", ws.path("trd.bin"), "--sig", ws.path("sig.bin")) == EXIT_OK
    assert "trace=match" in capsys.readouterr().out
    assert ws.run("reveal", "--id", "3", "--out", ws.path("none.bin")) == EXIT_REJECTED
    assert "trapdoor=none" in capsys.readouterr().out


def test_claim_and_claim_verify(ws, capsys):
    assert ws.run("claim", "--as", "1", "--msg", ws.path("msg.txt"), "--sig", ws.path("sig.bin"),
                  "--out", ws.path("claim.bin")) == EXIT_OK
    assert ws.run("claim-verify", "--msg", ws.path("msg.txt"), "--sig", ws.path("sig.bin"),
                  "--claim", ws.path("claim.bin")) == EXIT_OK
    assert "claim=valid" in capsys.readouterr().out


def test_report(ws, capsys):
    assert ws.run("report") == EXIT_OK
    out = capsys.readouterr().out
    assert "[PASS]" in out
    assert "artifact gpk.bin: TGPK" in out


def test_replayed_join_request_is_rejected(ws):
    assert ws.run("join-approve", "--request", ws.path("req.bin"), "--out", ws.path("resp2.bin")) == EXIT_REJECTED


def test_usage_and_io_errors(ws, tmp_path):
    assert ws.run("sign", "--as", "2", "--msg", ws.path("msg.txt"), "--out", ws.path("x.bin")) == EXIT_ERROR
    assert ws.run("keygen") == EXIT_ERROR
    assert ws.run("verify", "--msg", ws.path("msg.txt")) == EXIT_ERROR
    assert ws.run("verify", "--msg", ws.path("missing.txt"), "--sig", ws.path("sig.bin")) == EXIT_ERROR
    assert ws.run() == EXIT_ERROR
    damaged = tmp_path / "damaged.bin"
    data = bytearray((ws.root / "sig.bin").read_bytes())
    data[len(data) // 2] ^= 0x01
    damaged.write_bytes(bytes(data))
    assert ws.run("verify", "--msg", ws.path("msg.txt"), "--sig", str(damaged)) == EXIT_ERROR
