import os

import pytest

from tracesig.core.samplers import RngHandle
from tracesig.errors import UsageError
from tracesig.scheme.hashsig import usersig_keygen
from tracesig.scheme.traceable import join_user_request
from tracesig.storage.keystore import Keystore


@pytest.fixture
def keystore(tmp_path):
    return Keystore(str(tmp_path / "store"))


def test_group_round_trip(keystore, toy_group):
    keystore.save_group(toy_group.gpk, toy_group.gsk, toy_group.osk, toy_group.registry)
    assert keystore.load_params() == toy_group.pp
    assert keystore.load_gpk().to_bytes() == toy_group.gpk.to_bytes()
    assert keystore.load_gsk().trapdoor == toy_group.gsk.trapdoor
    assert keystore.load_osk().trapdoor == toy_group.osk.trapdoor
    assert keystore.load_registry().counter == toy_group.registry.counter
    with pytest.raises(UsageError):
        keystore.save_group(toy_group.gpk, toy_group.gsk, toy_group.osk, toy_group.registry)
    files = {row["file"]: row for row in keystore.inventory()}
    assert set(files) == {"params.bin", "gpk.bin", "gsk.bin", "osk.bin", "registry.bin"}
    assert files["gpk.bin"]["magic"] == "TGPK"
    assert files["registry.bin"]["role"] == "registry"


def test_missing_files_are_reported(keystore):
    with pytest.raises(FileNotFoundError):
        keystore.load_gpk()
    assert keystore.inventory() == []
    assert keystore.list_members() == []


def test_pending_join_lifecycle(keystore, toy_group):
    rng = RngHandle(95)
    user_keys = usersig_keygen(rng, height=1)
    _, pending = join_user_request(toy_group.gpk, user_keys, rng)
    keystore.save_pending("alice", pending, user_keys)
    loaded, keys = keystore.load_pending("alice")
    assert loaded.y == pending.y and loaded.z == pending.z
    assert keys.sk.next_index == 1
    keystore.remove_pending("alice")
    assert not keystore.exists("pending", "alice")
    with pytest.raises(FileNotFoundError):
        keystore.load_pending("alice")
    with pytest.raises(UsageError):
        keystore.save_pending("../escape", pending, user_keys)


def test_members(keystore, toy_group):
    member = toy_group.members[2]
    keystore.save_member(2, member.usk, member.cert, usersig_keygen(RngHandle(96), height=1))
    usk, cert = keystore.load_member(2)
    assert usk.z == member.usk.z
    assert cert.ident == 2
    assert keystore.list_members() == [2]
    assert os.path.exists(keystore.path("members", "2", "cert.json"))
    with pytest.raises(UsageError):
        keystore.load_member(7)
