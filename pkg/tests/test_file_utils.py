import os

import pytest

from tracesig.core.samplers import RngHandle
from tracesig.errors import IntegrityError
from tracesig.scheme.hashsig import UserSigKeypair, usersig_keygen
from tracesig.utils.file_utils import (atomic_write_json_file, describe_artifact_file, find_first_existing_file,
                                       list_files_with_extension, read_artifact_file, read_json_file,
                                       safe_delete_file, sidecar_path, write_artifact_file)


@pytest.fixture
def user_keys():
    return usersig_keygen(RngHandle(91), height=1)


def test_artifact_file_and_sidecar(tmp_path, user_keys):
    path = str(tmp_path / "keys.bin")
    write_artifact_file(path, user_keys, "user signing key", {"id": 4})
    meta = read_json_file(sidecar_path(path))
    assert meta["role"] == "user signing key"
    assert meta["magic"] == "TUSG"
    assert meta["bytes"] == os.path.getsize(path)
    assert meta["id"] == 4
    assert read_artifact_file(path, UserSigKeypair).vk == user_keys.vk
    assert describe_artifact_file(path) == {"magic": "TUSG", "version": 1,
                                            "payload_bytes": len(user_keys.to_bytes())}


def test_damaged_artifact_names_its_path(tmp_path, user_keys):
    path = tmp_path / "keys.bin"
    write_artifact_file(str(path), user_keys, "user signing key")
    data = bytearray(path.read_bytes())
    data[-1] ^= 0xFF
    path.write_bytes(bytes(data))
    with pytest.raises(IntegrityError, match="keys.bin"):
        read_artifact_file(str(path), UserSigKeypair)


def test_json_helpers(tmp_path):
    path = str(tmp_path / "a" / "data.json")
    assert read_json_file(path, {"fallback": True}) == {"fallback": True}
    assert atomic_write_json_file(path, {"b": 1, "a": [1, 2]})
    assert read_json_file(path) == {"a": [1, 2], "b": 1}
    with open(path, "w") as f:
        f.write("{broken")
    assert read_json_file(path) == {}
    assert not atomic_write_json_file(path, {"bad": object()})


def test_listing_finding_and_deleting(tmp_path, user_keys):
    first = str(tmp_path / "b.bin")
    second = str(tmp_path / "a.bin")
    write_artifact_file(first, user_keys, "one")
    write_artifact_file(second, user_keys, "two")
    assert list_files_with_extension(str(tmp_path), "bin") == [second, first]
    assert list_files_with_extension(str(tmp_path / "missing"), ".bin") == []
    assert find_first_existing_file([str(tmp_path / "nope"), first]) == first
    assert find_first_existing_file([str(tmp_path / "nope")], "default") == "default"
    assert safe_delete_file(first)
    assert not os.path.exists(first) and not os.path.exists(sidecar_path(first))
    assert safe_delete_file(first)
