import pytest

from tracesig.core.samplers import RngHandle
from tracesig.errors import UsageError
from tracesig.scheme.hashsig import (CHAIN_COUNT, HASH_BYTES, UserSigKeypair, ots_keygen, ots_sign, ots_verify,
                                     usersig_keygen, usersig_sign, usersig_verify)


def test_one_time_signature_verifies_once():
    keys = ots_keygen(RngHandle(61))
    sig = ots_sign(keys.sk, b"body")
    assert len(sig) == CHAIN_COUNT * HASH_BYTES
    assert ots_verify(keys.vk, b"body", sig)
    assert not ots_verify(keys.vk, b"bodY", sig)
    assert not ots_verify(keys.vk, b"body", sig[:-1])
    assert not ots_verify(ots_keygen(RngHandle(62)).vk, b"body", sig)
    with pytest.raises(UsageError):
        ots_sign(keys.sk, b"second")


def test_every_chain_block_is_checked():
    keys = ots_keygen(RngHandle(63))
    sig = bytearray(ots_sign(keys.sk, b"m"))
    for block in range(0, CHAIN_COUNT, 11):
        damaged = bytearray(sig)
        damaged[block * HASH_BYTES] ^= 0x80
        assert not ots_verify(keys.vk, b"m", bytes(damaged))


def test_user_signatures_use_fresh_leaves():
    keys = usersig_keygen(RngHandle(64), height=2)
    first = usersig_sign(keys.sk, b"join 1")
    second = usersig_sign(keys.sk, b"join 2")
    assert first[:4] != second[:4]
    assert usersig_verify(keys.vk, b"join 1", first, height=2)
    assert usersig_verify(keys.vk, b"join 2", second, height=2)
    assert not usersig_verify(keys.vk, b"join 2", first, height=2)
    assert not usersig_verify(keys.vk, b"join 1", first, height=3)


def test_damaged_authentication_path_fails():
    keys = usersig_keygen(RngHandle(65), height=2)
    sig = bytearray(usersig_sign(keys.sk, b"msg"))
    sig[-1] ^= 1
    assert not usersig_verify(keys.vk, b"msg", bytes(sig), height=2)


def test_user_key_is_exhausted_after_every_leaf():
    keys = usersig_keygen(RngHandle(66), height=1)
    usersig_sign(keys.sk, b"a")
    usersig_sign(keys.sk, b"b")
    with pytest.raises(UsageError):
        usersig_sign(keys.sk, b"c")


def test_persisted_user_key_keeps_its_position():
    keys = usersig_keygen(RngHandle(67), height=2)
    usersig_sign(keys.sk, b"before save")
    restored = UserSigKeypair.from_artifact(keys.to_artifact())
    assert restored.vk == keys.vk
    assert restored.sk.next_index == 1
    sig = usersig_sign(restored.sk, b"after load")
    assert int.from_bytes(sig[:4], "little") == 1
    assert usersig_verify(keys.vk, b"after load", sig, height=2)
