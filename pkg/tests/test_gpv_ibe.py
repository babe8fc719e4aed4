import pytest

from tracesig.core.samplers import RngHandle
from tracesig.errors import RangeError
from tracesig.scheme.gpv_ibe import (IbeCiphertext, OpeningKey, decryption_noise, ibe_decrypt, ibe_encrypt,
                                     ibe_extract, ibe_identity)


@pytest.fixture(scope="module")
def ibe(toy_group):
    return toy_group.pp, toy_group.gpk.B, toy_group.osk


def test_every_plaintext_decrypts(ibe):
    pp, B, osk = ibe
    rng = RngHandle(41)
    for trial in range(5):
        vk = rng.bytes(32)
        key = ibe_extract(B, osk, vk, pp.sigma_gpv)
        for ident in range(pp.N + 1):
            c = ibe_encrypt(pp, B, vk, ident, rng)
            assert len(c) == pp.m_B + 1
            assert ibe_decrypt(c, key, pp.N) == ident
            assert abs(decryption_noise(c, key, ident, pp.ibe_scale)) < pp.q_prime / (4 * (pp.N + 1))


def test_extracted_key_solves_the_identity(ibe):
    pp, B, osk = ibe
    vk = b"identity under test"
    key = ibe_extract(B, osk, vk, pp.sigma_gpv)
    assert B.matvec(key.e_vk) == ibe_identity(vk, pp.n, pp.q_prime)


def test_extraction_is_deterministic_across_reloads(ibe):
    pp, B, osk = ibe
    vk = b"stable identity"
    first = ibe_extract(B, osk, vk, pp.sigma_gpv)
    reloaded = OpeningKey.from_artifact(osk.to_artifact())
    second = ibe_extract(B, reloaded, vk, pp.sigma_gpv)
    assert second is not first
    assert second.e_vk == first.e_vk


def test_plaintext_outside_the_id_range_is_refused(ibe):
    pp, B, _ = ibe
    with pytest.raises(RangeError):
        ibe_encrypt(pp, B, b"vk", pp.N + 1, RngHandle(1))
    with pytest.raises(RangeError):
        ibe_encrypt(pp, B, b"vk", -1, RngHandle(1))


def test_ciphertext_of_the_wrong_length_does_not_decrypt(ibe):
    pp, B, osk = ibe
    key = ibe_extract(B, osk, b"vk", pp.sigma_gpv)
    c = ibe_encrypt(pp, B, b"vk", 1, RngHandle(2))
    assert ibe_decrypt(IbeCiphertext(c.c[:-1]), key, pp.N) is None
