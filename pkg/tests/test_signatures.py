import numpy as np
import pytest

from tracesig.core.lattice import BitVector, inf_norm
from tracesig.core.samplers import RngHandle
from tracesig.errors import RangeError
from tracesig.scheme.signatures import TagSignature, TagSigKeypair, tagsig_sign, tagsig_verify


@pytest.fixture(scope="module")
def signed(toy_group):
    pp = toy_group.pp
    keypair = TagSigKeypair(toy_group.gpk.tagsig, toy_group.gsk.trapdoor)
    rng = RngHandle(51)
    bits = BitVector(rng.bits(pp.ybits_len))
    return pp, keypair, bits, tagsig_sign(pp, keypair, 2, bits, rng)


def test_signature_satisfies_the_tagged_equation(signed):
    pp, keypair, bits, sig = signed
    assert tagsig_verify(pp, keypair.vk, sig, bits)
    assert inf_norm(sig.v1) <= pp.beta_1 and inf_norm(sig.v2) <= pp.beta_2
    lhs = keypair.vk.tagged_matrix(2).matvec(np.concatenate([sig.v1.entries, sig.v2.entries]))
    assert lhs == keypair.vk.u + keypair.vk.D.matvec(bits)


def test_signature_is_bound_to_its_tag_and_message(signed):
    pp, keypair, bits, sig = signed
    assert not tagsig_verify(pp, keypair.vk, TagSignature(3, sig.v1, sig.v2), bits)
    flipped = bits.entries.copy()
    flipped[0] ^= 1
    assert not tagsig_verify(pp, keypair.vk, sig, BitVector(flipped))
    assert not tagsig_verify(pp, keypair.vk, sig, BitVector(bits.entries[:-1]))


@pytest.mark.parametrize("ident", [0, 4])
def test_tags_outside_one_to_n_are_refused(signed, ident):
    pp, keypair, bits, _ = signed
    with pytest.raises(RangeError):
        tagsig_sign(pp, keypair, ident, bits, RngHandle(1))
