import pytest

from tracesig.core.lattice import BitVector, IntVector
from tracesig.errors import CapacityError, IntegrityError, JoinRejectedError
from tracesig.scheme.registry import Registry, Transcript
from tracesig.scheme.signatures import TagSignature


def transcript(ident, bits):
    return Transcript(ident, BitVector(bits), b"vk%d" % ident, b"sig", TagSignature(ident, IntVector([1, -1]),
                                                                                   IntVector([0, 2])))


def test_counter_and_lookup():
    registry = Registry(3)
    assert (registry.counter, registry.next_id, registry.full) == (0, 1, False)
    registry.append(transcript(1, [0, 1]))
    registry.append(transcript(2, [1, 1]))
    assert (registry.counter, registry.next_id) == (2, 3)
    assert registry.find(2).user_vk == b"vk2"
    assert registry.find(0) is None and registry.find(3) is None
    assert [entry.ident for entry in registry] == [1, 2]


def test_admission_rules():
    registry = Registry(2, [transcript(1, [0, 1])])
    with pytest.raises(JoinRejectedError):
        registry.append(transcript(3, [1, 0]))
    with pytest.raises(JoinRejectedError, match="already registered"):
        registry.append(transcript(2, [0, 1]))
    registry.append(transcript(2, [1, 0]))
    assert registry.full
    with pytest.raises(CapacityError):
        registry.check_admissible(BitVector([1, 1]))
    with pytest.raises(CapacityError):
        registry.check_admissible(BitVector([0, 1]))


def test_artifact_round_trip_revalidates_entries():
    registry = Registry(3, [transcript(1, [0, 1]), transcript(2, [1, 1])])
    restored = Registry.from_artifact(registry.to_artifact())
    assert restored.capacity == 3
    assert [(e.ident, e.ybits, e.user_vk) for e in restored] == [(e.ident, e.ybits, e.user_vk) for e in registry]
    assert restored.find(2).cert.v2 == IntVector([0, 2])
    damaged = bytearray(registry.to_artifact())
    damaged[-1] ^= 1
    with pytest.raises(IntegrityError):
        Registry.from_artifact(bytes(damaged))
