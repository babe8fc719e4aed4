"""
Hash-based signatures.
Winternitz one-time signatures (w = 16, SHA3-256 chains, checksum) used for the
per-signature OTS key, and a Merkle tree of them for the member's join signature.
"""

import hashlib
import hmac
import logging
import struct
from dataclasses import dataclass, field
from typing import List, Optional

from ..core.encoding import ArtifactMixin, Decoder, Encoder
from ..core.samplers import RngHandle
from ..errors import EncodingError, UsageError

logger = logging.getLogger(__name__)

OTS_SCHEME_ID = "wots-sha3-256-w16"
HASH_BYTES = 32
WINTERNITZ_W = 16
MESSAGE_DIGITS = 64
CHECKSUM_DIGITS = 3
CHAIN_COUNT = MESSAGE_DIGITS + CHECKSUM_DIGITS
DEFAULT_TREE_HEIGHT = 4


def _chain_step(tag: bytes, chain: int, step: int, value: bytes) -> bytes:
    return hashlib.sha3_256(b"tracesig/wots/chain" + tag + struct.pack("<HH", chain, step) + value).digest()


def _chain(tag: bytes, chain: int, start: int, steps: int, value: bytes) -> bytes:
    for step in range(start, start + steps):
        value = _chain_step(tag, chain, step, value)
    return value


def _digits(tag: bytes, message: bytes) -> List[int]:
    """64 base-16 digits of H(message) followed by 3 checksum digits."""
    digest = hashlib.sha3_256(b"tracesig/wots/msg" + tag + message).digest()
    digits = []
    for byte in digest:
        digits.extend((byte >> 4, byte & 0x0F))
    checksum = sum(WINTERNITZ_W - 1 - d for d in digits)
    digits.extend((checksum >> shift) & 0x0F for shift in (8, 4, 0))
    return digits


def _secret_chains(seed: bytes) -> List[bytes]:
    stream = hashlib.shake_256(b"tracesig/wots/sk" + seed).digest(CHAIN_COUNT * HASH_BYTES)
    return [stream[i * HASH_BYTES:(i + 1) * HASH_BYTES] for i in range(CHAIN_COUNT)]


def _public_from_ends(ends: List[bytes]) -> bytes:
    return hashlib.sha3_256(b"tracesig/wots/pk" + b"".join(ends)).digest()


def _wots_public(seed: bytes, tag: bytes) -> bytes:
    return _public_from_ends([_chain(tag, i, 0, WINTERNITZ_W - 1, sk)
                              for i, sk in enumerate(_secret_chains(seed))])


def _wots_sign(seed: bytes, tag: bytes, message: bytes) -> bytes:
    return b"".join(_chain(tag, i, 0, d, sk)
                    for i, (sk, d) in enumerate(zip(_secret_chains(seed), _digits(tag, message))))


def _wots_recover(tag: bytes, message: bytes, signature: bytes) -> Optional[bytes]:
    if len(signature) != CHAIN_COUNT * HASH_BYTES:
        return None
    ends = []
    for i, d in enumerate(_digits(tag, message)):
        block = signature[i * HASH_BYTES:(i + 1) * HASH_BYTES]
        ends.append(_chain(tag, i, d, WINTERNITZ_W - 1 - d, block))
    return _public_from_ends(ends)


@dataclass(eq=False)
class OtsSecretKey:
    seed: bytes
    consumed: bool = False


@dataclass(eq=False)
class OtsKeypair:
    vk: bytes
    sk: OtsSecretKey


def ots_keygen(rng: RngHandle) -> OtsKeypair:
    seed = rng.bytes(HASH_BYTES)
    return OtsKeypair(_wots_public(seed, b""), OtsSecretKey(seed))


def ots_sign(sk: OtsSecretKey, message: bytes) -> bytes:
    """
    Sign once.

    Raises:
        UsageError: If the key already signed.
    """
    if sk.consumed:
        raise UsageError("one-time key already used")
    sk.consumed = True
    return _wots_sign(sk.seed, b"", message)


def ots_verify(vk: bytes, message: bytes, signature: bytes) -> bool:
    recovered = _wots_recover(b"", message, bytes(signature))
    return recovered is not None and hmac.compare_digest(recovered, vk)


def _leaf_tag(index: int) -> bytes:
    return struct.pack("<I", index)


def _leaf_seed(seed: bytes, index: int) -> bytes:
    return hashlib.sha3_256(b"tracesig/usersig/leaf" + seed + _leaf_tag(index)).digest()


def _node(left: bytes, right: bytes) -> bytes:
    return hashlib.sha3_256(b"tracesig/usersig/node" + left + right).digest()


def _leaf_hash(index: int, public: bytes) -> bytes:
    return hashlib.sha3_256(b"tracesig/usersig/leafpk" + _leaf_tag(index) + public).digest()


def _tree_levels(seed: bytes, height: int) -> List[List[bytes]]:
    level = [_leaf_hash(i, _wots_public(_leaf_seed(seed, i), _leaf_tag(i))) for i in range(1 << height)]
    levels = [level]
    while len(level) > 1:
        level = [_node(level[i], level[i + 1]) for i in range(0, len(level), 2)]
        levels.append(level)
    return levels


@dataclass(eq=False)
class UserSigSecret:
    """Merkle-tree signing state; next_index advances on every signature."""

    seed: bytes
    height: int
    next_index: int = 0
    _levels: Optional[List[List[bytes]]] = field(default=None, repr=False)

    def levels(self) -> List[List[bytes]]:
        if self._levels is None:
            self._levels = _tree_levels(self.seed, self.height)
        return self._levels


@dataclass(eq=False)
class UserSigKeypair(ArtifactMixin):
    vk: bytes
    sk: UserSigSecret

    MAGIC = b"TUSG"

    def to_bytes(self) -> bytes:
        return (Encoder().raw(self.vk).raw(self.sk.seed).u8(self.sk.height).u32(self.sk.next_index)
                .getvalue())

    @classmethod
    def from_bytes(cls, data: bytes) -> "UserSigKeypair":
        dec = Decoder(data)
        vk, seed, height, index = dec.raw(), dec.raw(), dec.u8(), dec.u32()
        dec.done()
        if not 1 <= height <= 16:
            raise EncodingError(f"invalid tree height {height}")
        return cls(vk, UserSigSecret(seed, height, index))


def usersig_keygen(rng: RngHandle, height: int = DEFAULT_TREE_HEIGHT) -> UserSigKeypair:
    """Many-time key for 2^height signatures."""
    sk = UserSigSecret(rng.bytes(HASH_BYTES), height)
    return UserSigKeypair(sk.levels()[-1][0], sk)


def usersig_sign(sk: UserSigSecret, message: bytes) -> bytes:
    """
    Sign with the next unused leaf: index ‖ WOTS signature ‖ authentication path.

    Raises:
        UsageError: If every leaf has been used.
    """
    index = sk.next_index
    if index >= 1 << sk.height:
        raise UsageError(f"user signing key exhausted after {1 << sk.height} signatures")
    sk.next_index += 1
    levels = sk.levels()
    path = [levels[depth][(index >> depth) ^ 1] for depth in range(sk.height)]
    signature = _wots_sign(_leaf_seed(sk.seed, index), _leaf_tag(index), message)
    logger.debug("User signature with leaf %d", index)
    return struct.pack("<I", index) + signature + b"".join(path)


def usersig_verify(vk: bytes, message: bytes, signature: bytes, height: int = DEFAULT_TREE_HEIGHT) -> bool:
    signature = bytes(signature)
    expected = 4 + CHAIN_COUNT * HASH_BYTES + height * HASH_BYTES
    if len(signature) != expected:
        return False
    (index,) = struct.unpack("<I", signature[:4])
    if index >= 1 << height:
        return False
    body = signature[4:4 + CHAIN_COUNT * HASH_BYTES]
    public = _wots_recover(_leaf_tag(index), message, body)
    if public is None:
        return False
    node = _leaf_hash(index, public)
    path = signature[4 + CHAIN_COUNT * HASH_BYTES:]
    for depth in range(height):
        sibling = path[depth * HASH_BYTES:(depth + 1) * HASH_BYTES]
        node = _node(sibling, node) if (index >> depth) & 1 else _node(node, sibling)
    return hmac.compare_digest(node, vk)
