"""
Random oracles.
SHAKE-256 instantiations of H_GPV, H_LWE and the two Unruh oracles for signing and
claiming. Every input is prefixed by the ASCII tag and an 8-byte length.
"""

import hashlib
import struct
from enum import Enum
from typing import List, NamedTuple

import numpy as np

from .lattice import ZqMatrix, ZqVector, digit_count

XOF_NAME = "shake_256"
DOMAIN = b"tracesig/v1/"


class OracleTag(str, Enum):
    GPV = "GPV"
    LWE = "LWE"
    SIGN1 = "SIGN1"
    SIGN2 = "SIGN2"
    CLAIM1 = "CLAIM1"
    CLAIM2 = "CLAIM2"


class OraclePair(NamedTuple):
    """The (H1, H2) pair used by one Unruh instance."""

    challenge: OracleTag
    response: OracleTag


SIGN_ORACLES = OraclePair(OracleTag.SIGN1, OracleTag.SIGN2)
CLAIM_ORACLES = OraclePair(OracleTag.CLAIM1, OracleTag.CLAIM2)


def _tag_bytes(tag) -> bytes:
    value = tag.value if isinstance(tag, OracleTag) else str(tag)
    return value.encode("ascii")


def xof(tag, data: bytes, length: int) -> bytes:
    """Domain-separated extendable output."""
    label = _tag_bytes(tag)
    prefix = DOMAIN + struct.pack("<Q", len(label)) + label + struct.pack("<Q", len(data))
    return hashlib.shake_256(prefix + data).digest(int(length))


def _chunk_bytes(modulus: int) -> int:
    return (2 * digit_count(modulus) + 7) // 8


def _reduce_chunks(stream: bytes, count: int, modulus: int) -> np.ndarray:
    width = _chunk_bytes(modulus)
    if width <= 7:
        raw = np.frombuffer(stream, dtype=np.uint8).reshape(count, width)
        padded = np.zeros((count, 8), dtype=np.uint8)
        padded[:, :width] = raw
        return np.mod(padded.view("<u8").reshape(-1).astype(np.int64), modulus)
    return np.array([int.from_bytes(stream[i * width:(i + 1) * width], "little") % modulus
                     for i in range(count)], dtype=np.int64)


def ro_zq_vector(tag, data: bytes, dim: int, modulus: int) -> ZqVector:
    """dim entries of Z_q, each from a 2⌈log q⌉-bit chunk reduced mod q."""
    stream = xof(tag, data, dim * _chunk_bytes(modulus))
    return ZqVector(_reduce_chunks(stream, dim, modulus), modulus)


def ro_zq_matrix(tag, data: bytes, rows: int, cols: int, modulus: int) -> ZqMatrix:
    """rows × cols matrix over Z_q, filled row-major."""
    count = rows * cols
    stream = xof(tag, data, count * _chunk_bytes(modulus))
    return ZqMatrix(_reduce_chunks(stream, count, modulus).reshape(rows, cols), modulus)


def ro_challenge_indices(tag, data: bytes, kappa: int) -> List[int]:
    """κ indices in {1, 2, 3, 4}, two bits each."""
    stream = np.frombuffer(xof(tag, data, (kappa + 3) // 4), dtype=np.uint8)
    pairs = np.stack([(stream >> shift) & 3 for shift in (0, 2, 4, 6)], axis=1).reshape(-1)
    return [int(v) + 1 for v in pairs[:kappa]]


def ro_response_hash(tag, response: bytes) -> bytes:
    """Length-preserving hash of an encoded response."""
    return xof(tag, response, len(response))
