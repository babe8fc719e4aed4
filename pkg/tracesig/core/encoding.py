"""
Canonical byte encoding.

Every object starts with a 1-byte type tag. Z_q objects carry their modulus
(8 bytes) and 4-byte little-endian dimensions, then ⌈⌈log2 q⌉/8⌉ bytes per
entry, row-major. Signed integer vectors carry an entry width byte and
two's-complement entries; bit vectors are packed little-endian.
Artifacts are framed as magic(4) ‖ version(1) ‖ payload ‖ SHA3-256.
"""

import hashlib
import struct
from typing import List, Tuple

import numpy as np

from ..errors import EncodingError, IntegrityError, TraceSigError
from .lattice import BitVector, IntVector, SparseZqMatrix, ZqMatrix, ZqVector, digit_count

TAG_ZQ_VECTOR = 0x01
TAG_ZQ_MATRIX = 0x02
TAG_INT_VECTOR = 0x03
TAG_BIT_VECTOR = 0x04
TAG_BYTES = 0x05
TAG_INT = 0x06
TAG_SPARSE = 0x07
TAG_INT_MATRIX = 0x08
TAG_TEXT = 0x09

FORMAT_VERSION = 1
DIGEST_SIZE = 32


def entry_width(modulus: int) -> int:
    """Bytes per Z_q entry."""
    return max(1, (digit_count(modulus) + 7) // 8)


def signed_width(values: np.ndarray) -> int:
    """Smallest two's-complement byte width holding every value."""
    if not values.size:
        return 1
    peak = int(max(int(values.max()), -int(values.min()) - 1, 0))
    return max(1, (peak.bit_length() + 8) // 8)


def _pack_unsigned(values: np.ndarray, width: int) -> bytes:
    raw = np.ascontiguousarray(values, dtype="<u8").view(np.uint8).reshape(-1, 8)
    return raw[:, :width].tobytes()


def _unpack_unsigned(data: bytes, count: int, width: int) -> np.ndarray:
    raw = np.frombuffer(data, dtype=np.uint8).reshape(count, width)
    padded = np.zeros((count, 8), dtype=np.uint8)
    padded[:, :width] = raw
    return padded.view("<u8").reshape(-1).astype(np.int64)


def _pack_signed(values: np.ndarray, width: int) -> bytes:
    raw = np.ascontiguousarray(values, dtype="<i8").view(np.uint8).reshape(-1, 8)
    return raw[:, :width].tobytes()


def _unpack_signed(data: bytes, count: int, width: int) -> np.ndarray:
    raw = np.frombuffer(data, dtype=np.uint8).reshape(count, width)
    fill = np.where(raw[:, -1:] >= 0x80, 0xFF, 0x00).astype(np.uint8) if count else np.zeros((0, 1), np.uint8)
    padded = np.repeat(fill, 8, axis=1) if count else np.zeros((0, 8), dtype=np.uint8)
    padded[:, :width] = raw
    return padded.view("<i8").reshape(-1).astype(np.int64)


class Encoder:
    """Append-only canonical writer."""

    def __init__(self):
        self._parts: List[bytes] = []

    def u8(self, value: int) -> "Encoder":
        self._parts.append(struct.pack("<B", value))
        return self

    def u32(self, value: int) -> "Encoder":
        self._parts.append(struct.pack("<I", value))
        return self

    def u64(self, value: int) -> "Encoder":
        self._parts.append(struct.pack("<Q", value))
        return self

    def i16(self, value: int) -> "Encoder":
        self._parts.append(struct.pack("<h", value))
        return self

    def f64(self, value: float) -> "Encoder":
        self._parts.append(struct.pack("<d", value))
        return self

    def integer(self, value: int) -> "Encoder":
        """Arbitrary signed integer: tag, 2-byte length, two's complement."""
        length = max(1, (int(value).bit_length() + 8) // 8)
        self._parts.append(struct.pack("<BH", TAG_INT, length))
        self._parts.append(int(value).to_bytes(length, "little", signed=True))
        return self

    def raw(self, data: bytes) -> "Encoder":
        self._parts.append(struct.pack("<BI", TAG_BYTES, len(data)))
        self._parts.append(bytes(data))
        return self

    def text(self, value: str) -> "Encoder":
        data = value.encode("utf-8")
        self._parts.append(struct.pack("<BI", TAG_TEXT, len(data)))
        self._parts.append(data)
        return self

    def fixed(self, data: bytes) -> "Encoder":
        """Bytes without any framing (the reader must know the length)."""
        self._parts.append(bytes(data))
        return self

    def zq_vector(self, vector: ZqVector) -> "Encoder":
        self._parts.append(struct.pack("<BQI", TAG_ZQ_VECTOR, vector.modulus, len(vector)))
        self._parts.append(_pack_unsigned(vector.entries, entry_width(vector.modulus)))
        return self

    def zq_matrix(self, matrix: ZqMatrix) -> "Encoder":
        rows, cols = matrix.shape
        self._parts.append(struct.pack("<BQII", TAG_ZQ_MATRIX, matrix.modulus, rows, cols))
        self._parts.append(_pack_unsigned(matrix.entries.reshape(-1), entry_width(matrix.modulus)))
        return self

    def sparse(self, matrix: SparseZqMatrix) -> "Encoder":
        rows, cols = matrix.shape
        self._parts.append(struct.pack("<BQIII", TAG_SPARSE, matrix.modulus, rows, cols, matrix.nnz))
        self._parts.append(_pack_unsigned(matrix.indptr, 4))
        self._parts.append(_pack_unsigned(matrix.indices, 4))
        self._parts.append(_pack_unsigned(matrix.data, entry_width(matrix.modulus)))
        return self

    def int_vector(self, vector: IntVector) -> "Encoder":
        width = signed_width(vector.entries)
        self._parts.append(struct.pack("<BIBQ", TAG_INT_VECTOR, len(vector), width, vector.bound))
        self._parts.append(_pack_signed(vector.entries, width))
        return self

    def int_array(self, values: np.ndarray) -> "Encoder":
        """Signed integer vector without a declared bound."""
        values = np.asarray(values, dtype=np.int64).reshape(-1)
        return self.int_vector(IntVector(values))

    def int_matrix(self, matrix: np.ndarray) -> "Encoder":
        matrix = np.asarray(matrix, dtype=np.int64)
        width = signed_width(matrix)
        self._parts.append(struct.pack("<BIIB", TAG_INT_MATRIX, matrix.shape[0], matrix.shape[1], width))
        self._parts.append(_pack_signed(matrix.reshape(-1), width))
        return self

    def bit_vector(self, vector: BitVector) -> "Encoder":
        self._parts.append(struct.pack("<BI", TAG_BIT_VECTOR, len(vector)))
        self._parts.append(np.packbits(vector.entries.astype(np.uint8), bitorder="little").tobytes())
        return self

    def getvalue(self) -> bytes:
        return b"".join(self._parts)


class Decoder:
    """Strict reader for Encoder output; any deviation raises EncodingError."""

    def __init__(self, data: bytes):
        self._data = memoryview(bytes(data))
        self._pos = 0

    def _take(self, size: int) -> bytes:
        if size < 0 or self._pos + size > len(self._data):
            raise EncodingError(f"truncated input: need {size} bytes at offset {self._pos}")
        chunk = self._data[self._pos:self._pos + size].tobytes()
        self._pos += size
        return chunk

    def _unpack(self, fmt: str):
        return struct.unpack(fmt, self._take(struct.calcsize(fmt)))

    def _expect_tag(self, tag: int) -> None:
        (found,) = self._unpack("<B")
        if found != tag:
            raise EncodingError(f"expected type tag {tag:#04x}, found {found:#04x}")

    def u8(self) -> int:
        return self._unpack("<B")[0]

    def u32(self) -> int:
        return self._unpack("<I")[0]

    def u64(self) -> int:
        return self._unpack("<Q")[0]

    def i16(self) -> int:
        return self._unpack("<h")[0]

    def f64(self) -> float:
        return self._unpack("<d")[0]

    def integer(self) -> int:
        self._expect_tag(TAG_INT)
        (length,) = self._unpack("<H")
        return int.from_bytes(self._take(length), "little", signed=True)

    def raw(self) -> bytes:
        self._expect_tag(TAG_BYTES)
        (length,) = self._unpack("<I")
        return self._take(length)

    def text(self) -> str:
        self._expect_tag(TAG_TEXT)
        (length,) = self._unpack("<I")
        try:
            return self._take(length).decode("utf-8")
        except UnicodeDecodeError as e:
            raise EncodingError(f"invalid text: {e}") from e

    def fixed(self, size: int) -> bytes:
        return self._take(size)

    def zq_vector(self) -> ZqVector:
        self._expect_tag(TAG_ZQ_VECTOR)
        modulus, dim = self._unpack("<QI")
        width = entry_width(max(modulus, 2))
        values = _unpack_unsigned(self._take(dim * width), dim, width)
        return self._guard(lambda: ZqVector(values, modulus))

    def zq_matrix(self) -> ZqMatrix:
        self._expect_tag(TAG_ZQ_MATRIX)
        modulus, rows, cols = self._unpack("<QII")
        width = entry_width(max(modulus, 2))
        values = _unpack_unsigned(self._take(rows * cols * width), rows * cols, width)
        return self._guard(lambda: ZqMatrix(values.reshape(rows, cols), modulus))

    def sparse(self) -> SparseZqMatrix:
        self._expect_tag(TAG_SPARSE)
        modulus, rows, cols, nnz = self._unpack("<QIII")
        indptr = _unpack_unsigned(self._take((rows + 1) * 4), rows + 1, 4)
        indices = _unpack_unsigned(self._take(nnz * 4), nnz, 4)
        width = entry_width(max(modulus, 2))
        data = _unpack_unsigned(self._take(nnz * width), nnz, width)
        return self._guard(lambda: SparseZqMatrix((rows, cols), indptr, indices, data, modulus))

    def int_vector(self) -> IntVector:
        self._expect_tag(TAG_INT_VECTOR)
        dim, width, bound = self._unpack("<IBQ")
        if not 1 <= width <= 8:
            raise EncodingError(f"invalid entry width {width}")
        values = _unpack_signed(self._take(dim * width), dim, width)
        return self._guard(lambda: IntVector(values, bound=bound))

    def int_array(self) -> np.ndarray:
        return self.int_vector().entries

    def int_matrix(self) -> np.ndarray:
        self._expect_tag(TAG_INT_MATRIX)
        rows, cols, width = self._unpack("<IIB")
        if not 1 <= width <= 8:
            raise EncodingError(f"invalid entry width {width}")
        return _unpack_signed(self._take(rows * cols * width), rows * cols, width).reshape(rows, cols)

    def bit_vector(self) -> BitVector:
        self._expect_tag(TAG_BIT_VECTOR)
        (dim,) = self._unpack("<I")
        packed = np.frombuffer(self._take((dim + 7) // 8), dtype=np.uint8)
        bits = np.unpackbits(packed, bitorder="little")
        if np.any(bits[dim:]):
            raise EncodingError("non-zero padding in packed bits")
        return BitVector(bits[:dim].astype(np.int64))

    @staticmethod
    def _guard(build):
        try:
            return build()
        except TraceSigError as e:
            raise EncodingError(f"non-canonical object: {e}") from e

    @property
    def remaining(self) -> int:
        return len(self._data) - self._pos

    def done(self) -> None:
        if self.remaining:
            raise EncodingError(f"{self.remaining} trailing bytes")


def encode_zq_vector(vector: ZqVector) -> bytes:
    return Encoder().zq_vector(vector).getvalue()


def encode_zq_matrix(matrix: ZqMatrix) -> bytes:
    return Encoder().zq_matrix(matrix).getvalue()


def fingerprint(data: bytes) -> bytes:
    return hashlib.sha3_256(data).digest()


def pack_artifact(magic: bytes, payload: bytes, version: int = FORMAT_VERSION) -> bytes:
    """magic(4) ‖ version(1) ‖ payload ‖ SHA3-256 of everything before it."""
    if len(magic) != 4:
        raise EncodingError("artifact magic must be 4 bytes")
    body = magic + bytes([version]) + payload
    return body + fingerprint(body)


def unpack_artifact(data: bytes, magic: bytes, version: int = FORMAT_VERSION) -> bytes:
    """
    Check framing and return the payload.

    Raises:
        IntegrityError: On a short file, wrong magic, wrong version or checksum mismatch.
    """
    if len(data) < 5 + DIGEST_SIZE:
        raise IntegrityError("artifact truncated")
    body, digest = data[:-DIGEST_SIZE], data[-DIGEST_SIZE:]
    if body[:4] != magic:
        raise IntegrityError(f"bad magic {body[:4]!r}, expected {magic!r}")
    if body[4] != version:
        raise IntegrityError(f"unsupported version {body[4]}")
    if fingerprint(body) != digest:
        raise IntegrityError("checksum mismatch")
    return body[5:]


def split_artifact(data: bytes) -> Tuple[bytes, int, bytes]:
    """(magic, version, payload) after checksum verification, for tools that sniff file types."""
    if len(data) < 5 + DIGEST_SIZE:
        raise IntegrityError("artifact truncated")
    magic = data[:4]
    return magic, data[4], unpack_artifact(data, magic, data[4])


class ArtifactMixin:
    """Framing for objects that persist to disk; subclasses set MAGIC and implement to_bytes/from_bytes."""

    MAGIC: bytes = b""

    def to_artifact(self) -> bytes:
        return pack_artifact(self.MAGIC, self.to_bytes())

    @classmethod
    def from_artifact(cls, data: bytes):
        return cls.from_bytes(unpack_artifact(data, cls.MAGIC))
