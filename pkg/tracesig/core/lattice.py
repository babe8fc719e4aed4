"""
Exact modular linear algebra.
Vectors and matrices over Z_q, short integer vectors, gadget / binary / range
decompositions, norms and small linear solvers modulo a prime.

Every Z_q object stores canonical representatives in [0, q) as int64 numpy
arrays. Products of two canonical values are reduced with a float64 quotient
estimate, which is exact for moduli below 2**52 (MAX_MODULUS).
"""

from __future__ import annotations

import logging
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import DimensionError, ModulusMismatchError, NormBoundError, RangeError

logger = logging.getLogger(__name__)

MAX_MODULUS = 1 << 52
RANK_PRIME = (1 << 31) - 1
_SPLIT_BITS = 26
_SPLIT_MASK = (1 << _SPLIT_BITS) - 1

ArrayLike = Union[np.ndarray, Sequence[int]]


def _check_modulus(modulus: int) -> int:
    modulus = int(modulus)
    if modulus < 2 or modulus > MAX_MODULUS:
        raise RangeError(f"modulus {modulus} outside [2, 2^52]")
    return modulus


def digit_count(modulus: int) -> int:
    """Number of binary digits ⌈log2 q⌉ used by the gadget for modulus q."""
    return (int(modulus) - 1).bit_length()


def mulmod(a: ArrayLike, b: ArrayLike, modulus: int) -> np.ndarray:
    """
    Elementwise (a * b) mod q for canonical int64 operands, with broadcasting.

    Args:
        a: Values in [0, q).
        b: Values in [0, q).
        modulus: q < 2**52.

    Returns:
        int64 array of canonical products.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    q = np.int64(modulus)
    quotient = np.floor(a.astype(np.float64) * b.astype(np.float64) / float(modulus)).astype(np.int64)
    with np.errstate(over="ignore"):
        # wraps modulo 2^64; the true value lies in (-4q, 4q) so the wrap is exact
        residue = a * b - quotient * q
    return np.mod(residue, q)


def sum_mod(values: np.ndarray, modulus: int, axis: int = -1) -> np.ndarray:
    """Sum canonical values along an axis modulo q without int64 overflow."""
    values = np.asarray(values, dtype=np.int64)
    low = np.sum(values & _SPLIT_MASK, axis=axis, dtype=np.int64)
    high = np.sum(values >> _SPLIT_BITS, axis=axis, dtype=np.int64)
    shift = (1 << _SPLIT_BITS) % modulus
    return np.mod(mulmod(np.mod(high, modulus), shift, modulus) + np.mod(low, modulus), modulus)


def segment_sum_mod(values: np.ndarray, indptr: np.ndarray, modulus: int) -> np.ndarray:
    """Sum canonical values over CSR row segments modulo q."""
    values = np.asarray(values, dtype=np.int64)
    low = np.concatenate(([0], np.cumsum(values & _SPLIT_MASK, dtype=np.int64)))
    high = np.concatenate(([0], np.cumsum(values >> _SPLIT_BITS, dtype=np.int64)))
    row_low = low[indptr[1:]] - low[indptr[:-1]]
    row_high = high[indptr[1:]] - high[indptr[:-1]]
    shift = (1 << _SPLIT_BITS) % modulus
    return np.mod(mulmod(np.mod(row_high, modulus), shift, modulus) + np.mod(row_low, modulus), modulus)


def reduce(values: ArrayLike, modulus: int) -> np.ndarray:
    """Canonical representatives of arbitrary int64 values."""
    return np.mod(np.asarray(values, dtype=np.int64), np.int64(modulus))


def centered(values: ArrayLike, modulus: int) -> np.ndarray:
    """Signed view in (-q/2, q/2] of canonical values."""
    values = reduce(values, modulus)
    return np.where(values > modulus // 2, values - modulus, values)


def matvec_mod(matrix: np.ndarray, vector: np.ndarray, modulus: int) -> np.ndarray:
    """Dense matrix-vector product modulo q for canonical operands."""
    matrix = np.asarray(matrix, dtype=np.int64)
    vector = reduce(vector, modulus)
    if matrix.shape[1] != vector.shape[0]:
        raise DimensionError(f"cannot multiply {matrix.shape} by vector of length {vector.shape[0]}")
    if matrix.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    return sum_mod(mulmod(matrix, vector[None, :], modulus), modulus, axis=1)


def matmul_mod(left: np.ndarray, right: np.ndarray, modulus: int) -> np.ndarray:
    """
    Dense matrix product modulo q.

    `left` must be canonical; `right` may hold small signed integers (trapdoors)
    or canonical values.
    """
    left = np.asarray(left, dtype=np.int64)
    right = np.asarray(right, dtype=np.int64)
    if left.shape[1] != right.shape[0]:
        raise DimensionError(f"cannot multiply {left.shape} by {right.shape}")
    bound = int(np.max(np.abs(right))) if right.size else 0
    inner = left.shape[1]
    if bound * max(inner, 1) < (1 << (62 - _SPLIT_BITS)):
        low = (left & _SPLIT_MASK) @ right
        high = (left >> _SPLIT_BITS) @ right
        shift = (1 << _SPLIT_BITS) % modulus
        return np.mod(mulmod(reduce(high, modulus), shift, modulus) + reduce(low, modulus), modulus)
    right = reduce(right, modulus)
    out = np.empty((left.shape[0], right.shape[1]), dtype=np.int64)
    for column in range(right.shape[1]):
        out[:, column] = matvec_mod(left, right[:, column], modulus)
    return out


class ZqVector:
    """Vector over Z_q with canonical entries."""

    __slots__ = ("entries", "modulus")

    def __init__(self, entries: ArrayLike, modulus: int, reduce_entries: bool = False):
        modulus = _check_modulus(modulus)
        arr = np.array(entries, dtype=np.int64).reshape(-1) if np.size(entries) else np.zeros(0, dtype=np.int64)
        if reduce_entries:
            arr = np.mod(arr, modulus)
        elif arr.size and (arr.min() < 0 or arr.max() >= modulus):
            raise RangeError(f"entries must lie in [0, {modulus})")
        arr.setflags(write=False)
        self.entries = arr
        self.modulus = modulus

    @classmethod
    def zeros(cls, dim: int, modulus: int) -> "ZqVector":
        return cls(np.zeros(dim, dtype=np.int64), modulus)

    @classmethod
    def from_signed(cls, values: ArrayLike, modulus: int) -> "ZqVector":
        return cls(values, modulus, reduce_entries=True)

    def __len__(self) -> int:
        return int(self.entries.shape[0])

    @property
    def dim(self) -> int:
        return len(self)

    def signed(self) -> np.ndarray:
        return centered(self.entries, self.modulus)

    def _other(self, other: "ZqVector") -> np.ndarray:
        if not isinstance(other, ZqVector):
            raise TypeError(f"expected ZqVector, got {type(other).__name__}")
        if other.modulus != self.modulus:
            raise ModulusMismatchError(f"modulus {self.modulus} vs {other.modulus}")
        if len(other) != len(self):
            raise DimensionError(f"length {len(self)} vs {len(other)}")
        return other.entries

    def __add__(self, other: "ZqVector") -> "ZqVector":
        return ZqVector(np.mod(self.entries + self._other(other), self.modulus), self.modulus)

    def __sub__(self, other: "ZqVector") -> "ZqVector":
        return ZqVector(np.mod(self.entries - self._other(other), self.modulus), self.modulus)

    def __neg__(self) -> "ZqVector":
        return ZqVector(np.mod(-self.entries, self.modulus), self.modulus)

    def scale(self, factor: int) -> "ZqVector":
        return ZqVector(mulmod(self.entries, int(factor) % self.modulus, self.modulus), self.modulus)

    def concat(self, *others: "ZqVector") -> "ZqVector":
        parts = [self.entries]
        for other in others:
            if other.modulus != self.modulus:
                raise ModulusMismatchError(f"modulus {self.modulus} vs {other.modulus}")
            parts.append(other.entries)
        return ZqVector(np.concatenate(parts), self.modulus)

    def __getitem__(self, item: slice) -> "ZqVector":
        return ZqVector(self.entries[item], self.modulus)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ZqVector):
            return NotImplemented
        return self.modulus == other.modulus and np.array_equal(self.entries, other.entries)

    __hash__ = None

    def __repr__(self) -> str:
        return f"ZqVector(dim={len(self)}, q={self.modulus})"


class ZqMatrix:
    """Dense matrix over Z_q with canonical entries."""

    __slots__ = ("entries", "modulus")

    def __init__(self, entries: ArrayLike, modulus: int, reduce_entries: bool = False):
        modulus = _check_modulus(modulus)
        arr = np.array(entries, dtype=np.int64)
        if arr.ndim != 2:
            raise DimensionError(f"matrix must be 2-dimensional, got shape {arr.shape}")
        if reduce_entries:
            arr = np.mod(arr, modulus)
        elif arr.size and (arr.min() < 0 or arr.max() >= modulus):
            raise RangeError(f"entries must lie in [0, {modulus})")
        arr.setflags(write=False)
        self.entries = arr
        self.modulus = modulus

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: int) -> "ZqMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), modulus)

    @property
    def shape(self) -> Tuple[int, int]:
        return tuple(self.entries.shape)  # type: ignore[return-value]

    @property
    def rows(self) -> int:
        return int(self.entries.shape[0])

    @property
    def cols(self) -> int:
        return int(self.entries.shape[1])

    def signed(self) -> np.ndarray:
        return centered(self.entries, self.modulus)

    def matvec(self, vector: Union["ZqVector", "IntVector", "BitVector", np.ndarray]) -> ZqVector:
        """Product with a Z_q vector or a short integer vector, reduced mod q."""
        if isinstance(vector, ZqVector):
            if vector.modulus != self.modulus:
                raise ModulusMismatchError(f"modulus {self.modulus} vs {vector.modulus}")
            values = vector.entries
        elif isinstance(vector, (IntVector, BitVector)):
            values = vector.entries
        else:
            values = np.asarray(vector, dtype=np.int64)
        return ZqVector(matvec_mod(self.entries, values, self.modulus), self.modulus)

    def matmul(self, other: Union["ZqMatrix", np.ndarray]) -> "ZqMatrix":
        if isinstance(other, ZqMatrix):
            if other.modulus != self.modulus:
                raise ModulusMismatchError(f"modulus {self.modulus} vs {other.modulus}")
            other = other.entries
        return ZqMatrix(matmul_mod(self.entries, other, self.modulus), self.modulus)

    def transpose(self) -> "ZqMatrix":
        return ZqMatrix(self.entries.T, self.modulus)

    @property
    def T(self) -> "ZqMatrix":
        return self.transpose()

    def hstack(self, *others: "ZqMatrix") -> "ZqMatrix":
        for other in others:
            if other.modulus != self.modulus:
                raise ModulusMismatchError(f"modulus {self.modulus} vs {other.modulus}")
        return ZqMatrix(np.hstack([self.entries] + [o.entries for o in others]), self.modulus)

    def vstack(self, *others: "ZqMatrix") -> "ZqMatrix":
        for other in others:
            if other.modulus != self.modulus:
                raise ModulusMismatchError(f"modulus {self.modulus} vs {other.modulus}")
        return ZqMatrix(np.vstack([self.entries] + [o.entries for o in others]), self.modulus)

    def __add__(self, other: "ZqMatrix") -> "ZqMatrix":
        if other.modulus != self.modulus:
            raise ModulusMismatchError(f"modulus {self.modulus} vs {other.modulus}")
        if other.shape != self.shape:
            raise DimensionError(f"shape {self.shape} vs {other.shape}")
        return ZqMatrix(np.mod(self.entries + other.entries, self.modulus), self.modulus)

    def __neg__(self) -> "ZqMatrix":
        return ZqMatrix(np.mod(-self.entries, self.modulus), self.modulus)

    def scale(self, factor: int) -> "ZqMatrix":
        return ZqMatrix(mulmod(self.entries, int(factor) % self.modulus, self.modulus), self.modulus)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ZqMatrix):
            return NotImplemented
        return self.modulus == other.modulus and np.array_equal(self.entries, other.entries)

    __hash__ = None

    def __repr__(self) -> str:
        return f"ZqMatrix(shape={self.shape}, q={self.modulus})"


class SparseZqMatrix:
    """Row-compressed sparse matrix over Z_q (used for compiled statements)."""

    __slots__ = ("shape", "indptr", "indices", "data", "modulus")

    def __init__(self, shape: Tuple[int, int], indptr: np.ndarray, indices: np.ndarray,
                 data: np.ndarray, modulus: int):
        self.modulus = _check_modulus(modulus)
        self.shape = (int(shape[0]), int(shape[1]))
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.data = np.asarray(data, dtype=np.int64)
        if self.indptr.shape[0] != self.shape[0] + 1:
            raise DimensionError("indptr length must be rows + 1")
        if self.indices.shape != self.data.shape:
            raise DimensionError("indices and data differ in length")
        if self.indices.size and (self.indices.min() < 0 or self.indices.max() >= self.shape[1]):
            raise DimensionError("column index out of range")
        if self.data.size and (self.data.min() < 0 or self.data.max() >= self.modulus):
            raise RangeError(f"entries must lie in [0, {self.modulus})")
        for arr in (self.indptr, self.indices, self.data):
            arr.setflags(write=False)

    @classmethod
    def from_triplets(cls, rows: np.ndarray, cols: np.ndarray, values: np.ndarray,
                      shape: Tuple[int, int], modulus: int) -> "SparseZqMatrix":
        """Build from coordinate triplets; duplicates are summed and zeros dropped."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = reduce(values, modulus)
        if rows.size and (rows.min() < 0 or rows.max() >= shape[0]):
            raise DimensionError("row index out of range")
        order = np.lexsort((cols, rows))
        rows, cols, values = rows[order], cols[order], values[order]
        if rows.size:
            boundary = np.ones(rows.size, dtype=bool)
            boundary[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
            starts = np.flatnonzero(boundary)
            values = segment_sum_mod(values, np.append(starts, rows.size), modulus)
            rows, cols = rows[starts], cols[starts]
            keep = values != 0
            rows, cols, values = rows[keep], cols[keep], values[keep]
        counts = np.bincount(rows, minlength=shape[0]) if rows.size else np.zeros(shape[0], dtype=np.int64)
        indptr = np.concatenate(([0], np.cumsum(counts)))
        return cls(shape, indptr, cols, values, modulus)

    @property
    def nnz(self) -> int:
        return int(self.data.shape[0])

    def matvec(self, vector: Union[ZqVector, np.ndarray]) -> ZqVector:
        if isinstance(vector, ZqVector):
            if vector.modulus != self.modulus:
                raise ModulusMismatchError(f"modulus {self.modulus} vs {vector.modulus}")
            values = vector.entries
        else:
            values = reduce(vector, self.modulus)
        if values.shape[0] != self.shape[1]:
            raise DimensionError(f"cannot multiply {self.shape} by vector of length {values.shape[0]}")
        products = mulmod(self.data, values[self.indices], self.modulus)
        return ZqVector(segment_sum_mod(products, self.indptr, self.modulus), self.modulus)

    def dense(self) -> ZqMatrix:
        out = np.zeros(self.shape, dtype=np.int64)
        row_ids = np.repeat(np.arange(self.shape[0]), np.diff(self.indptr))
        out[row_ids, self.indices] = self.data
        return ZqMatrix(out, self.modulus)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseZqMatrix):
            return NotImplemented
        return (self.shape == other.shape and self.modulus == other.modulus
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.data, other.data))

    __hash__ = None

    def __repr__(self) -> str:
        return f"SparseZqMatrix(shape={self.shape}, nnz={self.nnz}, q={self.modulus})"


class IntVector:
    """Signed integer vector with a declared infinity-norm bound."""

    __slots__ = ("entries", "bound")

    def __init__(self, entries: ArrayLike, bound: Optional[int] = None):
        arr = np.array(entries, dtype=np.int64).reshape(-1) if np.size(entries) else np.zeros(0, dtype=np.int64)
        actual = int(np.max(np.abs(arr))) if arr.size else 0
        if bound is None:
            bound = actual
        elif actual > bound:
            raise NormBoundError(f"infinity norm {actual} exceeds declared bound {bound}")
        arr.setflags(write=False)
        self.entries = arr
        self.bound = int(bound)

    def __len__(self) -> int:
        return int(self.entries.shape[0])

    def to_zq(self, modulus: int) -> ZqVector:
        return ZqVector.from_signed(self.entries, modulus)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntVector):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    __hash__ = None

    def __repr__(self) -> str:
        return f"IntVector(dim={len(self)}, bound={self.bound})"


class BitVector:
    """Vector with entries in {0, 1}."""

    __slots__ = ("entries",)

    def __init__(self, entries: ArrayLike):
        arr = np.array(entries, dtype=np.int64).reshape(-1) if np.size(entries) else np.zeros(0, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() > 1):
            raise RangeError("bit vector entries must be 0 or 1")
        arr.setflags(write=False)
        self.entries = arr

    def __len__(self) -> int:
        return int(self.entries.shape[0])

    def to_zq(self, modulus: int) -> ZqVector:
        return ZqVector(self.entries, modulus)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    __hash__ = None

    def __repr__(self) -> str:
        return f"BitVector(dim={len(self)})"


def gadget_vector(modulus: int) -> np.ndarray:
    """The row g = (1, 2, ..., 2^{k-1}) with k = ⌈log2 q⌉."""
    return np.left_shift(np.int64(1), np.arange(digit_count(modulus), dtype=np.int64))


def gadget_matrix(rows: int, modulus: int, width: Optional[int] = None) -> ZqMatrix:
    """
    Gadget matrix G = (I_n ⊗ g | 0).

    Args:
        rows: n.
        modulus: q.
        width: total number of columns m (defaults to n⌈log q⌉).

    Returns:
        ZqMatrix of shape n x m.

    Raises:
        DimensionError: If m < n⌈log q⌉.
    """
    k = digit_count(modulus)
    width = rows * k if width is None else int(width)
    if width < rows * k:
        raise DimensionError(f"gadget width {width} below n*ceil(log q) = {rows * k}")
    out = np.zeros((rows, width), dtype=np.int64)
    if rows:
        out[:, : rows * k] = np.kron(np.eye(rows, dtype=np.int64), gadget_vector(modulus)[None, :])
    return ZqMatrix(out, modulus)


def bin_digits(values: ArrayLike, modulus: int) -> np.ndarray:
    """Little-endian binary digits (k per entry) of canonical values, flattened."""
    values = reduce(values, modulus)
    shifts = np.arange(digit_count(modulus), dtype=np.int64)
    return ((values[:, None] >> shifts[None, :]) & 1).reshape(-1)


def bin_decompose(u: ZqVector) -> BitVector:
    """bin(u): the unique bit vector with G·bin(u) = u."""
    return BitVector(bin_digits(u.entries, u.modulus))


def bin_recompose(bits: Union[BitVector, ArrayLike], modulus: int) -> ZqVector:
    """Inverse of bin_decompose: G·bits mod q."""
    values = bits.entries if isinstance(bits, BitVector) else np.asarray(bits, dtype=np.int64)
    k = digit_count(modulus)
    if values.shape[0] % k:
        raise DimensionError(f"bit length {values.shape[0]} not divisible by {k}")
    blocks = values.reshape(-1, k)
    return ZqVector(np.mod(blocks @ gadget_vector(modulus), modulus), modulus)


def range_digit_count(beta: int) -> int:
    """Length of the range gadget for [0, 2β]."""
    return (2 * int(beta)).bit_length()


def range_gadget(beta: int) -> np.ndarray:
    """
    Range gadget g1 with entries ⌊(2β + 2^{i-1}) / 2^i⌋, i = 1..k.

    Every integer in [0, 2β] is g1·a for some bit vector a, and g1·1 = 2β.
    """
    beta = int(beta)
    if beta < 1:
        raise RangeError("range gadget needs beta >= 1")
    k = range_digit_count(beta)
    return np.array([(2 * beta + (1 << (i - 1))) >> i for i in range(1, k + 1)], dtype=np.int64)


def range_decompose(value: int, beta: int) -> BitVector:
    """Greedy high-to-low decomposition of value in [0, 2β] over the range gadget."""
    return BitVector(range_decompose_many(np.array([value], dtype=np.int64), beta))


def range_decompose_many(values: ArrayLike, beta: int) -> np.ndarray:
    """Vectorized range_decompose; returns the flattened bit matrix (k bits per value)."""
    values = np.asarray(values, dtype=np.int64)
    if values.size and (values.min() < 0 or values.max() > 2 * beta):
        raise RangeError(f"values must lie in [0, {2 * beta}]")
    gadget = range_gadget(beta)
    remaining = values.copy()
    bits = np.zeros((values.shape[0], gadget.shape[0]), dtype=np.int64)
    for index, weight in enumerate(gadget):
        take = remaining >= weight
        bits[take, index] = 1
        remaining[take] -= weight
    if np.any(remaining):
        raise RangeError("range decomposition left a remainder")
    return bits.reshape(-1)


def range_recompose(bits: Union[BitVector, ArrayLike], beta: int) -> int:
    values = bits.entries if isinstance(bits, BitVector) else np.asarray(bits, dtype=np.int64)
    gadget = range_gadget(beta)
    if values.shape[0] != gadget.shape[0]:
        raise DimensionError(f"expected {gadget.shape[0]} bits, got {values.shape[0]}")
    return int(values @ gadget)


def inf_norm(v: Union[IntVector, ArrayLike]) -> int:
    values = v.entries if isinstance(v, IntVector) else np.asarray(v, dtype=np.int64)
    return int(np.max(np.abs(values))) if values.size else 0


def l2_norm_sq(v: Union[IntVector, ArrayLike]) -> int:
    """Exact squared Euclidean norm."""
    values = v.entries if isinstance(v, IntVector) else np.asarray(v, dtype=np.int64)
    if not values.size:
        return 0
    if inf_norm(values) < (1 << 20) and values.shape[0] < (1 << 22):
        return int(np.dot(values, values))
    flat = values.tolist()
    return sum(x * x for x in flat)


def _inverse(value: int, modulus: int) -> int:
    return pow(int(value), -1, int(modulus))


def solve_mod(matrix: np.ndarray, rhs: np.ndarray, modulus: int) -> Optional[np.ndarray]:
    """
    Unique solution of matrix·x = rhs modulo a prime.

    Returns:
        Canonical solution, or None if the system is inconsistent or
        under-determined.
    """
    work = np.concatenate([reduce(matrix, modulus), reduce(rhs, modulus)[:, None]], axis=1)
    rows, cols = work.shape[0], work.shape[1] - 1
    pivot_row = 0
    pivots: List[int] = []
    for col in range(cols):
        candidates = np.flatnonzero(work[pivot_row:, col]) + pivot_row
        if candidates.size == 0:
            continue
        swap = candidates[0]
        if swap != pivot_row:
            work[[pivot_row, swap]] = work[[swap, pivot_row]]
        inv = _inverse(work[pivot_row, col], modulus)
        work[pivot_row] = mulmod(work[pivot_row], inv, modulus)
        factors = work[:, col].copy()
        factors[pivot_row] = 0
        nonzero = np.flatnonzero(factors)
        if nonzero.size:
            update = mulmod(factors[nonzero, None], work[pivot_row][None, :], modulus)
            work[nonzero] = np.mod(work[nonzero] - update, modulus)
        pivots.append(col)
        pivot_row += 1
        if pivot_row == rows:
            break
    if np.any(work[pivot_row:, -1]):
        return None
    if len(pivots) < cols:
        return None
    return work[:cols, -1].copy()


def rank_mod(matrix: np.ndarray, modulus: int = RANK_PRIME) -> int:
    """Rank of an integer matrix modulo a prime."""
    tracker = IndependenceTracker(np.asarray(matrix).shape[0], modulus)
    for column in np.asarray(matrix, dtype=np.int64).T:
        tracker.add(column)
    return tracker.rank


class IndependenceTracker:
    """
    Incremental reduced row-echelon basis modulo a prime.

    Integer vectors independent modulo the prime are independent over the
    rationals, so this certifies rational independence.
    """

    def __init__(self, dim: int, modulus: int = RANK_PRIME):
        self.dim = int(dim)
        self.modulus = int(modulus)
        self.basis = np.zeros((0, self.dim), dtype=np.int64)
        self.pivots: List[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vector: np.ndarray) -> np.ndarray:
        v = reduce(vector, self.modulus)
        if self.pivots:
            coeffs = v[self.pivots]
            v = np.mod(v - matvec_mod(self.basis.T, coeffs, self.modulus), self.modulus)
        return v

    def add(self, vector: np.ndarray) -> bool:
        """Add vector if it is independent of the current basis."""
        v = self.reduce(vector)
        nonzero = np.flatnonzero(v)
        if nonzero.size == 0:
            return False
        pivot = int(nonzero[0])
        v = mulmod(v, _inverse(v[pivot], self.modulus), self.modulus)
        if self.pivots:
            factors = self.basis[:, pivot].copy()
            self.basis = np.mod(self.basis - mulmod(factors[:, None], v[None, :], self.modulus), self.modulus)
        self.basis = np.vstack([self.basis, v])
        self.pivots.append(pivot)
        return True


def stack_vectors(vectors: Iterable[ZqVector]) -> ZqVector:
    vectors = list(vectors)
    if not vectors:
        raise DimensionError("nothing to stack")
    return vectors[0].concat(*vectors[1:])
