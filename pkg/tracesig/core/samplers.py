"""
Discrete Gaussian sampling and G-trapdoors.
Base samplers over Z, trapdoor generation for the binary and ternary variants,
gadget-based preimage sampling, kernel-basis sampling and the rejection
probability used by the zero-knowledge prover.

Nothing in this module is constant time, and RngHandle is a reproducible PRNG,
not a CSPRNG. Desk-scale research use only.
"""

import hashlib
import logging
import math
import secrets
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np

from ..errors import DimensionError, ModulusMismatchError, ParameterError, SamplingError, TagError, WidthError
from .encoding import Decoder, Encoder
from .lattice import (
    IndependenceTracker,
    IntVector,
    ZqMatrix,
    ZqVector,
    bin_digits,
    digit_count,
    gadget_matrix,
    l2_norm_sq,
    matmul_mod,
    mulmod,
    reduce,
)

logger = logging.getLogger(__name__)

TAIL_CUT = 12
CDT_PRECISION = 60
EPSILON_BITS = 40
CDT_LIMIT = 1 << 16
MAX_TRAPDOOR_ATTEMPTS = 64

SeedLike = Union[int, bytes, str, None]


def _seed_bytes(seed: SeedLike) -> bytes:
    if isinstance(seed, bytes):
        return seed
    if isinstance(seed, str):
        return seed.encode("utf-8")
    if isinstance(seed, (int, np.integer)):
        value = int(seed)
        return value.to_bytes(max(8, (value.bit_length() + 8) // 8), "little", signed=True)
    raise TypeError(f"unsupported seed type {type(seed).__name__}")


class RngHandle:
    """
    Seedable deterministic random stream.

    Args:
        seed: Integer, bytes or string seed. None draws a fresh seed from the OS.
    """

    def __init__(self, seed: SeedLike = None):
        self.deterministic = seed is not None
        self.seed = secrets.token_bytes(32) if seed is None else _seed_bytes(seed)
        digest = hashlib.shake_256(b"tracesig-rng" + self.seed).digest(32)
        self.generator = np.random.Generator(np.random.PCG64DXSM(int.from_bytes(digest, "little")))
        self._children = 0

    def spawn(self, label: str = "") -> "RngHandle":
        """Independent child stream; the n-th spawn of a handle is reproducible."""
        self._children += 1
        material = self.seed + b"|" + label.encode("utf-8") + b"|" + self._children.to_bytes(8, "little")
        return RngHandle(hashlib.sha3_256(material).digest())

    def child(self, label: str, index: int) -> "RngHandle":
        """Child stream keyed by (seed, label, index) without advancing this handle."""
        material = self.seed + b"|" + label.encode("utf-8") + b"#" + int(index).to_bytes(8, "little")
        return RngHandle(hashlib.sha3_256(material).digest())

    def bytes(self, length: int) -> bytes:
        return self.generator.bytes(int(length))

    def integers(self, low: int, high: int, size=None) -> np.ndarray:
        """Uniform integers in [low, high)."""
        return self.generator.integers(low, high, size=size, dtype=np.int64)

    def bits(self, size: int) -> np.ndarray:
        return self.generator.integers(0, 2, size=size, dtype=np.int64)

    def uniform(self, size=None) -> np.ndarray:
        return self.generator.random(size)

    def uniform_zq(self, shape, modulus: int) -> np.ndarray:
        return self.generator.integers(0, int(modulus), size=shape, dtype=np.int64)

    def permutation(self, values: np.ndarray) -> np.ndarray:
        return self.generator.permutation(values)

    def __repr__(self) -> str:
        return f"RngHandle(deterministic={self.deterministic})"


def smoothing_constant(dim: int) -> float:
    """√(ln(2·dim/ε)/π) with ε = 2^-40, the stand-in for ω(√log n)."""
    return math.sqrt((math.log(2 * max(int(dim), 1)) + EPSILON_BITS * math.log(2)) / math.pi)


def gadget_width(dim: int) -> float:
    """Width for sampling on the gadget lattice (Gram-Schmidt norms are at most √5)."""
    return math.sqrt(5.0) * smoothing_constant(dim)


@lru_cache(maxsize=64)
def _cdt_table(sigma: float) -> Tuple[np.ndarray, np.ndarray, int]:
    """128-bit fixed-point cumulative table of D_{Z,σ} on [-T, T], T = ⌈τσ⌉."""
    tail = int(math.ceil(TAIL_CUT * sigma))
    one = 1 << 128
    high = np.empty(2 * tail, dtype=np.uint64)
    low = np.empty(2 * tail, dtype=np.uint64)
    with localcontext() as ctx:
        ctx.prec = CDT_PRECISION
        scale = Decimal(math.pi) / (Decimal(sigma) * Decimal(sigma))
        weights = [(-(Decimal(x) * Decimal(x)) * scale).exp() for x in range(-tail, tail + 1)]
        total = sum(weights)
        running = Decimal(0)
        for index, weight in enumerate(weights[:-1]):
            running += weight
            value = min(int(running / total * one), one - 1)
            high[index] = value >> 64
            low[index] = value & ((1 << 64) - 1)
    logger.debug("Built CDT for sigma=%.4f with %d entries", sigma, 2 * tail + 1)
    return high, low, tail


def _sample_cdt(sigma: float, size: int, rng: RngHandle) -> np.ndarray:
    high, low, tail = _cdt_table(float(sigma))
    u_high = rng.generator.integers(0, 1 << 64, size=size, dtype=np.uint64)
    u_low = rng.generator.integers(0, 1 << 64, size=size, dtype=np.uint64)
    left = np.searchsorted(high, u_high, side="left")
    right = np.searchsorted(high, u_high, side="right")
    index = left.astype(np.int64)
    for pos in np.flatnonzero(right > left):
        segment = low[left[pos]:right[pos]]
        index[pos] = left[pos] + np.searchsorted(segment, u_low[pos], side="right")
    return index - tail


def _sample_rejection(widths: np.ndarray, centers: np.ndarray, rng: RngHandle) -> np.ndarray:
    """Rejection from a uniform window of half-width τσ around each center."""
    widths = np.asarray(widths, dtype=np.float64)
    centers = np.asarray(centers, dtype=np.float64)
    out = np.empty(widths.shape[0], dtype=np.int64)
    pending = np.arange(widths.shape[0])
    rounds = 0
    while pending.size:
        rounds += 1
        if rounds > 10_000:
            raise SamplingError("rejection sampler did not converge")
        w = widths[pending]
        c = centers[pending]
        lo = np.floor(c - TAIL_CUT * w).astype(np.int64)
        hi = np.ceil(c + TAIL_CUT * w).astype(np.int64)
        candidate = lo + np.floor(rng.uniform(pending.size) * (hi - lo + 1)).astype(np.int64)
        accept = rng.uniform(pending.size) < np.exp(-math.pi * (candidate - c) ** 2 / (w * w))
        out[pending[accept]] = candidate[accept]
        pending = pending[~accept]
    return out


def sample_dgauss_array(sigma: float, size: int, rng: RngHandle) -> np.ndarray:
    """size independent draws of D_{Z,σ}; CDT for narrow widths, rejection otherwise."""
    if sigma <= 0:
        raise WidthError(f"sigma must be positive, got {sigma}")
    size = int(size)
    if size == 0:
        return np.zeros(0, dtype=np.int64)
    if 2 * math.ceil(TAIL_CUT * sigma) + 1 <= CDT_LIMIT:
        return _sample_cdt(sigma, size, rng)
    return _sample_rejection(np.full(size, float(sigma)), np.zeros(size), rng)


def sample_dgauss_z(sigma: float, rng: RngHandle) -> int:
    """One draw of D_{Z,σ} truncated to |x| ≤ τσ."""
    return int(sample_dgauss_array(sigma, 1, rng)[0])


def sample_dgauss_vec(sigma: float, dim: int, rng: RngHandle) -> IntVector:
    return IntVector(sample_dgauss_array(sigma, dim, rng), bound=int(math.ceil(TAIL_CUT * sigma)))


def sample_dgauss_widths(widths: np.ndarray, rng: RngHandle) -> np.ndarray:
    """Independent centered draws with a per-coordinate width."""
    widths = np.asarray(widths, dtype=np.float64)
    if widths.size and widths.min() <= 0:
        raise WidthError("every width must be positive")
    if widths.size and np.all(widths == widths[0]):
        return sample_dgauss_array(float(widths[0]), widths.size, rng)
    return _sample_rejection(widths, np.zeros(widths.size), rng)


def sample_dgauss_centered(centers: np.ndarray, sigma: float, rng: RngHandle) -> np.ndarray:
    """Draws of D_{Z,σ,c} for an array of real centers c."""
    centers = np.asarray(centers, dtype=np.float64)
    return _sample_rejection(np.full(centers.size, float(sigma)), centers, rng)


def sample_bounded_error(sigma: float, bound: int, dim: int, rng: RngHandle) -> IntVector:
    """D_{Z,σ}^dim conditioned on ‖·‖∞ ≤ bound (coordinates resampled until inside)."""
    values = sample_dgauss_array(sigma, dim, rng)
    outside = np.flatnonzero(np.abs(values) > bound)
    while outside.size:
        values[outside] = sample_dgauss_array(sigma, outside.size, rng)
        outside = outside[np.abs(values[outside]) > bound]
    return IntVector(values, bound=int(bound))


def trapdoor_norm_bound(rows: int, cols: int, kind: str) -> float:
    """High-probability bound on the spectral norm of a random trapdoor matrix."""
    root = math.sqrt(rows) + math.sqrt(cols)
    if kind == "ternary":
        return 1.2 * math.sqrt(2.0 / 3.0) * root
    if kind == "binary":
        return 0.5 * math.sqrt(rows * cols) + 0.6 * root
    raise ParameterError(f"unknown trapdoor kind {kind!r}")


@dataclass(eq=False)
class GTrapdoor:
    """Short matrix R with A_full·(R; I) = H·G, for the matrix it was generated with."""

    R: np.ndarray
    kind: str
    modulus: int
    spectral_norm: float = field(default=-1.0)

    def __post_init__(self):
        self.R = np.asarray(self.R, dtype=np.int64)
        if self.spectral_norm < 0:
            self.spectral_norm = float(np.linalg.norm(self.R, 2)) if self.R.size else 0.0

    @property
    def rows(self) -> int:
        return int(self.R.shape[0])

    @property
    def cols(self) -> int:
        return int(self.R.shape[1])

    def row_norms_sq(self) -> np.ndarray:
        """Squared row norms of T = (R; I)."""
        return np.concatenate([np.sum(self.R * self.R, axis=1), np.ones(self.cols, dtype=np.int64)])

    def completion(self) -> np.ndarray:
        return np.vstack([self.R, np.eye(self.cols, dtype=np.int64)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GTrapdoor):
            return NotImplemented
        return self.kind == other.kind and self.modulus == other.modulus and np.array_equal(self.R, other.R)

    def encode(self, enc: Encoder) -> None:
        enc.text(self.kind).u64(self.modulus).int_matrix(self.R)

    @classmethod
    def decode(cls, dec: Decoder) -> "GTrapdoor":
        kind, modulus = dec.text(), dec.u64()
        return cls(dec.int_matrix(), kind, modulus)


def _has_full_row_rank(matrix: np.ndarray, modulus: int) -> bool:
    tracker = IndependenceTracker(matrix.shape[0], modulus)
    for column in matrix.T:
        tracker.add(column)
        if tracker.rank == matrix.shape[0]:
            return True
    return False


def trapdoor_gen_binary(n: int, m: int, modulus: int, rng: RngHandle,
                        norm_bound: Optional[float] = None) -> Tuple[ZqMatrix, GTrapdoor]:
    """
    B = (B̄ | G_n − B̄·S) with S ∈ {0,1}^{(m−nk)×nk} and B̄ of full rank.

    Raises:
        DimensionError: If m < 2n⌈log q⌉.
        ParameterError: After 64 consecutive rejected draws.
    """
    width = n * digit_count(modulus)
    if m < 2 * width:
        raise DimensionError(f"m={m} below 2n*ceil(log q)={2 * width}")
    bar = m - width
    gadget = gadget_matrix(n, modulus).entries
    for attempt in range(1, MAX_TRAPDOOR_ATTEMPTS + 1):
        b_bar = rng.uniform_zq((n, bar), modulus)
        secret = rng.bits((bar, width)).reshape(bar, width)
        if not _has_full_row_rank(b_bar, modulus):
            logger.debug("Binary trapdoor attempt %d: B_bar rank deficient", attempt)
            continue
        trapdoor = GTrapdoor(secret, "binary", modulus)
        if norm_bound is not None and trapdoor.spectral_norm > norm_bound:
            logger.debug("Binary trapdoor attempt %d: norm %.1f above %.1f", attempt,
                         trapdoor.spectral_norm, norm_bound)
            continue
        right = np.mod(gadget - matmul_mod(b_bar, secret, modulus), modulus)
        return ZqMatrix(np.hstack([b_bar, right]), modulus), trapdoor
    raise ParameterError(f"no full-rank binary trapdoor after {MAX_TRAPDOOR_ATTEMPTS} attempts (q too small?)")


def trapdoor_gen_ternary(n: int, m1: int, m2: int, modulus: int, rng: RngHandle,
                         norm_bound: Optional[float] = None) -> Tuple[ZqMatrix, ZqMatrix, GTrapdoor]:
    """A uniform, R ∈ {−1,0,1}^{m1×m2}, A′ = −A·R mod q."""
    if m2 != n * digit_count(modulus):
        raise DimensionError(f"m2={m2} must equal n*ceil(log q)={n * digit_count(modulus)}")
    matrix_a = rng.uniform_zq((n, m1), modulus)
    for attempt in range(1, MAX_TRAPDOOR_ATTEMPTS + 1):
        secret = rng.integers(-1, 2, size=(m1, m2))
        trapdoor = GTrapdoor(secret, "ternary", modulus)
        if norm_bound is None or trapdoor.spectral_norm <= norm_bound:
            a_prime = np.mod(-matmul_mod(matrix_a, secret, modulus), modulus)
            return ZqMatrix(matrix_a, modulus), ZqMatrix(a_prime, modulus), trapdoor
        logger.debug("Ternary trapdoor attempt %d: norm %.1f above %.1f", attempt,
                     trapdoor.spectral_norm, norm_bound)
    raise ParameterError(f"no ternary trapdoor within norm bound after {MAX_TRAPDOOR_ATTEMPTS} attempts")


@lru_cache(maxsize=16)
def _gadget_basis(modulus: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Basis of Λ⊥(g) with columns 2e_i − e_{i+1} and the digits of q, plus Gram-Schmidt data."""
    k = digit_count(modulus)
    basis = np.zeros((k, k), dtype=np.int64)
    for i in range(k - 1):
        basis[i, i] = 2
        basis[i + 1, i] = -1
    basis[:, k - 1] = (int(modulus) >> np.arange(k)) & 1
    q_mat, r_mat = np.linalg.qr(basis.astype(np.float64))
    return basis, q_mat, np.diag(r_mat).copy()


def gadget_sample(targets: np.ndarray, modulus: int, sigma: float, rng: RngHandle) -> np.ndarray:
    """
    Short x with g·x = w mod q for every entry w of targets (randomized nearest plane).

    Args:
        targets: Canonical array of shape (n, count).

    Returns:
        Array of shape (n·k, count) laid out to match G = I_n ⊗ g.
    """
    targets = reduce(targets, modulus)
    n, count = targets.shape
    k = digit_count(modulus)
    basis, q_mat, diag = _gadget_basis(int(modulus))
    point = bin_digits(targets.reshape(-1), modulus).reshape(-1, k).astype(np.float64)
    point_int = point.astype(np.int64)
    for j in range(k - 1, -1, -1):
        center = (point @ q_mat[:, j]) / diag[j]
        step = sample_dgauss_centered(center, sigma / abs(diag[j]), rng)
        point -= step[:, None] * basis[:, j][None, :]
        point_int -= step[:, None] * basis[:, j][None, :]
    return point_int.reshape(n, count, k).transpose(0, 2, 1).reshape(n * k, count)


def _perturbation_widths(trapdoor: GTrapdoor, sigma: float, dim: int) -> np.ndarray:
    sigma_g = gadget_width(dim)
    variance = sigma * sigma - sigma_g * sigma_g * trapdoor.row_norms_sq().astype(np.float64)
    if variance.min() <= 0:
        raise WidthError(f"sigma={sigma:.2f} too small for trapdoor rows (gadget width {sigma_g:.2f})")
    return np.sqrt(variance)


def check_width(trapdoor: GTrapdoor, sigma: float, dim: int) -> None:
    """Raise WidthError unless σ ≥ c·√(1 + ‖R‖₂²) and the perturbation is well defined."""
    floor = smoothing_constant(dim) * math.sqrt(1.0 + trapdoor.spectral_norm ** 2)
    if sigma < floor:
        raise WidthError(f"sigma={sigma:.2f} below floor {floor:.2f}")
    _perturbation_widths(trapdoor, sigma, dim)


def sample_d_batch(matrix: ZqMatrix, trapdoor: GTrapdoor, tag: int, targets: np.ndarray,
                   sigma: float, rng: RngHandle) -> np.ndarray:
    """
    Preimages v with (A | tag·G − A·R)·v = u for every column u of targets.

    Args:
        matrix: The full matrix (A | tag·G − A·R).
        trapdoor: R.
        tag: Scalar tag, i.e. H = tag·I_n.
        targets: Array of shape (n, count).
        sigma: Output width.
        rng: Random stream.

    Returns:
        int64 array of shape (m, count).

    Raises:
        TagError: If tag is not invertible mod q.
        WidthError: If sigma is below the sampler floor.
    """
    q = matrix.modulus
    n = matrix.rows
    if math.gcd(int(tag) % q, q) != 1:
        raise TagError(f"tag {tag} not invertible modulo {q}")
    if matrix.cols != trapdoor.rows + trapdoor.cols or trapdoor.cols != n * digit_count(q):
        raise DimensionError(f"matrix {matrix.shape} does not match trapdoor {trapdoor.R.shape}")
    targets = reduce(np.asarray(targets).reshape(n, -1), q)
    dim = matrix.cols
    check_width(trapdoor, sigma, dim)
    widths = _perturbation_widths(trapdoor, sigma, dim)
    count = targets.shape[1]

    perturbation = sample_dgauss_widths(np.repeat(widths, count), rng).reshape(dim, count)
    residual = np.mod(targets - matmul_mod(matrix.entries, perturbation, q), q)
    residual = mulmod(residual, pow(int(tag) % q, -1, q), q)
    digits = gadget_sample(residual, q, gadget_width(dim), rng)
    preimage = perturbation + np.vstack([trapdoor.R @ digits, digits])

    if not np.array_equal(matmul_mod(matrix.entries, preimage, q), targets):
        raise SamplingError("preimage does not satisfy its linear equation")
    return preimage


def sample_d(matrix: ZqMatrix, trapdoor: GTrapdoor, tag: int, target: ZqVector,
             sigma: float, rng: RngHandle) -> IntVector:
    """Single-syndrome form of sample_d_batch."""
    if target.modulus != matrix.modulus:
        raise ModulusMismatchError(f"target modulus {target.modulus} vs {matrix.modulus}")
    column = sample_d_batch(matrix, trapdoor, tag, target.entries[:, None], sigma, rng)[:, 0]
    return IntVector(column, bound=int(math.ceil(TAIL_CUT * sigma)))


def sample_kernel_basis(matrix: ZqMatrix, trapdoor: GTrapdoor, sigma: float, rng: RngHandle,
                        max_draws: Optional[int] = None) -> np.ndarray:
    """
    m linearly independent short vectors s_i with B·s_i = 0, as the columns of an m×m matrix.

    Raises:
        SamplingError: If independence is not reached within 4·m² draws.
    """
    dim = matrix.cols
    budget = 4 * dim * dim if max_draws is None else int(max_draws)
    tracker = IndependenceTracker(dim)
    columns = []
    draws = 0
    batch = dim // 2 + 8
    while tracker.rank < dim:
        if draws >= budget:
            raise SamplingError(f"kernel basis incomplete: rank {tracker.rank}/{dim} after {draws} draws")
        size = min(batch, budget - draws)
        samples = sample_d_batch(matrix, trapdoor, 1, np.zeros((matrix.rows, size), dtype=np.int64), sigma, rng)
        draws += size
        for column in samples.T:
            if tracker.add(column):
                columns.append(column)
                if tracker.rank == dim:
                    break
    logger.debug("Kernel basis of dimension %d after %d draws", dim, draws)
    return np.stack(columns, axis=1)


def rejection_prob(shift: Union[IntVector, np.ndarray], sample: Union[IntVector, np.ndarray],
                   sigma: float, m_rej: float) -> float:
    """
    min(1, D_σ(z) / (M·D_{σ,v}(z))) = min(1, exp(π(‖v‖² − 2⟨z,v⟩)/σ²) / M).

    Args:
        shift: v.
        sample: z.
        sigma: σ₂.
        m_rej: M.
    """
    v = shift.entries if isinstance(shift, IntVector) else np.asarray(shift, dtype=np.int64)
    z = sample.entries if isinstance(sample, IntVector) else np.asarray(sample, dtype=np.int64)
    if v.shape != z.shape:
        raise DimensionError(f"shift length {v.shape[0]} vs sample length {z.shape[0]}")
    inner = sum(int(a) * int(b) for a, b in zip(z.tolist(), v.tolist())) if v.size else 0
    exponent = math.pi * (l2_norm_sq(v) - 2 * inner) / (sigma * sigma) - math.log(m_rej)
    if exponent >= 0:
        return 1.0
    return math.exp(exponent)
