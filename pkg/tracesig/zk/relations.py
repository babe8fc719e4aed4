"""
Relation compiler.

Turns the scheme's linear relations into one quadratic statement over Z_q:
relations mod q′ are lifted to integer equations with a bounded slack vector,
short values become range-gadget bits, and every bit coordinate is forced to
{0, 1} by a self-product triple. Segments shared between blocks (the binary
decomposition of the user secret, the LWE sample, the identity) occupy the same
coordinates in every block that references them.

Slack bounds are derived from static coefficient bounds, so the witness layout
depends only on the parameters and not on the public matrices.
"""

import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..core.lattice import (SparseZqMatrix, ZqMatrix, ZqVector, bin_digits, centered, digit_count,
                            mulmod, range_decompose_many, range_digit_count, range_gadget, reduce,
                            sum_mod)
from ..core.params import ParamSet
from ..errors import DimensionError, ParameterError, RangeError, WitnessError
from .quadratic import QuadraticStatement, QuadraticWitness

logger = logging.getLogger(__name__)

BITS = "bits"
SIGNED = "signed"
FREE = "free"

SIGN_KIND = "sign"
CLAIM_KIND = "claim"

_SPLIT_BITS = 26
_SPLIT_MASK = (1 << _SPLIT_BITS) - 1


@dataclass(frozen=True)
class Segment:
    """
    A named run of witness coordinates.

    bits:   count coordinates, each 0/1.
    signed: count values in [−beta, beta], each stored as range-gadget bits of value + beta.
    free:   count unconstrained Z_q coordinates; `bound` is the magnitude used for lifting.
    """

    name: str
    kind: str
    count: int
    offset: int
    beta: int = 0
    bound: int = 1

    @property
    def width(self) -> int:
        return range_digit_count(self.beta) if self.kind == SIGNED else 1

    @property
    def length(self) -> int:
        return self.count * self.width

    @property
    def value_bound(self) -> int:
        if self.kind == BITS:
            return 1
        if self.kind == SIGNED:
            return self.beta
        return self.bound

    def columns(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + self.length, dtype=np.int64)


class WitnessLayout:
    """Ordered segment table; declaring an existing name returns the shared segment."""

    def __init__(self):
        self._segments: "OrderedDict[str, Segment]" = OrderedDict()
        self.size = 0

    def declare(self, name: str, kind: str, count: int, beta: int = 0, bound: int = 1) -> Segment:
        if kind not in (BITS, SIGNED, FREE):
            raise DimensionError(f"unknown segment kind {kind!r}")
        if kind == SIGNED and beta < 1:
            raise RangeError(f"signed segment {name} needs beta >= 1")
        existing = self._segments.get(name)
        if existing is not None:
            if (existing.kind, existing.count, existing.beta) != (kind, count, beta):
                raise DimensionError(f"segment {name} redeclared with a different shape")
            return existing
        segment = Segment(name, kind, int(count), self.size, int(beta), int(bound))
        self._segments[name] = segment
        self.size += segment.length
        return segment

    def __getitem__(self, name: str) -> Segment:
        try:
            return self._segments[name]
        except KeyError:
            raise DimensionError(f"no segment named {name}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._segments

    def __iter__(self) -> Iterator[Segment]:
        return iter(self._segments.values())

    def bit_columns(self) -> np.ndarray:
        parts = [seg.columns() for seg in self if seg.kind != FREE]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def describe(self) -> List[Tuple[str, str, int, int]]:
        return [(seg.name, seg.kind, seg.offset, seg.length) for seg in self]


@dataclass(eq=False)
class Term:
    """Coefficients (row, logical index, coefficient) acting on one segment."""

    segment: str
    rows: np.ndarray
    index: np.ndarray
    coeffs: np.ndarray
    coeff_bound: Optional[int] = None

    @classmethod
    def dense(cls, segment: str, matrix: np.ndarray, coeff_bound: Optional[int] = None,
              row_offset: int = 0) -> "Term":
        matrix = np.asarray(matrix, dtype=np.int64)
        rows, cols = matrix.shape
        return cls(segment,
                   np.repeat(np.arange(rows, dtype=np.int64), cols) + row_offset,
                   np.tile(np.arange(cols, dtype=np.int64), rows),
                   matrix.reshape(-1), coeff_bound)

    @classmethod
    def diagonal(cls, segment: str, count: int, coeff: int = 1, row_offset: int = 0) -> "Term":
        span = np.arange(count, dtype=np.int64)
        return cls(segment, span + row_offset, span, np.full(count, int(coeff), dtype=np.int64))

    @classmethod
    def gadget(cls, segment: str, count: int, powers: np.ndarray, row_offset: int = 0) -> "Term":
        """Row r gets powers[t] on logical index r·k + t."""
        k = len(powers)
        return cls(segment,
                   np.repeat(np.arange(count, dtype=np.int64), k) + row_offset,
                   np.arange(count * k, dtype=np.int64),
                   np.tile(np.asarray(powers, dtype=np.int64), count))

    def abs_coeffs(self) -> np.ndarray:
        if self.coeff_bound is not None:
            return np.full(self.coeffs.shape[0], int(self.coeff_bound), dtype=np.int64)
        return np.abs(self.coeffs)


@dataclass(eq=False)
class Block:
    """One group of rows of the compiled statement."""

    name: str
    rows: int
    terms: List[Term]
    rhs: np.ndarray
    lifted_modulus: Optional[int] = None
    slack: Optional[str] = None
    beta_prime: int = 0
    q_bound: int = 0
    row_offset: int = 0
    products: List[Tuple[Tuple[str, int], Tuple[str, int], Tuple[str, int]]] = field(default_factory=list)

    @property
    def lifted(self) -> bool:
        return self.lifted_modulus is not None


@dataclass(eq=False)
class CompiledStatement:
    """Quadratic statement plus the layout and block table needed to build witnesses."""

    kind: str
    modulus: int
    layout: WitnessLayout
    blocks: List[Block]
    n_vars: int
    n_rows: int
    n_triples: int
    statement: Optional[QuadraticStatement] = None

    def block(self, name: str) -> Block:
        for block in self.blocks:
            if block.name == name:
                return block
        raise DimensionError(f"no block named {name}")

    @property
    def fingerprint(self) -> bytes:
        if self.statement is None:
            raise ParameterError("shape-only compilation has no statement")
        return self.statement.fingerprint


def _row_sum_mod(rows: np.ndarray, values: np.ndarray, n_rows: int, modulus: int) -> np.ndarray:
    """Per-row sums of canonical values mod q (float bincount is exact on 26-bit halves)."""
    if not rows.size:
        return np.zeros(n_rows, dtype=np.int64)
    low = np.rint(np.bincount(rows, weights=(values & _SPLIT_MASK).astype(np.float64), minlength=n_rows))
    high = np.rint(np.bincount(rows, weights=(values >> _SPLIT_BITS).astype(np.float64), minlength=n_rows))
    shift = (1 << _SPLIT_BITS) % modulus
    return np.mod(mulmod(reduce(high.astype(np.int64), modulus), shift, modulus)
                  + reduce(low.astype(np.int64), modulus), modulus)


class StatementBuilder:
    """
    Collects blocks over a shared layout and compiles them.

    With assemble=False only the layout and the counts are produced (no matrices).
    """

    def __init__(self, modulus: int, layout: Optional[WitnessLayout] = None, assemble: bool = True):
        self.modulus = int(modulus)
        self.layout = layout or WitnessLayout()
        self.assemble = assemble
        self.blocks: List[Block] = []
        self.rows = 0

    def _contributions(self, n_rows: int, terms: Sequence[Term]) -> np.ndarray:
        contrib = np.zeros(n_rows, dtype=np.int64)
        for term in terms:
            bound = self.layout[term.segment].value_bound
            np.add.at(contrib, term.rows, term.abs_coeffs() * bound)
        return contrib

    def lifted(self, name: str, q_prime: int, n_rows: int, terms: List[Term], rhs: np.ndarray) -> Block:
        """
        Add Σ c̃·value − q′·a = ỹ over the integers for a relation that holds mod q′.

        Coefficients and rhs must be centered mod q′. The slack a is a fresh signed
        segment whose bound covers the worst-case row.
        """
        half = (q_prime - 1) // 2
        contrib = int(self._contributions(n_rows, terms).max()) if n_rows else 0
        beta_prime = max(1, -(-(contrib + half) // q_prime))
        slack = self.layout.declare(f"{name}_slack", SIGNED, n_rows, beta=beta_prime)
        block = Block(name, n_rows, list(terms) + [Term.diagonal(slack.name, n_rows, -q_prime)],
                      np.asarray(rhs, dtype=np.int64), lifted_modulus=q_prime, slack=slack.name,
                      beta_prime=beta_prime, q_bound=contrib + q_prime * beta_prime + half + 1)
        return self._append(block)

    def native(self, name: str, n_rows: int, terms: List[Term], rhs: np.ndarray,
               products: Sequence[Tuple[Tuple[str, int], Tuple[str, int], Tuple[str, int]]] = ()) -> Block:
        """Add rows that already hold modulo q."""
        block = Block(name, n_rows, list(terms), reduce(rhs, self.modulus), products=list(products))
        return self._append(block)

    def _append(self, block: Block) -> Block:
        block.row_offset = self.rows
        self.rows += block.rows
        self.blocks.append(block)
        return block

    def _expand(self, block: Block) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        q = self.modulus
        rows_out, cols_out, vals_out = [], [], []
        rhs = reduce(block.rhs, q)
        for term in block.terms:
            seg = self.layout[term.segment]
            if term.index.size and term.index.max() >= seg.count:
                raise DimensionError(f"term on {seg.name} indexes past its {seg.count} values")
            coeffs = reduce(term.coeffs, q)
            if seg.kind == SIGNED:
                gadget = reduce(range_gadget(seg.beta), q)
                k = gadget.shape[0]
                n = coeffs.shape[0]
                rows_out.append(np.repeat(term.rows, k))
                cols_out.append(seg.offset + np.repeat(term.index * k, k) + np.tile(np.arange(k), n))
                vals_out.append(mulmod(np.repeat(coeffs, k), np.tile(gadget, n), q))
                # coef·value = Σ coef·g1[t]·bit_t − coef·β
                shift = mulmod(coeffs, seg.beta % q, q)
                rhs = np.mod(rhs + _row_sum_mod(term.rows, shift, block.rows, q), q)
            else:
                rows_out.append(term.rows)
                cols_out.append(seg.offset + term.index)
                vals_out.append(coeffs)
        return (np.concatenate(rows_out) + block.row_offset, np.concatenate(cols_out),
                np.concatenate(vals_out), rhs)

    def _product_columns(self, block: Block) -> List[Tuple[int, int, int]]:
        out = []
        for triple in block.products:
            cols = []
            for name, index in triple:
                seg = self.layout[name]
                if seg.kind != FREE or not 0 <= index < seg.count:
                    raise DimensionError(f"product references {name}[{index}], which is not a free coordinate")
                cols.append(seg.offset + index)
            out.append(tuple(cols))
        return out

    def finish(self, kind: str) -> CompiledStatement:
        bits = self.layout.bit_columns()
        n_products = sum(len(block.products) for block in self.blocks)
        compiled = CompiledStatement(kind, self.modulus, self.layout, self.blocks,
                                     self.layout.size, self.rows, int(bits.shape[0]) + n_products)
        if not self.assemble:
            return compiled
        for block in self.blocks:
            if block.lifted and self.modulus <= block.q_bound:
                raise ParameterError(f"block {block.name}: q={self.modulus} does not exceed "
                                     f"the lifting bound {block.q_bound}")
        rows, cols, vals, rhs = [], [], [], []
        for block in self.blocks:
            r, c, v, y = self._expand(block)
            rows.append(r)
            cols.append(c)
            vals.append(v)
            rhs.append(y)
        A = SparseZqMatrix.from_triplets(np.concatenate(rows), np.concatenate(cols), np.concatenate(vals),
                                         (self.rows, self.layout.size), self.modulus)
        triples = [np.stack([bits, bits, bits], axis=1)]
        for block in self.blocks:
            if block.products:
                triples.append(np.array(self._product_columns(block), dtype=np.int64))
        compiled.statement = QuadraticStatement(A, ZqVector(np.concatenate(rhs), self.modulus),
                                                np.concatenate(triples))
        logger.debug("Compiled %s statement: %d vars, %d rows, %d triples, nnz=%d",
                     kind, compiled.n_vars, compiled.n_rows, compiled.n_triples, A.nnz)
        return compiled


def _centered_gadget(q_prime: int, sign: int = 1) -> np.ndarray:
    powers = np.left_shift(np.int64(1), np.arange(digit_count(q_prime), dtype=np.int64))
    return centered(sign * powers, q_prime)


def _gadget_product(matrix: np.ndarray, q_prime: int) -> np.ndarray:
    """matrix · G mod q′, where G = I ⊗ (1, 2, ..., 2^{k′−1})."""
    k = digit_count(q_prime)
    powers = np.left_shift(np.int64(1), np.arange(k, dtype=np.int64))
    return mulmod(np.repeat(reduce(matrix, q_prime), k, axis=1), np.tile(powers, matrix.shape[1])[None, :], q_prime)


def _declare_shared(layout: WitnessLayout, n: int, m_F: int, m_B: int, q_prime: int, N: int,
                    with_cert: bool) -> None:
    kp = digit_count(q_prime)
    layout.declare("z", BITS, m_F)
    layout.declare("w", BITS, n * kp)
    if with_cert:
        layout.declare("ybits", BITS, m_B * kp)
        layout.declare("id", FREE, 1, bound=N)
        if N > 1:
            layout.declare("id_off", SIGNED, 1, beta=(N - 1) // 2)


def build_sis_block(builder: StatementBuilder, F: ZqMatrix) -> Block:
    """F·z − G·w ≡ 0 mod q′ with z and w = bin(x) binary."""
    q_prime = F.modulus
    n, m_F = F.shape
    kp = digit_count(q_prime)
    half = (q_prime - 1) // 2
    builder.layout.declare("z", BITS, m_F)
    builder.layout.declare("w", BITS, n * kp)
    terms = [Term.dense("z", centered(F.entries, q_prime), coeff_bound=half),
             Term.gadget("w", n, _centered_gadget(q_prime, -1))]
    return builder.lifted("sis", q_prime, n, terms, np.zeros(n, dtype=np.int64))


def build_lwe_sample_block(builder: StatementBuilder, B: ZqMatrix, B_lwe: int) -> Block:
    """Bᵀx + e − y ≡ 0 mod q′ with x given by its bits w and y by its bits."""
    q_prime = B.modulus
    n, m_B = B.shape
    kp = digit_count(q_prime)
    half = (q_prime - 1) // 2
    builder.layout.declare("w", BITS, n * kp)
    builder.layout.declare("ybits", BITS, m_B * kp)
    builder.layout.declare("e", SIGNED, m_B, beta=B_lwe)
    terms = [Term.dense("w", centered(_gadget_product(B.T.entries, q_prime), q_prime), coeff_bound=half),
             Term.diagonal("e", m_B),
             Term.gadget("ybits", m_B, _centered_gadget(q_prime, -1))]
    return builder.lifted("lwe_sample", q_prime, m_B, terms, np.zeros(m_B, dtype=np.int64))


def build_enc_block(builder: StatementBuilder, B: ZqMatrix, v: ZqVector, c: ZqVector, scale: int,
                    N: int, B_gpv: int) -> Block:
    """(Bᵀ; vᵀ)·r + e_c + (0, …, 0, scale·id) ≡ c mod q′ with r given by its bits."""
    q_prime = B.modulus
    n, m_B = B.shape
    kp = digit_count(q_prime)
    half = (q_prime - 1) // 2
    if len(v) != n or len(c) != m_B + 1:
        raise DimensionError(f"ciphertext of length {len(c)} does not fit an {n}×{m_B} key")
    builder.layout.declare("id", FREE, 1, bound=N)
    builder.layout.declare("r_bits", BITS, n * kp)
    builder.layout.declare("e_c", SIGNED, m_B + 1, beta=B_gpv)
    stacked = np.vstack([B.T.entries, v.entries[None, :]])
    terms = [Term.dense("r_bits", centered(_gadget_product(stacked, q_prime), q_prime), coeff_bound=half),
             Term.diagonal("e_c", m_B + 1),
             Term("id", np.array([m_B], dtype=np.int64), np.zeros(1, dtype=np.int64),
                  np.array([centered(scale, q_prime)], dtype=np.int64))]
    return builder.lifted("enc", q_prime, m_B + 1, terms, centered(c.entries, q_prime))


def build_lwe_secret_block(builder: StatementBuilder, M: ZqMatrix, t: ZqVector, B_lwe: int) -> Block:
    """M·x + e_t ≡ t mod q′ with x given by its bits w."""
    q_prime = M.modulus
    m_M, n = M.shape
    kp = digit_count(q_prime)
    half = (q_prime - 1) // 2
    if len(t) != m_M:
        raise DimensionError(f"tag of length {len(t)}, expected {m_M}")
    builder.layout.declare("w", BITS, n * kp)
    builder.layout.declare("e_t", SIGNED, m_M, beta=B_lwe)
    terms = [Term.dense("w", centered(_gadget_product(M.entries, q_prime), q_prime), coeff_bound=half),
             Term.diagonal("e_t", m_M)]
    return builder.lifted("lwe_secret", q_prime, m_M, terms, centered(t.entries, q_prime))


def build_cert_block(builder: StatementBuilder, A: ZqMatrix, A_prime: ZqMatrix, D: ZqMatrix, u: ZqVector,
                     N: int, beta_1: int, beta_2: int) -> Block:
    """
    Certificate relation, native mod q:

        A v1 + A′ v2 + p − D·ybits = u,   p_j = id · w_j,   w_j = Σ_t 2^t v2[j, t],

    plus id = 1 + (N−1)/2 + id_off tying the identity to its range bits.
    """
    q = A.modulus
    n, m_1 = A.shape
    m_2 = A_prime.cols
    k = digit_count(q)
    if m_2 != n * k:
        raise DimensionError(f"A' has {m_2} columns, expected n*k = {n * k}")
    layout = builder.layout
    layout.declare("ybits", BITS, D.cols)
    layout.declare("id", FREE, 1, bound=N)
    layout.declare("v1", SIGNED, m_1, beta=beta_1)
    layout.declare("v2", SIGNED, m_2, beta=beta_2)
    layout.declare("cert_w", FREE, n, bound=q)
    layout.declare("cert_p", FREE, n, bound=q)
    powers = reduce(-np.left_shift(np.int64(1), np.arange(k, dtype=np.int64)), q)
    terms = [Term.dense("v1", A.entries),
             Term.dense("v2", A_prime.entries),
             Term.diagonal("cert_p", n),
             Term.dense("ybits", reduce(-D.entries, q)),
             Term.diagonal("cert_w", n, row_offset=n),
             Term.gadget("v2", n, powers, row_offset=n)]
    rhs = np.concatenate([u.entries, np.zeros(n, dtype=np.int64), [1]])
    id_row = 2 * n
    terms.append(Term("id", np.array([id_row]), np.zeros(1, dtype=np.int64), np.ones(1, dtype=np.int64)))
    if N > 1:
        beta_id = (N - 1) // 2
        layout.declare("id_off", SIGNED, 1, beta=beta_id)
        terms.append(Term("id_off", np.array([id_row]), np.zeros(1, dtype=np.int64),
                          np.array([q - 1], dtype=np.int64)))
        rhs[-1] = 1 + beta_id
    products = [(("cert_p", j), ("id", 0), ("cert_w", j)) for j in range(n)]
    return builder.native("cert", 2 * n + 1, terms, rhs, products)


@dataclass(eq=False)
class SignPublic:
    """Public inputs of the signing relation."""

    A: ZqMatrix
    A_prime: ZqMatrix
    D: ZqMatrix
    u: ZqVector
    B: ZqMatrix
    F: ZqMatrix
    v: ZqVector
    c: ZqVector
    M: ZqMatrix
    t: ZqVector


def assemble_sign_statement(public: SignPublic, pp: ParamSet, assemble: bool = True) -> CompiledStatement:
    """SIS ∧ LWE-sample ∧ Enc ∧ LWE-secret ∧ Cert over shared segments."""
    builder = StatementBuilder(pp.q, assemble=assemble)
    _declare_shared(builder.layout, pp.n, pp.m_F, pp.m_B, pp.q_prime, pp.N, with_cert=True)
    build_sis_block(builder, public.F)
    build_lwe_sample_block(builder, public.B, pp.B_lwe)
    build_enc_block(builder, public.B, public.v, public.c, pp.ibe_scale, pp.N, pp.B_gpv)
    build_lwe_secret_block(builder, public.M, public.t, pp.B_lwe)
    build_cert_block(builder, public.A, public.A_prime, public.D, public.u, pp.N, pp.beta_1, pp.beta_2)
    return builder.finish(SIGN_KIND)


def assemble_claim_statement(F: ZqMatrix, M: ZqMatrix, t: ZqVector, pp: ParamSet,
                             assemble: bool = True) -> CompiledStatement:
    """SIS ∧ LWE-secret: knowledge of z behind the tag t."""
    builder = StatementBuilder(pp.q, assemble=assemble)
    _declare_shared(builder.layout, pp.n, pp.m_F, pp.m_B, pp.q_prime, pp.N, with_cert=False)
    build_sis_block(builder, F)
    build_lwe_secret_block(builder, M, t, pp.B_lwe)
    return builder.finish(CLAIM_KIND)


def lift_and_binarize(A: ZqMatrix, y: ZqVector, beta: int, modulus: int) -> CompiledStatement:
    """
    Standalone lifting of A·x ≡ y mod q′ with ‖x‖∞ ≤ beta into a quadratic statement mod q.

    Raises:
        ParameterError: If q is not above the lifting bound.
    """
    q_prime = A.modulus
    if y.modulus != q_prime or len(y) != A.rows:
        raise DimensionError("target does not match the matrix")
    half = (q_prime - 1) // 2
    builder = StatementBuilder(modulus)
    builder.layout.declare("x", SIGNED, A.cols, beta=beta)
    builder.lifted("lift", q_prime, A.rows, [Term.dense("x", centered(A.entries, q_prime), coeff_bound=half)],
                   centered(y.entries, q_prime))
    return builder.finish("lift")


def _lifted_slack(block: Block, layout: WitnessLayout, values: Mapping[str, np.ndarray]) -> np.ndarray:
    lhs = np.zeros(block.rows, dtype=np.int64)
    for term in block.terms:
        if term.segment == block.slack:
            continue
        if term.segment not in values:
            raise WitnessError(f"segment {term.segment}: no value supplied")
        current = np.asarray(values[term.segment], dtype=np.int64)
        if current.shape[0] != layout[term.segment].count:
            raise WitnessError(f"segment {term.segment}: {current.shape[0]} values, "
                               f"expected {layout[term.segment].count}")
        np.add.at(lhs, term.rows, term.coeffs * current[term.index])
    diff = lhs - block.rhs
    if np.any(diff % block.lifted_modulus):
        raise WitnessError(f"block {block.name}: relation does not hold mod {block.lifted_modulus}")
    slack = diff // block.lifted_modulus
    if np.any(np.abs(slack) > block.beta_prime):
        raise WitnessError(f"block {block.name}: slack exceeds {block.beta_prime}")
    return slack


def assemble_witness(compiled: CompiledStatement, values: Mapping[str, np.ndarray]) -> QuadraticWitness:
    """
    Lay out the logical segment values; slack segments are computed here.

    Signed and free segments take their (signed) values, bit segments 0/1 entries.

    Raises:
        WitnessError: Naming the offending segment or block on any violation.
    """
    layout = compiled.layout
    q = compiled.modulus
    values = {name: np.asarray(v, dtype=np.int64).reshape(-1) for name, v in values.items()}
    for seg in layout:
        if seg.kind == SIGNED and seg.name in values:
            current = values[seg.name]
            if current.size and int(np.max(np.abs(current))) > seg.beta:
                raise WitnessError(f"segment {seg.name}: value exceeds bound {seg.beta}")
    for block in compiled.blocks:
        if block.lifted:
            values[block.slack] = _lifted_slack(block, layout, values)
    x = np.zeros(layout.size, dtype=np.int64)
    for seg in layout:
        if seg.name not in values:
            raise WitnessError(f"segment {seg.name}: no value supplied")
        current = values[seg.name]
        if current.shape[0] != seg.count:
            raise WitnessError(f"segment {seg.name}: {current.shape[0]} values, expected {seg.count}")
        if seg.kind == BITS:
            if current.size and (current.min() < 0 or current.max() > 1):
                raise WitnessError(f"segment {seg.name}: entries must be bits")
            placed = current
        elif seg.kind == SIGNED:
            placed = range_decompose_many(current + seg.beta, seg.beta)
        else:
            placed = reduce(current, q)
        x[seg.offset: seg.offset + seg.length] = placed
    return QuadraticWitness(ZqVector(x, q))


def block_holds(compiled: CompiledStatement, witness: QuadraticWitness, name: str) -> bool:
    """Check only the linear rows of one block."""
    stmt = compiled.statement
    block = compiled.block(name)
    lo, hi = block.row_offset, block.row_offset + block.rows
    indptr = stmt.A.indptr[lo: hi + 1]
    sub = SparseZqMatrix((block.rows, stmt.n_vars), indptr - indptr[0],
                         stmt.A.indices[indptr[0]: indptr[-1]], stmt.A.data[indptr[0]: indptr[-1]], stmt.modulus)
    return sub.matvec(witness.x) == stmt.y[lo:hi]


def sign_values(pp: ParamSet, *, z: np.ndarray, x: np.ndarray, y: np.ndarray, e: np.ndarray, r: np.ndarray,
                e_c: np.ndarray, e_t: np.ndarray, ident: int, v1: np.ndarray, v2: np.ndarray) -> Dict[str, np.ndarray]:
    """Logical segment values of an honest signer."""
    q = pp.q
    k = pp.k
    v2 = np.asarray(v2, dtype=np.int64)
    powers = np.left_shift(np.int64(1), np.arange(k, dtype=np.int64))
    cert_w = sum_mod(mulmod(reduce(v2.reshape(pp.n, k), q), powers[None, :], q), q, axis=1)
    values = {
        "z": z,
        "w": bin_digits(x, pp.q_prime),
        "ybits": bin_digits(y, pp.q_prime),
        "id": np.array([ident]),
        "e": e,
        "r_bits": bin_digits(r, pp.q_prime),
        "e_c": e_c,
        "e_t": e_t,
        "v1": v1,
        "v2": v2,
        "cert_w": cert_w,
        "cert_p": mulmod(cert_w, ident % q, q),
    }
    if pp.N > 1:
        values["id_off"] = np.array([ident - 1 - (pp.N - 1) // 2])
    return values


def claim_values(pp: ParamSet, *, z: np.ndarray, x: np.ndarray, e_t: np.ndarray) -> Dict[str, np.ndarray]:
    return {"z": z, "w": bin_digits(x, pp.q_prime), "e_t": e_t}


def _placeholder_public(pp: ParamSet) -> SignPublic:
    q, qp = pp.q, pp.q_prime
    return SignPublic(
        A=ZqMatrix.zeros(pp.n, pp.m_1, q), A_prime=ZqMatrix.zeros(pp.n, pp.m_2, q),
        D=ZqMatrix.zeros(pp.n, pp.ybits_len, q), u=ZqVector.zeros(pp.n, q),
        B=ZqMatrix.zeros(pp.n, pp.m_B, qp), F=ZqMatrix.zeros(pp.n, pp.m_F, qp),
        v=ZqVector.zeros(pp.n, qp), c=ZqVector.zeros(pp.m_B + 1, qp),
        M=ZqMatrix.zeros(pp.m_M, pp.n, qp), t=ZqVector.zeros(pp.m_M, qp),
    )


@lru_cache(maxsize=32)
def _shape(pp: ParamSet, kind: str) -> CompiledStatement:
    public = _placeholder_public(pp)
    if kind == SIGN_KIND:
        return assemble_sign_statement(public, pp, assemble=False)
    if kind == CLAIM_KIND:
        return assemble_claim_statement(public.F, public.M, public.t, pp, assemble=False)
    raise ParameterError(f"unknown statement kind {kind!r}")


def statement_shape(pp: ParamSet, kind: str) -> Tuple[int, int, int]:
    """(n′, ℓ, rows) of the sign or claim statement for these parameters."""
    compiled = _shape(pp, kind)
    return compiled.n_vars, compiled.n_triples, compiled.n_rows


def q_lower_bounds(pp: ParamSet) -> List[Tuple[str, int]]:
    """
    Lower bounds on q from lifting each mod-q′ block (the ones the compiler enforces),
    followed by the closed-form bounds for the SIS, LWE and encryption relations.
    """
    bounds = [(f"{block.name} lift", block.q_bound) for block in _shape(pp, SIGN_KIND).blocks if block.lifted]
    qp = pp.q_prime
    bounds += [
        ("q'(m_F+1)", qp * (pp.m_F + 1)),
        ("q'+q'^2+2B_lwe", qp + qp * qp + 2 * pp.B_lwe),
        ("q'(1+n*q'/2+B_gpv+N)/2", qp * (1 + pp.n * qp / 2 + pp.B_gpv + pp.N) / 2),
    ]
    return bounds
