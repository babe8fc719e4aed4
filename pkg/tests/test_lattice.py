import numpy as np
import pytest

from tracesig.core.lattice import (MAX_MODULUS, BitVector, IndependenceTracker, IntVector, SparseZqMatrix,
                                   ZqMatrix, ZqVector, bin_decompose, bin_recompose, gadget_matrix, inf_norm,
                                   l2_norm_sq, mulmod, range_decompose, range_gadget, range_recompose, rank_mod,
                                   solve_mod)
from tracesig.core.samplers import RngHandle
from tracesig.errors import DimensionError, ModulusMismatchError, NormBoundError, RangeError


def test_mulmod_matches_python_integers_near_the_modulus_cap():
    q = (1 << 52) - 47
    rng = RngHandle(1)
    a = rng.uniform_zq(200, q)
    b = rng.uniform_zq(200, q)
    expected = [(int(x) * int(y)) % q for x, y in zip(a, b)]
    assert mulmod(a, b, q).tolist() == expected


def test_matvec_matches_naive_big_integer_product():
    rng = RngHandle(2)
    for q in (17, 257, (1 << 40) + 15):
        for _ in range(20):
            m = rng.uniform_zq((8, 8), q)
            v = rng.uniform_zq(8, q)
            expected = [sum(int(m[i, j]) * int(v[j]) for j in range(8)) % q for i in range(8)]
            assert ZqMatrix(m, q).matvec(ZqVector(v, q)).entries.tolist() == expected


def test_zq_vector_rejects_non_canonical_entries():
    with pytest.raises(RangeError):
        ZqVector([0, 5], 5)
    assert ZqVector.from_signed([-1, 6], 5).entries.tolist() == [4, 1]
    assert ZqVector([4, 1], 5).signed().tolist() == [-1, 1]


def test_mixed_moduli_and_lengths_are_errors():
    with pytest.raises(ModulusMismatchError):
        ZqVector([1, 2], 5) + ZqVector([1, 2], 7)
    with pytest.raises(DimensionError):
        ZqVector([1, 2], 5) - ZqVector([1], 5)
    with pytest.raises(ModulusMismatchError):
        ZqMatrix([[1, 2]], 5).matvec(ZqVector([1, 1], 7))


def test_modulus_range_is_enforced():
    with pytest.raises(RangeError):
        ZqVector([0], MAX_MODULUS + 1)
    with pytest.raises(RangeError):
        ZqVector([0], 1)


def test_gadget_matrix_small_case():
    assert gadget_matrix(2, 4).entries.tolist() == [[1, 2, 0, 0], [0, 0, 1, 2]]
    with pytest.raises(DimensionError):
        gadget_matrix(2, 4, width=3)


@pytest.mark.parametrize("value,bits", [(0, [0, 0, 0]), (3, [1, 1, 0]), (4, [0, 0, 1])])
def test_bin_decompose_known_values(value, bits):
    assert bin_decompose(ZqVector([value], 5)).entries.tolist() == bits


def test_bin_recompose_known_values():
    assert bin_recompose(BitVector([1, 1, 0]), 5).entries.tolist() == [3]
    assert bin_recompose(BitVector([1, 1, 1]), 5).entries.tolist() == [2]
    with pytest.raises(DimensionError):
        bin_recompose(BitVector([1, 1]), 5)


@pytest.mark.parametrize("q", [5, 17, 257])
def test_gadget_times_binary_decomposition_is_identity(q):
    rng = RngHandle(q)
    u = ZqVector(rng.uniform_zq(3, q), q)
    bits = bin_decompose(u)
    assert gadget_matrix(3, q).matvec(bits) == u
    assert bin_recompose(bits, q) == u


@pytest.mark.parametrize("beta,gadget", [(1, [1, 1]), (2, [2, 1, 1]), (3, [3, 2, 1])])
def test_range_gadget_known_values(beta, gadget):
    assert range_gadget(beta).tolist() == gadget


def test_range_decomposition_covers_the_whole_interval():
    for beta in range(1, 9):
        assert int(range_gadget(beta).sum()) == 2 * beta
        for value in range(2 * beta + 1):
            bits = range_decompose(value, beta)
            assert set(bits.entries.tolist()) <= {0, 1}
            assert range_recompose(bits, beta) == value
    assert range_decompose(2, 1).entries.tolist() == [1, 1]
    assert range_decompose(4, 2).entries.tolist() == [1, 1, 1]
    with pytest.raises(RangeError):
        range_decompose(5, 2)
    with pytest.raises(RangeError):
        range_gadget(0)


def test_norms():
    assert inf_norm(IntVector([0, 0, 0])) == 0
    assert (inf_norm(IntVector([3, -4])), l2_norm_sq(IntVector([3, -4]))) == (4, 25)
    assert (inf_norm(IntVector([-7, 2, 7])), l2_norm_sq(IntVector([-7, 2, 7]))) == (7, 102)
    big = np.array([1 << 40, -(1 << 40)], dtype=np.int64)
    assert l2_norm_sq(big) == 2 * (1 << 80)


def test_int_vector_checks_its_declared_bound():
    with pytest.raises(NormBoundError):
        IntVector([3, -5], bound=4)
    assert IntVector([3, -5]).bound == 5


def test_solve_mod_unique_underdetermined_and_inconsistent():
    q = 101
    m = np.array([[1, 2], [3, 4], [5, 6]])
    x = np.array([7, 9])
    rhs = (m @ x) % q
    assert solve_mod(m, rhs, q).tolist() == [7, 9]
    assert solve_mod(np.array([[1, 1]]), np.array([3]), q) is None
    bad = rhs.copy()
    bad[2] = (bad[2] + 1) % q
    assert solve_mod(m, bad, q) is None


def test_rank_and_independence_tracker():
    assert rank_mod(np.array([[1, 2, 3], [2, 4, 6]])) == 1
    tracker = IndependenceTracker(3)
    assert tracker.add(np.array([1, 0, 1]))
    assert not tracker.add(np.array([2, 0, 2]))
    assert tracker.add(np.array([0, 1, 0]))
    assert tracker.rank == 2


def test_sparse_matrix_agrees_with_dense():
    q = 97
    rows = np.array([0, 0, 1, 2, 2, 0])
    cols = np.array([1, 3, 0, 2, 2, 1])
    vals = np.array([5, 7, 96, 50, 50, 10])
    sparse = SparseZqMatrix.from_triplets(rows, cols, vals, (3, 4), q)
    dense = sparse.dense()
    v = np.array([3, 1, 4, 1])
    assert sparse.matvec(v) == dense.matvec(v)
    assert dense.entries[0, 1] == 15
    assert dense.entries[2, 2] == 3
