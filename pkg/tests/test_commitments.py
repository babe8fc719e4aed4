import numpy as np
import pytest

from tracesig.core.lattice import ZqVector
from tracesig.core.samplers import RngHandle
from tracesig.errors import DimensionError
from tracesig.zk.commitments import AuxOpening, aux_commit, aux_verify, bdlop_commit, bdlop_setup

Q = 1_000_003


@pytest.fixture
def crs():
    return bdlop_setup(4, 4, 6, 5, Q, RngHandle(1), 1.6, 200.0, 2, 1.05, 4)


def test_structured_apply_matches_the_dense_matrix(crs):
    rng = RngHandle(2)
    for matrix in (crs.B1, crs.B2):
        dense = matrix.dense()
        assert dense.shape == (matrix.rows, matrix.cols)
        s = rng.integers(-20, 21, size=matrix.cols)
        assert ZqVector(matrix.apply(s), Q) == dense.matvec(ZqVector.from_signed(s, Q))


def test_commitment_with_zero_randomness_exposes_the_message(crs):
    msg = ZqVector(RngHandle(3).uniform_zq(6, Q), Q)
    com = bdlop_commit(crs.B1, np.zeros(crs.B1.cols, dtype=np.int64), msg)
    assert not np.any(com.entries[: crs.l1])
    assert com[crs.l1:] == msg
    with pytest.raises(DimensionError):
        bdlop_commit(crs.B1, np.zeros(crs.B1.cols, dtype=np.int64), ZqVector.zeros(5, Q))
    with pytest.raises(DimensionError):
        crs.B1.apply(np.zeros(3, dtype=np.int64))


def test_commitment_is_linear_in_randomness_and_message(crs):
    rng = RngHandle(4)
    s, t = rng.integers(-5, 6, size=crs.B2.cols), rng.integers(-5, 6, size=crs.B2.cols)
    a, b = ZqVector(rng.uniform_zq(5, Q), Q), ZqVector(rng.uniform_zq(5, Q), Q)
    assert bdlop_commit(crs.B2, s + t, a + b) == bdlop_commit(crs.B2, s, a) + bdlop_commit(crs.B2, t, b)


def test_aux_commitment_opens_only_to_its_payload():
    com, opening = aux_commit(b"payload", RngHandle(5))
    assert aux_verify(com, b"payload", opening)
    assert not aux_verify(com, b"payloaD", opening)
    assert not aux_verify(com, b"payload", AuxOpening(opening.rho[:-1]))
    assert not aux_verify(com, b"payload", AuxOpening(bytes(32)))


def test_crs_fingerprint_is_a_function_of_the_seed():
    first = bdlop_setup(4, 4, 6, 5, Q, RngHandle(9), 1.6, 200.0, 2, 1.05, 4)
    second = bdlop_setup(4, 4, 6, 5, Q, RngHandle(9), 1.6, 200.0, 2, 1.05, 4)
    other = bdlop_setup(4, 4, 6, 5, Q, RngHandle(10), 1.6, 200.0, 2, 1.05, 4)
    assert first.fingerprint == second.fingerprint
    assert first.fingerprint != other.fingerprint
    assert bdlop_setup(4, 4, 6, 5, Q, RngHandle(9), 1.6, 200.0, 2, 1.05, 8).fingerprint != first.fingerprint
