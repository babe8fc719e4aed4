import numpy as np
from scipy import stats

from tracesig.core.oracles import (OracleTag, ro_challenge_indices, ro_response_hash, ro_zq_matrix, ro_zq_vector,
                                   xof)


def test_oracles_are_deterministic():
    assert xof(OracleTag.GPV, b"vk", 48) == xof(OracleTag.GPV, b"vk", 48)
    assert ro_zq_vector(OracleTag.GPV, b"vk", 8, 257) == ro_zq_vector(OracleTag.GPV, b"vk", 8, 257)


def test_tags_separate_domains():
    rng = np.random.default_rng(0)
    tags = list(OracleTag)
    for _ in range(1000):
        payload = rng.bytes(int(rng.integers(0, 64)))
        digests = {xof(tag, payload, 32) for tag in tags}
        assert len(digests) == len(tags)


def test_length_prefix_prevents_concatenation_collisions():
    assert xof(OracleTag.SIGN1, b"ab", 32) != xof(OracleTag.SIGN1, b"abc", 32)[:32]
    assert xof(OracleTag.SIGN1, b"", 32) != xof(OracleTag.SIGN2, b"", 32)


def test_matrix_oracle_shape_and_range():
    matrix = ro_zq_matrix(OracleTag.LWE, b"rho", 12, 4, 1021)
    assert matrix.shape == (12, 4)
    assert int(matrix.entries.min()) >= 0 and int(matrix.entries.max()) < 1021


def test_vector_oracle_is_close_to_uniform():
    q = 17
    counts = np.bincount(ro_zq_vector(OracleTag.GPV, b"uniformity", 100_000, q).entries, minlength=q)
    assert stats.chisquare(counts).pvalue > 0.001


def test_challenge_indices_lie_in_one_to_four():
    indices = ro_challenge_indices(OracleTag.SIGN1, b"transcript", 37)
    assert len(indices) == 37
    assert set(indices) <= {1, 2, 3, 4}
    assert ro_challenge_indices(OracleTag.SIGN1, b"transcript", 37) == indices


def test_response_hash_preserves_length():
    for size in (0, 1, 33, 1000):
        response = bytes(range(256)) * 4
        assert len(ro_response_hash(OracleTag.SIGN2, response[:size])) == size
    assert ro_response_hash(OracleTag.SIGN2, b"x" * 40) != ro_response_hash(OracleTag.CLAIM2, b"x" * 40)
