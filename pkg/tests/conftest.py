"""
Shared fixtures: the toy parameter set, a fully joined toy group and a small
lifted statement for the proof-system tests.
"""

import pytest

from tracesig.core.lattice import ZqMatrix, ZqVector
from tracesig.core.params import preset, zk_widths
from tracesig.core.samplers import RngHandle
from tracesig.scheme.harness import HonestHarness
from tracesig.zk.commitments import bdlop_setup
from tracesig.zk.relations import assemble_witness, lift_and_binarize

GROUP_SEED = 2024
SMALL_Q = 1_000_003
SMALL_Q_PRIME = 17


@pytest.fixture(scope="session")
def toy_pp():
    return preset("toy")


@pytest.fixture(scope="session")
def toy_group(toy_pp):
    """Toy group filled to capacity; member i signed message i as signature i - 1."""
    harness = HonestHarness(toy_pp, RngHandle(GROUP_SEED))
    for _ in range(toy_pp.N):
        harness.add_member()
    for ident in sorted(harness.members):
        harness.sign(ident, f"message from member {ident}".encode())
    return harness


@pytest.fixture
def rng():
    return RngHandle(7)


@pytest.fixture(scope="session")
def small_relation():
    """A·x = y mod 17 with x ternary, lifted to a quadratic statement mod SMALL_Q."""
    rng = RngHandle(11)
    A = ZqMatrix(rng.uniform_zq((3, 6), SMALL_Q_PRIME), SMALL_Q_PRIME)
    x = rng.integers(-1, 2, size=6)
    y = A.matvec(ZqVector.from_signed(x, SMALL_Q_PRIME))
    compiled = lift_and_binarize(A, y, 1, SMALL_Q)
    return compiled, assemble_witness(compiled, {"x": x})


@pytest.fixture(scope="session")
def make_crs():
    def build(stmt, kappa=8, p=2, seed=3):
        sigma_1, sigma_2, m_rej = zk_widths(4, 4, stmt.n_vars, stmt.n_triples, p)
        return bdlop_setup(4, 4, stmt.n_vars, stmt.n_triples, stmt.modulus, RngHandle(seed),
                           sigma_1, sigma_2, p, m_rej, kappa)
    return build
