import dataclasses

import pytest
from sympy import isprime

from tracesig.core.lattice import digit_count
from tracesig.core.params import ParamSet, preset, setup, soundness_error, validate_params
from tracesig.errors import ParameterError
from tracesig.zk.relations import q_lower_bounds


def test_toy_preset_validates(toy_pp):
    report = validate_params(toy_pp)
    assert report.passed, report.format()
    assert isprime(toy_pp.q) and isprime(toy_pp.q_prime)
    assert toy_pp.q_prime < toy_pp.q


def test_derived_dimensions_follow_their_formulas(toy_pp):
    kp = digit_count(toy_pp.q_prime)
    assert toy_pp.m_F == toy_pp.n * kp + toy_pp.lambda_desk
    assert toy_pp.m_B == 2 * toy_pp.n * kp + toy_pp.lambda_desk
    assert toy_pp.m_2 == toy_pp.n * toy_pp.k
    assert toy_pp.m_M == 3 * toy_pp.n
    assert toy_pp.ybits_len == toy_pp.m_B * toy_pp.k_prime
    assert (toy_pp.N, toy_pp.ell) == (3, 2)


def test_modulus_clears_every_lower_bound(toy_pp):
    for name, bound in q_lower_bounds(toy_pp):
        assert toy_pp.q > bound, name


@pytest.mark.parametrize("kwargs", [{"lambda_desk": 8, "N": 4}, {"lambda_desk": 8, "N": 3, "p": 1},
                                    {"lambda_desk": 1, "N": 3}, {"lambda_desk": 8, "N": 0}])
def test_setup_rejects_invalid_inputs(kwargs):
    with pytest.raises(ParameterError):
        setup(**kwargs)


def test_unknown_preset_is_a_parameter_error():
    with pytest.raises(ParameterError, match="unknown preset"):
        preset("huge")


def test_preset_is_cached(toy_pp):
    assert preset("toy") is toy_pp


def test_dict_round_trip(toy_pp):
    assert ParamSet.from_dict(toy_pp.to_dict()) == toy_pp
    assert ParamSet.from_dict(dict(toy_pp.to_dict(), extra="ignored")) == toy_pp


def test_tampered_parameters_fail_the_right_rows(toy_pp):
    report = validate_params(dataclasses.replace(toy_pp, q=toy_pp.q + 1))
    assert not report.passed
    assert not report.row("q prime").passed
    report = validate_params(dataclasses.replace(toy_pp, m_F=toy_pp.m_F + 1))
    assert "m_F = n*ceil(log q') + lambda" in [row.name for row in report.failures()]
    assert "[FAIL]" in report.format()


def test_report_row_lookup(toy_pp):
    report = validate_params(toy_pp)
    assert report.row("q > N").passed
    with pytest.raises(KeyError):
        report.row("no such row")


def test_soundness_error_shrinks_with_repetitions(toy_pp):
    assert soundness_error(toy_pp) == pytest.approx((2 / 5) ** toy_pp.kappa)
    assert soundness_error(dataclasses.replace(toy_pp, kappa=16)) < soundness_error(toy_pp)


def test_soundness_error_is_reported_not_asserted(toy_pp):
    report = validate_params(toy_pp)
    with pytest.raises(KeyError):
        report.row("soundness error")
    assert len(report.notes) == 1
    assert "[INFO] soundness error" in report.format()
    assert f"kappa = {toy_pp.kappa}" in report.notes[0]

