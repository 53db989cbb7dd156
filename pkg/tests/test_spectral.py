import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from antinorm.errors import DomainError
from antinorm.spectral import (
    DIVERGENT,
    NEG_INFINITE,
    AnalyticScale,
    SpectralScale,
    apply_function,
    head_integrals,
    improper_quad,
    merged_breakpoints,
    named_scale,
    s_numbers,
    scale_integral,
    spectral_scale,
    tail_integrals,
    truncate,
)
from oracles import head_mean, singular_values, tail_mean

values_lists = st.lists(st.floats(0.01, 100.0), min_size=1, max_size=8)


def test_from_values_sorts_and_uses_exact_widths():
    a = SpectralScale.from_values([1.0, 3.0, 2.0])
    assert a.values.tolist() == [3.0, 2.0, 1.0]
    assert a.widths == (Fraction(1, 3),) * 3
    assert a.dim == 3 and a.exact


def test_equal_neighbours_merge():
    a = SpectralScale.from_values([2.0, 2.0, 1.0])
    assert a.widths == (Fraction(2, 3), Fraction(1, 3))
    assert a.eigenvalues().tolist() == [2.0, 2.0, 1.0]


@pytest.mark.parametrize("steps", [[(0.5, 1.0), (0.5, 2.0)], [(0.5, 1.0), (0.4, 0.5)], [(1.0, math.inf)],
                                   [(0.0, 1.0), (1.0, 1.0)]])
def test_invalid_scales(steps):
    with pytest.raises(ValueError):
        SpectralScale(steps)


def test_right_continuous_at_breakpoints():
    a = SpectralScale([(0.5, 2.0), (0.5, 1.0)])
    assert a(0.0) == 2.0
    assert a(0.5) == 1.0
    assert a(0.4999) == 2.0


@given(values_lists, st.floats(0.0, 1.0))
def test_head_integral_matches_rational_sum(values, t):
    a = SpectralScale.from_values(values)
    got = scale_integral(a, 0.0, t) if t > 0 else 0.0
    assert got == pytest.approx(head_mean(values, t), rel=1e-12, abs=1e-12)


@given(values_lists, st.floats(0.01, 1.0))
def test_tail_integral_matches_rational_sum(values, t):
    a = SpectralScale.from_values(values)
    assert scale_integral(a, 1.0 - t, 1.0) == pytest.approx(tail_mean(values, t), rel=1e-9, abs=1e-12)


@given(values_lists)
def test_head_and_tail_split_the_total(values):
    a = SpectralScale.from_values(values)
    ts = np.linspace(0, 1, 7)
    total = scale_integral(a)
    assert np.allclose(head_integrals(a, ts) + tail_integrals(a, ts), total, rtol=1e-12)


def test_log_and_neg_power_modes():
    a = SpectralScale([(0.25, 4.0), (0.75, 1.0)])
    assert scale_integral(a, mode="log") == pytest.approx(0.25 * math.log(4))
    assert scale_integral(a, mode="neg_power", p=2) == pytest.approx(0.25 / 16 + 0.75)


def test_zero_value_conventions():
    a = SpectralScale([(0.5, 1.0), (0.5, 0.0)])
    assert scale_integral(a, mode="log") == NEG_INFINITE
    assert scale_integral(a, mode="neg_power", p=1) == DIVERGENT
    assert scale_integral(a, 0.0, 0.5, mode="log") == 0.0


def test_integral_argument_errors():
    a = SpectralScale.constant(1.0)
    with pytest.raises(ValueError):
        scale_integral(a, 0.5, 0.5)
    with pytest.raises(ValueError):
        scale_integral(a, mode="neg_power")
    with pytest.raises(ValueError):
        scale_integral(a, mode="cubic")


def test_boundary_scale_log_integral_closed_form():
    b = named_scale("exp_inv_sqrt")
    # ∫_0^1 -1/sqrt(1-s) ds = -2
    assert scale_integral(b, mode="log") == pytest.approx(-2.0, abs=1e-6)


def test_boundary_scale_log_integral_by_plain_quadrature():
    b = named_scale("exp_inv_sqrt")
    value, _ = integrate.quad(lambda s: float(b.log(s)), 0.0, 1.0, limit=200)
    assert value == pytest.approx(-2.0, abs=1e-3)
    assert scale_integral(b, mode="log") == pytest.approx(value, abs=1e-3)


def test_underflowing_evaluator_without_log_form():
    # the evaluator is exactly 0 near s = 1 in floating point, so the log integral is -inf
    b = AnalyticScale(lambda s: np.exp(-1.0 / np.sqrt(1.0 - s)), "no closed-form log")
    assert scale_integral(b, mode="log") == NEG_INFINITE


@pytest.mark.parametrize("p", [0.01, 0.1, 1.0])
def test_boundary_scale_inverse_powers_diverge(p):
    assert scale_integral(named_scale("exp_inv_sqrt"), mode="neg_power", p=p) == DIVERGENT


def test_exponential_scale_integrals():
    b = named_scale("exp_neg")
    assert scale_integral(b) == pytest.approx(1 - math.exp(-1), rel=1e-10)
    assert scale_integral(b, mode="neg_power", p=1.0) == pytest.approx(math.e - 1, rel=1e-10)
    assert scale_integral(b, mode="log") == pytest.approx(-0.5, rel=1e-10)


def test_linear_scale_inverse_power_threshold():
    b = named_scale("linear")
    assert scale_integral(b, mode="neg_power", p=0.5) == pytest.approx(2.0, rel=1e-6)
    assert scale_integral(b, mode="neg_power", p=1.5) == DIVERGENT


def test_improper_quad_integrable_singularity():
    assert improper_quad(lambda s: 1 / np.sqrt(s), 0.0, 1.0) == pytest.approx(2.0, rel=1e-8)


def test_analytic_scale_must_decrease():
    with pytest.raises(ValueError):
        AnalyticScale(lambda s: s, "increasing")


def test_unknown_named_scale():
    with pytest.raises(ValueError):
        named_scale("nope")


def test_merged_breakpoints_are_exact():
    a = SpectralScale.from_values([1, 2, 3])
    b = SpectralScale.from_values([1, 2])
    assert merged_breakpoints(a, b).tolist() == [0.0, 1 / 3, 0.5, 2 / 3, 1.0]


def test_s_numbers_are_singular_values():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert np.allclose(s_numbers(x).eigenvalues(), singular_values(x), atol=1e-12)


def test_spectral_scale_of_matrix():
    assert spectral_scale(np.diag([1.0, 5.0])).values.tolist() == [5.0, 1.0]


def test_truncate():
    a = SpectralScale.from_values([3.0, 1.0])
    assert truncate(a, 2.0).values.tolist() == [2.0, 1.0]
    with pytest.raises(ValueError):
        truncate(a, -1.0)


def test_apply_function_resorts_non_monotone_maps():
    a = SpectralScale.from_values([3.0, 2.0, 1.0])
    out = apply_function(a, lambda v: (v - 2.0) ** 2)
    assert sorted(out.eigenvalues().tolist()) == [0.0, 1.0, 1.0]
    assert out.values.tolist() == [1.0, 0.0]


def test_apply_function_domain_error():
    with pytest.raises(DomainError):
        apply_function(SpectralScale.from_values([1.0, 0.0]), np.log)


def test_reversed_power():
    a = SpectralScale([(0.25, 4.0), (0.75, 1.0)])
    vals, widths = a.reversed_power(1.0)
    assert vals.tolist() == [1.0, 0.25] and widths.tolist() == [0.75, 0.25]


def test_json_roundtrip_and_equality():
    from antinorm.io import scale_from_json

    a = SpectralScale([(0.25, 4.0), (0.75, 1.0)])
    assert scale_from_json(a.to_json()) == a
    assert hash(a) == hash(SpectralScale([(0.25, 4.0), (0.75, 1.0)]))
