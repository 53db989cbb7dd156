import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from antinorm import (
    Derived,
    FKDet,
    FlagVerificationError,
    KyFan,
    MarcusLopes,
    PreconditionError,
    Schatten,
    SchattenQ,
    SpectralScale,
    TailIntegral,
    UnsupportedCombination,
    named_scale,
)
from antinorm.functions import (
    angle,
    as_class_s,
    compose_classS,
    identity,
    min_power,
    parse_function,
    power,
    sinh_power,
    t_arctan,
)
from antinorm.verify import (
    check_classS_superadditivity,
    check_det_minkowski,
    check_equivalence,
    check_inverse_power_sum,
    check_marcus_lopes_ratio,
    check_product_inequality,
    check_rotfeld,
    check_superadditivity,
    check_trace_ratio,
    check_trace_truncation,
    counterexample_trace_truncation,
    search_trace_truncation,
)

import oracles
from conftest import dims, seeds

CONVEX = [power(2.0), angle(1.0), t_arctan()]
MIN_T_T2 = as_class_s(min_power(1.0, 2.0))
CLASS_S = [MIN_T_T2, compose_classS(min_power(1.0, 2.0), sinh_power(2.0)), as_class_s(t_arctan())]


def _pair(seed, n, shift=0.0):
    rng = np.random.default_rng(seed)
    return oracles.random_psd(rng, n, shift=shift), oracles.random_psd(rng, n, shift=shift)


def _g_of(x, g):
    w, q = np.linalg.eigh(x)
    return (q * g(np.clip(w, 0, None))) @ q.conj().T


# hand-computed instances


def test_inverse_power_sum_exact_instance():
    a, b = np.diag([1.0, 2.0]), np.diag([2.0, 1.0])
    r = check_inverse_power_sum(KyFan(1.0), 3, a, b)
    # A+B = 3I: Σ 3^{-k} = 13/27 per eigenvalue, mean 13/27
    assert r.lhs == pytest.approx(27 / 13, rel=1e-12)
    # A: eigenvalues 1 and 2 give 3 and 7/8, mean 31/16
    assert r.rhs == pytest.approx(2 * 16 / 31, rel=1e-12)
    assert r.passed and r.details["derived_route_agrees"]


def test_marcus_lopes_exact_instance():
    a, b = np.diag([1.0, 2.0]), np.diag([2.0, 1.0])
    r = check_marcus_lopes_ratio(identity(), 1.0, 2, a, b)
    # e2/e1 at (3,3) is 9/6; at (1,2) it is 2/3 for each of A and B
    assert r.lhs == pytest.approx(1.5, rel=1e-12)
    assert r.rhs == pytest.approx(4 / 3, rel=1e-12)


def test_trace_truncation_counterexample():
    a, b, values = counterexample_trace_truncation()
    assert values == {"sum_truncated": pytest.approx(1.0), "truncated_sum": pytest.approx(2.0)}
    r = check_trace_truncation()
    assert r.passed and r.lhs == pytest.approx(1.0, abs=1e-12)


def test_trace_truncation_search_finds_a_pair(rng):
    r = search_trace_truncation(rng)
    assert r.passed and r.lhs > 1e-6


# property suites against an independent evaluation


@given(seeds, dims, st.sampled_from(range(3)), st.floats(0.1, 1.0), st.floats(0.2, 3.0))
def test_superadditivity_derived_kyfan(seed, n, k, t, p):
    a, b = _pair(seed, n)
    g = CONVEX[k]
    r = check_superadditivity(Derived(KyFan(t), p), g, a, b, seed=seed)
    assert r.passed
    ga = _g_of(a + b, g)
    if oracles.psd_min_eig(ga) > 1e-9:
        assert r.lhs == pytest.approx(oracles.derived_kyfan(oracles.eigs(ga), t, p), rel=1e-8)


@given(seeds, dims, st.sampled_from(range(3)))
def test_superadditivity_other_kinds(seed, n, k):
    a, b = _pair(seed, n)
    for spec in (SchattenQ(0.5), TailIntegral(0.5), FKDet(), MarcusLopes(min(2, n))):
        assert check_superadditivity(spec, CONVEX[k], a, b).passed


@given(seeds, dims, st.sampled_from(range(3)))
def test_rotfeld_routes_agree(seed, n, k):
    a, b = _pair(seed, n)
    g = CONVEX[k]
    r = check_rotfeld(g, a, b)
    assert r.passed and r.details["routes_agree"]
    expected = np.trace(_g_of(a + b, g)).real / n
    assert r.lhs == pytest.approx(expected, rel=1e-9, abs=1e-12)


@given(seeds, dims, st.lists(st.floats(0.2, 1.5), min_size=1, max_size=3).filter(lambda ps: sum(ps) >= 1))
def test_product_inequality(seed, n, ps):
    a, b = _pair(seed, n, shift=0.1)
    assert check_product_inequality(Schatten(2.0), ps, a, b).passed


def test_product_needs_exponents_summing_to_one():
    with pytest.raises(PreconditionError):
        check_product_inequality(KyFan(1.0), (0.3, 0.3), np.eye(2), np.eye(2))


def test_corollaries_need_nonsingular_inputs():
    with pytest.raises(PreconditionError, match="singular"):
        check_inverse_power_sum(KyFan(1.0), 2, np.diag([1.0, 0.0]), np.eye(2))


@given(seeds, dims, st.integers(1, 10))
def test_inverse_power_sum(seed, n, m):
    a, b = _pair(seed, n, shift=0.1)
    r = check_inverse_power_sum(Schatten(3.0), m, a, b)
    assert r.passed and r.details["derived_route_agrees"]


@given(seeds, dims, st.floats(0.1, 1.0), st.integers(1, 6))
def test_marcus_lopes_ratio(seed, n, q, m):
    a, b = _pair(seed, n, shift=0.1)
    m = min(m, n)
    g = power(2.0)
    r = check_marcus_lopes_ratio(g, q, m, a, b)
    assert r.passed and r.details["direct_ratio_agrees"]
    lam = oracles.eigs(a + b) ** (2 * q)
    assert r.lhs == pytest.approx((oracles.esym(lam, m) / oracles.esym(lam, m - 1)) ** (1 / q), rel=1e-8)


@given(seeds, dims, st.sampled_from(range(3)), st.floats(0.2, 2.0))
def test_class_s_superadditivity(seed, n, k, p):
    a, b = _pair(seed, n)
    assert check_classS_superadditivity(Derived(Schatten(2.0), p), CLASS_S[k], a, b).passed


def test_class_s_rejects_other_kinds():
    with pytest.raises(UnsupportedCombination):
        check_classS_superadditivity(FKDet(), MIN_T_T2, np.eye(2), np.eye(2))


@given(seeds, dims, st.sampled_from(range(3)), st.floats(0.1, 1.0))
def test_trace_ratio(seed, n, k, p):
    a, b = _pair(seed, n, shift=0.1)
    assert check_trace_ratio(power(2.0), CLASS_S[k], p, a, b).passed


@given(seeds, dims, st.sampled_from(range(3)), st.sampled_from(range(3)))
def test_det_minkowski(seed, n, i, j):
    a, b = _pair(seed, n, shift=0.05)
    r = check_det_minkowski(CLASS_S[i], CLASS_S[j], a, b)
    assert r.passed and r.details["geometric_mean_route_agrees"]


def test_unverified_function_is_rejected():
    with pytest.raises(FlagVerificationError):
        check_superadditivity(FKDet(), parse_function("sqrt(t)"), np.eye(2), np.eye(2))


# equivalence of log-supermajorization and the derived anti-norm order


@given(seeds, st.integers(1, 5))
def test_equivalence_holding_pairs(seed, k):
    rng = np.random.default_rng(seed)
    b_vals = np.sort(rng.uniform(0.1, 3.0, k + 1))[::-1]
    a = SpectralScale.from_values(b_vals * rng.uniform(1.0, 2.0, k + 1))
    b = SpectralScale.from_values(b_vals)
    r = check_equivalence(a, b)
    assert r.passed and r.details["direction"] == "relation_holds"


@given(seeds, st.integers(1, 5))
def test_equivalence_violations_are_detected(seed, k):
    rng = np.random.default_rng(seed)
    vals = np.sort(rng.uniform(0.5, 3.0, k + 1))[::-1]
    b = SpectralScale.from_values(vals)
    # shrinking the smallest eigenvalue breaks the tail log-integral order
    low = vals.copy()
    low[-1] *= rng.uniform(0.1, 0.9)
    a = SpectralScale.from_values(low)
    r = check_equivalence(a, b)
    assert r.passed and r.details["direction"] == "relation_fails" and r.details["p"] <= 1e-3


def test_equivalence_out_of_scope_for_divergent_scale():
    r = check_equivalence(SpectralScale.constant(1.0), named_scale("exp_inv_sqrt"))
    assert r.out_of_scope and r.to_json()["out_of_scope"] is True


def test_equivalence_against_analytic_scale():
    b = named_scale("exp_neg")
    a = SpectralScale.constant(math.exp(-0.5))
    assert check_equivalence(a, b).passed
