"""Inequality checks over concrete matrices and scales.

Each ``check_*`` function evaluates both sides of one inequality on given
inputs and returns an :class:`~antinorm.reports.InequalityReport` whose
margin is non-negative when the inequality holds. Where two independent
routes compute the same quantity, both are evaluated and their agreement is
part of the verdict.
"""
import dataclasses
import math
from functools import lru_cache

import numpy as np

from .errors import PreconditionError, UnsupportedCombination
from .functions import inverse_power_sum_function, require_flags
from .gauges import (
    Derived,
    FKDet,
    SchattenQ,
    _log_tail_mean_power,
    log_derived_kyfan,
    marcus_lopes_ratio,
    norm_eval,
    psd_scale,
    spec_to_json,
)
from .linalg import as_hermitian, clamp_psd, eigvalsh, elementary_symmetric, matrix_function
from .majorization import relation_check
from .reports import fingerprint, make_report
from .spectral import (
    DIVERGENT,
    NEG_INFINITE,
    AnalyticScale,
    SpectralScale,
    apply_function,
    merged_breakpoints,
    scale_integral,
)

__all__ = [
    "check_superadditivity",
    "check_classS_superadditivity",
    "check_rotfeld",
    "check_product_inequality",
    "check_inverse_power_sum",
    "check_marcus_lopes_ratio",
    "check_trace_ratio",
    "check_det_minkowski",
    "check_equivalence",
    "counterexample_trace_truncation",
    "check_trace_truncation",
    "search_trace_truncation",
    "NONSINGULAR_MIN",
    "EQUIVALENCE_P_GRID",
    "DETECTION_P_GRID",
]

RTOL = 1e-9
NONSINGULAR_MIN = 1e-10
ROUTE_RTOL = 1e-9
EQUIVALENCE_P_GRID = (1e-4, 1e-3, 1e-2, 1e-1, 0.5, 1.0, 2.0, 5.0)
EQUIVALENCE_T_GRID = (0.1, 0.25, 0.5, 0.75, 1.0)
DETECTION_P_GRID = (1e-1, 1e-2, 1e-3, 1e-4)
DETECTION_P_MAX = 1e-3


def _with_route(report, other, name):
    """Fold a second-route value into a report: both routes must agree."""
    agree = abs(other - report.lhs) <= ROUTE_RTOL * max(1.0, abs(report.lhs), abs(other))
    details = dict(report.details, **{name: other, f"{name}_agrees": bool(agree)})
    return dataclasses.replace(report, passed=report.passed and agree, details=details)


def _nonsingular(*mats):
    out = []
    for x in mats:
        x = as_hermitian(x)
        low = float(eigvalsh(x)[-1])
        if low <= NONSINGULAR_MIN:
            raise PreconditionError(f"input is singular or not positive definite (min eigenvalue {low:.3g})")
        out.append(x)
    return out


def _mapped(x, g):
    return apply_function(psd_scale(x), g)


def _super_report(case_id, value, a, b, inputs, seed, rtol):
    lhs = value(a + b)
    va, vb = value(a), value(b)
    return make_report(case_id, lhs, va + vb, inputs, seed=seed, rtol=rtol,
                       details={"at_a": va, "at_b": vb})


# --------------------------------------------------------------------------
# superadditivity of g(A) under anti-norms


def check_superadditivity(spec, g, a, b, seed=0, rtol=RTOL, case_id="superadditivity"):
    """``||g(A+B)||_! >= ||g(A)||_! + ||g(B)||_!`` for convex ``g`` with ``g(0) = 0``."""
    require_flags(g, {"convex", "zero_at_zero"})
    a, b = as_hermitian(a), as_hermitian(b)
    return _super_report(case_id, lambda x: spec.on_scale(_mapped(x, g)), a, b,
                         (a, b, g.description, spec_to_json(spec)), seed, rtol)


def check_classS_superadditivity(spec, psi, a, b, seed=0, rtol=RTOL, case_id="classS"):
    """Superadditivity of ``psi(A)`` for certified class-S ``psi`` and a derived anti-norm."""
    if not isinstance(spec, Derived):
        raise UnsupportedCombination("class-S superadditivity is established for derived anti-norms only")
    require_flags(psi, {"class_s"})
    a, b = as_hermitian(a), as_hermitian(b)
    return _super_report(case_id, lambda x: spec.on_scale(_mapped(x, psi)), a, b,
                         (a, b, psi.description, spec_to_json(spec)), seed, rtol)


def _ml_value(x, g, q, m):
    values = clamp_psd(eigvalsh(as_hermitian(x)))
    with np.errstate(all="ignore"):
        gq = np.maximum(g(values), 0.0) ** q
    ratio, _ = marcus_lopes_ratio(gq, m)
    return ratio ** (1.0 / q)


def check_rotfeld(g, a, b, seed=0, rtol=RTOL, case_id="rotfeld"):
    """``τ g(A+B) >= τ g(A) + τ g(B)``, evaluated twice.

    The first route is the ``m = q = 1`` ratio of elementary symmetric
    polynomials (an unnormalized trace, divided by ``n``); the second is
    :func:`check_superadditivity` with ``SchattenQ(1)``. Their margins must
    agree to ``1e-12`` relative.
    """
    require_flags(g, {"convex", "zero_at_zero"})
    a, b = as_hermitian(a), as_hermitian(b)
    n = a.shape[0]
    report = _super_report(case_id, lambda x: _ml_value(x, g, 1.0, 1) / n, a, b,
                           (a, b, g.description), seed, rtol)
    other = check_superadditivity(SchattenQ(1.0), g, a, b, seed=seed, rtol=rtol)
    scale = max(1.0, abs(report.lhs), abs(report.rhs))
    agree = abs(other.margin - report.margin) <= 1e-12 * scale
    details = dict(report.details, schattenq_margin=other.margin, routes_agree=bool(agree))
    return dataclasses.replace(report, passed=report.passed and other.passed and agree, details=details)


# --------------------------------------------------------------------------
# corollaries on nonsingular inputs


def check_product_inequality(g, ps, a, b, seed=0, rtol=RTOL, case_id="product"):
    """``Π ||(A+B)^{-p_i}||^{-1} >= Π ||A^{-p_i}||^{-1} + Π ||B^{-p_i}||^{-1}`` with ``Σ p_i >= 1``."""
    ps = tuple(float(p) for p in ps)
    if not ps or any(p <= 0 for p in ps):
        raise ValueError("exponents must be positive")
    if sum(ps) < 1:
        raise PreconditionError("exponents must sum to at least 1")
    a, b = _nonsingular(a, b)

    def value(x):
        out = 1.0
        for p in ps:
            out /= norm_eval(g, matrix_function(x, lambda v, p=p: v ** (-p), psd=True))
        return out

    return _super_report(case_id, value, a, b, (a, b, spec_to_json(g), ps), seed, rtol)


@lru_cache(maxsize=None)
def _inverse_power_sum_function(m):
    return inverse_power_sum_function(m)


def check_inverse_power_sum(g, m, a, b, seed=0, rtol=RTOL, case_id="inverse_power_sum"):
    """``||Σ_k (A+B)^{-k}||^{-1} >= ||Σ_k A^{-k}||^{-1} + ||Σ_k B^{-k}||^{-1}``, ``k = 1..m``.

    The scalar function ``t -> (Σ t^{-k})^{-1}`` is certified convex first;
    the left side is cross-checked against the derived anti-norm of that
    function of ``A + B``.
    """
    m = int(m)
    gm = require_flags(_inverse_power_sum_function(m), {"convex", "zero_at_zero"})
    a, b = _nonsingular(a, b)

    def value(x):
        total = matrix_function(x, lambda v: sum(v ** (-k) for k in range(1, m + 1)), psd=True)
        return 1.0 / norm_eval(g, total)

    report = _super_report(case_id, value, a, b, (a, b, spec_to_json(g), m), seed, rtol)
    return _with_route(report, Derived(g, 1.0).on_scale(_mapped(a + b, gm)), "derived_route")


def check_marcus_lopes_ratio(g, q, m, a, b, seed=0, rtol=RTOL, case_id="marcus_lopes"):
    """``(e_m/e_{m-1})^{1/q}`` of ``g^q`` is superadditive for increasing convex ``g``, ``g(0) = 0``."""
    require_flags(g, {"convex", "zero_at_zero", "non_decreasing"})
    if not 0 < q <= 1:
        raise ValueError("q must lie in (0, 1]")
    a, b = _nonsingular(a, b)
    n = a.shape[0]
    if not 1 <= m <= n:
        raise ValueError(f"order m={m} out of range for dimension {n}")
    report = _super_report(case_id, lambda x: _ml_value(x, g, q, m), a, b,
                           (a, b, g.description, float(q), int(m)), seed, rtol)
    # the same ratio from the two elementary symmetric values directly
    values = clamp_psd(eigvalsh(a + b))
    gq = np.maximum(g(values), 0.0) ** q
    direct = (elementary_symmetric(gq, m) / elementary_symmetric(gq, m - 1)) ** (1.0 / q)
    return _with_route(report, direct, "direct_ratio")


def check_trace_ratio(g, psi, p, a, b, seed=0, rtol=RTOL, case_id="trace_ratio"):
    """``τ(g^p(X)) / τ(ψ^{p-1}(X))`` is superadditive in ``X``.

    ``g`` convex with ``g(0) = 0``; ``ψ`` class-S and increasing; ``0 < p <= 1``.
    """
    require_flags(g, {"convex", "zero_at_zero"})
    require_flags(psi, {"class_s", "non_decreasing"})
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    a, b = _nonsingular(a, b)

    def value(x):
        values = clamp_psd(eigvalsh(x))
        with np.errstate(all="ignore"):
            num = np.mean(np.maximum(g(values), 0.0) ** p)
            den = np.mean(psi(values) ** (p - 1.0))
        if not (math.isfinite(num) and math.isfinite(den)) or den <= 0:
            raise PreconditionError("trace ratio is undefined on this input")
        return float(num / den)

    return _super_report(case_id, value, a, b, (a, b, g.description, psi.description, float(p)),
                         seed, rtol)


def check_det_minkowski(psi, omega, a, b, seed=0, rtol=RTOL, case_id="det_minkowski"):
    """``Δ(√(ψω)(A+B)) >= Δ(√(ψω)(A)) + Δ(√(ψω)(B))`` for class-S ``ψ, ω``.

    Each determinant is also computed as ``(Δ(ψ(X)) Δ(ω(X)))^{1/2}``; the
    two routes must agree.
    """
    require_flags(psi, {"class_s"})
    require_flags(omega, {"class_s"})
    a, b = as_hermitian(a), as_hermitian(b)
    det = FKDet()

    def root(v):
        with np.errstate(all="ignore"):
            return np.sqrt(np.maximum(psi(v), 0.0) * np.maximum(omega(v), 0.0))

    def value(x):
        return det.on_scale(apply_function(psd_scale(x), root, non_decreasing=True))

    report = _super_report(case_id, value, a, b, (a, b, psi.description, omega.description), seed, rtol)
    t = a + b
    split = math.sqrt(det.on_scale(_mapped(t, psi)) * det.on_scale(_mapped(t, omega)))
    return _with_route(report, split, "geometric_mean_route")


# --------------------------------------------------------------------------
# equivalence of log-supermajorization and derived anti-norm order


def _normalized_log(x, t, p):
    """``log`` of the normalized power mean ``((1/t)∫_{1-t}^1 x^{-p})^{-1/p}``."""
    m = _log_tail_mean_power(x, t, p)
    return NEG_INFINITE if m == DIVERGENT else -m / p


def _hypothesis_holds(b, p_grid=EQUIVALENCE_P_GRID):
    return any(scale_integral(b, mode="neg_power", p=p) != DIVERGENT for p in p_grid)


def _tail_lengths(a, b):
    ts = merged_breakpoints(a, b) if isinstance(b, SpectralScale) else np.array([0.0, 1.0])
    lengths = {round(float(1.0 - t), 15) for t in ts[:-1]} | set(EQUIVALENCE_T_GRID)
    return sorted(x for x in lengths if x > 0)


def _gap(lhs, rhs):
    if lhs == rhs:
        return 0.0
    return lhs - rhs


def check_equivalence(a, b, seed=0, rtol=RTOL, case_id="equivalence"):
    """Bidirectional test of log-supermajorization against derived anti-norms.

    If ``a ≺^{w(log)} b``, every ``Derived(KyFan(t), p)`` on the ``(t, p)``
    grid must rank ``a`` above ``b`` (compared in the log domain, normalized
    by ``t``). If the relation fails, some ``p <= 1e-3`` at the failing tail
    length must expose a strict gap. When every negative-power integral of
    ``b`` diverges the instance is reported out of scope.
    """
    inputs = (repr(a), repr(b))
    if not _hypothesis_holds(b):
        return dataclasses.replace(
            make_report(case_id, 0.0, 0.0, inputs, seed=seed, details={"reason": "divergent_inverse_powers"}),
            out_of_scope=True,
        )
    if isinstance(b, AnalyticScale):
        holds, worst_t = True, None
    else:
        rel = relation_check(a, b, "super_wlog")
        holds, worst_t = rel.holds, rel.worst_t
    if holds:
        return _equivalence_grid(a, b, inputs, seed, rtol, case_id)
    return _equivalence_detect(a, b, worst_t, inputs, seed, rtol, case_id)


def _equivalence_grid(a, b, inputs, seed, rtol, case_id):
    worst = None
    for t in _tail_lengths(a, b):
        for p in EQUIVALENCE_P_GRID:
            la, lb = _normalized_log(a, t, p), _normalized_log(b, t, p)
            gap = _gap(la, lb)
            tol = rtol * max(1.0, *(abs(v) for v in (la, lb) if math.isfinite(v)))
            if worst is None or gap + tol < worst[0] + worst[1]:
                worst = (gap, tol, t, p, la, lb)
    gap, tol, t, p, la, lb = worst
    return make_report(case_id, la, lb, inputs, seed=seed, tolerance=tol,
                       details={"direction": "relation_holds", "t": t, "p": p})


def _equivalence_detect(a, b, worst_t, inputs, seed, rtol, case_id):
    first = round(1.0 - worst_t, 15)
    order = [first] + [t for t in _tail_lengths(a, b) if t != first]
    for t in order:
        for p in DETECTION_P_GRID:
            if p > DETECTION_P_MAX:
                continue
            la, lb = log_derived_kyfan(a, t, p), log_derived_kyfan(b, t, p)
            tol = rtol * max(1.0, abs(la), abs(lb))
            if lb - la > tol:
                return make_report(case_id, lb - la, tol, inputs, seed=seed, tolerance=0.0,
                                   details={"direction": "relation_fails", "t": t, "p": p,
                                            "log_value_a": la, "log_value_b": lb})
    return make_report(case_id, 0.0, 1.0, inputs, seed=seed, tolerance=0.0,
                       details={"direction": "relation_fails", "detected": False})


# --------------------------------------------------------------------------
# truncated traces are not superadditive


def _truncated_trace(x, level):
    return float(np.sum(np.minimum(clamp_psd(eigvalsh(x)), level)))


def counterexample_trace_truncation(scale=1.0, level=1.0):
    """The pair ``A = B = c·[[1/2, 1/2], [1/2, 1/2]]`` with ``Tr min(·, level)``.

    Returns ``(A, B, values)`` with the truncated trace of ``A + B`` and the
    sum of the truncated traces of ``A`` and ``B``; the second exceeds the
    first for ``c >= 1``.
    """
    a = scale * np.array([[0.5, 0.5], [0.5, 0.5]])
    b = a.copy()
    values = {
        "sum_truncated": _truncated_trace(a + b, level),
        "truncated_sum": _truncated_trace(a, level) + _truncated_trace(b, level),
    }
    return a, b, values


def check_trace_truncation(scale=1.0, min_gap=0.999, seed=0, case_id="trace_truncation"):
    """Report that ``Tr min(A,1) + Tr min(B,1) - Tr min(A+B,1) >= min_gap`` for the fixed pair."""
    a, b, values = counterexample_trace_truncation(scale)
    gap = values["truncated_sum"] - values["sum_truncated"]
    return make_report(case_id, gap, min_gap, (a, b, float(scale)), seed=seed, tolerance=1e-10,
                       details=values)


def search_trace_truncation(rng, draws=500, seed=0, case_id="trace_truncation_search"):
    """Random rank-one 2x2 pairs until the truncated trace fails superadditivity."""
    for k in range(draws):
        vecs = rng.standard_normal((2, 2))
        scales = rng.uniform(0.5, 3.0, size=2)
        a, b = (s * np.outer(v, v) / (v @ v) for s, v in zip(scales, vecs))
        gap = _truncated_trace(a, 1.0) + _truncated_trace(b, 1.0) - _truncated_trace(a + b, 1.0)
        if gap > 1e-6:
            return make_report(case_id, gap, 0.0, (a, b), seed=seed, tolerance=0.0,
                               details={"draws": k + 1})
    return make_report(case_id, 0.0, 1.0, (fingerprint(seed),), seed=seed, tolerance=0.0,
                       details={"draws": draws, "found": False})
