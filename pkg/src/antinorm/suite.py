"""Seeded random suites over the inequality checks.

Every case is a function ``(rng, n, ctx) -> [InequalityReport, ...]`` that
draws one random instance of dimension ``n``. Trials get independent
generators seeded from ``(seed, case id, trial)``, so a case's reports do
not depend on which other cases run or on how trials are spread over
threads.
"""
import csv
import io
import json
import math
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from . import functions as fn
from .errors import AntinormError, WitnessNotFound
from .gauges import (
    ANTINORM_KINDS,
    Derived,
    FKDet,
    KyFan,
    LogMean,
    MarcusLopes,
    Mixture,
    OperatorSup,
    PowerCompose,
    QLift,
    Schatten,
    SchattenQ,
    TailIntegral,
    cauchy_schwarz_check,
    delta_limit_check,
    derived_limit_check,
    norm_eval,
    psd_scale,
    sandwich_check,
    spec_to_json,
)
from .linalg import haar_unitary, matrix_function, polar, psd_margin, unitarity_defect
from .majorization import relation_check, wlog_weaker_witness
from .orbit import (
    ACCEPT_TOL,
    agm_witness,
    dominance_unitary,
    mixed_witness,
    orbit_witness,
    triangle_witness,
)
from .reports import fingerprint, make_equality_report, make_report
from .spectral import AnalyticScale, SpectralScale, named_scale
from .verify import (
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
    search_trace_truncation,
)

__all__ = ["SuiteConfig", "SuiteResult", "CASES", "SUITES", "run_suite", "random_psd", "resolve_cases"]

UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class SuiteConfig:
    trials: int = 200
    dims: Tuple[int, ...] = (2, 3, 4, 5, 6)
    tolerance: float = 1e-9
    seed: int = 0
    cases: Tuple[str, ...] = ()
    scale_b: Optional[str] = None
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(n) for n in self.dims))
        object.__setattr__(self, "cases", tuple(self.cases))
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not self.dims or min(self.dims) < 2:
            raise ValueError("dims must be a non-empty list of sizes >= 2")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        resolve_cases(self.cases or ("all",))


@dataclass(frozen=True)
class _Context:
    seed: int
    rtol: float
    scale_b: Optional[str]


@dataclass
class SuiteResult:
    reports: list
    summary: list = field(default_factory=list)

    @property
    def passed(self):
        return all(r.passed for r in self.reports)

    def jsonl(self):
        return "".join(json.dumps(r.to_json(), sort_keys=True) + "\n" for r in self.reports)

    def summary_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["case_id", "reports", "failures", "out_of_scope", "min_margin", "runtime_s"])
        for row in self.summary:
            writer.writerow([row["case_id"], row["reports"], row["failures"], row["out_of_scope"],
                             repr(row["min_margin"]), f"{row['runtime_s']:.3f}"])
        return buf.getvalue()


# --------------------------------------------------------------------------
# random inputs


def random_psd(rng, n, nonsingular=False, rank=None, min_eig=0.1):
    """``G G* / n`` with complex Gaussian ``G`` of ``rank`` columns.

    Without ``rank`` a full-rank draw is shifted so its smallest eigenvalue
    is at least ``min_eig`` (for ``nonsingular``) or ``1e-2`` otherwise;
    with ``rank < n`` the result is exactly singular before round-off.
    """
    if nonsingular:
        rank = n
    elif rank is None:
        rank = int(rng.integers(1, n + 1))
    g = (rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))) / math.sqrt(2 * n)
    a = g @ g.conj().T
    a = 0.5 * (a + a.conj().T)
    if rank == n:
        low = np.linalg.eigvalsh(a)[0]
        floor = min_eig if nonsingular else 1e-2
        if low < floor:
            a = a + (floor - low) * np.eye(n)
    return a


def random_matrix(rng, n):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2 * n)


def random_gauge(rng, depth=0):
    kind = int(rng.integers(0, 5 if depth == 0 else 3))
    if kind == 0:
        return KyFan(float(rng.uniform(0.05, 1.0)))
    if kind == 1:
        return Schatten(float(rng.uniform(1.0, 4.0)))
    if kind == 2:
        return OperatorSup()
    if kind == 3:
        return Mixture(((float(rng.uniform(0.1, 1.0)), random_gauge(rng, 1)),
                        (float(rng.uniform(0.1, 1.0)), random_gauge(rng, 1))))
    return QLift(random_gauge(rng, 1))


def random_antinorm(rng, n, kind=None, depth=0):
    kinds = ANTINORM_KINDS if depth == 0 else ANTINORM_KINDS[:-1]
    cls = kinds[int(rng.integers(0, len(kinds)))] if kind is None else kind
    if cls is Derived:
        return Derived(random_gauge(rng), float(rng.uniform(0.1, 4.0)))
    if cls is TailIntegral:
        return TailIntegral(float(rng.uniform(0.05, 1.0)))
    if cls is LogMean:
        return LogMean(float(rng.uniform(0.05, 1.0)))
    if cls is FKDet:
        return FKDet()
    if cls is SchattenQ:
        return SchattenQ(float(rng.uniform(0.05, 1.0)))
    if cls is MarcusLopes:
        return MarcusLopes(int(rng.integers(1, n + 1)))
    return PowerCompose(float(rng.uniform(0.1, 0.95)), random_antinorm(rng, n, depth=1))


def _pick(rng, items):
    return items[int(rng.integers(0, len(items)))]


# --------------------------------------------------------------------------
# function catalogue, built once so flag verification is cached


@lru_cache(maxsize=None)
def _catalogue():
    square = fn.power(2.0)
    hinge = fn.angle(1.0)
    tat = fn.t_arctan()
    min12 = fn.min_power(1.0, 2.0)
    composite = fn.compose_classS(min12, fn.sinh_power(2.0))
    return {
        "convex": (square, hinge, tat),
        "increasing_convex": (fn.identity(), square, fn.power(1.5), tat),
        "class_s": (fn.as_class_s(min12), composite, fn.as_class_s(tat)),
        "class_s_increasing": (fn.as_class_s(min12), fn.as_class_s(tat), composite),
        "concave": (fn.parse_function("sqrt(t)"), fn.parse_function("log(1+t)"),
                    fn.parse_function("t/(1+t)")),
        "mixed": (fn.identity(), square, tat),
    }


def _inputs_pair(rng, n, nonsingular=False):
    return random_psd(rng, n, nonsingular), random_psd(rng, n, nonsingular)


# --------------------------------------------------------------------------
# theorem cases


SUPER_KINDS = (Derived, SchattenQ, TailIntegral, LogMean, FKDet, MarcusLopes)


def _case_superadditivity(rng, n, ctx):
    a, b = _inputs_pair(rng, n)
    out = []
    for g in _catalogue()["convex"]:
        for kind in SUPER_KINDS:
            if kind is Derived:
                spec = Derived(KyFan(float(rng.uniform(0.05, 1.0))), float(rng.uniform(0.1, 4.0)))
            else:
                spec = random_antinorm(rng, n, kind)
            out.append(check_superadditivity(spec, g, a, b, seed=ctx.seed, rtol=ctx.rtol))
    return out


def _case_rotfeld(rng, n, ctx):
    a, b = _inputs_pair(rng, n)
    g = _pick(rng, _catalogue()["convex"])
    return [check_rotfeld(g, a, b, seed=ctx.seed, rtol=ctx.rtol)]


def _case_product(rng, n, ctx):
    a, b = _inputs_pair(rng, n, nonsingular=True)
    k = int(rng.integers(1, 4))
    ps = rng.uniform(0.1, 1.5, size=k)
    if ps.sum() < 1:
        ps = ps / ps.sum() * float(rng.uniform(1.0, 2.0))
    return [check_product_inequality(random_gauge(rng), tuple(ps), a, b, seed=ctx.seed, rtol=ctx.rtol)]


def _case_inverse_power_sum(rng, n, ctx):
    a, b = _inputs_pair(rng, n, nonsingular=True)
    m = int(rng.integers(1, 11))
    return [check_inverse_power_sum(random_gauge(rng), m, a, b, seed=ctx.seed, rtol=ctx.rtol)]


def _case_marcus_lopes(rng, n, ctx):
    a, b = _inputs_pair(rng, n, nonsingular=True)
    g = _pick(rng, _catalogue()["increasing_convex"])
    q = float(rng.uniform(0.05, 1.0))
    m = int(rng.integers(1, n + 1))
    return [check_marcus_lopes_ratio(g, q, m, a, b, seed=ctx.seed, rtol=ctx.rtol)]


def _case_classS(rng, n, ctx):
    a, b = _inputs_pair(rng, n)
    out = []
    for psi in _catalogue()["class_s"]:
        spec = Derived(random_gauge(rng), float(rng.uniform(0.1, 4.0)))
        out.append(check_classS_superadditivity(spec, psi, a, b, seed=ctx.seed, rtol=ctx.rtol))
    return out


def _case_trace_ratio(rng, n, ctx):
    a, b = _inputs_pair(rng, n, nonsingular=True)
    g = _pick(rng, _catalogue()["convex"])
    psi = _pick(rng, _catalogue()["class_s_increasing"])
    p = float(rng.uniform(0.05, 1.0))
    return [check_trace_ratio(g, psi, p, a, b, seed=ctx.seed, rtol=ctx.rtol)]


def _case_det_minkowski(rng, n, ctx):
    a, b = _inputs_pair(rng, n)
    psi = _pick(rng, _catalogue()["class_s"])
    omega = _pick(rng, _catalogue()["class_s"])
    return [check_det_minkowski(psi, omega, a, b, seed=ctx.seed, rtol=ctx.rtol)]


# --------------------------------------------------------------------------
# axioms


def _case_axioms_gauge(rng, n, ctx):
    g = random_gauge(rng)
    x, y = random_matrix(rng, n), random_matrix(rng, n)
    a, b = _inputs_pair(rng, n)
    u, v = haar_unitary(n, rng), haar_unitary(n, rng)
    c = float(rng.uniform(0.1, 10.0))
    key = spec_to_json(g)
    nx = norm_eval(g, x)
    return [
        make_equality_report("gauge_homogeneity", norm_eval(g, c * x), c * nx, (key, x, c),
                             seed=ctx.seed, rtol=ctx.rtol),
        make_equality_report("gauge_unitary_invariance", norm_eval(g, u @ x @ v), nx, (key, x, u, v),
                             seed=ctx.seed, rtol=ctx.rtol),
        make_report("gauge_triangle", nx + norm_eval(g, y), norm_eval(g, x + y), (key, x, y),
                    seed=ctx.seed, rtol=ctx.rtol),
        make_report("gauge_monotone", norm_eval(g, a + b), norm_eval(g, a), (key, a, b),
                    seed=ctx.seed, rtol=ctx.rtol),
    ]


EPS_GRID = tuple(10.0 ** -k for k in range(1, 11))


def _continuity_report(spec, a, ctx):
    """``||A + εI||_!`` decreases as ``ε`` shrinks, staying above ``||A||_!``.

    On nonsingular ``A`` the last value must also be within ``1e-6`` of the
    limit; on singular ``A`` determinant-like anti-norms converge like
    ``ε^{1/n}``, so only the monotone approach from above is asserted.
    """
    n = a.shape[0]
    key = (spec_to_json(spec), a)
    values = [spec.on_scale(psd_scale(a + eps * np.eye(n))) for eps in EPS_GRID]
    lam = psd_scale(a)
    target = spec.on_scale(lam)
    steps = [prev - nxt for prev, nxt in zip(values, values[1:])] + [values[-1] - target]
    k = int(np.argmin(steps))
    pair = (values + [target])[k: k + 2]
    scale = max(1.0, abs(values[0]))
    monotone = make_report("antinorm_continuity", pair[0], pair[1], key, seed=ctx.seed,
                           tolerance=ctx.rtol * scale)
    gap = abs(values[-1] - target)
    bound = 1e-6 * (1.0 + abs(target))
    nonsingular = bool(lam.bottom > 0)
    details = {"target": target, "last": values[-1], "gap": gap, "bound": bound, "nonsingular": nonsingular}
    converged = gap <= bound or not nonsingular
    return replace(monotone, passed=monotone.passed and converged, details=details)


def _case_axioms_antinorm(rng, n, ctx):
    kind = ANTINORM_KINDS[int(rng.integers(0, len(ANTINORM_KINDS)))]
    spec = random_antinorm(rng, n, kind)
    a, b = _inputs_pair(rng, n)
    u = haar_unitary(n, rng)
    c = float(rng.uniform(0.1, 10.0))
    key = spec_to_json(spec)
    va = spec.on_scale(psd_scale(a))
    rotated = u @ a @ u.conj().T
    return [
        make_equality_report("antinorm_homogeneity", spec.on_scale(psd_scale(c * a)), c * va, (key, a, c),
                             seed=ctx.seed, rtol=ctx.rtol),
        make_equality_report("antinorm_unitary_invariance", spec.on_scale(psd_scale(rotated)), va,
                             (key, a, u), seed=ctx.seed, rtol=ctx.rtol),
        make_report("antinorm_superadditive", spec.on_scale(psd_scale(a + b)),
                    va + spec.on_scale(psd_scale(b)), (key, a, b), seed=ctx.seed, rtol=ctx.rtol),
        _continuity_report(spec, a, ctx),
    ]


# --------------------------------------------------------------------------
# order relations and bounds


def _doubly_stochastic(rng, n, terms=3):
    weights = rng.dirichlet(np.ones(terms))
    return sum(w * np.eye(n)[rng.permutation(n)] for w in weights)


def _certified_pair(rng, n, relation):
    """Equal-width scales ``(a, b)`` built so that ``relation`` holds for ``a`` against ``b``."""
    b = np.exp(rng.uniform(-1.5, 1.5, size=n))
    d = _doubly_stochastic(rng, n)
    if relation == "sub_w":
        a = (d @ b) * float(rng.uniform(0.5, 1.0))
    elif relation == "super_w":
        a = d @ b + float(rng.uniform(0.0, 0.5))
    else:
        a = np.exp(d @ np.log(b) + float(rng.uniform(0.0, 0.5)))
    return SpectralScale.from_values(a), SpectralScale.from_values(b)


def _certification_failure(case_id, rel, key, ctx):
    return make_report(case_id, rel.margin, 0.0, key, seed=ctx.seed, tolerance=rel.tolerance,
                       details={"certification": rel.to_json()})


def _case_monotonicity(rng, n, ctx):
    out = []
    a, b = _certified_pair(rng, n, "sub_w")
    rel = relation_check(a, b, "sub_w")
    key = (a.values, b.values)
    if not rel.holds:
        out.append(_certification_failure("monotone_norm", rel, key, ctx))
    for g in (KyFan(float(rng.uniform(0.05, 1.0))), Schatten(float(rng.uniform(1.0, 4.0))), OperatorSup(),
              random_gauge(rng), QLift(random_gauge(rng, 1))):
        out.append(make_report("monotone_norm", g.on_scale(b), g.on_scale(a), key + (spec_to_json(g),),
                               seed=ctx.seed, rtol=ctx.rtol))
    a, b = _certified_pair(rng, n, "super_w")
    rel = relation_check(a, b, "super_w")
    key = (a.values, b.values)
    if not rel.holds:
        out.append(_certification_failure("antitone_antinorm", rel, key, ctx))
    for kind in ANTINORM_KINDS:
        spec = random_antinorm(rng, n, kind)
        out.append(make_report("antitone_antinorm", spec.on_scale(a), spec.on_scale(b),
                               key + (spec_to_json(spec),), seed=ctx.seed, rtol=ctx.rtol))
    a, b = _certified_pair(rng, n, "super_wlog")
    rel = relation_check(a, b, "super_wlog")
    key = (a.values, b.values)
    if not rel.holds:
        out.append(_certification_failure("antitone_derived", rel, key, ctx))
    specs = [Derived(KyFan(float(rng.uniform(0.05, 1.0))), float(rng.uniform(0.1, 4.0)))]
    specs += [Derived(random_gauge(rng), float(rng.uniform(0.1, 4.0))) for _ in range(3)]
    specs += [LogMean(float(rng.uniform(0.05, 1.0))), FKDet()]
    for spec in specs:
        out.append(make_report("antitone_derived", spec.on_scale(a), spec.on_scale(b),
                               key + (spec_to_json(spec),), seed=ctx.seed, rtol=ctx.rtol))
    return out


def _case_sandwich(rng, n, ctx):
    g = random_gauge(rng)
    spec = random_antinorm(rng, n)
    x = random_matrix(rng, n)
    a = random_psd(rng, n)
    tag = spec_to_json(g), spec_to_json(spec)
    out = []
    for r in sandwich_check(g, spec, x, a).reports:
        out.append(replace(r, seed=ctx.seed, fingerprint=fingerprint(r.case_id, tag, x, a)))
    return out


def _case_cauchy_schwarz(rng, n, ctx):
    g = random_gauge(rng)
    return [cauchy_schwarz_check(g, random_matrix(rng, n), random_matrix(rng, n), seed=ctx.seed)]


# --------------------------------------------------------------------------
# witnesses, re-certified without the orbit module's own helpers


def _f(x, func):
    return matrix_function(x, lambda v: func(np.maximum(v, 0.0)), psd=True)


def _abs(x):
    return polar(x)[1]


def _conj(u, x):
    return u @ x @ u.conj().T


def _witness_report(case_id, result, residual, key, ctx, extra=None):
    margin = psd_margin(residual)
    defect = max(unitarity_defect(u) for u in result.unitaries)
    details = {"method": result.method, "reported_margin": result.psd_margin, "unitarity_defect": defect}
    details.update(extra or {})
    report = make_report(case_id, margin, 0.0, key, seed=ctx.seed, tolerance=ACCEPT_TOL, details=details)
    return replace(report, passed=report.passed and defect <= UNITARY_TOL)


def _not_found(case_id, exc, key, ctx):
    best = exc.best_margin if math.isfinite(exc.best_margin) else -1.0
    return make_report(case_id, best, 0.0, key, seed=ctx.seed, tolerance=ACCEPT_TOL,
                       details={"error": exc.code})


def _case_witness_agm(rng, n, ctx):
    a, b = _inputs_pair(rng, n)
    res = agm_witness(a, b)
    (v,) = res.unitaries
    residual = 0.5 * (a @ a + _conj(v, b @ b)) - _abs(b @ a)
    return [_witness_report("witness_agm", res, residual, (a, b), ctx)]


def _case_witness_triangle(rng, n, ctx):
    x, y = random_matrix(rng, n), random_matrix(rng, n)
    res = triangle_witness(x, y)
    (w,) = res.unitaries
    right = _abs(x) + _abs(y)
    left = _abs(x.conj().T) + _abs(y.conj().T)
    residual = 0.5 * (right + w.conj().T @ left @ w) - _abs(x + y)
    return [_witness_report("witness_triangle", res, residual, (x, y), ctx)]


def _case_witness_dominance(rng, n, ctx):
    lam_a = np.sort(rng.uniform(0.0, 2.0, size=n))
    lam_b = lam_a + rng.uniform(0.0, 1.0, size=n)
    qa, qb = haar_unitary(n, rng), haar_unitary(n, rng)
    a = _conj(qa, np.diag(lam_a))
    b = _conj(qb, np.diag(np.sort(lam_b)))
    res = dominance_unitary(a, b)
    (u,) = res.unitaries
    return [_witness_report("witness_dominance", res, b - _conj(u, a), (a, b), ctx)]


def _orbit_report(case_id, a, b, f, mode, ctx):
    """Report and witness (``None`` when no witness was found)."""
    key = (a, b, f.description, mode)
    try:
        res = orbit_witness(a, b, f, mode, seed=ctx.seed)
    except WitnessNotFound as exc:
        return _not_found(case_id, exc, key, ctx), None
    u, v = res.unitaries
    orbit = _conj(u, _f(a, f)) + _conj(v, _f(b, f))
    ft = _f(a + b, f)
    residual = ft - orbit if mode == "convex_super" else orbit - ft
    return _witness_report(case_id, res, residual, key, ctx), res


def _case_witness_orbit_convex(rng, n, ctx):
    a, b = _inputs_pair(rng, n)
    f = _pick(rng, _catalogue()["convex"] + (fn.inverse_power_sum_function(int(rng.integers(1, 5))),))
    return [_orbit_report("witness_orbit_convex", a, b, f, "convex_super", ctx)[0]]


def _case_witness_orbit_concave(rng, n, ctx):
    a, b = _inputs_pair(rng, n, nonsingular=True)
    f = _pick(rng, _catalogue()["concave"])
    return [_orbit_report("witness_orbit_concave", a, b, f, "concave_sub", ctx)[0]]


def _is_monomial(u):
    mags = np.abs(u)
    return bool(np.all(np.sum(mags > 1e-12, axis=1) == 1) and np.allclose(mags.max(axis=1), 1.0, atol=1e-12))


def _case_witness_orbit_diagonal(rng, n, ctx):
    a = np.diag(rng.uniform(0.0, 3.0, size=n) * (rng.random(n) < 0.8))
    b = np.diag(rng.uniform(0.0, 3.0, size=n) * (rng.random(n) < 0.8))
    f = _pick(rng, _catalogue()["convex"])
    report, res = _orbit_report("witness_orbit_diagonal", a, b, f, "convex_super", ctx)
    if res is None:
        return [report]
    monomial = all(_is_monomial(u) for u in res.unitaries)
    details = dict(report.details, monomial=monomial)
    return [replace(report, passed=report.passed and monomial, details=details)]


def _case_witness_mixed(rng, n, ctx):
    x, y = random_matrix(rng, n), random_matrix(rng, n)
    g = _pick(rng, _catalogue()["mixed"])
    key = (x, y, g.description)
    try:
        res = mixed_witness(x, y, g, seed=ctx.seed)
    except WitnessNotFound as exc:
        return [_not_found("witness_mixed", exc, key, ctx)]
    u, v = res.unitaries
    p = _abs(x) + _abs(y)
    q = _abs(x.conj().T) + _abs(y.conj().T)
    residual = 0.5 * (_conj(u, _f(p, g)) + _conj(v, _f(q, g))) - _f(_abs(x + y), g)
    return [_witness_report("witness_mixed", res, residual, key, ctx)]


# --------------------------------------------------------------------------
# scale relations and counterexamples


def _equivalence_pair(rng, n, holds):
    """Equal-width scales; ``holds`` selects whether ``a ≺^{w(log)} b``."""
    b = np.sort(np.exp(rng.uniform(-2.0, 2.0, size=n)))[::-1]
    d = _doubly_stochastic(rng, n)
    a = np.sort(np.exp(d @ np.log(b) + float(rng.uniform(0.0, 0.3))))[::-1]
    if not holds:
        k = int(rng.integers(1, n + 1))
        lowered = np.minimum(a[-k:], b[-k:]) * math.exp(-float(rng.uniform(0.2, 1.0)))
        a = np.concatenate([a[:-k], lowered])
    return SpectralScale.from_values(a), SpectralScale.from_values(b)


def _case_equivalence(rng, n, ctx):
    if ctx.scale_b is not None:
        return [replace(_analytic_equivalence(ctx.scale_b, ctx.rtol), seed=ctx.seed)]
    out = []
    for holds, tag in ((True, "equivalence_holds"), (False, "equivalence_fails")):
        a, b = _equivalence_pair(rng, n, holds)
        report = check_equivalence(a, b, seed=ctx.seed, rtol=ctx.rtol, case_id=tag)
        expected = "relation_holds" if holds else "relation_fails"
        if report.details.get("direction") != expected:
            report = replace(report, passed=False, details=dict(report.details, expected=expected))
        out.append(report)
    return out


@lru_cache(maxsize=None)
def _analytic_equivalence(name, rtol):
    """The constant scale at the determinant of ``b`` against ``b``; the same instance every trial."""
    b = named_scale(name)
    a = SpectralScale.constant(FKDet().on_scale(b)) if _finite_det(b) else SpectralScale.constant(1.0)
    return check_equivalence(a, b, rtol=rtol)


def _finite_det(b):
    value = FKDet().on_scale(b)
    return math.isfinite(value) and value > 0


def _case_trace_truncation(rng, n, ctx):
    return [
        check_trace_truncation(scale=float(_pick(rng, (1.0, 2.0))), seed=ctx.seed),
        search_trace_truncation(rng, seed=ctx.seed),
    ]


def _case_wlog_weaker(rng, n, ctx):
    """A pair where log-supermajorization holds but plain supermajorization fails."""
    a, b = wlog_weaker_witness(seed=ctx.seed)
    log_rel = relation_check(a, b, "super_wlog")
    plain_rel = relation_check(a, b, "super_w")
    report = make_report("wlog_weaker", -plain_rel.margin, plain_rel.tolerance, (a.values, b.values),
                         seed=ctx.seed, tolerance=0.0,
                         details={"super_wlog": log_rel.to_json(), "super_w": plain_rel.to_json()})
    return [replace(report, passed=bool(log_rel.holds and not plain_rel.holds))]


def _case_limits(rng, n, ctx):
    a = random_psd(rng, n)
    g = random_gauge(rng)
    p = float(rng.uniform(0.2, 3.0))
    derived = derived_limit_check(g, p, a)
    key = (spec_to_json(g), p, a)
    out = [replace(make_report("limit_derived", derived.tolerance, derived.gap, key, seed=ctx.seed,
                               tolerance=0.0),
                   passed=derived.passed)]
    t = _pick(rng, DELTA_TAILS)
    delta = _delta_limit(t)
    out.append(replace(make_report("limit_delta", delta.tolerance, delta.gap, (t, "exp_neg"),
                                   seed=ctx.seed, tolerance=0.0),
                       passed=delta.passed))
    return out


DELTA_TAILS = (0.25, 0.5, 0.75, 1.0)


@lru_cache(maxsize=None)
def _delta_limit(t):
    return delta_limit_check(t, named_scale("exp_neg"))


CASES = {
    "superadditivity": _case_superadditivity,
    "rotfeld": _case_rotfeld,
    "product": _case_product,
    "inverse_power_sum": _case_inverse_power_sum,
    "marcus_lopes": _case_marcus_lopes,
    "classS": _case_classS,
    "trace_ratio": _case_trace_ratio,
    "det_minkowski": _case_det_minkowski,
    "axioms_gauge": _case_axioms_gauge,
    "axioms_antinorm": _case_axioms_antinorm,
    "monotonicity": _case_monotonicity,
    "sandwich": _case_sandwich,
    "cauchy_schwarz": _case_cauchy_schwarz,
    "witness_agm": _case_witness_agm,
    "witness_triangle": _case_witness_triangle,
    "witness_dominance": _case_witness_dominance,
    "witness_orbit_convex": _case_witness_orbit_convex,
    "witness_orbit_concave": _case_witness_orbit_concave,
    "witness_orbit_diagonal": _case_witness_orbit_diagonal,
    "witness_mixed": _case_witness_mixed,
    "equivalence": _case_equivalence,
    "trace_truncation": _case_trace_truncation,
    "wlog_weaker": _case_wlog_weaker,
    "limits": _case_limits,
}

SUITES = {
    "theorems": ("superadditivity", "rotfeld", "product", "inverse_power_sum", "marcus_lopes", "classS",
                 "trace_ratio", "det_minkowski"),
    "axioms": ("axioms_gauge", "axioms_antinorm"),
    "orders": ("monotonicity", "sandwich", "cauchy_schwarz"),
    "witnesses": ("witness_agm", "witness_triangle", "witness_dominance", "witness_orbit_convex",
                  "witness_orbit_concave", "witness_orbit_diagonal", "witness_mixed"),
    "scales": ("equivalence", "trace_truncation", "wlog_weaker", "limits"),
}
SUITES["all"] = tuple(c for name in ("theorems", "axioms", "orders", "witnesses", "scales") for c in SUITES[name])


def resolve_cases(names):
    """Expand suite names into case ids, rejecting unknown names."""
    out = []
    for name in names:
        if name in SUITES:
            ids = SUITES[name]
        elif name in CASES:
            ids = (name,)
        else:
            raise KeyError(f"unknown case or suite {name!r}")
        out.extend(c for c in ids if c not in out)
    return tuple(out)


# --------------------------------------------------------------------------
# runner


def _trial_seed(seed, case_id, trial):
    ss = np.random.SeedSequence([int(seed), zlib.crc32(case_id.encode()), int(trial)])
    return int(ss.generate_state(1)[0])


def _error_report(case_id, exc, trial_seed):
    return make_report(case_id, -1.0, 0.0, (case_id, trial_seed), seed=trial_seed, tolerance=0.0,
                       details={"error": getattr(exc, "code", type(exc).__name__), "message": str(exc)})


def _run_trial(case_id, trial, cfg):
    trial_seed = _trial_seed(cfg.seed, case_id, trial)
    rng = np.random.default_rng(trial_seed)
    n = cfg.dims[trial % len(cfg.dims)]
    ctx = _Context(trial_seed, cfg.tolerance, cfg.scale_b)
    try:
        return CASES[case_id](rng, n, ctx)
    except (AntinormError, ValueError, ArithmeticError) as exc:
        return [_error_report(case_id, exc, trial_seed)]


def _sort_key(report):
    return report.case_id, report.fingerprint, report.seed, json.dumps(report.to_json(), sort_keys=True)


def run_suite(cfg):
    """Run every configured case for ``cfg.trials`` trials; reports come back sorted."""
    if cfg.scale_b is not None and not isinstance(named_scale(cfg.scale_b), AnalyticScale):
        raise ValueError(f"unknown named scale {cfg.scale_b!r}")
    cases = resolve_cases(cfg.cases or ("all",))
    reports, summary = [], []
    pool = ThreadPoolExecutor(cfg.jobs) if cfg.jobs > 1 else None
    try:
        for case_id in cases:
            start = time.perf_counter()
            trials = range(cfg.trials)
            if pool is None:
                batches = [_run_trial(case_id, k, cfg) for k in trials]
            else:
                batches = list(pool.map(lambda k, c=case_id: _run_trial(c, k, cfg), trials))
            case_reports = [r for batch in batches for r in batch]
            reports.extend(case_reports)
            margins = [r.margin for r in case_reports if not r.out_of_scope]
            summary.append({
                "case_id": case_id,
                "reports": len(case_reports),
                "failures": sum(not r.passed for r in case_reports),
                "out_of_scope": sum(r.out_of_scope for r in case_reports),
                "min_margin": min(margins) if margins else 0.0,
                "runtime_s": time.perf_counter() - start,
            })
    finally:
        if pool is not None:
            pool.shutdown()
    reports.sort(key=_sort_key)
    return SuiteResult(reports, summary)
