"""Fully symmetric norms and symmetric anti-norms, evaluated on spectral scales.

Norms act on s-number scales, anti-norms on spectral scales of positive
semidefinite operators. Matrix arguments are converted to scales first, so
unitary invariance holds by construction.

Derived anti-norms ``A -> ||A^{-p}||^{-1/p}`` are evaluated by their closed
forms: ``0`` when the scale reaches zero (or the negative-power integral
diverges), the plain formula otherwise. The epsilon-regularized definition is
available through :func:`derived_limit_check` as a cross-check.
"""
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import UnsupportedCombination
from .linalg import as_hermitian, clamp_psd, eigvalsh, elementary_symmetric_all, matrix_function
from .reports import InequalityReport, make_report
from .spectral import (
    DIVERGENT,
    NEG_INFINITE,
    AnalyticScale,
    SpectralScale,
    improper_quad,
    s_numbers,
    scale_integral,
)

__all__ = [
    "KyFan",
    "Schatten",
    "OperatorSup",
    "Mixture",
    "QLift",
    "qnorm_lift",
    "Derived",
    "TailIntegral",
    "LogMean",
    "FKDet",
    "SchattenQ",
    "MarcusLopes",
    "PowerCompose",
    "norm_eval",
    "antinorm_eval",
    "psd_scale",
    "marcus_lopes_ratio",
    "log_derived_kyfan",
    "normalized_power_mean",
    "LimitReport",
    "derived_limit_check",
    "delta_limit_check",
    "sandwich_check",
    "cauchy_schwarz_check",
    "spec_from_json",
    "spec_to_json",
]

MIN_T = 1e-6
NUMERICAL_RANK_RTOL = 1e-12


def _check_t(t):
    t = float(t)
    if not (MIN_T <= t <= 1.0):
        raise ValueError(f"parameter t must lie in [{MIN_T}, 1], got {t}")
    return t


# --------------------------------------------------------------------------
# scale helpers


def _power(a, c):
    """Scale of ``A^c`` for ``c > 0`` (values assumed non-negative)."""
    if isinstance(a, AnalyticScale):
        return a.power(c)
    return a.map_values(lambda v: np.maximum(v, 0.0) ** c)


def _analytic_power_integral(a, c, lo=0.0, hi=1.0):
    def f(s):
        with np.errstate(all="ignore"):
            return np.exp(c * a.log(s))

    return improper_quad(f, lo, hi)


def psd_scale(x):
    """Spectral scale of a PSD matrix, or a scale as is.

    Eigenvalues within ``1e-12·λ_max`` of zero are set to zero: they are
    eigensolver round-off on a kernel, and left alone they would make
    determinant-like anti-norms of singular matrices visibly positive.
    """
    if isinstance(x, (SpectralScale, AnalyticScale)):
        return x
    values = clamp_psd(eigvalsh(as_hermitian(x)))
    values = np.where(values > NUMERICAL_RANK_RTOL * values.max(initial=0.0), values, 0.0)
    return SpectralScale.from_values(values)


def _norm_scale(x):
    if isinstance(x, (SpectralScale, AnalyticScale)):
        return x
    return s_numbers(x)


# --------------------------------------------------------------------------
# symmetric gauges


@dataclass(frozen=True)
class KyFan:
    """``∫_0^t μ``: the continuous Ky Fan norm."""

    t: float

    def __post_init__(self):
        _check_t(self.t)

    def on_scale(self, a):
        return scale_integral(a, 0.0, self.t)

    def to_json(self):
        return {"kind": "kyfan", "t": self.t}


@dataclass(frozen=True)
class Schatten:
    p: float

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError("Schatten exponent must be >= 1")

    def on_scale(self, a):
        if isinstance(a, AnalyticScale):
            total = _analytic_power_integral(a, self.p)
        else:
            total = float(np.dot(a.w, np.abs(a.values) ** self.p))
        return total ** (1.0 / self.p)

    def to_json(self):
        return {"kind": "schatten", "p": self.p}


@dataclass(frozen=True)
class OperatorSup:
    def on_scale(self, a):
        return float(a.top)

    def to_json(self):
        return {"kind": "operator"}


@dataclass(frozen=True)
class Mixture:
    """Non-negative combination ``Σ w_i ||·||_i``."""

    terms: Tuple[Tuple[float, object], ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((float(w), g) for w, g in self.terms))
        if not self.terms or any(w < 0 for w, _ in self.terms) or all(w == 0 for w, _ in self.terms):
            raise ValueError("mixture weights must be non-negative and not all zero")

    def on_scale(self, a):
        return float(sum(w * g.on_scale(a) for w, g in self.terms))

    def to_json(self):
        return {"kind": "mixture", "terms": [[w, g.to_json()] for w, g in self.terms]}


@dataclass(frozen=True)
class QLift:
    """``X -> ||X*X||^{1/2}`` for an inner gauge."""

    inner: object

    def on_scale(self, a):
        return math.sqrt(self.inner.on_scale(_power(a, 2.0)))

    def to_json(self):
        return {"kind": "qlift", "inner": self.inner.to_json()}


def qnorm_lift(g):
    return QLift(g)


GAUGE_KINDS = (KyFan, Schatten, OperatorSup, Mixture, QLift)


def norm_eval(g, x):
    """Value of a symmetric gauge on a scale or a matrix (through its s-numbers)."""
    if not isinstance(g, GAUGE_KINDS):
        raise UnsupportedCombination(f"{type(g).__name__} is not a symmetric gauge")
    return float(g.on_scale(_norm_scale(x)))


# --------------------------------------------------------------------------
# anti-norms


def _log_mean_power(logs, weights, p):
    """``log`` of the weighted mean of ``exp(-p x_i)``, accurate as ``p -> 0``."""
    weights = weights / np.sum(weights)
    z = -p * logs
    if np.max(np.abs(z)) < 1.0:
        return math.log1p(float(np.dot(weights, np.expm1(z))))
    m = float(np.max(z))
    return m + math.log(float(np.dot(weights, np.exp(z - m))))


def _log_tail_mean_power(a, t, p):
    """``log((1/t)∫_{1-t}^1 λ^{-p})``; ``inf`` when the integral diverges."""
    t = _check_t(t)
    if not p > 0:
        raise ValueError("p must be positive")
    lo = 1.0 - t
    if isinstance(a, AnalyticScale):
        def f(s):
            with np.errstate(all="ignore"):
                return np.expm1(-p * a.log(s))

        excess = improper_quad(f, lo, 1.0)
        if not math.isfinite(excess):
            return DIVERGENT
        return math.log1p(excess / t)
    ov = np.clip(np.minimum(1.0, a.fedges[1:]) - np.maximum(lo, a.fedges[:-1]), 0.0, None)
    used = ov > 0
    v = a.values[used]
    if np.any(v <= 0):
        return DIVERGENT
    return _log_mean_power(np.log(v), ov[used], p)


def log_derived_kyfan(a, t, p):
    """``log`` of ``(∫_{1-t}^1 λ^{-p})^{-1/p}``; ``-inf`` when that anti-norm vanishes."""
    mean = _log_tail_mean_power(a, t, p)
    if mean == DIVERGENT:
        return NEG_INFINITE
    return -(math.log(t) + mean) / p


def normalized_power_mean(a, t, p):
    """``((1/t)∫_{1-t}^1 λ^{-p})^{-1/p}``, which tends to ``Δ_t`` as ``p -> 0``."""
    mean = _log_tail_mean_power(a, t, p)
    if mean == DIVERGENT:
        return 0.0
    return math.exp(-mean / p)


@dataclass(frozen=True)
class Derived:
    """``A -> ||A^{-p}||^{-1/p}`` for a symmetric gauge."""

    gauge: object
    p: float

    def __post_init__(self):
        if not isinstance(self.gauge, GAUGE_KINDS):
            raise UnsupportedCombination("derived anti-norms need a symmetric gauge")
        if not self.p > 0:
            raise ValueError("p must be positive")

    def on_scale(self, a):
        p = self.p
        if isinstance(self.gauge, KyFan):
            lv = log_derived_kyfan(a, self.gauge.t, p)
            return 0.0 if lv == NEG_INFINITE else math.exp(lv)
        if isinstance(a, AnalyticScale):
            if a.bottom <= 0:
                return 0.0
            norm = self.gauge.on_scale(a.power(-p))
        else:
            if a.bottom <= 0:
                return 0.0
            vals, widths = a.reversed_power(p)
            if not np.all(np.isfinite(vals)):
                return 0.0
            norm = self.gauge.on_scale(SpectralScale(zip(widths, vals)))
        if not math.isfinite(norm):
            return 0.0
        return norm ** (-1.0 / p)

    def to_json(self):
        return {"kind": "derived", "gauge": self.gauge.to_json(), "p": self.p}


@dataclass(frozen=True)
class TailIntegral:
    """``∫_{1-t}^1 λ``."""

    t: float

    def __post_init__(self):
        _check_t(self.t)

    def on_scale(self, a):
        return scale_integral(a, 1.0 - self.t, 1.0)

    def to_json(self):
        return {"kind": "tail", "t": self.t}


@dataclass(frozen=True)
class LogMean:
    """``Δ_t``: geometric mean of the scale over the tail ``(1-t, 1)``."""

    t: float = 1.0

    def __post_init__(self):
        _check_t(self.t)

    def on_scale(self, a):
        total = scale_integral(a, 1.0 - self.t, 1.0, mode="log")
        if total == NEG_INFINITE:
            return 0.0
        return math.exp(total / self.t)

    def to_json(self):
        return {"kind": "logmean", "t": self.t}


@dataclass(frozen=True)
class FKDet:
    """Determinant under the normalized trace: ``exp τ(log A)``."""

    def on_scale(self, a):
        return LogMean(1.0).on_scale(a)

    def to_json(self):
        return {"kind": "fkdet"}


@dataclass(frozen=True)
class SchattenQ:
    """``τ(A^q)^{1/q}`` with ``0 < q <= 1``."""

    q: float

    def __post_init__(self):
        if not 0 < self.q <= 1:
            raise ValueError("q must lie in (0, 1]")

    def on_scale(self, a):
        if isinstance(a, AnalyticScale):
            total = _analytic_power_integral(a, self.q)
        else:
            total = float(np.dot(a.w, np.maximum(a.values, 0.0) ** self.q))
        return total ** (1.0 / self.q)

    def to_json(self):
        return {"kind": "schattenq", "q": self.q}


def marcus_lopes_ratio(eigenvalues, m):
    """``(e_m / e_{m-1}, degenerate)`` of the eigenvalues.

    ``degenerate`` is set when ``e_{m-1} = 0``; the value is then ``0``, the
    continuous extension from nonsingular inputs.
    """
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    n = eigenvalues.size
    if not 1 <= m <= n:
        raise ValueError(f"order m={m} out of range for dimension {n}")
    e = elementary_symmetric_all(eigenvalues)
    if e[m - 1] <= 0:
        return 0.0, True
    return float(e[m] / e[m - 1]), False


@dataclass(frozen=True)
class MarcusLopes:
    """``Tr ∧^m A / Tr ∧^{m-1} A`` on unnormalized eigenvalues; needs a matrix dimension."""

    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError("m must be a positive integer")

    def on_scale(self, a):
        if isinstance(a, AnalyticScale) or a.dim is None:
            raise UnsupportedCombination(
                "the Marcus-Lopes anti-norm needs a matrix (or a scale carrying its dimension)"
            )
        return marcus_lopes_ratio(a.eigenvalues(), int(self.m))[0]

    def to_json(self):
        return {"kind": "marcuslopes", "m": int(self.m)}


@dataclass(frozen=True)
class PowerCompose:
    """``A -> ||A^q||_!^{1/q}`` with ``0 < q < 1``."""

    q: float
    inner: object

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise ValueError("q must lie in (0, 1)")
        if not isinstance(self.inner, ANTINORM_KINDS):
            raise UnsupportedCombination("inner spec must be an anti-norm")

    def on_scale(self, a):
        value = self.inner.on_scale(_power(a, self.q))
        return max(value, 0.0) ** (1.0 / self.q)

    def to_json(self):
        return {"kind": "powercompose", "q": self.q, "inner": self.inner.to_json()}


ANTINORM_KINDS = (Derived, TailIntegral, LogMean, FKDet, SchattenQ, MarcusLopes, PowerCompose)


def antinorm_eval(spec, x):
    """Value of an anti-norm on a PSD matrix or on a scale."""
    if not isinstance(spec, ANTINORM_KINDS):
        raise UnsupportedCombination(f"{type(spec).__name__} is not an anti-norm")
    return float(spec.on_scale(psd_scale(x)))


def _identity_scale(dim=None):
    return SpectralScale.constant(1.0) if dim is None else SpectralScale.from_values(np.ones(dim))


# --------------------------------------------------------------------------
# limit and bound checks


@dataclass(frozen=True)
class LimitReport:
    """A sequence approaching a closed-form target."""

    values: Tuple[float, ...]
    target: float
    monotone: bool
    gap: float
    tolerance: float
    hypothesis_ok: bool = True

    @property
    def converged(self):
        return self.hypothesis_ok and self.gap <= self.tolerance

    @property
    def passed(self):
        return self.monotone and self.converged


DEFAULT_EPS_GRID = tuple(10.0 ** -k for k in range(1, 13))


def derived_limit_check(g, p, a, eps_grid=DEFAULT_EPS_GRID, tol=1e-8):
    """Compare ``||(A+εI)^{-p}||^{-1/p}`` along ``eps_grid`` with the closed form.

    The sequence must not increase as ``ε`` shrinks, and its last element
    must be within ``tol·(1+target)`` of :func:`antinorm_eval`.
    """
    eps_grid = [float(e) for e in eps_grid]
    if any(b >= a_ for a_, b in zip(eps_grid, eps_grid[1:])) or eps_grid[-1] <= 0:
        raise ValueError("eps_grid must be strictly decreasing and positive")
    a = as_hermitian(a)
    n = a.shape[0]
    values = []
    for eps in eps_grid:
        shifted = a + eps * np.eye(n)
        inv_power = matrix_function(shifted, lambda v: np.maximum(v, 0.0) ** (-p), psd=True)
        values.append(norm_eval(g, inv_power) ** (-1.0 / p))
    target = antinorm_eval(Derived(g, p), a)
    slack = tol * (1.0 + abs(target))
    monotone = all(b <= a_ + slack for a_, b in zip(values, values[1:]))
    return LimitReport(tuple(values), target, monotone, abs(values[-1] - target), slack)


DEFAULT_P_GRID = (1e-1, 1e-2, 1e-3, 1e-4)


def delta_limit_check(t, a, p_grid=DEFAULT_P_GRID, tol=1e-3):
    """Normalized tail power means approaching ``Δ_t`` as ``p -> 0``.

    The means increase toward their limit as ``p`` decreases. If the
    negative-power integral diverges at every grid ``p`` the hypothesis of
    the limit formula fails and the report says so.
    """
    p_grid = [float(p) for p in p_grid]
    values = []
    finite = False
    for p in p_grid:
        finite = finite or _log_tail_mean_power(a, t, p) != DIVERGENT
        values.append(normalized_power_mean(a, t, p))
    target = LogMean(t).on_scale(a)
    if not finite:
        return LimitReport(tuple(values), target, False, math.inf, tol, hypothesis_ok=False)
    slack = 1e-12 * (1.0 + abs(target))
    monotone = all(b >= a_ - slack for a_, b in zip(values, values[1:]))
    return LimitReport(tuple(values), target, monotone, abs(values[-1] - target), tol)


@dataclass(frozen=True)
class SandwichReport:
    norm_lower: InequalityReport
    norm_upper: InequalityReport
    antinorm_lower: InequalityReport
    antinorm_upper: InequalityReport

    @property
    def reports(self):
        return (self.norm_lower, self.norm_upper, self.antinorm_lower, self.antinorm_upper)

    @property
    def passed(self):
        return all(r.passed for r in self.reports)


def sandwich_check(g, spec, x, a):
    """Two-sided bounds by the identity.

    ``τ|X|·||I|| <= ||X|| <= ||X||_∞·||I||`` and
    ``λ_min(A)·||I||_! <= ||A||_! <= τ(A)·||I||_!``.
    """
    mu = _norm_scale(x)
    lam = psd_scale(a)
    dim = getattr(lam, "dim", None)
    norm_i = g.on_scale(_identity_scale())
    anti_i = spec.on_scale(_identity_scale(dim))
    nx = g.on_scale(mu)
    ax = spec.on_scale(lam)
    trace_x = scale_integral(mu)
    trace_a = scale_integral(lam)
    key = (np.asarray(x) if not isinstance(x, (SpectralScale, AnalyticScale)) else repr(x),
           np.asarray(a) if not isinstance(a, (SpectralScale, AnalyticScale)) else repr(a))
    return SandwichReport(
        make_report("sandwich_norm_lower", nx, trace_x * norm_i, key),
        make_report("sandwich_norm_upper", mu.top * norm_i, nx, key),
        make_report("sandwich_antinorm_lower", ax, lam.bottom * anti_i, key),
        make_report("sandwich_antinorm_upper", trace_a * anti_i, ax, key),
    )


def cauchy_schwarz_check(g, x, y, seed=0):
    """``||X*Y|| <= ||X*X||^{1/2} ||Y*Y||^{1/2}``."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != y.shape:
        raise ValueError("matrices must have the same shape")
    lhs = norm_eval(g, x.conj().T @ y)
    rhs = math.sqrt(norm_eval(g, x.conj().T @ x) * norm_eval(g, y.conj().T @ y))
    return make_report("cauchy_schwarz", rhs, lhs, (spec_to_json(g), x, y), seed=seed)


# --------------------------------------------------------------------------
# JSON tags


def spec_to_json(spec):
    return spec.to_json()


def spec_from_json(obj):
    """Build a gauge or anti-norm from its JSON tag."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError("spec must be an object with a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "kyfan":
            return KyFan(float(obj["t"]))
        if kind == "schatten":
            return Schatten(float(obj["p"]))
        if kind == "operator":
            return OperatorSup()
        if kind == "mixture":
            return Mixture(tuple((float(w), spec_from_json(g)) for w, g in obj["terms"]))
        if kind == "qlift":
            return QLift(spec_from_json(obj["inner"]))
        if kind == "derived":
            return Derived(spec_from_json(obj["gauge"]), float(obj["p"]))
        if kind == "tail":
            return TailIntegral(float(obj["t"]))
        if kind == "logmean":
            return LogMean(float(obj.get("t", 1.0)))
        if kind == "fkdet":
            return FKDet()
        if kind == "schattenq":
            return SchattenQ(float(obj["q"]))
        if kind == "marcuslopes":
            return MarcusLopes(int(obj["m"]))
        if kind == "powercompose":
            return PowerCompose(float(obj["q"]), spec_from_json(obj["inner"]))
    except KeyError as exc:
        raise ValueError(f"spec of kind {kind!r} is missing field {exc.args[0]!r}") from None
    raise ValueError(f"unknown spec kind {kind!r}")
