"""Spectral scales: non-increasing step functions on (0, 1).

A :class:`SpectralScale` is simultaneously the spectral scale of a matrix
under the normalized trace ``Tr/n`` (sorted eigenvalues, width ``1/n`` each)
and a finite-step operator in a diffuse algebra. :class:`AnalyticScale`
covers closed-form scales that are not step functions.

Integrals that blow up are reported as ``math.inf`` (divergent) or
``-math.inf`` (log integral of a scale reaching zero).
"""
import math
import warnings
from fractions import Fraction
from numbers import Rational

import numpy as np
from scipy import integrate

from .errors import DomainError
from .linalg import abs_matrix, as_hermitian, eigvalsh

__all__ = [
    "DIVERGENT",
    "NEG_INFINITE",
    "SpectralScale",
    "AnalyticScale",
    "spectral_scale",
    "s_numbers",
    "truncate",
    "scale_integral",
    "apply_function",
    "merged_breakpoints",
    "head_integrals",
    "tail_integrals",
    "named_scale",
    "NAMED_SCALES",
]

DIVERGENT = math.inf
NEG_INFINITE = -math.inf

WIDTH_TOL = 1e-12
QUAD_CUTOFF = 1e9
SINGULARITY_CUTOFF = 1e12


class SpectralScale:
    """Non-increasing right-continuous step function on (0, 1).

    ``steps`` is a sequence of ``(width, value)`` pairs. Widths may be
    :class:`fractions.Fraction` (exact breakpoints, used for matrix scales)
    or floats. ``dim`` records the matrix size when the scale comes from an
    ``n x n`` matrix, which lets eigenvalues be recovered with multiplicity.
    """

    __slots__ = ("widths", "values", "w", "edges", "fedges", "dim")

    def __init__(self, steps, dim=None):
        widths, values = [], []
        for width, value in steps:
            if not isinstance(width, Rational):
                width = float(width)
            value = float(value)
            if not width > 0:
                raise ValueError(f"step widths must be positive, got {width}")
            if not math.isfinite(value):
                raise ValueError("step values must be finite")
            if values and value > values[-1] + 1e-12 * (1.0 + abs(values[-1])):
                raise ValueError("step values must be non-increasing")
            if values and value >= values[-1]:
                # merge equal (or round-off increasing) neighbours
                widths[-1] = widths[-1] + width
                continue
            widths.append(width)
            values.append(value)
        if not widths:
            raise ValueError("a spectral scale needs at least one step")
        total = sum(widths)
        if abs(float(total) - 1.0) > WIDTH_TOL:
            raise ValueError(f"widths must sum to 1, got {float(total)!r}")
        self.widths = tuple(widths)
        self.values = np.array(values)
        self.w = np.array([float(x) for x in widths])
        edges = [0]
        for x in widths[:-1]:
            edges.append(edges[-1] + x)
        edges.append(1)
        self.edges = tuple(edges)
        self.fedges = np.array([float(e) for e in edges])
        self.dim = dim

    @classmethod
    def from_values(cls, values, dim=None):
        """Equal-width scale from an unordered list of values (eigenvalues)."""
        values = np.sort(np.asarray(values, dtype=float).ravel())[::-1]
        n = values.size
        return cls([(Fraction(1, n), v) for v in values], dim=n if dim is None else dim)

    @classmethod
    def constant(cls, c):
        return cls([(Fraction(1), c)])

    @property
    def steps(self):
        return list(zip(self.widths, self.values.tolist()))

    @property
    def exact(self):
        return all(isinstance(x, Rational) for x in self.widths)

    @property
    def top(self):
        """Limit at t -> 0 (largest value)."""
        return float(self.values[0])

    @property
    def bottom(self):
        """Limit at t -> 1 (smallest value)."""
        return float(self.values[-1])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.fedges[1:-1], t, side="right")
        return self.values[idx]

    def eigenvalues(self):
        """Values repeated with multiplicity; needs a matrix-derived scale."""
        if self.dim is None:
            raise ValueError("scale does not carry a matrix dimension")
        counts = np.rint(self.w * self.dim).astype(int)
        if counts.sum() != self.dim or np.any(np.abs(counts - self.w * self.dim) > 1e-9):
            raise ValueError("scale widths are not multiples of 1/dim")
        return np.repeat(self.values, counts)

    def map_values(self, f):
        """Apply an order-preserving map to the values."""
        return SpectralScale(zip(self.widths, np.asarray(f(self.values), dtype=float)), dim=self.dim)

    def scaled(self, c):
        if c < 0:
            raise ValueError("scaling factor must be non-negative")
        return SpectralScale(zip(self.widths, c * self.values), dim=self.dim)

    def shifted(self, eps):
        return SpectralScale(zip(self.widths, self.values + eps), dim=self.dim)

    def reversed_power(self, p):
        """Scale of ``A^{-p}``: values ``v^{-p}`` in reversed order (may be inf)."""
        with np.errstate(divide="ignore", over="ignore"):
            vals = self.values[::-1] ** (-p)
        return vals, self.w[::-1]

    def to_json(self):
        return {"steps": [[float(w), float(v)] for w, v in self.steps]}

    def __eq__(self, other):
        if not isinstance(other, SpectralScale):
            return NotImplemented
        return self.widths == other.widths and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.widths, self.values.tobytes()))

    def __repr__(self):
        body = ", ".join(f"({_fmt_width(w)}, {v:.6g})" for w, v in self.steps)
        return f"SpectralScale([{body}])"


def _fmt_width(w):
    return str(w) if isinstance(w, Fraction) else f"{w:.6g}"


class AnalyticScale:
    """A non-increasing scale given by a closed-form evaluator on (0, 1).

    ``log_evaluator`` (optional) returns ``log λ_s`` directly; it keeps log
    and negative-power integrals accurate where ``λ_s`` itself underflows.
    """

    def __init__(self, evaluator, description="", log_evaluator=None, check=True):
        self.evaluator = evaluator
        self.description = description
        self.log_evaluator = log_evaluator
        if check:
            grid = np.linspace(0.0, 1.0, 1002)[1:-1]
            with np.errstate(all="ignore"):
                vals = np.asarray(evaluator(grid), dtype=float)
            if np.any(np.isnan(vals)):
                raise ValueError(f"analytic scale {description!r} is undefined on the grid")
            if np.any(np.diff(vals) > 1e-12 * (1.0 + np.abs(vals[:-1]))):
                raise ValueError(f"analytic scale {description!r} is not non-increasing")

    def __call__(self, t):
        with np.errstate(all="ignore"):
            return self.evaluator(np.asarray(t, dtype=float))

    def log(self, t):
        t = np.asarray(t, dtype=float)
        if self.log_evaluator is not None:
            return self.log_evaluator(t)
        with np.errstate(divide="ignore"):
            return np.log(self(t))

    @property
    def top(self):
        return float(self(1e-15))

    @property
    def bottom(self):
        return float(self(1.0 - 1e-15))

    def power(self, c):
        """Scale of ``A^c``; reversed in ``s`` when ``c < 0``."""
        if c >= 0:
            return AnalyticScale(
                lambda s: np.exp(c * self.log(s)),
                f"({self.description})^{c}",
                lambda s: c * self.log(s),
                check=False,
            )
        return AnalyticScale(
            lambda s: np.exp(c * self.log(1.0 - s)),
            f"({self.description})^{c}",
            lambda s: c * self.log(1.0 - s),
            check=False,
        )

    def __repr__(self):
        return f"AnalyticScale({self.description!r})"


NAMED_SCALES = {
    "exp_inv_sqrt": lambda: AnalyticScale(
        lambda s: np.exp(-1.0 / np.sqrt(1.0 - s)),
        "exp(-1/sqrt(1-s))",
        lambda s: -1.0 / np.sqrt(1.0 - s),
    ),
    "exp_neg": lambda: AnalyticScale(lambda s: np.exp(-s), "exp(-s)", lambda s: -s),
    "linear": lambda: AnalyticScale(lambda s: 1.0 - s, "1-s"),
}


def named_scale(name):
    try:
        return NAMED_SCALES[name]()
    except KeyError:
        raise ValueError(f"unknown named scale {name!r}; known: {sorted(NAMED_SCALES)}") from None


def spectral_scale(a):
    """Spectral scale of a Hermitian matrix under the normalized trace."""
    return SpectralScale.from_values(eigvalsh(as_hermitian(a)))


def s_numbers(x):
    """Generalized s-numbers: the spectral scale of ``|x|``."""
    return spectral_scale(abs_matrix(x))


def truncate(a, s):
    """Scale of ``A ∧ s``: every value replaced by ``min(value, s)``."""
    if s < 0:
        raise ValueError("truncation level must be non-negative")
    return a.map_values(lambda v: np.minimum(v, s))


def apply_function(a, f, non_decreasing=None):
    """Scale of ``f(A)`` from the scale of ``A``.

    When ``f`` is known to be non-decreasing the values are mapped in place;
    otherwise the mapped values are re-sorted with their widths.
    """
    if non_decreasing is None:
        non_decreasing = "non_decreasing" in getattr(f, "flags", ())
    with np.errstate(all="ignore"):
        fv = np.asarray(f(a.values), dtype=float)
    if fv.shape != a.values.shape:
        fv = np.broadcast_to(fv, a.values.shape).astype(float)
    if not np.all(np.isfinite(fv)):
        bad = a.values[np.argmax(~np.isfinite(fv))]
        raise DomainError(float(bad))
    if non_decreasing and np.all(np.diff(fv) <= 0):
        return SpectralScale(zip(a.widths, fv), dim=a.dim)
    order = np.argsort(-fv, kind="stable")
    return SpectralScale(((a.widths[i], fv[i]) for i in order), dim=a.dim)


def _overlaps(a, lo, hi):
    e = a.fedges
    return np.clip(np.minimum(hi, e[1:]) - np.maximum(lo, e[:-1]), 0.0, None)


def scale_integral(a, lo=0.0, hi=1.0, mode="plain", p=None):
    """Integral of a scale over ``(lo, hi)``.

    ``mode`` is ``"plain"`` (``∫ λ``), ``"log"`` (``∫ log λ``) or
    ``"neg_power"`` (``∫ λ^{-p}``, ``p > 0``). Step scales are summed exactly;
    analytic scales use adaptive quadrature with divergence detection.
    A zero value contributes ``-inf`` under ``log`` and ``+inf`` under
    ``neg_power`` (``0^{-p} = ∞``).
    """
    lo, hi = float(lo), float(hi)
    if not (0.0 <= lo < hi <= 1.0):
        raise ValueError(f"invalid integration interval ({lo}, {hi})")
    if mode == "neg_power":
        if p is None or not p > 0:
            raise ValueError("neg_power mode needs p > 0")
    elif mode not in ("plain", "log"):
        raise ValueError(f"unknown integration mode {mode!r}")
    if isinstance(a, AnalyticScale):
        return _analytic_integral(a, lo, hi, mode, p)
    ov = _overlaps(a, lo, hi)
    used = ov > 0
    v = a.values[used]
    ov = ov[used]
    if mode == "plain":
        return float(np.dot(ov, v))
    if np.any(v <= 0):
        if np.any(v < 0):
            raise ValueError(f"{mode} integral needs a non-negative scale")
        return NEG_INFINITE if mode == "log" else DIVERGENT
    if mode == "log":
        return float(np.dot(ov, np.log(v)))
    with np.errstate(over="ignore"):
        return float(np.dot(ov, v ** (-p)))


def _analytic_integral(a, lo, hi, mode, p):
    if mode == "plain":
        f = a
    elif mode == "log":
        f = a.log
    else:
        def f(s):
            with np.errstate(over="ignore"):
                return np.exp(-p * a.log(s))
    return improper_quad(f, lo, hi)


def improper_quad(f, lo, hi):
    """Integrate ``f`` on ``(lo, hi)`` allowing integrable endpoint singularities.

    The interval is split at its midpoint and each half is swept toward its
    endpoint in dyadic pieces. The integral is declared divergent when the
    running total exceeds ``QUAD_CUTOFF``, a piece is not finite, or the
    integrand passes ``SINGULARITY_CUTOFF`` while the pieces stop shrinking.
    """
    def g(s):
        with np.errstate(all="ignore"):
            return float(f(np.asarray(s)))

    mid = 0.5 * (lo + hi)
    half = mid - lo
    total = 0.0
    for side in (1.0, -1.0):
        end = hi if side > 0 else lo
        inner = mid
        prev = None
        growing = 0
        quiet = 0
        for k in range(1, 80):
            outer = end - side * half * 2.0 ** (-k)
            if outer == inner or (side > 0 and outer >= end) or (side < 0 and outer <= end):
                break
            a_, b_ = (inner, outer) if side > 0 else (outer, inner)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                piece = integrate.quad(g, a_, b_, limit=200, epsabs=0.0, epsrel=1e-12)[0]
            if not math.isfinite(piece):
                return _divergent_sign(piece, total)
            total += piece
            if abs(total) > QUAD_CUTOFF:
                return _divergent_sign(total, total)
            if prev is not None and abs(piece) >= abs(prev) * (1.0 - 1e-9):
                growing += 1
            else:
                growing = 0
            endpoint_value = abs(g(outer))
            if growing >= 3 and endpoint_value > SINGULARITY_CUTOFF:
                return _divergent_sign(piece, total)
            quiet = quiet + 1 if abs(piece) <= 1e-17 * max(1.0, abs(total)) else 0
            if quiet >= 3:
                break
            prev = piece
            inner = outer
    return total


def _divergent_sign(x, total):
    if math.isnan(x):
        x = total
    return NEG_INFINITE if x < 0 else DIVERGENT


def merged_breakpoints(*scales):
    """Sorted union of breakpoints, exact when every scale has exact widths."""
    if all(s.exact for s in scales):
        pts = sorted(set().union(*(s.edges for s in scales)))
        return np.array([float(x) for x in pts])
    pts = np.unique(np.concatenate([s.fedges for s in scales]))
    keep = np.concatenate([[True], np.diff(pts) > WIDTH_TOL])
    return pts[keep]


def head_integrals(a, ts, log=False):
    """``∫_0^t λ`` (or ``∫_0^t log λ``) for each ``t`` in ``ts``."""
    x = _step_values(a, log)
    ts = np.asarray(ts, dtype=float)
    out = np.empty(ts.shape)
    for j, t in enumerate(ts):
        ov = _overlaps(a, 0.0, t)
        used = ov > 0
        out[j] = float(np.dot(ov[used], x[used])) if used.any() else 0.0
    return out


def tail_integrals(a, ts, log=False):
    """``∫_t^1 λ`` (or ``∫_t^1 log λ``) for each ``t`` in ``ts``."""
    x = _step_values(a, log)
    ts = np.asarray(ts, dtype=float)
    out = np.empty(ts.shape)
    for j, t in enumerate(ts):
        ov = _overlaps(a, t, 1.0)
        used = ov > 0
        out[j] = float(np.dot(ov[used], x[used])) if used.any() else 0.0
    return out


def _step_values(a, log):
    if not log:
        return a.values
    if np.any(a.values < 0):
        raise ValueError("log integrals need a non-negative scale")
    with np.errstate(divide="ignore"):
        return np.log(a.values)
