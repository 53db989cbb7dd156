"""Order relations between spectral scales.

Partial integrals of step functions are piecewise linear in ``t`` with kinks
only at breakpoints, so the difference of two of them is piecewise linear on
the merged breakpoint grid and attains its minimum at a grid point. Checking
the merged breakpoints is therefore exact, not a sampling heuristic.
"""
import math
from dataclasses import dataclass

import numpy as np

from .spectral import (
    SpectralScale,
    head_integrals,
    merged_breakpoints,
    scale_integral,
    tail_integrals,
)

__all__ = ["RELATIONS", "RelationReport", "relation_check", "wlog_weaker_witness"]

RELATIONS = ("sub_w", "maj", "super_w", "super_wlog")
TRACE_TOL = 1e-10


@dataclass(frozen=True)
class RelationReport:
    relation: str
    holds: bool
    worst_t: float
    margin: float
    tolerance: float

    def to_json(self):
        return {
            "relation": self.relation,
            "holds": self.holds,
            "worst_t": self.worst_t,
            "margin": _json_float(self.margin),
            "tolerance": self.tolerance,
        }


def _json_float(x):
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def _slack(left, right):
    # left >= right with the ±inf conventions: -inf >= -inf holds with slack 0
    if left == right:
        return 0.0
    return left - right


def relation_check(a, b, relation, tol=None):
    """Decide ``a ≺ b`` for one of the four relations.

    ``sub_w``: head integrals of ``a`` below those of ``b``.
    ``maj``: ``sub_w`` plus equal traces (to ``1e-10``).
    ``super_w``: tail integrals of ``a`` above those of ``b``.
    ``super_wlog``: tail integrals of ``log a`` above those of ``log b``.

    ``margin`` is the minimum slack over the merged breakpoints; the relation
    is reported as holding when ``margin >= -tol``. The default ``tol`` is a
    round-off allowance of ``1e-12`` relative to the scale magnitudes.
    """
    if relation not in RELATIONS:
        raise ValueError(f"unknown relation {relation!r}; expected one of {RELATIONS}")
    if tol is None:
        mag = max(np.max(np.abs(a.values)), np.max(np.abs(b.values)), 1.0)
        if relation == "super_wlog":
            mag = max(1.0, *(abs(math.log(v)) for v in (a.top, a.bottom, b.top, b.bottom) if v > 0))
        tol = 1e-12 * mag
    ts = merged_breakpoints(a, b)
    if relation in ("sub_w", "maj"):
        pts = ts[1:]
        slack = head_integrals(b, pts) - head_integrals(a, pts)
    else:
        pts = ts[:-1]
        log = relation == "super_wlog"
        left = tail_integrals(a, pts, log=log)
        right = tail_integrals(b, pts, log=log)
        slack = np.array([_slack(x, y) for x, y in zip(left, right)])
    k = int(np.argmin(slack))
    margin = float(slack[k])
    worst_t = float(pts[k])
    if relation == "maj":
        gap = abs(scale_integral(a) - scale_integral(b))
        trace_slack = TRACE_TOL - gap
        if trace_slack < margin:
            margin, worst_t = trace_slack, 1.0
    return RelationReport(relation, bool(margin >= -tol), worst_t, margin, float(tol))


def _fallback_pair():
    return (
        SpectralScale([(0.5, 1.0), (0.5, 1.0)]),
        SpectralScale([(0.5, 4.0), (0.5, 0.25)]),
    )


def wlog_weaker_witness(seed=0, trials=200):
    """A certified pair with ``a ≺^{w(log)} b`` holding and ``a ≺^w b`` failing.

    Random two-step scales are searched first; the constant-versus-spread
    pair ``(1, 1)`` versus ``(4, 1/4)`` is the constructive fallback.
    """
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        w = float(rng.uniform(0.1, 0.9))
        b_hi, b_lo = np.sort(np.exp(rng.uniform(-2.0, 2.0, size=2)))[::-1]
        c = float(np.exp(rng.uniform(-1.0, 1.0)))
        b = SpectralScale([(w, b_hi), (1.0 - w, b_lo)])
        a = SpectralScale.constant(c)
        if _certified(a, b):
            return a, b
    a, b = _fallback_pair()
    if not _certified(a, b):
        raise RuntimeError("fallback witness pair failed certification")
    return a, b


def _certified(a, b):
    return relation_check(a, b, "super_wlog").holds and not relation_check(a, b, "super_w").holds
