"""Inequality reports and input fingerprints."""
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "InequalityReport",
    "fingerprint",
    "make_report",
    "make_equality_report",
    "relative_tolerance",
    "json_float",
]

DEFAULT_RTOL = 1e-9


def json_float(x):
    """Floats as JSON-safe values; non-finite ones become strings."""
    x = float(x)
    if math.isfinite(x):
        return x
    if math.isnan(x):
        return "nan"
    return "inf" if x > 0 else "-inf"


def relative_tolerance(lhs, rhs, rtol=DEFAULT_RTOL):
    finite = [abs(v) for v in (lhs, rhs) if math.isfinite(v)]
    return rtol * max(finite + [1.0])


def _feed(h, obj):
    if isinstance(obj, np.ndarray):
        arr = np.ascontiguousarray(obj)
        h.update(f"nd{arr.dtype.str}{arr.shape}".encode())
        h.update(arr.tobytes())
    elif isinstance(obj, (list, tuple)):
        h.update(f"seq{len(obj)}".encode())
        for item in obj:
            _feed(h, item)
    elif isinstance(obj, float):
        h.update(b"f" + float(obj).hex().encode())
    elif isinstance(obj, dict):
        h.update(json.dumps(obj, sort_keys=True, default=str).encode())
    else:
        h.update(f"{type(obj).__name__}:{obj!s}".encode())


def fingerprint(*inputs):
    """SHA-256 over a canonical byte encoding of the inputs (first 16 hex digits)."""
    h = hashlib.sha256()
    for obj in inputs:
        _feed(h, obj)
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class InequalityReport:
    """Outcome of one inequality check; ``margin >= -tolerance`` means it holds."""

    case_id: str
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    passed: bool
    fingerprint: str
    seed: int = 0
    out_of_scope: bool = False
    details: dict = field(default_factory=dict)

    def to_json(self):
        out = {
            "case_id": self.case_id,
            "lhs": json_float(self.lhs),
            "rhs": json_float(self.rhs),
            "margin": json_float(self.margin),
            "tolerance": json_float(self.tolerance),
            "pass": self.passed,
            "inputs_fingerprint": self.fingerprint,
            "seed": self.seed,
        }
        if self.out_of_scope:
            out["out_of_scope"] = True
        if self.details:
            out["details"] = self.details
        return out


def make_report(case_id, lhs, rhs, inputs=(), seed=0, tolerance=None, rtol=DEFAULT_RTOL, details=None):
    """Build a report for the claim ``lhs >= rhs``."""
    lhs, rhs = float(lhs), float(rhs)
    if lhs == rhs:
        margin = 0.0
    else:
        margin = lhs - rhs
    if tolerance is None:
        tolerance = relative_tolerance(lhs, rhs, rtol)
    passed = bool(margin >= -tolerance)
    return InequalityReport(
        case_id=case_id,
        lhs=lhs,
        rhs=rhs,
        margin=float(margin),
        tolerance=float(tolerance),
        passed=passed,
        fingerprint=fingerprint(case_id, *inputs),
        seed=int(seed),
        details=dict(details or {}),
    )


def make_equality_report(case_id, left, right, inputs=(), seed=0, rtol=DEFAULT_RTOL, details=None):
    """Report for ``left == right``: the margin is ``-|left - right|``."""
    left, right = float(left), float(right)
    gap = 0.0 if left == right else abs(left - right)
    tolerance = relative_tolerance(left, right, rtol)
    return InequalityReport(
        case_id=case_id,
        lhs=left,
        rhs=right,
        margin=-gap,
        tolerance=float(tolerance),
        passed=bool(gap <= tolerance),
        fingerprint=fingerprint(case_id, *inputs),
        seed=int(seed),
        details=dict(details or {}),
    )
