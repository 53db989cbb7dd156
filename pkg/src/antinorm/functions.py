"""Scalar functions on ``[0, ∞)`` with declared, numerically verified shape flags.

Flags: ``convex``, ``concave``, ``superadditive``, ``log_concave``,
``non_decreasing``, ``zero_at_zero``. ``class_s`` marks compositions
``f∘g`` with ``f`` superadditive log-concave and ``g`` superadditive convex;
it is granted by construction and implies the three verifiable flags
``superadditive``, ``non_decreasing`` and ``zero_at_zero``.
"""
import ast
import math
from dataclasses import dataclass

import numpy as np

from .errors import FlagVerificationError, ParseError

__all__ = [
    "FLAGS",
    "ScalarFunction",
    "PropertyReport",
    "default_grid",
    "verify_properties",
    "require_flags",
    "compose_classS",
    "as_class_s",
    "inverse_power_sum_function",
    "parse_function",
    "identity",
    "power",
    "angle",
    "t_arctan",
    "sinh_power",
    "t_exp_power",
    "min_power",
    "power_exp_decay",
    "power_exp_decay_threshold",
    "shifted_indicator",
]

FLAGS = ("convex", "concave", "superadditive", "log_concave", "non_decreasing", "zero_at_zero")
RTOL = 1e-9
SUPERADDITIVE_PAIRS = 10_000


def default_grid(lo=1e-6, hi=1e3, size=2000):
    """Log-spaced grid on ``(lo, hi)`` with ``0`` prepended."""
    return np.concatenate([[0.0], np.geomspace(lo, hi, size)])


class ScalarFunction:
    """A vectorized function of ``t >= 0`` with a set of declared flags."""

    def __init__(self, func, flags=(), description=""):
        unknown = set(flags) - set(FLAGS) - {"class_s"}
        if unknown:
            raise ValueError(f"unknown flags {sorted(unknown)}")
        self.func = func
        self.flags = frozenset(flags)
        self.description = description or getattr(func, "__name__", "f")
        self._verified = None

    def __call__(self, t):
        with np.errstate(all="ignore"):
            return self.func(np.asarray(t, dtype=float))

    def verification(self):
        """Default-grid reports for every declared verifiable flag (cached)."""
        if self._verified is None:
            self._verified = verify_properties(self, sorted(self.flags & set(FLAGS)))
        return self._verified

    def with_flags(self, flags, description=None):
        return ScalarFunction(self.func, flags, description or self.description)

    def __repr__(self):
        return f"ScalarFunction({self.description!r}, flags={sorted(self.flags)})"


@dataclass(frozen=True)
class PropertyReport:
    flag: str
    holds: bool
    violation: float
    witness: tuple = ()

    def to_json(self):
        return {"flag": self.flag, "holds": self.holds, "violation": self.violation,
                "witness": list(self.witness)}


def _tol(*values):
    return RTOL * np.maximum.reduce([np.abs(v) for v in values] + [np.ones_like(values[0]) * 1e-300])


def _finite_points(f, grid):
    x = np.asarray(grid, dtype=float)
    y = f(x)
    keep = np.isfinite(y)
    return x[keep], y[keep]


def _worst(flag, excess, points):
    """Report from per-check excess values (positive means violated beyond tolerance)."""
    if excess.size == 0:
        return PropertyReport(flag, True, 0.0)
    k = int(np.argmax(excess))
    if excess[k] > 0:
        return PropertyReport(flag, False, float(excess[k]), tuple(float(p[k]) for p in points))
    return PropertyReport(flag, True, 0.0)


def _check_convex(f, grid, sign=1.0, flag="convex"):
    x, y = _finite_points(f, grid)
    y = sign * y
    x0, x1, x2 = x[:-2], x[1:-1], x[2:]
    y0, y1, y2 = y[:-2], y[1:-1], y[2:]
    chord = ((x2 - x1) * y0 + (x1 - x0) * y2) / (x2 - x0)
    return _worst(flag, y1 - chord - _tol(y0, y1, y2), (x0, x1, x2))


def _check_log_concave(f, grid, rng):
    x, y = _finite_points(f, grid)
    if np.any(y < 0):
        k = int(np.argmax(y < 0))
        return PropertyReport("log_concave", False, float(-y[k]), (float(x[k]),))
    # midpoint test on grid pairs at several separations plus random pairs
    i = np.concatenate([np.arange(x.size - s) for s in (1, 2, 7, 50)] + [rng.integers(0, x.size, 4000)])
    j = np.concatenate([np.arange(s, x.size) for s in (1, 2, 7, 50)] + [rng.integers(0, x.size, 4000)])
    a, b = x[i], x[j]
    fa, fb = y[i], y[j]
    fm = f(0.5 * (a + b))
    ok = np.isfinite(fm)
    a, b, fa, fb, fm = a[ok], b[ok], fa[ok], fb[ok], fm[ok]
    # f(m) >= sqrt(f(a) f(b)) in logs; -inf on both sides counts as holding
    la, lb, lm = np.log(fa), np.log(fb), np.log(fm)
    excess = 0.5 * (la + lb) - lm - RTOL * (1.0 + np.abs(lm))
    excess = np.where(np.isnan(excess), -1.0, excess)
    return _worst("log_concave", excess, (a, b))


def _check_superadditive(f, grid, rng, pairs=SUPERADDITIVE_PAIRS):
    x = np.asarray(grid, dtype=float)
    a = x[rng.integers(0, x.size, pairs)]
    b = x[rng.integers(0, x.size, pairs)]
    fa, fb, fab = f(a), f(b), f(a + b)
    ok = np.isfinite(fa) & np.isfinite(fb) & np.isfinite(fab)
    a, b, fa, fb, fab = a[ok], b[ok], fa[ok], fb[ok], fab[ok]
    return _worst("superadditive", fa + fb - fab - _tol(fa + fb, fab), (a, b))


def _check_non_decreasing(f, grid):
    x, y = _finite_points(f, grid)
    return _worst("non_decreasing", y[:-1] - y[1:] - _tol(y[:-1], y[1:]), (x[:-1], x[1:]))


def _check_zero_at_zero(f):
    v = float(f(np.array([0.0]))[0])
    ok = math.isfinite(v) and abs(v) <= 1e-12
    return PropertyReport("zero_at_zero", ok, 0.0 if ok else abs(v), () if ok else (0.0,))


def verify_properties(f, flags=FLAGS, grid=None, seed=0):
    """Confirm or refute each flag on a grid; refutations carry witness points."""
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    call = f if isinstance(f, ScalarFunction) else ScalarFunction(f)
    rng = np.random.default_rng(seed)
    out = {}
    with np.errstate(all="ignore"):
        for flag in flags:
            out[flag] = _verify_one(call, flag, grid, rng)
    return out


def _verify_one(call, flag, grid, rng):
    if flag == "convex":
        return _check_convex(call, grid)
    if flag == "concave":
        return _check_convex(call, grid, sign=-1.0, flag="concave")
    if flag == "log_concave":
        return _check_log_concave(call, grid, rng)
    if flag == "superadditive":
        return _check_superadditive(call, grid, rng)
    if flag == "non_decreasing":
        return _check_non_decreasing(call, grid)
    if flag == "zero_at_zero":
        return _check_zero_at_zero(call)
    raise ValueError(f"unknown flag {flag!r}")


def require_flags(f, needed):
    """Raise unless every flag in ``needed`` is declared and passes its verifier."""
    needed = set(needed)
    if "class_s" in needed and "class_s" not in f.flags:
        raise FlagVerificationError(f"{f.description} is not a certified class-S composition")
    needed.discard("class_s")
    missing = needed - f.flags
    if missing:
        raise FlagVerificationError(f"{f.description} lacks declared flags {sorted(missing)}")
    report = f.verification()
    failed = sorted(flag for flag in needed if not report[flag].holds)
    if failed:
        detail = "; ".join(f"{flag} refuted at {report[flag].witness}" for flag in failed)
        raise FlagVerificationError(f"{f.description}: {detail}")
    return f


_CLASS_S_IMPLIED = {"superadditive", "non_decreasing", "zero_at_zero"}


def compose_classS(f, g):
    """``t -> f(g(t))`` for ``f`` superadditive log-concave, ``g`` superadditive convex with ``g(0) = 0``."""
    require_flags(f, {"superadditive", "log_concave"})
    require_flags(g, {"superadditive", "convex", "zero_at_zero"})
    return ScalarFunction(
        lambda t: f.func(g.func(t)),
        _CLASS_S_IMPLIED | {"class_s"},
        f"{f.description} o {g.description}",
    )


def as_class_s(psi):
    """Tag a single function as class-S via the trivial factor ``id``."""
    if {"convex", "zero_at_zero"} <= psi.flags:
        return compose_classS(identity(), psi).with_flags(
            psi.flags | _CLASS_S_IMPLIED | {"class_s"}, psi.description)
    if {"superadditive", "log_concave"} <= psi.flags:
        return compose_classS(psi, identity()).with_flags(
            psi.flags | _CLASS_S_IMPLIED | {"class_s"}, psi.description)
    raise FlagVerificationError(f"{psi.description} is neither convex with g(0)=0 nor superadditive log-concave")


# --------------------------------------------------------------------------
# catalogue

_ALL_THREE = ("convex", "superadditive", "log_concave", "non_decreasing", "zero_at_zero")
_SUPER_CONVEX = ("convex", "superadditive", "non_decreasing", "zero_at_zero")
_SUPER_LOGCONCAVE = ("superadditive", "log_concave", "non_decreasing", "zero_at_zero")


def identity():
    return ScalarFunction(lambda t: t, _ALL_THREE + ("concave",), "t")


def power(p):
    if p < 1:
        raise ValueError("catalogue powers need p >= 1")
    return ScalarFunction(lambda t: np.maximum(t, 0.0) ** p, _ALL_THREE, f"t^{p:g}")


def angle(alpha):
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return ScalarFunction(lambda t: np.maximum(t - alpha, 0.0), _ALL_THREE, f"(t-{alpha:g})_+")


def t_arctan():
    return ScalarFunction(lambda t: t * np.arctan(t), _ALL_THREE, "t*arctan(t)")


def sinh_power(gamma):
    if gamma <= 1:
        raise ValueError("gamma must exceed 1")
    return ScalarFunction(lambda t: np.sinh(t ** gamma), _SUPER_CONVEX, f"sinh(t^{gamma:g})")


def t_exp_power(gamma):
    if gamma <= 1:
        raise ValueError("gamma must exceed 1")
    return ScalarFunction(lambda t: t * np.exp(t ** gamma), _SUPER_CONVEX, f"t*exp(t^{gamma:g})")


def min_power(alpha, beta):
    if not 1 <= alpha < beta:
        raise ValueError("need 1 <= alpha < beta")
    return ScalarFunction(lambda t: np.minimum(t ** alpha, t ** beta), _SUPER_LOGCONCAVE,
                          f"min(t^{alpha:g}, t^{beta:g})")


def power_exp_decay_threshold(alpha):
    return 2 * alpha - 1 + 2 * math.sqrt(alpha * (alpha - 1))


def power_exp_decay(alpha, beta):
    """``t^α exp(-1/t^β)``: superadditive and log-concave; convex only up to the threshold in ``β``."""
    if alpha < 1 or beta <= 0:
        raise ValueError("need alpha >= 1 and beta > 0")
    flags = _SUPER_LOGCONCAVE
    if beta <= power_exp_decay_threshold(alpha):
        flags = flags + ("convex",)

    def func(t):
        with np.errstate(divide="ignore"):
            return np.where(t > 0, t ** alpha * np.exp(-1.0 / np.where(t > 0, t, 1.0) ** beta), 0.0)

    return ScalarFunction(func, flags, f"t^{alpha:g}*exp(-1/t^{beta:g})")


def shifted_indicator(a, b):
    """``(t-a)·1_[b,∞)(t)`` with ``0 < a < b`` (discontinuous at ``b``)."""
    if not 0 < a < b:
        raise ValueError("need 0 < a < b")
    return ScalarFunction(lambda t: np.where(t >= b, t - a, 0.0), _SUPER_LOGCONCAVE,
                          f"(t-{a:g})*1[t>={b:g}]")


def inverse_power_sum_function(m):
    """``t^m / (1 + t + ... + t^{m-1})``, equal to ``(Σ_{k=1}^m t^{-k})^{-1}`` for ``t > 0``."""
    m = int(m)
    if m < 1:
        raise ValueError("m must be a positive integer")

    def func(t):
        t = np.maximum(t, 0.0)
        small = t <= 1.0
        ts = np.where(small, t, 0.0)
        low = ts ** m / sum(ts ** k for k in range(m))
        inv = 1.0 / np.where(small, 1.0, t)
        high = 1.0 / sum(inv ** k for k in range(1, m + 1))
        return np.where(small, low, high)

    return ScalarFunction(func, _SUPER_CONVEX, f"t^{m}/(1+...+t^{m - 1})")


# --------------------------------------------------------------------------
# expression parser


def _indicator(x, b):
    return np.where(x >= b, 1.0, 0.0)


_FUNCS = {
    "min": np.minimum,
    "max": np.maximum,
    "exp": np.exp,
    "log": np.log,
    "sinh": np.sinh,
    "arctan": np.arctan,
    "sqrt": np.sqrt,
    "indicator": _indicator,
}
_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
    ast.Pow: np.power,
}


def _caret_to_pow(text):
    out, origin = [], []
    for i, ch in enumerate(text):
        if ch == "^":
            out.append("**")
            origin.extend([i, i])
        else:
            out.append(ch)
            origin.append(i)
    return "".join(out), origin


def parse_function(text, flags=None, description=None):
    """Compile an arithmetic expression in ``t`` into a :class:`ScalarFunction`.

    Grammar: numbers, ``t``, ``+ - * / ^`` and calls to ``min``, ``max``,
    ``exp``, ``log``, ``sinh``, ``arctan``, ``sqrt``, ``indicator(x, b)``
    (``1`` where ``x >= b``). When ``flags`` is ``None`` every verifiable
    flag that passes on the default grid is attached.
    """
    source, origin = _caret_to_pow(text)

    def fail(msg, node=None):
        pos = None
        if node is not None and getattr(node, "col_offset", None) is not None:
            col = node.col_offset
            pos = (origin[col] if col < len(origin) else len(text)) + 1
        raise ParseError(msg, line=1 if pos is not None else None, position=pos)

    try:
        tree = ast.parse(source.strip() and source, mode="eval")
    except SyntaxError as exc:
        col = (exc.offset or 1) - 1
        pos = (origin[col] if col < len(origin) else len(text)) + 1
        raise ParseError(f"invalid expression {text!r}: {exc.msg}", line=exc.lineno or 1, position=pos) from None

    def compile_node(node):
        if isinstance(node, ast.Expression):
            return compile_node(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            value = float(node.value)
            return lambda t: value
        if isinstance(node, ast.Name):
            if node.id != "t":
                fail(f"unknown identifier {node.id!r}", node)
            return lambda t: t
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = compile_node(node.operand)
            if isinstance(node.op, ast.USub):
                return lambda t: -inner(t)
            return inner
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            op = _BINOPS[type(node.op)]
            left, right = compile_node(node.left), compile_node(node.right)
            return lambda t: op(left(t), right(t))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
            name = node.func.id
            if name not in _FUNCS:
                fail(f"unknown function {name!r}", node)
            if node.keywords:
                fail("keyword arguments are not supported", node)
            arity = 2 if name in ("min", "max", "indicator") else 1
            if len(node.args) != arity:
                fail(f"{name} takes {arity} argument(s)", node)
            fn = _FUNCS[name]
            args = [compile_node(a) for a in node.args]
            if arity == 1:
                (a0,) = args
                return lambda t: fn(a0(t))
            a0, a1 = args
            return lambda t: fn(a0(t), a1(t))
        fail(f"unsupported syntax {type(node).__name__}", node)

    body = compile_node(tree)

    def func(t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(np.asarray(body(t), dtype=float), t.shape).copy()

    desc = description or text
    if flags is None:
        probe = ScalarFunction(func, (), desc)
        flags = [flag for flag, rep in verify_properties(probe).items() if rep.holds]
    return ScalarFunction(func, flags, desc)
