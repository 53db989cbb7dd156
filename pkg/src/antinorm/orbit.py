"""Unitary witnesses for operator inequalities, certified by PSD margins.

Every function returns the unitaries together with the smallest eigenvalue
of the difference ``right - left`` that the inequality claims is PSD.

The orbit inequalities are built from the contraction ``C = T^{+1/2} A T^{+1/2}``
with ``T = A + B``. Writing ``h(T) = L1 L1* + L2 L2*`` with
``L1 = h(T)^{1/2} C^{1/2}`` and ``L2 = h(T)^{1/2} (I-C)^{1/2}`` reduces each
inequality to a spectral comparison between ``C^{1/2} h(T) C^{1/2}`` and
``h(A)`` (and likewise for ``B`` with ``I - C``), which
:func:`dominance_unitary` turns into an operator inequality.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import PreconditionError, WitnessNotFound
from .functions import require_flags
from .linalg import (
    as_hermitian,
    as_matrix,
    clamp_psd,
    eigh,
    haar_unitary,
    polar,
    psd_margin,
    unitarity_defect,
)

__all__ = [
    "WitnessResult",
    "ACCEPT_TOL",
    "dominance_unitary",
    "agm_witness",
    "triangle_witness",
    "orbit_witness",
    "orbit_residual",
    "mixed_witness",
    "mixed_residual",
]

ACCEPT_TOL = 1e-8
KERNEL_RTOL = 1e-12
SEARCH_SEEDS = 256
SEARCH_STEPS = 64


@dataclass(frozen=True)
class WitnessResult:
    unitaries: Tuple[np.ndarray, ...]
    psd_margin: float
    method: str
    epsilon_used: float = 0.0

    @property
    def unitarity_defect(self):
        return max(unitarity_defect(u) for u in self.unitaries)

    def to_json(self):
        return {
            "psd_margin": self.psd_margin,
            "method": self.method,
            "epsilon_used": self.epsilon_used,
            "unitarity_defect": self.unitarity_defect,
        }


def _psd(a):
    a = as_hermitian(a)
    clamp_psd(np.linalg.eigvalsh(a))
    return a


def _fn(a, f):
    """``f(A)`` for PSD ``A`` with eigenvalues below the kernel cutoff set to zero.

    Non-Lipschitz functions such as ``sqrt`` would otherwise turn round-off
    eigenvalues of size ``1e-16`` into spurious ``1e-8`` perturbations.
    """
    values, q = eigh(a)
    values = clamp_psd(values)
    values = np.where(values > KERNEL_RTOL * values.max(initial=0.0), values, 0.0)
    with np.errstate(all="ignore"):
        fv = np.asarray(f(values), dtype=float)
    fv = np.broadcast_to(fv, values.shape)
    if not np.all(np.isfinite(fv)):
        raise PreconditionError("function is not finite on the spectrum")
    out = (q * fv) @ q.conj().T
    return 0.5 * (out + out.conj().T)


def _conj(u, a):
    return u @ a @ u.conj().T


def dominance_unitary(a, b, tol=None):
    """Unitary ``U`` with ``U A U* <= B``, given ``λ_k(A) <= λ_k(B)`` for every ``k``.

    Aligning sorted eigenbases, ``U = Q_B Q_A*``, maps each eigenvector of
    ``A`` onto the eigenvector of ``B`` with the same rank.
    """
    ea, eb = eigh(a), eigh(b)
    if tol is None:
        tol = 1e-10 * (1.0 + max(np.max(np.abs(ea.values)), np.max(np.abs(eb.values))))
    gap = ea.values - eb.values
    if np.any(gap > tol):
        k = int(np.argmax(gap))
        raise PreconditionError(
            f"spectral dominance fails at index {k}: "
            f"eigenvalue {ea.values[k]:.6g} of A exceeds {eb.values[k]:.6g} of B"
        )
    u = eb.vectors @ ea.vectors.conj().T
    margin = psd_margin(as_hermitian(b) - _conj(u, as_hermitian(a)))
    return WitnessResult((u,), margin, "constructive")


def agm_witness(a, b):
    """``|BA| <= (A^2 + V B^2 V*)/2`` with ``V*`` the polar phase of ``BA``."""
    a, b = _psd(a), _psd(b)
    phase, mod = polar(b @ a)
    v = phase.conj().T
    diff = 0.5 * (a @ a + _conj(v, b @ b)) - mod
    return WitnessResult((v,), psd_margin(diff), "constructive")


def triangle_witness(x, y):
    """``|X+Y| <= (|X| + |Y| + W*(|X*| + |Y*|)W)/2`` with ``W`` the polar phase of ``X+Y``."""
    x, y = as_matrix(x), as_matrix(y)
    if x.shape != y.shape:
        raise ValueError("matrices must have the same shape")
    w, mod = polar(x + y)
    right = _abs(x) + _abs(y)
    left = _abs(x.conj().T) + _abs(y.conj().T)
    diff = 0.5 * (right + w.conj().T @ left @ w) - mod
    return WitnessResult((w,), psd_margin(diff), "constructive")


def _abs(x):
    return polar(x)[1]


def _split(a, b):
    """Square roots of ``C`` and ``I - C`` for ``C = T^{+1/2} A T^{+1/2}`` (half identity on ``ker T``)."""
    t = a + b
    values, q = eigh(t)
    values = clamp_psd(values)
    cutoff = KERNEL_RTOL * max(values.max(initial=0.0), 1e-300)
    rng_mask = values > cutoff
    inv_root = np.where(rng_mask, 1.0 / np.sqrt(np.where(rng_mask, values, 1.0)), 0.0)
    pinv_root = (q * inv_root) @ q.conj().T
    ker = (q * (~rng_mask)) @ q.conj().T
    c = pinv_root @ a @ pinv_root + 0.5 * ker
    c_root = _fn(c, np.sqrt)
    rest_root = _fn(np.eye(t.shape[0]) - c, np.sqrt)
    return t, c_root, rest_root


def _side(h_t, h_part, root, dominated):
    """Unitary ``U`` with ``U h_part U*`` below (or above) ``L L*``, ``L = h_t^{1/2} root``."""
    ell = _fn(h_t, np.sqrt) @ root
    v1, _ = polar(ell)
    inner = as_hermitian(root @ h_t @ root)
    if dominated:
        w = dominance_unitary(h_part, inner).unitaries[0]
        return v1 @ w
    w = dominance_unitary(inner, h_part).unitaries[0]
    return v1 @ w.conj().T


def orbit_residual(a, b, f, mode, u, v, eps=0.0):
    """Matrix that the orbit inequality claims is PSD."""
    a, b = as_hermitian(a), as_hermitian(b)
    n = a.shape[0]
    fa = _fn(a, f)
    fb = _fn(b, f)
    ft = _fn(a + b, f)
    orbit = _conj(u, fa) + _conj(v, fb)
    if mode == "convex_super":
        return ft + eps * np.eye(n) - orbit
    if mode == "concave_sub":
        return orbit + eps * np.eye(n) - ft
    raise ValueError(f"unknown orbit mode {mode!r}")


def _check_nonnegative(f):
    grid = np.concatenate([[0.0], np.geomspace(1e-6, 1e3, 400)])
    values = f(grid)
    if np.any(values[np.isfinite(values)] < 0):
        raise PreconditionError(f"{getattr(f, 'description', 'f')} takes negative values")


def orbit_witness(a, b, f, mode, eps=0.0, seed=0, search=True):
    """Unitaries ``U, V`` for the convex or concave orbit inequality.

    ``convex_super``: ``f(A+B) + εI >= U f(A) U* + V f(B) V*`` (``f`` convex, ``f(0) = 0``).
    ``concave_sub``: ``f(A+B) <= U f(A) U* + V f(B) V* + εI`` (``f`` concave, ``f >= 0``).
    """
    if mode == "convex_super":
        require_flags(f, {"convex", "zero_at_zero"})
    elif mode == "concave_sub":
        require_flags(f, {"concave"})
        _check_nonnegative(f)
    else:
        raise ValueError(f"unknown orbit mode {mode!r}")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    a, b = _psd(a), _psd(b)
    t, c_root, rest_root = _split(a, b)
    ft = _fn(t, f)
    fa = _fn(a, f)
    fb = _fn(b, f)
    dominated = mode == "convex_super"
    best = -np.inf
    try:
        u = _side(ft, fa, c_root, dominated)
        v = _side(ft, fb, rest_root, dominated)
        best = psd_margin(orbit_residual(a, b, f, mode, u, v, eps))
        if best >= -ACCEPT_TOL:
            return WitnessResult((u, v), best, "constructive", eps)
    except PreconditionError:
        pass
    if search:
        found, value = _search(lambda us: psd_margin(orbit_residual(a, b, f, mode, us[0], us[1], eps)),
                               a.shape[0], 2, seed)
        if found is not None:
            return WitnessResult(found, value, "search", eps)
        best = max(best, value)
    raise WitnessNotFound(best)


def mixed_residual(x, y, g, u, v, eps=0.0):
    x, y = as_matrix(x), as_matrix(y)
    n = x.shape[0]
    p = _abs(x) + _abs(y)
    q = _abs(x.conj().T) + _abs(y.conj().T)
    left = _fn(_abs(x + y), g)
    right = 0.5 * (_conj(u, _fn(p, g)) + _conj(v, _fn(q, g)))
    return right + eps * np.eye(n) - left


def mixed_witness(x, y, g, eps=0.0, seed=0, search=True):
    """``g(|X+Y|) <= (U g(|X|+|Y|) U* + V g(|X*|+|Y*|) V*)/2 + εI`` for ``g`` non-decreasing convex.

    ``g(|X+Y|)`` is spectrally dominated by ``M = (g(P) + W* g(Q) W)/2``
    (``W`` the polar phase of ``X+Y``); aligning with ``Ω`` gives
    ``U = Ω*`` and ``V = Ω* W*``.
    """
    require_flags(g, {"non_decreasing", "convex"})
    if eps < 0:
        raise ValueError("eps must be non-negative")
    x, y = as_matrix(x), as_matrix(y)
    if x.shape != y.shape:
        raise ValueError("matrices must have the same shape")
    w, mod = polar(x + y)
    p = _abs(x) + _abs(y)
    q = _abs(x.conj().T) + _abs(y.conj().T)
    m = 0.5 * (_fn(p, g) + w.conj().T @ _fn(q, g) @ w)
    best = -np.inf
    try:
        omega = dominance_unitary(_fn(mod, g), m).unitaries[0]
        u = omega.conj().T
        v = omega.conj().T @ w.conj().T
        best = psd_margin(mixed_residual(x, y, g, u, v, eps))
        if best >= -ACCEPT_TOL:
            return WitnessResult((u, v), best, "constructive", eps)
    except PreconditionError:
        pass
    if search:
        found, value = _search(lambda us: psd_margin(mixed_residual(x, y, g, us[0], us[1], eps)),
                               x.shape[0], 2, seed)
        if found is not None:
            return WitnessResult(found, value, "search", eps)
        best = max(best, value)
    raise WitnessNotFound(best)


def _unitary_step(u, h, step):
    values, q = np.linalg.eigh(h)
    return u @ ((q * np.exp(1j * step * values)) @ q.conj().T)


def _search(objective, n, count, seed, seeds=SEARCH_SEEDS, steps=SEARCH_STEPS):
    """Seeded Haar starts refined by random geodesic steps of shrinking size.

    Returns ``(unitaries, margin)`` for the first certified start, else
    ``(None, best_margin)``.
    """
    rng = np.random.default_rng([seed, n, count])
    best = -np.inf
    for _ in range(seeds):
        us = [haar_unitary(n, rng) for _ in range(count)]
        value = objective(us)
        step = 0.5
        for _ in range(steps):
            if value >= -ACCEPT_TOL:
                break
            trial = []
            for u in us:
                g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                trial.append(_unitary_step(u, 0.5 * (g + g.conj().T), step))
            trial_value = objective(trial)
            if trial_value > value:
                us, value = trial, trial_value
            else:
                step *= 0.9
        best = max(best, value)
        if value >= -ACCEPT_TOL:
            return tuple(us), value
    return None, best
