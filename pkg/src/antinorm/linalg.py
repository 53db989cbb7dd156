"""Dense complex Hermitian linear algebra on desk-scale matrices.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Functions here
are pure: randomness enters only through an explicit seed.
"""
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, NotHermitianError, PreconditionError

__all__ = [
    "Eigh",
    "as_matrix",
    "as_hermitian",
    "hermiticity_defect",
    "eigh",
    "jacobi_eigh",
    "eigvalsh",
    "polar",
    "abs_matrix",
    "matrix_function",
    "contraction_to_unitaries",
    "elementary_symmetric",
    "elementary_symmetric_all",
    "haar_unitary",
    "psd_margin",
    "clamp_psd",
    "unitarity_defect",
]

HERMITIAN_RTOL = 1e-12


class Eigh(NamedTuple):
    """Eigenvalues sorted non-increasing with matching eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def as_matrix(x):
    a = np.asarray(x, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def hermiticity_defect(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def as_hermitian(x):
    """Validate Hermiticity and return the exactly symmetrized matrix."""
    a = as_matrix(x)
    defect = hermiticity_defect(a)
    if defect > HERMITIAN_RTOL * (1.0 + float(np.max(np.abs(a)))):
        raise NotHermitianError(defect)
    return 0.5 * (a + a.conj().T)


def _canonical_phase(vectors):
    # first near-maximal-modulus component of each column made real positive
    mod = np.abs(vectors)
    k = np.argmax(mod >= mod.max(axis=0) - 1e-10, axis=0)
    pivot = vectors[k, np.arange(vectors.shape[1])]
    return vectors * (pivot.conj() / np.abs(pivot))


def _sorted(values, vectors):
    order = np.argsort(-values, kind="stable")
    return Eigh(values[order], _canonical_phase(vectors[:, order]))


def jacobi_eigh(x, tol=1e-15, max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Each rotation first removes the phase of the off-diagonal pivot, then
    applies the real symmetric Jacobi rotation to the resulting 2x2 block.
    """
    a = as_hermitian(x).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if scale == 0.0 or n == 1:
        return _sorted(a.diagonal().real.copy(), v)
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        if np.linalg.norm(a[offdiag]) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= 1e-300:
                    continue
                phase = apq / r
                zeta = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[q, p] = a[p, q] = 0.0
                v[:, idx] = v[:, idx] @ g
    return _sorted(a.diagonal().real.copy(), v)


def eigh(x, method="lapack"):
    """Eigendecomposition with values non-increasing.

    ``method="lapack"`` calls ``numpy.linalg.eigh``; ``method="jacobi"`` runs
    the in-house cyclic Jacobi solver. Both return canonical eigenvector
    phases so results are reproducible for a fixed input.
    """
    if method == "jacobi":
        return jacobi_eigh(x)
    if method != "lapack":
        raise ValueError(f"unknown eigh method {method!r}")
    a = as_hermitian(x)
    w, q = np.linalg.eigh(a)
    return _sorted(w, q)


def eigvalsh(x):
    """Eigenvalues only, non-increasing."""
    return np.linalg.eigvalsh(as_hermitian(x))[::-1]


def polar(x):
    """Right polar decomposition ``x = u @ p`` with ``u`` unitary, ``p = |x|``.

    For singular ``x`` the phase is completed to a full unitary on the
    kernel; the SVD provides orthonormal kernel bases on both sides.
    """
    a = as_matrix(x)
    w, s, vh = np.linalg.svd(a)
    u = w @ vh
    p = (vh.conj().T * s) @ vh
    return u, 0.5 * (p + p.conj().T)


def abs_matrix(x):
    return polar(x)[1]


def matrix_function(x, f: Callable, psd=False):
    """Functional calculus ``Q f(Λ) Q*`` on a Hermitian matrix.

    With ``psd=True`` eigenvalues in ``[-1e-10 (1+|λ|max), 0)`` are clamped to
    zero before ``f`` is applied; anything more negative is rejected.
    """
    values, q = eigh(x)
    if psd:
        values = clamp_psd(values)
    with np.errstate(all="ignore"):
        fv = np.asarray(f(values))
    if fv.shape != values.shape:
        fv = np.broadcast_to(fv, values.shape)
    bad = ~np.isfinite(fv)
    if bad.any():
        raise DomainError(float(values[np.argmax(bad)]))
    out = (q * fv) @ q.conj().T
    if np.isrealobj(fv):
        out = 0.5 * (out + out.conj().T)
    return out


def clamp_psd(values, rtol=1e-10):
    values = np.asarray(values, dtype=float)
    floor = -rtol * (1.0 + (np.max(np.abs(values)) if values.size else 0.0))
    if values.size and values.min() < floor:
        raise PreconditionError(f"matrix is not positive semidefinite (eigenvalue {values.min():.3e})")
    return np.maximum(values, 0.0)


def contraction_to_unitaries(x):
    """Write a contraction as the mean of two unitaries.

    ``|T| ± i sqrt(I - |T|^2)`` are unitaries averaging to ``|T|``; the polar
    phase of ``T`` carries them to ``T``.
    """
    t = as_matrix(x)
    opnorm = np.linalg.norm(t, 2)
    if opnorm > 1.0 + 1e-12:
        raise PreconditionError(f"not a contraction (operator norm {opnorm:.6g})")
    u, p = polar(t)
    root = matrix_function(np.eye(t.shape[0]) - p @ p, np.sqrt, psd=True)
    return u @ (p + 1j * root), u @ (p - 1j * root)


def elementary_symmetric_all(values):
    """All elementary symmetric polynomials ``e_0..e_n`` by the product expansion."""
    values = np.asarray(values, dtype=float).ravel()
    e = np.zeros(values.size + 1)
    e[0] = 1.0
    for i, x in enumerate(values):
        e[1:i + 2] = e[1:i + 2] + x * e[0:i + 1]
    return e


def elementary_symmetric(values, m):
    values = np.asarray(values, dtype=float).ravel()
    if m < 0 or m > values.size:
        raise ValueError(f"order m={m} out of range for {values.size} values")
    return float(elementary_symmetric_all(values)[m])


def haar_unitary(n, seed):
    """Haar-distributed unitary, deterministic in ``(n, seed)``.

    QR of a complex Ginibre matrix followed by the diagonal phase correction
    that makes the distribution exactly Haar.
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = r.diagonal()
    return q * (d / np.abs(d))


def unitarity_defect(u):
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def psd_margin(x):
    """Smallest eigenvalue; ``x`` is PSD at tolerance ``tol`` iff this is ``>= -tol``."""
    return float(np.linalg.eigvalsh(as_hermitian(x))[0])
