import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from antinorm.errors import DomainError, NotHermitianError, PreconditionError
from antinorm.linalg import (
    as_hermitian,
    clamp_psd,
    contraction_to_unitaries,
    eigh,
    eigvalsh,
    elementary_symmetric,
    haar_unitary,
    jacobi_eigh,
    matrix_function,
    polar,
    psd_margin,
    unitarity_defect,
)
from conftest import dims, seeds
from oracles import eigs, esym, random_psd


def hermitian(seed, n):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (g + g.conj().T)


def test_rejects_non_hermitian():
    with pytest.raises(NotHermitianError) as info:
        as_hermitian([[1.0, 2.0], [0.0, 1.0]])
    assert info.value.defect == 2.0
    assert info.value.code == "not_hermitian"


def test_rejects_non_square():
    with pytest.raises(ValueError):
        as_hermitian(np.ones((2, 3)))


def test_tiny_asymmetry_is_symmetrized():
    a = np.array([[1.0, 1.0 + 1e-14], [1.0, 2.0]])
    h = as_hermitian(a)
    assert np.array_equal(h, h.conj().T)


@given(seeds, dims)
def test_lapack_and_jacobi_agree(seed, n):
    a = hermitian(seed, n)
    lap, jac = eigh(a), eigh(a, method="jacobi")
    assert np.allclose(lap.values, eigs(a), atol=1e-12)
    assert np.allclose(jac.values, lap.values, atol=1e-11)
    for d in (lap, jac):
        assert np.all(np.diff(d.values) <= 0)
        rebuilt = (d.vectors * d.values) @ d.vectors.conj().T
        assert np.allclose(rebuilt, a, atol=1e-10)
        assert unitarity_defect(d.vectors) < 1e-12


def test_eigh_is_deterministic_with_canonical_phase():
    a = hermitian(3, 5)
    first, second = eigh(a), eigh(a.copy())
    assert np.array_equal(first.vectors, second.vectors)


def test_jacobi_on_diagonal_and_scalar():
    d = jacobi_eigh(np.diag([1.0, 3.0, 2.0]))
    assert np.allclose(d.values, [3.0, 2.0, 1.0])
    assert np.allclose(jacobi_eigh(np.zeros((3, 3))).values, 0.0)


def test_unknown_eigh_method():
    with pytest.raises(ValueError):
        eigh(np.eye(2), method="qr")


@given(seeds, dims, st.booleans())
def test_polar_decomposition(seed, n, singular):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    if singular:
        x[:, 0] = 0.0
    u, p = polar(x)
    assert unitarity_defect(u) < 1e-12
    assert np.allclose(u @ p, x, atol=1e-10)
    assert np.min(np.linalg.eigvalsh(p)) > -1e-10
    assert np.allclose(p @ p, x.conj().T @ x, atol=1e-9)


def test_matrix_function_square_root():
    a = random_psd(np.random.default_rng(0), 4)
    r = matrix_function(a, np.sqrt, psd=True)
    assert np.allclose(r @ r, a, atol=1e-12)


def test_matrix_function_domain_error():
    with pytest.raises(DomainError):
        matrix_function(np.diag([1.0, 0.0]), lambda v: 1.0 / v)


def test_clamp_psd():
    assert np.array_equal(clamp_psd([1.0, -1e-13]), [1.0, 0.0])
    with pytest.raises(PreconditionError):
        clamp_psd([1.0, -1e-3])


def test_eigvalsh_descending():
    assert np.allclose(eigvalsh(np.diag([1.0, 3.0, 2.0])), [3.0, 2.0, 1.0])


@given(seeds, dims)
def test_contraction_is_mean_of_unitaries(seed, n):
    rng = np.random.default_rng(seed)
    t = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    t /= np.linalg.norm(t, 2) * 1.01
    u1, u2 = contraction_to_unitaries(t)
    assert max(unitarity_defect(u1), unitarity_defect(u2)) < 1e-10
    assert np.allclose(0.5 * (u1 + u2), t, atol=1e-10)


def test_contraction_rejects_large_norm():
    with pytest.raises(PreconditionError):
        contraction_to_unitaries(2 * np.eye(2))


def test_elementary_symmetric_example():
    assert elementary_symmetric([1, 2, 3], 2) == 11


@given(st.lists(st.floats(0, 10), min_size=1, max_size=7), st.data())
def test_elementary_symmetric_matches_subsets(values, data):
    m = data.draw(st.integers(0, len(values)))
    expected = esym(values, m)
    assert elementary_symmetric(values, m) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_elementary_symmetric_range():
    with pytest.raises(ValueError):
        elementary_symmetric([1, 2], 3)


def test_haar_unitary_is_deterministic_and_unitary():
    u = haar_unitary(4, 9)
    assert np.array_equal(u, haar_unitary(4, 9))
    assert unitarity_defect(u) < 1e-12
    assert not np.array_equal(u, haar_unitary(4, 10))


def test_haar_first_entry_second_moment():
    # E|U_11|^2 = 1/n under Haar measure
    samples = [abs(haar_unitary(3, s)[0, 0]) ** 2 for s in range(3000)]
    assert np.mean(samples) == pytest.approx(1 / 3, abs=0.02)


def test_psd_margin():
    assert psd_margin(np.diag([2.0, -0.5])) == pytest.approx(-0.5)


@pytest.mark.parametrize("n", [8, 16, 32])
def test_lapack_and_jacobi_agree_at_larger_sizes(n):
    a = hermitian(n, n)
    for d in (eigh(a), eigh(a, method="jacobi")):
        assert np.allclose(d.values, eigs(a), atol=1e-10)
        assert np.all(np.diff(d.values) <= 0)
        assert np.allclose((d.vectors * d.values) @ d.vectors.conj().T, a, atol=1e-10)
        assert unitarity_defect(d.vectors) < 1e-12
