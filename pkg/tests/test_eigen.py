import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from locscape.eigen import (dense_eigen_oracle, localization_center, read_eigs_csv, smallest_eigenpairs,
                            write_eigenset)
from locscape.fieldio import read_field
from locscape.grid import GridShape, ScalarField, inner
from locscape.landscape import ConvergenceError
from locscape.operators import (DiscreteBiLaplacian, DiscreteLaplacian, SpectralFractional, dense_matrix,
                                rayleigh_quotient)

from conftest import random_field

KINDS = [DiscreteLaplacian(), SpectralFractional(0.75), DiscreteBiLaplacian()]


def test_free_laplacian_n4():
    es = smallest_eigenpairs(DiscreteLaplacian(), ScalarField.constant(GridShape.lattice(4), 0.0), m=6)
    assert np.allclose(es.lambdas, [0, 2, 2, 2, 2, 4], atol=1e-12)
    assert es.method == "dense"


@pytest.mark.parametrize("method", ["lanczos", "lobpcg"])
@pytest.mark.parametrize("kind", KINDS)
def test_matches_dense_oracle(method, kind):
    s = GridShape.lattice(16)
    V = random_field(s, 21, 0, 2)
    ref = dense_eigen_oracle(kind, V, 10)
    es = smallest_eigenpairs(kind, V, m=10, tol=1e-9, method=method)
    assert np.max(np.abs(es.lambdas - ref.lambdas) / np.abs(ref.lambdas)) < 1e-8
    assert es.method == method


def test_dense_oracle_trace_and_limits():
    s = GridShape.lattice(8)
    V = random_field(s, 2, 0, 3)
    ref = dense_eigen_oracle(DiscreteLaplacian(), V, 5)
    # trace of the discrete Laplacian is 4 per site
    assert ref.info["trace"] == pytest.approx(4 * 64 + V.values.sum())
    assert ref.info["all"].sum() == pytest.approx(ref.info["trace"])
    with pytest.raises(ValueError):
        dense_eigen_oracle(DiscreteLaplacian(), ScalarField.constant(GridShape.lattice(32), 1.0), 5)


def test_shift_invariance():
    s = GridShape.lattice(16)
    V = random_field(s, 5, 0, 2)
    a = smallest_eigenpairs(DiscreteLaplacian(), V, m=8, tol=1e-9)
    b = smallest_eigenpairs(DiscreteLaplacian(), ScalarField(s, V.values + 3.0), m=8, tol=1e-9)
    assert np.allclose(b.lambdas, a.lambdas + 3.0, rtol=1e-9)


def test_deterministic_in_seed():
    s = GridShape.lattice(32)
    V = random_field(s, 6, 0, 2)
    a = smallest_eigenpairs(DiscreteLaplacian(), V, m=12, seed=3)
    b = smallest_eigenpairs(DiscreteLaplacian(), V, m=12, seed=3)
    assert np.array_equal(a.lambdas, b.lambdas)
    assert all(np.array_equal(p.values, q.values) for p, q in zip(a.phis, b.phis))


def test_invalid_arguments():
    s = GridShape.lattice(16)
    V = random_field(s, 0, 0, 1)
    for m in (0, 256):
        with pytest.raises(ValueError):
            smallest_eigenpairs(DiscreteLaplacian(), V, m=m)
    with pytest.raises(ValueError):
        smallest_eigenpairs(DiscreteLaplacian(), V, m=4, tol=0)
    with pytest.raises(ValueError):
        smallest_eigenpairs(DiscreteLaplacian(), V, m=4, method="power")


def test_nonconvergence_raises():
    s = GridShape.lattice(32)
    with pytest.raises(ConvergenceError):
        smallest_eigenpairs(DiscreteLaplacian(), random_field(s, 1, 0, 2), m=20, method="lobpcg", maxiter=2)


def test_localization_center_examples():
    s = GridShape.lattice(8)
    v = np.zeros((8, 8))
    v[3, 5] = 1.0
    assert localization_center(ScalarField(s, v)) == (3, 5)
    assert localization_center(ScalarField(s, -v)) == (3, 5)
    v[1, 7] = -1.0
    assert localization_center(ScalarField(s, v)) == (1, 7)  # tie goes to the lower row-major index
    with pytest.raises(ValueError):
        localization_center(ScalarField.constant(s, 0.0))


def test_write_and_read_eigenset(tmp_path):
    s = GridShape.lattice(16)
    es = smallest_eigenpairs(DiscreteLaplacian(), random_field(s, 8, 0, 2), m=5)
    path = write_eigenset(es, tmp_path / "eigs")
    lam, centers = read_eigs_csv(path)
    assert np.array_equal(lam, es.lambdas)
    assert centers == es.centers
    assert np.array_equal(read_field(tmp_path / "eigs" / "phi_003.lsf").values, es.phis[2].values)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32), st.sampled_from(KINDS), st.sampled_from(["domain", "lattice"]),
       st.sampled_from([8, 16]))
def test_eigenset_invariants(seed, kind, conv, n):
    s = GridShape(n, conv)
    tol = 1e-7
    V = random_field(s, seed, 0, 2 / s.h ** 2)
    m = 8
    es = smallest_eigenpairs(kind, V, m=m, tol=tol, seed=seed)
    lam = es.lambdas
    assert np.all(np.diff(lam) >= 0)
    assert np.all(es.residuals <= tol * np.maximum(1, np.abs(lam)))
    G = np.array([[inner(p, q) for q in es.phis] for p in es.phis])
    assert np.max(np.abs(G - np.eye(m))) <= 1e-6
    for j, phi in enumerate(es.phis):
        assert abs(rayleigh_quotient(kind, V, phi) - lam[j]) <= 10 * tol * max(1, abs(lam[j]))
        assert phi.values.flat[np.argmax(np.abs(phi.values))] > 0
        assert localization_center(phi) == es.centers[j]
    # min-max bounds for the ground state; the operator part is nonnegative with constants in its kernel
    assert lam[0] >= V.values.min() - 1e-9 * abs(lam[0])
    assert lam[0] <= V.values.mean() + 1e-9 * abs(lam[0])


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_lowest_values_agree_with_full_spectrum(seed):
    s = GridShape.lattice(8)
    V = random_field(s, seed, 0, 4)
    w = np.linalg.eigvalsh(dense_matrix(DiscreteLaplacian(), V))
    es = smallest_eigenpairs(DiscreteLaplacian(), V, m=12)
    assert np.allclose(es.lambdas, w[:12], rtol=1e-10, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32), st.integers(0, 2 ** 63), st.sampled_from(["lanczos", "lobpcg"]))
def test_repeat_solves_identical(vseed, seed, method):
    s = GridShape.lattice(16)
    V = random_field(s, vseed, 0, 2)
    a = smallest_eigenpairs(DiscreteLaplacian(), V, m=6, seed=seed, method=method)
    b = smallest_eigenpairs(DiscreteLaplacian(), V, m=6, seed=seed, method=method)
    assert np.max(np.abs(a.lambdas - b.lambdas)) <= 1e-10
    assert all(np.array_equal(p.values, q.values) for p, q in zip(a.phis, b.phis))
