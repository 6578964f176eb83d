import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import charpoly_eigenvalues, det_cofactor, solve_gauss
from risklab.errors import ConvergenceError, SingularError
from risklab.linalg import (
    eigenvalues_sym,
    factorize_spd,
    solve,
    tridiagonal_eigenvalues,
    tridiagonalize,
)


def seeded_cov(n, p, seed):
    x = np.random.default_rng(seed).standard_normal((n, p)) / math.sqrt(n)
    j = x @ x.T
    return 0.5 * (j + j.T)


def test_identity_factor():
    f = factorize_spd(np.eye(3))
    np.testing.assert_array_equal(f.factor, np.eye(3))
    assert f.logdet == 0.0


def test_diagonal_logdet():
    f = factorize_spd(np.diag([4.0, 9.0]))
    assert f.logdet == pytest.approx(math.log(36), rel=1e-15)


def test_logdet_matches_cofactor_expansion():
    j = seeded_cov(5, 10, seed=11)
    f = factorize_spd(j)
    assert f.logdet == pytest.approx(math.log(det_cofactor(j)), abs=1e-9)


def test_singular_reports_pivot():
    x = np.random.default_rng(0).standard_normal((6, 3))
    with pytest.raises(SingularError) as err:
        factorize_spd(x @ x.T)
    assert err.value.pivot == 3


def test_indefinite_rejected():
    with pytest.raises(SingularError) as err:
        factorize_spd(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert err.value.pivot == 1


def test_non_symmetric_rejected():
    with pytest.raises(ValueError):
        factorize_spd(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_solve_identity_and_diagonal():
    e = np.ones(4)
    np.testing.assert_array_equal(solve(factorize_spd(np.eye(4)), e), e)
    y = solve(factorize_spd(np.diag([2.0, 4.0])), np.ones(2))
    np.testing.assert_allclose(y, [0.5, 0.25], rtol=1e-15)


def test_solve_matches_elimination():
    j = seeded_cov(5, 15, seed=5)
    y = solve(factorize_spd(j), np.ones(5))
    np.testing.assert_allclose(y, solve_gauss(j, np.ones(5)), rtol=0, atol=1e-9)


def test_solve_dimension_mismatch():
    with pytest.raises(ValueError):
        solve(factorize_spd(np.eye(3)), np.ones(4))


def test_eigen_small_cases():
    np.testing.assert_allclose(eigenvalues_sym(np.diag([3.0, 1.0, 2.0])), [1, 2, 3])
    np.testing.assert_allclose(eigenvalues_sym([[2.0, 1.0], [1.0, 2.0]]), [1, 3], atol=1e-15)
    np.testing.assert_allclose(eigenvalues_sym([[5.0]]), [5.0])


def test_eigen_matches_characteristic_polynomial():
    j = seeded_cov(6, 12, seed=2)
    np.testing.assert_allclose(eigenvalues_sym(j), charpoly_eigenvalues(j), rtol=0, atol=1e-7)


def test_eigen_handles_already_diagonal_and_repeated():
    m = np.diag([2.0, 2.0, 2.0, -1.0])
    np.testing.assert_allclose(eigenvalues_sym(m), [-1, 2, 2, 2])


def test_tridiagonalize_preserves_spectrum_invariants():
    j = seeded_cov(12, 30, seed=4)
    d, e = tridiagonalize(j)
    assert d.sum() == pytest.approx(np.trace(j), rel=1e-12)
    assert (d @ d + 2 * e @ e) == pytest.approx(np.sum(j * j), rel=1e-12)


def test_iteration_cap_raises():
    d, e = tridiagonalize(seeded_cov(10, 20, seed=1))
    with pytest.raises(ConvergenceError):
        tridiagonal_eigenvalues(d, e, max_iter=1)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 50), extra=st.integers(1, 40), seed=st.integers(0, 2**32 - 1))
def test_random_spd_properties(n, extra, seed):
    j = seeded_cov(n, n + extra, seed)
    f = factorize_spd(j)
    assert np.all(np.diag(f.factor) > 0)
    np.testing.assert_allclose(f.factor @ f.factor.T, j, rtol=1e-10, atol=1e-10 * np.max(np.abs(j)))

    b = np.random.default_rng(seed).standard_normal(n)
    y = solve(f, b)
    assert np.max(np.abs(j @ y - b)) <= 1e-8 * np.max(np.abs(b)) * max(1.0, np.linalg.cond(j) / 1e4)

    lam = eigenvalues_sym(j)
    assert np.all(np.diff(lam) >= 0)
    assert lam.sum() == pytest.approx(np.trace(j), rel=1e-8)
    assert (lam @ lam) == pytest.approx(np.sum(j * j), rel=1e-8)
    assert np.all(lam >= -1e-10)
    assert f.logdet == pytest.approx(np.sum(np.log(lam)), rel=1e-7, abs=1e-9)
