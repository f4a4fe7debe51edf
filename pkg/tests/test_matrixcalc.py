import numpy as np
import pytest

from kolmo import AccuracyError, integrate_matrix, mat_exp, spd_min_eigen, sqrt_spd
from kolmo.errors import (
    DefinitenessError,
    DimensionError,
    DomainError,
    SymmetryError,
)


def test_mat_exp_nilpotent_closed_form():
    # B^2 = 0 so exp(sB) = I + sB exactly
    B = np.array([[0.0, 0.0], [1.0, 0.0]])
    for s in (-3.0, 0.0, 0.7, 12.5):
        assert np.abs(mat_exp(s * B) - (np.eye(2) + s * B)).max() == 0.0


def test_mat_exp_symmetric_eig_oracle():
    rng = np.random.default_rng(3)
    for _ in range(20):
        S = rng.standard_normal((4, 4))
        S = (S + S.T) / 2.0
        w, V = np.linalg.eigh(S)
        oracle = (V * np.exp(w)) @ V.T
        assert np.abs(mat_exp(S) - oracle).max() < 1e-12 * np.exp(np.abs(w).max())


def test_mat_exp_series_oracle_small_norm():
    rng = np.random.default_rng(7)
    M = 0.01 * rng.standard_normal((3, 3))
    term = np.eye(3)
    acc = np.eye(3)
    for k in range(1, 20):
        term = term @ M / k
        acc = acc + term
    assert np.abs(mat_exp(M) - acc).max() < 1e-14


def test_mat_exp_inverse_pair():
    rng = np.random.default_rng(11)
    M = rng.standard_normal((3, 3))
    assert np.abs(mat_exp(M) @ mat_exp(-M) - np.eye(3)).max() < 1e-12


def test_mat_exp_overflow_raises():
    with pytest.raises(AccuracyError):
        mat_exp(np.array([[1e4]]))


def test_mat_exp_rejects_bad_input():
    with pytest.raises(DimensionError):
        mat_exp(np.zeros((2, 3)))
    with pytest.raises(DomainError):
        mat_exp(np.array([[np.nan]]))


def test_sqrt_spd_squares_back():
    rng = np.random.default_rng(5)
    for _ in range(10):
        X = rng.standard_normal((4, 4))
        A = X @ X.T + 0.1 * np.eye(4)
        S = sqrt_spd(A)
        assert np.abs(S - S.T).max() < 1e-12
        assert np.abs(S @ S - A).max() < 1e-10


def test_sqrt_spd_rejects_nonsymmetric_and_indefinite():
    with pytest.raises(SymmetryError):
        sqrt_spd(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(DefinitenessError):
        sqrt_spd(np.diag([1.0, -1.0]))


def test_spd_min_eigen_verdicts():
    rep = spd_min_eigen(np.diag([2.0, 5.0]))
    assert rep.is_spd and abs(rep.min_eigenvalue - 2.0) < 1e-12
    rep = spd_min_eigen(np.diag([0.0, 1.0]))
    assert not rep.is_spd


def test_integrate_matrix_polynomial_exact():
    # int_0^2 [[s, s^3]] ds = [[2, 4]]
    val = integrate_matrix(lambda s: np.array([[s, s**3]]), 2.0)
    assert np.abs(val - np.array([[2.0, 4.0]])).max() < 1e-12


def test_integrate_matrix_exponential():
    val = integrate_matrix(lambda s: np.array([[np.exp(s)]]), 1.0)
    assert abs(val[0, 0] - (np.e - 1.0)) < 1e-12


def test_integrate_matrix_domain_and_kink():
    with pytest.raises(DomainError):
        integrate_matrix(lambda s: np.eye(1), 0.0)
    # kink off the panel grid defeats the panel-doubling check
    with pytest.raises(AccuracyError):
        integrate_matrix(lambda s: np.array([[abs(s - 0.37)]]), 1.0)
