import numpy as np
import pytest

from metsizer.errors import DecompositionError
from metsizer.sampling import draw_gaussian_matrix, draw_inverse_gamma


def test_inverse_gamma_positive():
    rng = np.random.default_rng(0)
    assert draw_inverse_gamma(3, 4, rng) > 0


@pytest.mark.parametrize("shape,scale", [(0, 4), (-1, 4), (3, 0), (3, -2)])
def test_inverse_gamma_rejects_nonpositive_params(shape, scale):
    with pytest.raises(ValueError):
        draw_inverse_gamma(shape, scale, np.random.default_rng(0))


def test_inverse_gamma_moments():
    # analytic oracle: mean = scale/(shape-1) = 2, var = scale^2/((shape-1)^2 (shape-2)) = 4
    rng = np.random.default_rng(12)
    draws = np.array([draw_inverse_gamma(3, 4, rng) for _ in range(100_000)])
    assert abs(draws.mean() - 2.0) < 0.05
    assert abs(draws.var() - 4.0) < 0.6


def test_gaussian_matrix_shape_and_finite():
    rng = np.random.default_rng(1)
    out = draw_gaussian_matrix(3, 2, 0.0, np.eye(2), rng)
    assert out.shape == (3, 2)
    assert np.all(np.isfinite(out))


def test_gaussian_matrix_sample_covariance():
    # Monte-Carlo oracle against the requested row covariance
    rng = np.random.default_rng(2)
    cov = np.array([[2.0, 0.0], [0.0, 1.0]])
    out = draw_gaussian_matrix(100_000, 2, 0.0, cov, rng)
    emp = np.cov(out, rowvar=False)
    assert np.all(np.abs(emp - cov) < 0.05)


def test_gaussian_matrix_degenerate_concentration():
    rng = np.random.default_rng(3)
    out = draw_gaussian_matrix(50, 2, 5.0, 1e-12 * np.eye(2), rng)
    assert np.all(np.abs(out - 5.0) < 1e-4)


def test_gaussian_matrix_mean_broadcasting():
    rng = np.random.default_rng(4)
    mean = np.array([10.0, -10.0])
    out = draw_gaussian_matrix(20_000, 2, mean, np.eye(2) * 0.5, rng)
    assert np.allclose(out.mean(axis=0), mean, atol=0.05)


def test_gaussian_matrix_rejects_non_spd():
    bad = np.array([[1.0, 2.0], [2.0, 1.0]])  # indefinite
    with pytest.raises(DecompositionError, match="row_cov"):
        draw_gaussian_matrix(3, 2, 0.0, bad, np.random.default_rng(0))


def test_gaussian_matrix_rejects_bad_dims():
    with pytest.raises(ValueError):
        draw_gaussian_matrix(0, 2, 0.0, np.eye(2), np.random.default_rng(0))
    with pytest.raises(ValueError):
        draw_gaussian_matrix(3, 2, 0.0, np.eye(3), np.random.default_rng(0))
