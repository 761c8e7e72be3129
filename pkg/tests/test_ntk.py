import numpy as np
import pytest

from scalingpath.grids import fibonacci_s2, lift_p
from scalingpath.ntk import (
    GramMatrix,
    eval_kernel_predictor,
    gram,
    solve_interpolation,
)
from scalingpath.relu import Dataset, ntk_integrand


def test_gram_matrix_validation():
    with pytest.raises(ValueError):
        GramMatrix(entries=np.ones((2, 3)))
    with pytest.raises(ValueError):
        GramMatrix(entries=np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_gram_basic_structure(p24, tiny_data):
    k = gram(tiny_data, p24).entries
    assert np.array_equal(k, k.T)
    assert np.min(np.diag(k)) >= 0.0
    trace = np.trace(k)
    assert np.min(np.linalg.eigvalsh(k)) >= -1e-10 * trace


def test_gram_against_integrand_summation(p24, tiny_data):
    # independent oracle: average the pointwise integrand node by node
    k = gram(tiny_data, p24).entries
    x = tiny_data.lifted
    for a in range(len(tiny_data)):
        for b in range(len(tiny_data)):
            direct = np.mean([ntk_integrand(w, x[a], x[b]) for w in p24.points])
            assert k[a, b] == pytest.approx(direct, rel=1e-12, abs=1e-14)


def test_gram_rejects_empty(p24):
    class Empty:
        lifted = np.zeros((0, 3))

        def __len__(self):
            return 0

    with pytest.raises(ValueError):
        gram(Empty(), p24)


def test_identity_gram_interpolation():
    y = np.array([0.5, -1.5, 2.0])
    res = solve_interpolation(GramMatrix(entries=np.eye(3)), y)
    assert np.allclose(res.coeffs, y, atol=1e-14)
    assert res.min_norm_value == pytest.approx(float(y @ y), rel=1e-14)
    assert res.jitter == 0.0


def test_large_ridge_shrinks_coefficients():
    rng = np.random.default_rng(50)
    a = rng.normal(size=(4, 6))
    k = GramMatrix(entries=a @ a.T)
    y = rng.normal(size=4)
    big = solve_interpolation(k, y, ridge=1e8)
    assert np.max(np.abs(big.coeffs)) <= 1e-6


def test_interpolation_argument_checks():
    k = GramMatrix(entries=np.eye(2))
    with pytest.raises(ValueError):
        solve_interpolation(k, np.ones(3))
    with pytest.raises(ValueError):
        solve_interpolation(k, np.ones(2), ridge=-1.0)


def test_indefinite_matrix_fails_after_max_jitter():
    k = GramMatrix(entries=np.array([[1.0, 2.0], [2.0, 1.0]]))  # eigenvalue -1
    with pytest.raises(ValueError, match="singular"):
        solve_interpolation(k, np.ones(2))


def test_predictor_interpolates_training_points(p24, tiny_data):
    k = gram(tiny_data, p24)
    res = solve_interpolation(k, tiny_data.y)
    pred = eval_kernel_predictor(res.coeffs, tiny_data, p24, tiny_data.lifted)
    tol = 1e-8 * np.linalg.cond(k.entries)
    assert np.max(np.abs(pred - tiny_data.y)) <= tol


def test_predictor_zero_and_linearity(p24, tiny_data):
    rng = np.random.default_rng(51)
    pts = rng.normal(size=(5, 3))
    zero = eval_kernel_predictor(np.zeros(len(tiny_data)), tiny_data, p24, pts)
    assert np.array_equal(zero, np.zeros(5))
    c = rng.normal(size=len(tiny_data))
    one = eval_kernel_predictor(c, tiny_data, p24, pts)
    two = eval_kernel_predictor(2.0 * c, tiny_data, p24, pts)
    assert np.allclose(two, 2.0 * one, rtol=1e-14)


def test_gram_quadrature_is_cauchy(tiny_data):
    # refining the sphere grid must settle the quadrature
    ks = [
        gram(tiny_data, lift_p(fibonacci_s2(n))).entries for n in (144, 576, 2304)
    ]
    d_coarse = np.max(np.abs(ks[1] - ks[0]))
    d_fine = np.max(np.abs(ks[2] - ks[1]))
    assert d_fine < d_coarse
    assert d_fine <= 2e-2 * np.max(np.abs(ks[2]))


def tangent_features(grid, x):
    """Explicit tangent feature matrix: rows are samples, columns stack the
    4 partial derivatives per node, scaled for the uniform quadrature."""
    pre = grid.points[:, 1:] @ x.T  # (|grid|, n)
    relu = np.maximum(pre, 0.0)
    ind = (pre > 0.0).astype(float)
    n = x.shape[0]
    cols = [relu.T]  # d/dw1
    for j in range(3):
        cols.append((grid.points[:, 0] * ind.T) * x[:, j][:, None])
    t = np.concatenate(cols, axis=1)
    assert t.shape == (n, 4 * len(grid))
    return t / np.sqrt(len(grid))


def test_min_norm_value_matches_feature_space(p24, tiny_data):
    # y^T K^{-1} y equals the squared norm of the least-norm feature-space
    # interpolant when K is the feature Gram
    x = tiny_data.lifted[:3]
    data = Dataset(x_tilde=tiny_data.x_tilde[:3], y=tiny_data.y[:3], name="sub")
    t = tangent_features(p24, x)
    k = gram(data, p24)
    assert np.allclose(t @ t.T, k.entries, atol=1e-12)
    v, *_ = np.linalg.lstsq(t, data.y, rcond=None)
    res = solve_interpolation(k, data.y)
    assert res.min_norm_value == pytest.approx(float(v @ v), rel=1e-8)
