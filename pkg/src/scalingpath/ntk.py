"""Empirical tangent kernel of the 2-layer ReLU network over the grid P.

K(x, x') is the uniform quadrature of (w2.x)+(w2.x')+ + w1^2 (x.x')
[w2.x > 0][w2.x' > 0] over the initialization nodes. Interpolation /
ridge systems are solved by Cholesky with an escalating diagonal jitter;
y^T K^{-1} y is the minimal feature-space norm reached in the infinite
scale limit.
"""

from __future__ import annotations

import dataclasses
from typing import NamedTuple

import numpy as np
import scipy.linalg

from .grids import SphereGrid

_JITTER_START = 1e-14
_JITTER_MAX = 1e-8


@dataclasses.dataclass(frozen=True)
class GramMatrix:
    """Symmetric kernel matrix with the jitter its factorization needed."""

    entries: np.ndarray
    jitter: float = 0.0

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("Gram matrix must be square")
        if np.max(np.abs(e - e.T)) > 1e-12 * (1.0 + np.max(np.abs(e))):
            raise ValueError("Gram matrix must be symmetric")


class InterpolationResult(NamedTuple):
    coeffs: np.ndarray
    min_norm_value: float
    jitter: float


def _kernel_blocks(grid: SphereGrid, x: np.ndarray):
    w1sq = grid.points[:, 0] ** 2
    pre = grid.points[:, 1:] @ x.T  # (|grid|, n)
    relu = np.maximum(pre, 0.0)
    ind = (pre > 0.0).astype(float)
    return relu, ind, ind * w1sq[:, None]


def gram(data, mu0_grid: SphereGrid) -> GramMatrix:
    """K_kl = mean over nodes of the tangent-kernel integrand at (x_k, x_l)."""
    if len(data) == 0:
        raise ValueError("dataset is empty")
    x = data.lifted
    relu, ind, a = _kernel_blocks(mu0_grid, x)
    k = (relu.T @ relu + (x @ x.T) * (a.T @ ind)) / len(mu0_grid)
    k = 0.5 * (k + k.T)
    return GramMatrix(entries=k)


def solve_interpolation(k: GramMatrix, y: np.ndarray, ridge: float = 0.0) -> InterpolationResult:
    """c = (K + ridge I)^{-1} y and the value y.c; jitter escalates by
    factors of 10 from 1e-14 trace to at most 1e-8 trace if the Cholesky
    factorization fails, and the amount used is reported."""
    if ridge < 0.0:
        raise ValueError("ridge must be nonnegative")
    y = np.asarray(y, dtype=float)
    n = k.entries.shape[0]
    if y.shape != (n,):
        raise ValueError("labels do not match the Gram matrix")
    trace = float(np.trace(k.entries))
    scale = trace if trace > 0.0 else 1.0
    jitter = 0.0
    while True:
        try:
            chol = scipy.linalg.cho_factor(
                k.entries + (ridge + jitter) * np.eye(n), lower=True
            )
            break
        except scipy.linalg.LinAlgError:
            if jitter == 0.0:
                jitter = _JITTER_START * scale
            else:
                jitter *= 10.0
            if jitter > _JITTER_MAX * scale:
                raise ValueError(
                    "kernel matrix numerically singular even at maximum jitter"
                ) from None
    c = scipy.linalg.cho_solve(chol, y)
    return InterpolationResult(coeffs=c, min_norm_value=float(y @ c), jitter=jitter)


def eval_kernel_predictor(c: np.ndarray, data, mu0_grid: SphereGrid, points: np.ndarray) -> np.ndarray:
    """f(x) = sum_k c_k K(x, x_k) on the given lifted 3-d points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x = data.lifted
    relu_x, ind_x, _ = _kernel_blocks(mu0_grid, x)
    relu_p, _, a_p = _kernel_blocks(mu0_grid, pts)
    cross = (relu_p.T @ relu_x + (pts @ x.T) * (a_p.T @ ind_x)) / len(mu0_grid)
    return cross @ np.asarray(c, dtype=float)
