"""Solvers for the discrete scaling-path problems.

Three modes share one spectral projected-gradient engine (BB1 step, Armijo
linesearch on the feasible segment):

* constrained: min over {w >= 0, Phi w = y} of the entropic divergence to
  the scaled initialization alpha^2 mu0,
* rich limit (alpha = 0): min of TV(w) = sum w over the same polyhedron, a
  linear program driven by the constant gradient 1 (the projected step is
  then an exact proximal-point iteration, which terminates finitely on
  polyhedral problems),
* penalized: min over {w >= 0} of ||Phi w - y||^2 plus
  lambda (1+alpha^2) times the divergence.

The polyhedral projection is Dykstra's alternating scheme between the
affine set {Phi w = y} (projected through a cached Cholesky factorization
of Phi Phi^T, no correction term needed for an affine set) and the
nonnegative orthant (clip, with correction). Iterations end on the clip so
returned weights are exactly nonnegative; the equality residual is driven
below tolerance instead.
"""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.linalg

from .grids import SphereGrid, fibonacci_s2, lift_p
from .measures import DiscreteMeasure, scale_mass, uniform_on
from .uot import cost_matrix, self_potential, sinkhorn_divergence


@dataclasses.dataclass(frozen=True)
class FbsConfig:
    max_outer: int = 2000
    grad_tol: float = 1e-6
    armijo_c: float = 1e-4
    backtrack: float = 0.5
    bb_variant: str = "bb1"
    max_halvings: int = 40
    step_clamp: tuple = (1e-8, 1e8)


@dataclasses.dataclass(frozen=True)
class DykstraConfig:
    tol: float = 1e-9
    max_iter: int = 50_000


@dataclasses.dataclass(frozen=True)
class PathConfig:
    """Problem data and solver knobs for one scaling-path solve."""

    alpha: float
    eps: float = 1e-2
    lam: float = 0.0
    grid: SphereGrid | None = None
    mu0: DiscreteMeasure | None = None
    fbs: FbsConfig = dataclasses.field(default_factory=FbsConfig)
    dykstra: DykstraConfig = dataclasses.field(default_factory=DykstraConfig)
    debias: bool = False
    feas_tol: float = 1e-4
    sinkhorn_tol: float = 1e-9
    sinkhorn_max_iter: int = 5000

    def __post_init__(self):
        if self.alpha < 0.0:
            raise ValueError("alpha must be nonnegative")
        if self.eps <= 0.0 or self.feas_tol <= 0.0 or self.sinkhorn_tol <= 0.0:
            raise ValueError("tolerances and eps must be positive")
        if self.lam < 0.0:
            raise ValueError("lambda must be nonnegative")

    def resolved(self, n_f: int = 576) -> "PathConfig":
        """Fill in the default support grid and initialization if unset."""
        if self.grid is not None and self.mu0 is not None:
            return self
        p = lift_p(fibonacci_s2(n_f))
        grid = self.grid if self.grid is not None else p
        mu0 = self.mu0 if self.mu0 is not None else uniform_on(p, 1.0)
        return dataclasses.replace(self, grid=grid, mu0=mu0)


@dataclasses.dataclass(frozen=True)
class PathSolution:
    measure: DiscreteMeasure | None
    objective: float
    constraint_residual: float
    iterations: int
    status: str
    history: tuple


class PolyhedronProjector:
    """Euclidean projection onto {w >= 0, Phi w = y} via Dykstra."""

    def __init__(self, phi: np.ndarray, y: np.ndarray, cfg: DykstraConfig):
        self.phi = phi
        self.y = np.asarray(y, dtype=float)
        self.cfg = cfg
        gram = phi @ phi.T
        try:
            self.chol = scipy.linalg.cho_factor(gram)
        except scipy.linalg.LinAlgError:
            rank = np.linalg.matrix_rank(gram)
            raise ValueError(
                f"feature Gram is rank-deficient: rank {rank} < {gram.shape[0]}"
            ) from None

    def affine(self, w: np.ndarray) -> np.ndarray:
        r = self.phi @ w - self.y
        return w - self.phi.T @ scipy.linalg.cho_solve(self.chol, r)

    def residual(self, w: np.ndarray) -> float:
        return float(np.max(np.abs(self.phi @ w - self.y)))

    def __call__(self, m: np.ndarray) -> np.ndarray:
        x = np.asarray(m, dtype=float)
        corr = np.zeros_like(x)
        y_scale = 1.0 + float(np.max(np.abs(self.y)))
        v = x
        for _ in range(self.cfg.max_iter):
            u = self.affine(x)
            v_new = np.maximum(u + corr, 0.0)
            corr = u + corr - v_new
            delta = float(np.max(np.abs(v_new - v)))
            v = v_new
            x = v
            if delta < self.cfg.tol and self.residual(v) <= self.cfg.tol * y_scale:
                return v
        if self.residual(v) > self.cfg.tol * y_scale:
            raise RuntimeError(
                "Dykstra projection did not reach feasibility; "
                "the polyhedron may be empty"
            )
        return v


def project_polyhedron(
    m: np.ndarray, phi: np.ndarray, y: np.ndarray, cfg: DykstraConfig | None = None
) -> np.ndarray:
    """One-off projection of weight vector m onto {w >= 0, Phi w = y}."""
    return PolyhedronProjector(phi, np.asarray(y, dtype=float), cfg or DykstraConfig())(m)


def _spg(w0, value_and_grad, project, state, fbs: FbsConfig, fixed_step=None):
    """Monotone spectral projected-gradient loop.

    `value_and_grad(w, state)` returns (value, grad, new_state); the state
    carries warm-start data and is advanced only on accepted points, so
    rejected linesearch trials leave no trace. A `fixed_step` disables the
    BB predictor (used by the linear rich-limit objective, where curvature
    is zero). Returns the final point, value, state, iteration count,
    status and a per-iteration history of (objective, projected-gradient
    norm, accepted step) tuples.
    """
    w = np.asarray(w0, dtype=float)
    val, grad, state = value_and_grad(w, state)
    if fixed_step is not None:
        eta = float(fixed_step)
    else:
        eta = 1.0 / max(float(np.max(np.abs(grad))), 1e-12)
        eta = float(np.clip(eta, *fbs.step_clamp))
    history = []
    status = "maxiter"
    iterations = 0
    for iterations in range(1, fbs.max_outer + 1):
        pg = float(np.max(np.abs(project(w - grad) - w)))
        if pg < fbs.grad_tol:
            status = "converged"
            iterations -= 1
            break
        d = project(w - eta * grad) - w
        dd = float(grad @ d)
        if dd >= 0.0:
            status = "stalled"
            break
        lam_step = 1.0
        accepted = False
        for _ in range(fbs.max_halvings):
            trial = w + lam_step * d
            tval, tgrad, tstate = value_and_grad(trial, state)
            if tval <= val + fbs.armijo_c * lam_step * dd:
                accepted = True
                break
            lam_step *= fbs.backtrack
        if not accepted:
            status = "stalled"
            break
        if fixed_step is None:
            s = trial - w
            dg = tgrad - grad
            curv = float(s @ dg)
            # nonpositive curvature: keep the previous step rather than
            # jumping to the clamp ceiling, which produces absurdly
            # infeasible trial points
            if curv > 0.0:
                eta = float(np.clip(float(s @ s) / curv, *fbs.step_clamp))
        w, val, grad, state = trial, tval, tgrad, tstate
        history.append((val, pg, lam_step))
    return w, val, grad, state, iterations, status, history


def _divergence_closure(nu, cost_cross, cost_self, self_nu, cfg: PathConfig):
    """Value/gradient oracle for w -> divergence(measure(w), nu)."""
    grid = cfg.grid

    def value_and_grad(w, state):
        mu = DiscreteMeasure(grid, w)
        res = sinkhorn_divergence(
            mu,
            nu,
            cfg.eps,
            tol=cfg.sinkhorn_tol,
            max_iter=cfg.sinkhorn_max_iter,
            debias=cfg.debias,
            cost=cost_cross,
            self_cost_mu=cost_self,
            self_nu=self_nu,
            f0=state.get("f"),
            g0=state.get("g"),
            p0=state.get("p"),
        )
        new_state = {"f": res.cross.f, "g": res.cross.g}
        if res.self_mu is not None:
            new_state["p"] = res.self_mu.f
        return res.value, res.grad, new_state

    return value_and_grad


def embed_measure(m: DiscreteMeasure, grid: SphereGrid) -> np.ndarray:
    """Mass-preserving transfer of m's weights onto another grid's nodes."""
    if m.grid is grid or np.array_equal(m.grid.points, grid.points):
        return m.weights.copy()
    idx = grid.nearest(m.grid.points)
    w = np.zeros(len(grid))
    np.add.at(w, idx, m.weights)
    return w


def solve_scaling_path(cfg: PathConfig, data, w0: np.ndarray | None = None) -> PathSolution:
    """Constrained interpolation at scale alpha > 0.

    `data` is a Dataset or a (phi, y) pair; the divergence target is
    alpha^2 mu0 and the reported objective carries the (1 + alpha^2)
    factor. Warm start is the projection of the scaled initialization
    unless `w0` supplies one (continuation across alphas).
    """
    cfg = cfg.resolved()
    if cfg.alpha <= 0.0:
        raise ValueError("solve_scaling_path needs alpha > 0; use solve_rich_limit")
    phi, y = _problem_arrays(cfg.grid, data)
    nu = scale_mass(cfg.mu0, cfg.alpha**2)
    cost_cross = cost_matrix(cfg.grid, cfg.mu0.grid)
    cost_self = cost_matrix(cfg.grid, cfg.grid)
    self_nu = None
    if cfg.debias:
        self_nu = self_potential(
            nu, cfg.eps, tol=cfg.sinkhorn_tol, max_iter=cfg.sinkhorn_max_iter
        )
    projector = PolyhedronProjector(phi, y, cfg.dykstra)
    w0 = projector(embed_measure(nu, cfg.grid) if w0 is None else np.asarray(w0, dtype=float))
    oracle = _divergence_closure(nu, cost_cross, cost_self, self_nu, cfg)
    w, val, _, _, iterations, status, history = _spg(
        w0, oracle, projector, {}, cfg.fbs
    )
    residual = projector.residual(w)
    if residual > cfg.feas_tol:
        status = "infeasible"
    return PathSolution(
        measure=DiscreteMeasure(cfg.grid, w),
        objective=(1.0 + cfg.alpha**2) * val,
        constraint_residual=residual,
        iterations=iterations,
        status=status,
        history=tuple(history),
    )


def solve_rich_limit(phi: np.ndarray, y: np.ndarray, cfg: PathConfig | None = None) -> PathSolution:
    """Mass-minimal interpolation (alpha = 0): min sum w on the polyhedron.

    The gradient is the constant one-vector and the step is fixed, so each
    accepted update is an exact proximal-point iteration, which terminates
    finitely on polyhedral problems. `measure` is None when no grid is
    attached to the config (raw-array solves).
    """
    if cfg is None:
        cfg = PathConfig(alpha=0.0)
    phi = np.asarray(phi, dtype=float)
    y = np.asarray(y, dtype=float)
    projector = PolyhedronProjector(phi, y, cfg.dykstra)
    ones = np.ones(phi.shape[1])

    def value_and_grad(w, state):
        return float(np.sum(w)), ones, state

    w0 = projector(np.zeros(phi.shape[1]))
    step = 1.0 + float(np.max(w0, initial=0.0))
    w, val, _, _, iterations, status, history = _spg(
        w0, value_and_grad, projector, {}, cfg.fbs, fixed_step=step
    )
    measure = DiscreteMeasure(cfg.grid, w) if cfg.grid is not None else None
    return PathSolution(
        measure=measure,
        objective=val,
        constraint_residual=projector.residual(w),
        iterations=iterations,
        status=status,
        history=tuple(history),
    )


def solve_penalized(cfg: PathConfig, data) -> PathSolution:
    """Squared loss plus lambda (1+alpha^2) times the divergence, w >= 0."""
    cfg = cfg.resolved()
    if cfg.lam <= 0.0:
        raise ValueError("solve_penalized needs lambda > 0")
    phi, y = _problem_arrays(cfg.grid, data)
    nu = scale_mass(cfg.mu0, cfg.alpha**2)
    cost_cross = cost_matrix(cfg.grid, cfg.mu0.grid)
    cost_self = cost_matrix(cfg.grid, cfg.grid)
    self_nu = None
    if cfg.debias:
        self_nu = self_potential(
            nu, cfg.eps, tol=cfg.sinkhorn_tol, max_iter=cfg.sinkhorn_max_iter
        )
    div_oracle = _divergence_closure(nu, cost_cross, cost_self, self_nu, cfg)
    weight = cfg.lam * (1.0 + cfg.alpha**2)

    def value_and_grad(w, state):
        r = phi @ w - y
        dval, dgrad, new_state = div_oracle(w, state)
        return float(r @ r) + weight * dval, 2.0 * (phi.T @ r) + weight * dgrad, new_state

    def clip(w):
        return np.maximum(w, 0.0)

    w0 = clip(embed_measure(nu, cfg.grid))
    w, val, _, _, iterations, status, history = _spg(
        w0, value_and_grad, clip, {}, cfg.fbs
    )
    return PathSolution(
        measure=DiscreteMeasure(cfg.grid, w),
        objective=val,
        constraint_residual=float(np.max(np.abs(phi @ w - y))),
        iterations=iterations,
        status=status,
        history=tuple(history),
    )


def _problem_arrays(grid: SphereGrid, data):
    """Feature matrix and label vector from a Dataset or a (phi, y) pair."""
    from .relu import Dataset, feature_matrix

    if isinstance(data, Dataset):
        return feature_matrix(grid, data), data.y
    phi, y = data
    return np.asarray(phi, dtype=float), np.asarray(y, dtype=float)
