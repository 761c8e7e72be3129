"""Full-batch gradient descent for the finite-width scaled ReLU network.

The network is f(x) = (beta^2/m) sum_l w1_l (w2_l.x)+ with atoms initialized
from the grid P, trained on the squared loss sum_k (f(x_k) - y_k)^2. The
step is halved whenever a step would increase the loss, so the recorded
loss history is non-increasing. After training, the parameter cloud is
pushed to a measure on the sphere through the squared-norm projection
(atom (beta w, 1/m) contributes beta^2 |w|^2/m at the node nearest w/|w|).
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .grids import SphereGrid
from .measures import DiscreteMeasure, pi2_project


@dataclasses.dataclass(frozen=True)
class ParamCloud:
    """Finite parameter cloud: first-layer scales and second-layer vectors."""

    w1: np.ndarray  # (m,)
    w2: np.ndarray  # (m, 3)
    beta: float

    def __post_init__(self):
        w1 = np.array(self.w1, dtype=float, copy=True)
        w2 = np.array(self.w2, dtype=float, ndmin=2, copy=True)
        if w2.shape != (w1.shape[0], 3):
            raise ValueError("w2 must be (m, 3) matching w1")
        if self.beta <= 0.0:
            raise ValueError("beta must be positive")
        w1.flags.writeable = False
        w2.flags.writeable = False
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "w2", w2)

    @property
    def m(self) -> int:
        return self.w1.shape[0]

    def predictions(self, x: np.ndarray) -> np.ndarray:
        """Network outputs (beta^2/m) sum_l w1_l (w2_l.x)+ at rows of x."""
        pre = self.w2 @ np.atleast_2d(x).T
        return (self.beta**2 / self.m) * (self.w1 @ np.maximum(pre, 0.0))


# sufficient-decrease constant for the line search; without it the search
# grabs the largest non-increasing step, which near a kink is a huge step
# with a microscopic decrease, and training creeps instead of converging
_ARMIJO = 1e-4


@dataclasses.dataclass(frozen=True)
class GdConfig:
    step: float = 0.1
    loss_tol: float = 1e-8
    max_iter: int = 500_000
    seed: int = 0  # reserved; the default pipeline is deterministic

    def __post_init__(self):
        if self.step <= 0.0 or self.loss_tol <= 0.0 or self.max_iter <= 0:
            raise ValueError("step, loss_tol and max_iter must be positive")


def init_from_grid(p: SphereGrid, beta: float = 1.0) -> ParamCloud:
    """One atom per node of P, coordinates split as (w1, w2)."""
    if len(p) == 0:
        raise ValueError("grid is empty")
    if p.dim != 4:
        raise ValueError("expected an S3 grid")
    return ParamCloud(w1=p.points[:, 0], w2=p.points[:, 1:], beta=beta)


def loss_and_grad(pc: ParamCloud, data) -> tuple:
    """Squared loss and per-atom gradient 4-vectors.

    Chain rule with the open-half-space kink convention: the w1 component
    is (w2.x)+ and the w2 block is w1 x [w2.x > 0], both weighted by the
    residual and the beta^2/m output scale.
    """
    x = data.lifted
    scale = pc.beta**2 / pc.m
    pre = pc.w2 @ x.T  # (m, n)
    relu = np.maximum(pre, 0.0)
    pred = scale * (pc.w1 @ relu)
    r = pred - data.y
    loss = float(r @ r)
    g1 = (2.0 * scale) * (relu @ r)
    g2 = (2.0 * scale) * pc.w1[:, None] * (((pre > 0.0) * r[None, :]) @ x)
    return loss, np.column_stack([g1, g2])


def train(pc: ParamCloud, data, cfg: GdConfig) -> tuple:
    """Gradient descent until loss < loss_tol or max_iter; monotone by
    construction (the step is halved, at most 60 times per update, until a
    candidate passes a sufficient-decrease test, and doubled after each
    accepted update so flat directions are not crawled; when no step passes
    the test, the best merely non-increasing candidate is taken so the
    history never goes up).

    The doubling matters at small output scales, where the loss curvature
    drops like beta^4 and any fixed step is hopeless. An atom that sits on
    its activation boundary can block every plain step (crossing raises the
    loss, so backtracking pins the whole cloud); when that happens the
    update drops, for each blocked atom, the w2 gradient component along
    the sample direction it would cross. That leaves the atom's margin on
    the blocking sample exactly unchanged, which is the gradient-flow
    behaviour of sliding along the kink, while every other coordinate keeps
    descending. Returns (trained cloud, loss history as a list with the
    initial loss first).
    """
    x = data.lifted
    step = cfg.step
    cloud = ParamCloud(w1=pc.w1, w2=pc.w2, beta=pc.beta)
    loss, grad = loss_and_grad(cloud, data)
    history = [loss]
    stagnant = 0
    for _ in range(cfg.max_iter):
        if loss < cfg.loss_tol:
            break
        pattern = cloud.w2 @ x.T > 0.0
        gg = float(np.sum(grad * grad))
        chosen = None
        fallback = None
        trial = step
        for _ in range(60):
            cand = ParamCloud(
                w1=cloud.w1 - trial * grad[:, 0],
                w2=cloud.w2 - trial * grad[:, 1:],
                beta=pc.beta,
            )
            cand_loss, cand_grad = loss_and_grad(cand, data)
            if cand_loss <= loss - _ARMIJO * trial * gg:
                chosen = (cand, cand_loss, cand_grad, trial)
                break
            if cand_loss <= loss and (fallback is None or cand_loss < fallback[1]):
                fallback = (cand, cand_loss, cand_grad, trial)
            trial *= 0.5
        if chosen is None:
            # no plain step passes: some atom is pinned to a kink; slide
            # candidates may not preempt plain descent (a big frozen step
            # has a near-zero test threshold and would creep), hence the
            # separate pass
            trial = step
            for _ in range(60):
                w2_trial = cloud.w2 - trial * grad[:, 1:]
                crossing = (w2_trial @ x.T > 0.0) != pattern
                blocked = crossing.any(axis=1)
                if blocked.any():
                    g = grad.copy()
                    single = blocked & (crossing.sum(axis=1) == 1)
                    multi = blocked & ~single
                    if single.any():
                        xs = x[np.argmax(crossing[single], axis=1)]
                        coef = np.sum(g[single, 1:] * xs, axis=1) / np.sum(
                            xs * xs, axis=1
                        )
                        g[single, 1:] -= coef[:, None] * xs
                    g[multi, 1:] = 0.0
                    cand = ParamCloud(
                        w1=cloud.w1 - trial * g[:, 0],
                        w2=cloud.w2 - trial * g[:, 1:],
                        beta=pc.beta,
                    )
                    cand_loss, cand_grad = loss_and_grad(cand, data)
                    if cand_loss <= loss - _ARMIJO * trial * float(np.sum(g * g)):
                        chosen = (cand, cand_loss, cand_grad, trial)
                        break
                    if cand_loss <= loss and (
                        fallback is None or cand_loss < fallback[1]
                    ):
                        fallback = (cand, cand_loss, cand_grad, trial)
                trial *= 0.5
        if chosen is None:
            chosen = fallback
        if chosen is None:
            raise RuntimeError("no step size yields descent; gradient may be exact zero")
        cand, cand_loss, cand_grad, step = chosen
        stagnant = stagnant + 1 if cand_loss == loss else 0
        cloud, loss, grad = cand, cand_loss, cand_grad
        history.append(loss)
        if stagnant >= 50:
            break
        step *= 2.0
    return cloud, history


def empirical_measure(pc: ParamCloud, grid: SphereGrid) -> DiscreteMeasure:
    """Squared-norm projection of the scaled cloud onto grid nodes.

    Atom l becomes mass beta^2 |w_l|^2 / m at the node nearest w_l/|w_l|;
    zero atoms vanish. The total mass is exactly (beta^2/m) sum |w_l|^2.
    """
    vecs = pc.beta * np.column_stack([pc.w1, pc.w2])
    masses = np.full(pc.m, 1.0 / pc.m)
    return pi2_project((vecs, masses), grid)


def save_cloud(pc: ParamCloud, path) -> None:
    """Persist atoms as CSV columns w1, w2x, w2y, w2bias (beta is not
    stored; keep it in the accompanying run metadata)."""
    rows = np.column_stack([pc.w1, pc.w2])
    with open(path, "w") as fh:
        fh.write("w1,w2x,w2y,w2bias\n")
        for row in rows:
            fh.write(",".join("%.17g" % v for v in row) + "\n")


def load_cloud(path, beta: float) -> ParamCloud:
    rows = np.genfromtxt(path, delimiter=",", skip_header=1, ndmin=2)
    if rows.shape[1] != 4:
        raise ValueError("cloud CSV must have 4 columns")
    return ParamCloud(w1=rows[:, 0], w2=rows[:, 1:], beta=beta)


def save_history(history, path) -> None:
    with open(path, "w") as fh:
        fh.write("iteration,loss\n")
        for i, v in enumerate(history):
            fh.write("%d,%.17g\n" % (i, v))
