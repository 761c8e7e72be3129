"""Discrete nonnegative measures on sphere grids and the 2-homogeneous
projection of atomic parameter clouds onto them."""

from __future__ import annotations

import dataclasses

import numpy as np

from .grids import SphereGrid


@dataclasses.dataclass(frozen=True)
class DiscreteMeasure:
    """Nonnegative weight vector over the nodes of a SphereGrid."""

    grid: SphereGrid
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, copy=True)
        if w.shape != (len(self.grid),):
            raise ValueError(f"weights shape {w.shape} does not match grid size {len(self.grid)}")
        if np.any(w < 0.0):
            raise ValueError("measure weights must be nonnegative")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def total_variation(self) -> float:
        return float(np.sum(self.weights))

    def with_weights(self, w) -> "DiscreteMeasure":
        return DiscreteMeasure(grid=self.grid, weights=w)

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("node_index,weight\n")
            for i, w in enumerate(self.weights):
                fh.write(f"{i},{w:.17g}\n")

    @staticmethod
    def from_csv(path, grid: SphereGrid) -> "DiscreteMeasure":
        raw = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        w = np.zeros(len(grid))
        idx = raw[:, 0].astype(int)
        w[idx] = raw[:, 1]
        return DiscreteMeasure(grid=grid, weights=w)


@dataclasses.dataclass(frozen=True)
class ParamAtom:
    """One network parameter atom w = (w1, w2) in R x R^3 carrying mass."""

    w1: float
    w2: tuple[float, float, float]
    mass: float

    def __post_init__(self):
        if self.mass < 0:
            raise ValueError("atom mass must be nonnegative")

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.w1, *self.w2], dtype=float)


def uniform_on(grid: SphereGrid, total_mass: float) -> DiscreteMeasure:
    """Uniform measure with the given total mass."""
    if total_mass < 0:
        raise ValueError("total_mass must be nonnegative")
    n = len(grid)
    return DiscreteMeasure(grid=grid, weights=np.full(n, total_mass / n))


def scale_mass(m: DiscreteMeasure, c: float) -> DiscreteMeasure:
    if c < 0:
        raise ValueError("scale factor must be nonnegative")
    return m.with_weights(c * m.weights)


def total_variation(m: DiscreteMeasure) -> float:
    return m.total_variation


def pi2_project(atoms, grid: SphereGrid) -> DiscreteMeasure:
    """Project parameter atoms to the sphere, weighting by mass * ||w||^2.

    Each atom with w != 0 deposits mass*||w||^2 at the grid node nearest to
    w/||w||; atoms at the origin vanish. The assignment depends on the
    direction only, which is what makes the scaling law
    pi2(alpha*atoms) = alpha^2 * pi2(atoms) exact.
    """
    if len(grid) == 0:
        raise ValueError("pi2_project needs a nonempty grid")
    weights = np.zeros(len(grid))
    if len(atoms) == 0:
        return DiscreteMeasure(grid=grid, weights=weights)
    if isinstance(atoms[0], ParamAtom):
        vecs = np.stack([a.vector for a in atoms])
        masses = np.array([a.mass for a in atoms], dtype=float)
    else:
        vecs, masses = atoms
        vecs = np.atleast_2d(np.asarray(vecs, dtype=float))
        masses = np.asarray(masses, dtype=float)
    if vecs.shape[1] != grid.dim:
        raise ValueError("atom dimension does not match grid dimension")
    sqnorm = np.einsum("ij,ij->i", vecs, vecs)
    alive = sqnorm > 0.0
    if np.any(alive):
        dirs = vecs[alive] / np.sqrt(sqnorm[alive])[:, None]
        idx = grid.nearest(dirs)
        np.add.at(weights, idx, masses[alive] * sqnorm[alive])
    return DiscreteMeasure(grid=grid, weights=weights)
