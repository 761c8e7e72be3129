"""Two-layer ReLU parameterization phi(w, x) = w1 * (w2.x)_+, feature
matrices over sphere grids, network evaluation and the tangent-kernel
integrand.

Inputs live in [-1,1]^2 and are lifted to R^3 by appending a constant 1;
parameters w = (w1, w2) live in R^4. The kink convention is the open
half-space: indicator and subgradient are 0 at w2.x = 0.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from .grids import SphereGrid
from .measures import DiscreteMeasure


@dataclasses.dataclass(frozen=True)
class Dataset:
    """Labeled planar samples with their lifted 3-d inputs."""

    x_tilde: np.ndarray  # (n, 2)
    y: np.ndarray  # (n,)
    name: str = "unnamed"
    synthetic: bool = True

    def __post_init__(self):
        x = np.array(self.x_tilde, dtype=float, ndmin=2, copy=True)
        y = np.array(self.y, dtype=float, copy=True)
        if x.ndim != 2 or x.shape[1] != 2:
            raise ValueError("x_tilde must be (n, 2)")
        if y.shape != (x.shape[0],):
            raise ValueError("labels must match sample count")
        if np.any(np.abs(x) > 1.0):
            raise ValueError("samples must lie in [-1, 1]^2")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise ValueError("labels must be +-1")
        # distinct locations, else the interpolation constraints collide
        for i in range(x.shape[0]):
            for j in range(i + 1, x.shape[0]):
                if np.all(x[i] == x[j]):
                    raise ValueError(f"duplicate sample location at rows {i}, {j}")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "x_tilde", x)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.x_tilde.shape[0]

    @property
    def lifted(self) -> np.ndarray:
        """Inputs (x_tilde, 1) in R^3."""
        n = len(self)
        out = np.ones((n, 3))
        out[:, :2] = self.x_tilde
        return out

    @staticmethod
    def from_json(path) -> "Dataset":
        with open(path) as fh:
            doc = json.load(fh)
        samples = doc["samples"]
        x = np.array([s["x"] for s in samples], dtype=float)
        y = np.array([s["y"] for s in samples], dtype=float)
        return Dataset(
            x_tilde=x,
            y=y,
            name=doc.get("name", "unnamed"),
            synthetic=bool(doc.get("synthetic", True)),
        )

    def to_json(self, path) -> None:
        doc = {
            "name": self.name,
            "synthetic": self.synthetic,
            "samples": [
                {"x": [float(a), float(b)], "y": float(v)}
                for (a, b), v in zip(self.x_tilde, self.y)
            ],
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")


def lift_inputs(x_tilde: np.ndarray) -> np.ndarray:
    """Append the constant-1 coordinate to planar points."""
    x = np.atleast_2d(np.asarray(x_tilde, dtype=float))
    out = np.ones((x.shape[0], 3))
    out[:, :2] = x
    return out


def phi_relu(w, x) -> float:
    """phi(w, x) = w1 * max(w2.x, 0); 2-homogeneous in w."""
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    return float(w[0] * max(float(w[1:] @ x), 0.0))


def feature_matrix(grid: SphereGrid, data: Dataset) -> np.ndarray:
    """Dense n x |grid| matrix with entries phi(theta_j, x_k)."""
    if len(grid) == 0 or len(data) == 0:
        raise ValueError("feature_matrix needs a nonempty grid and dataset")
    if grid.dim != 4:
        raise ValueError("feature_matrix expects an S3 grid")
    pre = data.lifted @ grid.points[:, 1:].T  # (n, |grid|)
    return grid.points[:, 0][None, :] * np.maximum(pre, 0.0)


def eval_network(m: DiscreteMeasure, points) -> np.ndarray:
    """f(x) = sum_j weights[j] * phi(theta_j, x) at each 3-d input row."""
    if m.grid.dim != 4:
        raise ValueError("eval_network expects a measure on S3")
    x = np.atleast_2d(np.asarray(points, dtype=float))
    pre = x @ m.grid.points[:, 1:].T
    return np.maximum(pre, 0.0) @ (m.grid.points[:, 0] * m.weights)


def ntk_integrand(w, x, xp) -> float:
    """Tangent-kernel integrand of the 2-layer ReLU network at parameter w.

    (w2.x)_+ (w2.x')_+ + w1^2 (x.x') [w2.x > 0][w2.x' > 0], with the strict
    indicator at the kink.
    """
    w = np.asarray(w, dtype=float)
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    a = float(w[1:] @ x)
    b = float(w[1:] @ xp)
    out = max(a, 0.0) * max(b, 0.0)
    if a > 0.0 and b > 0.0:
        out += float(w[0]) ** 2 * float(x @ xp)
    return out
