"""Spherical discretizations: the Fibonacci lattice on S2 and its lifts to S3.

The lift P doubles the lattice with output weights +-1/sqrt(2); the lift Q
adds a 9-level radial discretization of the first coordinate. Both carry the
supports of all measures in the pipeline.
"""

from __future__ import annotations

import dataclasses

import numpy as np

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0

# geodesic separation below which two grid points count as duplicates
DUPLICATE_TOL = 1e-10


@dataclasses.dataclass(frozen=True)
class SphereGrid:
    """Ordered set of unit vectors on S2 (dim 3) or S3 (dim 4)."""

    points: np.ndarray  # (n, dim), rows unit norm
    label: str = "custom"  # one of F, P, Q, custom

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, ndmin=2, copy=True, order="C")
        if pts.ndim != 2 or pts.shape[1] not in (3, 4):
            raise ValueError(f"grid points must be (n, 3) or (n, 4), got {pts.shape}")
        norms = np.linalg.norm(pts, axis=1)
        if not np.all(np.abs(norms - 1.0) <= 1e-12):
            worst = float(np.max(np.abs(norms - 1.0)))
            raise ValueError(f"grid points must be unit vectors (worst deviation {worst:.3e})")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def gram(self, other: "SphereGrid | None" = None) -> np.ndarray:
        """Pairwise inner products with `other` (or with itself)."""
        q = self.points if other is None else other.points
        return self.points @ q.T

    def nearest(self, directions: np.ndarray) -> np.ndarray:
        """Index of the geodesically nearest grid node for each unit row vector."""
        d = np.atleast_2d(directions)
        return np.argmax(d @ self.points.T, axis=1)

    def min_geodesic_separation(self) -> float:
        n = len(self)
        best = -1.0
        for lo in range(0, n, 512):  # chunked so big grids stay in memory budget
            block = self.points[lo : lo + 512] @ self.points.T
            for i in range(block.shape[0]):
                block[i, lo + i] = -1.0
            best = max(best, float(block.max()))
        return float(np.arccos(np.clip(best, -1.0, 1.0)))

    def to_csv(self, path) -> None:
        cols = [f"x{i}" for i in range(self.dim)]
        with open(path, "w") as fh:
            fh.write(",".join(cols) + "\n")
            for row in self.points:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")

    @staticmethod
    def from_csv(path, label: str = "custom") -> "SphereGrid":
        pts = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return SphereGrid(points=pts, label=label)


def fibonacci_s2(n: int) -> SphereGrid:
    """Offset Fibonacci lattice with n points on the unit sphere S2.

    z_i = 1 - (2i+1)/n with golden-angle azimuth; deterministic, no points at
    the poles.
    """
    if n < 1:
        raise ValueError("fibonacci_s2 needs n >= 1")
    i = np.arange(n, dtype=float)
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
    psi = 2.0 * np.pi * i * (2.0 - GOLDEN)
    pts = np.stack([r * np.cos(psi), r * np.sin(psi), z], axis=1)
    # renormalize away the last-ulp rounding so the unit invariant is tight
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    grid = SphereGrid(points=pts, label="F")
    # z_i strictly decreases by 2/n per step, so duplicates can only come from
    # a broken construction; verify directly at sizes where the check is cheap.
    if 1 < n <= 4096 and grid.min_geodesic_separation() <= DUPLICATE_TOL:
        raise ValueError("fibonacci_s2 produced duplicate points")
    return grid


def lift_p(f: SphereGrid) -> SphereGrid:
    """Lift an S2 grid to P = {+-1/sqrt(2)} x S2/sqrt(2) on S3.

    For each x the two points (+s, s*x) and (-s, s*x) with s = 1/sqrt(2) are
    emitted consecutively, so the +- pair over a common hidden direction sits
    at rows (2i, 2i+1).
    """
    if f.dim != 3 or f.label != "F":
        raise ValueError("lift_p expects an S2 grid with label F")
    s = 1.0 / np.sqrt(2.0)
    scaled = s * f.points
    n = len(f)
    pts = np.empty((2 * n, 4))
    pts[0::2, 0] = s
    pts[1::2, 0] = -s
    pts[0::2, 1:] = scaled
    pts[1::2, 1:] = scaled
    return SphereGrid(points=pts, label="P")


def lift_q(f: SphereGrid) -> SphereGrid:
    """Lift an S2 grid to the radial-shell grid Q on S3.

    Q = {(+-k, sqrt(98 - k^2) x)/(7 sqrt(2)) : k = 1..9, x in F}, stacked by
    increasing k with the same +- interleaving as lift_p. The k = 7 shell
    reproduces lift_p(f) bit-for-bit: both use a = (k/7)/sqrt(2) = 1/sqrt(2)
    and b = (sqrt(98-k^2)/7)/sqrt(2) = 1/sqrt(2) through identical float
    expressions.
    """
    if f.dim != 3 or f.label != "F":
        raise ValueError("lift_q expects an S2 grid with label F")
    s = 1.0 / np.sqrt(2.0)
    n = len(f)
    blocks = []
    for k in range(1, 10):
        a = (k / 7.0) * s
        b = (np.sqrt(98.0 - k * k) / 7.0) * s
        pts = np.empty((2 * n, 4))
        pts[0::2, 0] = a
        pts[1::2, 0] = -a
        pts[0::2, 1:] = b * f.points
        pts[1::2, 1:] = b * f.points
        blocks.append(pts)
    return SphereGrid(points=np.vstack(blocks), label="Q")
