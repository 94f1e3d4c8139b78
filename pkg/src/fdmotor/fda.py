"""Discretized functional data and quadrature-weighted L2 / L1 geometry.

Functions are stored by their values on a shared sampling grid. Integrals
are replaced by weighted sums with trapezoidal quadrature weights, so

    <x, y> = sum_j w_j x(t_j) y(t_j)

All reductions go through ``numpy.sum`` on contiguous arrays, whose
pairwise summation order is fixed for a given length; results are therefore
reproducible bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionError, GridMismatch, LengthMismatch


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class SampleGrid:
    """Strictly increasing sampling points t_1 < ... < t_M (seconds or Hz)."""

    points: np.ndarray
    uniform_step: Optional[float] = None

    def __post_init__(self):
        pts = _frozen(self.points)
        if pts.ndim != 1 or pts.size < 2:
            raise DimensionError(f"grid needs at least 2 points, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("grid points must be finite")
        steps = np.diff(pts)
        if np.any(steps <= 0):
            raise ValueError("grid points must be strictly increasing")
        if self.uniform_step is not None:
            h = float(self.uniform_step)
            if h <= 0 or np.any(np.abs(steps - h) > 1e-12 * h):
                raise ValueError(f"grid is not uniform with step {h}")
            object.__setattr__(self, "uniform_step", h)
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, n: int, step: float, start: float = 0.0) -> "SampleGrid":
        # start + j*step (not cumsum) keeps every gap within rounding of step
        pts = start + step * np.arange(n)
        gaps = np.diff(pts)
        # long grids drift past the 1e-12 relative gap tolerance; keep them
        # as plain grids then
        exact = bool(np.all(np.abs(gaps - step) <= 1e-12 * step))
        return cls(pts, uniform_step=step if exact else None)

    def __len__(self) -> int:
        return self.points.size

    @property
    def span(self) -> float:
        return float(self.points[-1] - self.points[0])

    def same_as(self, other: "SampleGrid") -> bool:
        return self is other or np.array_equal(self.points, other.points)


@dataclass(frozen=True, eq=False)
class QuadratureScheme:
    """Nonnegative integration weights, one per grid point."""

    weights: np.ndarray

    def __post_init__(self):
        w = _frozen(self.weights)
        if w.ndim != 1 or w.size < 1:
            raise DimensionError("weights must be a non-empty vector")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("quadrature weights must be finite and nonnegative")
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.weights.size


@dataclass(frozen=True, eq=False)
class FunctionalDataset:
    """N discretized functions sharing one grid; row i holds x_i(t_j)."""

    grid: SampleGrid
    values: np.ndarray
    labels: Optional[Sequence[str]] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        X = _frozen(self.values)
        if X.ndim == 1:
            X = _frozen(X[None, :])
        if X.ndim != 2 or X.shape[0] < 1:
            raise DimensionError(f"values must be an N x M matrix, got {X.shape}")
        if X.shape[1] != len(self.grid):
            raise LengthMismatch(f"rows have {X.shape[1]} samples, grid has {len(self.grid)}")
        if not np.all(np.isfinite(X)):
            raise ValueError("functional data must be finite")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != X.shape[0]:
                raise LengthMismatch(f"{len(labels)} labels for {X.shape[0]} functions")
            object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "values", X)

    @property
    def n_functions(self) -> int:
        return self.values.shape[0]

    @property
    def n_points(self) -> int:
        return self.values.shape[1]


def trapezoid_weights(grid: SampleGrid) -> QuadratureScheme:
    """Trapezoidal rule weights for a (possibly nonuniform) grid.

    >>> trapezoid_weights(SampleGrid([0.0, 1.0, 3.0])).weights
    array([0.5, 1.5, 1. ])
    """
    t = grid.points
    if t.size < 2:
        raise DimensionError("trapezoid rule needs at least 2 points")
    h = np.diff(t)
    w = np.empty_like(t)
    w[0] = h[0] / 2
    w[-1] = h[-1] / 2
    w[1:-1] = (t[2:] - t[:-2]) / 2
    return QuadratureScheme(w)


def _check(x, y, q: QuadratureScheme):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or x.size != len(q):
        raise LengthMismatch(
            f"length mismatch: x {x.shape}, y {y.shape}, weights ({len(q)},)"
        )
    return x, y


def inner_product(x, y, q: QuadratureScheme) -> float:
    x, y = _check(x, y, q)
    # x*y == y*x elementwise, so the result is exactly symmetric
    return float(np.sum(q.weights * (x * y)))


def l2_norm(x, q: QuadratureScheme) -> float:
    return float(np.sqrt(inner_product(x, x, q)))


def l2_distance(x, y, q: QuadratureScheme) -> float:
    x, y = _check(x, y, q)
    return l2_norm(x - y, q)


def l1_distance(x, y, q: QuadratureScheme) -> float:
    x, y = _check(x, y, q)
    return float(np.sum(q.weights * np.abs(x - y)))


def pairwise_distances(X: np.ndarray, q: QuadratureScheme, metric: str = "l2") -> np.ndarray:
    """Symmetric matrix of L2 (or L1) distances between the rows of ``X``.

    Only the upper triangle is evaluated; the lower one is mirrored, so the
    result is exactly symmetric with a zero diagonal.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != len(q):
        raise LengthMismatch(f"data {X.shape} does not match {len(q)} weights")
    if metric not in ("l2", "l1"):
        raise ValueError(f"unknown metric {metric!r}")
    n = X.shape[0]
    w = q.weights
    D = np.zeros((n, n))
    for i in range(n - 1):
        diff = X[i + 1:] - X[i]
        if metric == "l2":
            row = np.sqrt(np.sum(w * (diff * diff), axis=1))
        else:
            row = np.sum(w * np.abs(diff), axis=1)
        D[i, i + 1:] = row
        D[i + 1:, i] = row
    return D


def check_grid(data: FunctionalDataset, grid: SampleGrid) -> None:
    if not data.grid.same_as(grid):
        raise GridMismatch("dataset is not sampled on the expected grid")
