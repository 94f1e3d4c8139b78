"""Functional PCA over discretized functions.

The covariance operator is discretized with quadrature weights W and the
symmetric matrix W^{1/2} S W^{1/2} is diagonalized, where S = X^T X / N.
Eigenvectors u_l map back to principal component functions
xi_l = W^{-1/2} u_l, which are orthonormal in the weighted inner product,
and scores are theta_l = X W xi_l.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AllZeroVariance, DimensionError, LengthMismatch, ZeroWeight
from .fda import FunctionalDataset, QuadratureScheme, SampleGrid, check_grid, trapezoid_weights

EIG_CLAMP = 1e-10


@dataclass(frozen=True, eq=False)
class FpcaModel:
    eigenvalues: np.ndarray
    components: np.ndarray
    scores: np.ndarray
    quadrature: QuadratureScheme
    grid: SampleGrid
    centered: bool
    mean: np.ndarray
    all_eigenvalues: np.ndarray

    @property
    def n_components(self) -> int:
        return self.eigenvalues.size


def covariance_matrix(data: FunctionalDataset, centered: bool = False) -> np.ndarray:
    """Sample covariance N^{-1} X^T X, optionally after removing the mean function."""
    X = data.values
    if centered:
        X = X - X.mean(axis=0)
    S = X.T @ X / X.shape[0]
    return (S + S.T) / 2


def fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so that its largest-magnitude entry is positive."""
    v = np.array(vectors, dtype=float, copy=True)
    idx = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[idx, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return v * signs


def _project(Xc: np.ndarray, w: np.ndarray, components: np.ndarray) -> np.ndarray:
    return (Xc * w) @ components.T


def fit_fpca(data: FunctionalDataset, q: Optional[QuadratureScheme] = None,
             n_components: int = 2, centered: bool = False) -> FpcaModel:
    """Fit FPCA with ``n_components`` components.

    Parameters
    ----------
    data : FunctionalDataset
        N functions on a shared grid.
    q : QuadratureScheme, optional
        Integration weights; trapezoidal weights of ``data.grid`` by default.
    n_components : int
        Number of components L, ``1 <= L <= min(N, M)``.
    centered : bool
        Subtract the mean function before forming the covariance. The default
        uses the raw second-moment matrix N^{-1} X^T X.
    """
    if q is None:
        q = trapezoid_weights(data.grid)
    N, M = data.values.shape
    if len(q) != M:
        raise LengthMismatch(f"{len(q)} weights for {M} grid points")
    if not 1 <= n_components <= min(N, M):
        raise DimensionError(f"n_components must lie in [1, {min(N, M)}], got {n_components}")
    w = q.weights
    if np.any(w == 0):
        raise ZeroWeight("all quadrature weights must be positive")

    mean = data.values.mean(axis=0) if centered else np.zeros(M)
    Xc = data.values - mean
    sw = np.sqrt(w)
    S = covariance_matrix(data, centered)
    A = sw[:, None] * S * sw[None, :]
    A = (A + A.T) / 2
    evals, evecs = np.linalg.eigh(A)
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    evecs = evecs[:, order]
    # round-off on rank-deficient covariances
    evals[(evals < 0) & (evals >= -EIG_CLAMP)] = 0.0

    U = fix_signs(evecs[:, :n_components])
    components = (U / sw[:, None]).T
    scores = _project(Xc, w, components)
    return FpcaModel(
        eigenvalues=evals[:n_components].copy(),
        components=components,
        scores=scores,
        quadrature=q,
        grid=data.grid,
        centered=centered,
        mean=mean,
        # only min(N, M) eigenvalues can be nonzero
        all_eigenvalues=evals[: min(N, M)].copy(),
    )


def transform(model: FpcaModel, new_data: FunctionalDataset) -> np.ndarray:
    """Scores of new functions on the fitted components."""
    check_grid(new_data, model.grid)
    return _project(new_data.values - model.mean, model.quadrature.weights, model.components)


def reconstruct(model: FpcaModel, scores: Optional[np.ndarray] = None) -> np.ndarray:
    """Rebuild functions as mean + sum_l theta_l xi_l."""
    scores = model.scores if scores is None else np.asarray(scores, dtype=float)
    return model.mean + scores @ model.components


def explained_variance_ratio(model: FpcaModel) -> np.ndarray:
    total = float(np.sum(np.clip(model.all_eigenvalues, 0.0, None)))
    if not total > 0:
        raise AllZeroVariance("covariance has no positive eigenvalue")
    return np.clip(model.eigenvalues, 0.0, None) / total
