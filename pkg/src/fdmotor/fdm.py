"""Functional diffusion maps.

A kernel graph over functions is density-normalized with exponent alpha,
turned into a random walk P, and embedded with the right eigenvectors of P
scaled by lambda^T. The spectrum is obtained from the symmetric conjugate
S = D^{-1/2} K_alpha D^{-1/2}; P itself is never handed to a general
eigensolver.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from .errors import DimensionError, NearDisconnected
from .fda import FunctionalDataset, QuadratureScheme, pairwise_distances, trapezoid_weights
from .fpca import fix_signs


class Kernel(str, enum.Enum):
    GAUSSIAN = "gaussian"
    LAPLACIAN = "laplacian"


@dataclass(frozen=True)
class FdmParams:
    kernel: Kernel = Kernel.GAUSSIAN
    sigma: float = 1.0
    alpha: float = 0.0
    steps: int = 1
    n_components: int = 2

    def __post_init__(self):
        object.__setattr__(self, "kernel", Kernel(self.kernel))
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.n_components < 1:
            raise DimensionError(f"n_components must be >= 1, got {self.n_components}")

    def to_dict(self) -> dict:
        return {"kernel": self.kernel.value, "sigma": self.sigma, "alpha": self.alpha,
                "steps": self.steps, "n_components": self.n_components}


@dataclass(frozen=True, eq=False)
class FdmModel:
    """Fitted diffusion map.

    ``eigenvalues`` and the columns of ``right_eigvecs`` run over
    l = 0..L; the right eigenvectors satisfy sum_i pi_i psi_l(i)^2 = 1.
    """

    params: FdmParams
    kernel_matrix: np.ndarray
    normalized_kernel: np.ndarray
    transition: np.ndarray
    eigenvalues: np.ndarray
    right_eigvecs: np.ndarray
    stationary: np.ndarray
    embedding: np.ndarray

    @property
    def left_eigvecs(self) -> np.ndarray:
        # phi_l = pi * psi_l, so that sum_k phi_l(k) psi_m(k) = delta_lm
        return self.stationary[:, None] * self.right_eigvecs

    def embed(self, steps: Optional[int] = None) -> np.ndarray:
        T = self.params.steps if steps is None else steps
        return self.right_eigvecs[:, 1:] * self.eigenvalues[1:] ** T


def kernel_matrix(data: FunctionalDataset, q: Optional[QuadratureScheme] = None,
                  kernel: Kernel = Kernel.GAUSSIAN, sigma: float = 1.0) -> np.ndarray:
    """Gaussian exp(-||xi-xj||_2^2 / (2 sigma^2)) or Laplacian exp(-||xi-xj||_1 / sigma^2)."""
    if data.n_functions < 2:
        raise DimensionError("a kernel graph needs at least 2 functions")
    if q is None:
        q = trapezoid_weights(data.grid)
    kernel = Kernel(kernel)
    if kernel is Kernel.GAUSSIAN:
        D = pairwise_distances(data.values, q, "l2")
        K = np.exp(-(D * D) / (2 * sigma**2))
    else:
        # sigma squared, as in the published Laplacian kernel
        D = pairwise_distances(data.values, q, "l1")
        K = np.exp(-D / sigma**2)
    np.fill_diagonal(K, 1.0)
    return K


def alpha_normalize(K: np.ndarray, alpha: float) -> np.ndarray:
    """k_ij / (d_i^alpha d_j^alpha) with degrees d_i = sum_j k_ij."""
    K = np.asarray(K, dtype=float)
    if alpha == 0:
        return K.copy()
    da = K.sum(axis=1) ** alpha
    return K / (da[:, None] * da[None, :])


def transition_matrix(K_alpha: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Row-stochastic P = D^{-1} K_alpha and its stationary law pi = d / sum(d)."""
    K_alpha = np.asarray(K_alpha, dtype=float)
    d = K_alpha.sum(axis=1)
    P = K_alpha / d[:, None]
    return P, d / d.sum()


def fdm_from_kernel(K: np.ndarray, params: FdmParams) -> FdmModel:
    """Run the diffusion-map steps on a precomputed kernel matrix."""
    K = np.asarray(K, dtype=float)
    N = K.shape[0]
    L = params.n_components
    if K.ndim != 2 or K.shape != (N, N) or N < 2:
        raise DimensionError(f"kernel must be square with N >= 2, got {K.shape}")
    if L > N - 1:
        raise DimensionError(f"n_components must be <= N - 1 = {N - 1}, got {L}")

    K_alpha = alpha_normalize(K, params.alpha)
    P, pi = transition_matrix(K_alpha)
    d = K_alpha.sum(axis=1)
    inv_sqrt_d = 1.0 / np.sqrt(d)
    S = inv_sqrt_d[:, None] * K_alpha * inv_sqrt_d[None, :]
    S = (S + S.T) / 2
    evals, evecs = np.linalg.eigh(S)
    order = np.argsort(evals)[::-1][: L + 1]
    evals = evals[order]
    V = fix_signs(evecs[:, order])
    # psi = D^{-1/2} v rescaled to unit pi-norm, i.e. psi = v / sqrt(pi)
    psi = V / np.sqrt(pi)[:, None]
    psi /= np.sqrt(np.sum(pi[:, None] * psi * psi, axis=0))

    if evals[1] > 1 - 1e-12:
        warnings.warn(f"lambda_1 = {evals[1]!r}: kernel graph is nearly disconnected",
                      NearDisconnected, stacklevel=2)
    embedding = psi[:, 1:] * evals[1:] ** params.steps
    return FdmModel(
        params=params,
        kernel_matrix=K,
        normalized_kernel=K_alpha,
        transition=P,
        eigenvalues=evals,
        right_eigvecs=psi,
        stationary=pi,
        embedding=embedding,
    )


def fit_fdm(data: FunctionalDataset, q: Optional[QuadratureScheme] = None,
            params: FdmParams = FdmParams()) -> FdmModel:
    if params.n_components > data.n_functions - 1:
        raise DimensionError(
            f"n_components must be <= N - 1 = {data.n_functions - 1}, got {params.n_components}"
        )
    K = kernel_matrix(data, q, params.kernel, params.sigma)
    return fdm_from_kernel(K, params)


def with_steps(model: FdmModel, steps: int) -> FdmModel:
    """Same spectral fit, embedding recomputed for another number of steps."""
    params = replace(model.params, steps=steps)
    return replace(model, params=params, embedding=model.embed(steps))


def _check_index(model: FdmModel, *idx: int) -> None:
    n = model.transition.shape[0]
    for i in idx:
        if not 0 <= i < n:
            raise IndexError(f"index {i} out of range for {n} functions")


def diffusion_distance_exact(model: FdmModel, i: int, j: int, steps: Optional[int] = None) -> float:
    """sqrt(sum_k (P^T_ik - P^T_jk)^2 / pi_k), with P^T by repeated products."""
    _check_index(model, i, j)
    T = model.params.steps if steps is None else steps
    PT = model.transition
    for _ in range(T - 1):
        PT = PT @ model.transition
    diff = PT[i] - PT[j]
    return float(np.sqrt(np.sum(diff * diff / model.stationary)))


def embedding_distance(model: FdmModel, i: int, j: int) -> float:
    _check_index(model, i, j)
    diff = model.embedding[i] - model.embedding[j]
    return float(np.sqrt(np.sum(diff * diff)))
