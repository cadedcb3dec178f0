"""Ground-truth errors in eigen-coordinates.

A function ``f = sum_j c_j b_j`` has ``||f||_L2 = ||c||_2`` and
``||f||_H^2 = sum_j |c_j|^2 / a_{j-1}^2``, so the H unit ball is an
ellipsoid and the worst-case error of a linear method is a spectral norm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import SampleSet
from .recovery import DEFAULT_RANK_TOL, RecoveryOutput, build_design
from .spectral_model import SpectralModel

_CHUNK_ROWS = 8192


@dataclass(frozen=True, eq=False)
class CoefficientFunction:
    """f = sum_{j=1}^{J} coefficients[j-1] * b_j."""

    coefficients: np.ndarray
    model: SpectralModel

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients))
        object.__setattr__(self, "coefficients", c)
        if self.model.rank is not None and c.shape[0] > self.model.rank:
            if np.any(c[self.model.rank:] != 0):
                raise ValueError("coefficients beyond the model rank")
            object.__setattr__(self, "coefficients", c[: self.model.rank])

    @property
    def J(self) -> int:
        return int(self.coefficients.shape[0])

    def __call__(self, x):
        if self.J == 0:
            return np.zeros(np.shape(self.model.check_points(x)))
        B = self.model.basis_matrix(x, range(1, self.J + 1))
        vals = B @ self.coefficients
        return vals[0] if np.ndim(x) == 0 else vals


def h_norm(model: SpectralModel, f: CoefficientFunction) -> float:
    c = f.coefficients
    if c.size == 0:
        return 0.0
    a = model.approx_numbers(0, c.size)
    nz = c != 0
    if np.any(nz & (a == 0)):
        raise ValueError("coefficient on a basis function with a_j = 0 (infinite H-norm)")
    return float(math.sqrt(np.sum(np.abs(c[nz]) ** 2 / a[nz] ** 2)))


def l2_error(model: SpectralModel, f: CoefficientFunction, recovered) -> float:
    """||f - A f||_L2 as a Euclidean distance of coefficient vectors."""
    rc = recovered.coefficients if isinstance(recovered, RecoveryOutput) else np.asarray(recovered)
    size = max(f.J, rc.shape[0])
    diff = np.zeros(size, dtype=np.result_type(f.coefficients, rc, float))
    diff[: f.J] += f.coefficients
    diff[: rc.shape[0]] -= rc
    return float(np.linalg.norm(diff))


def random_unit_function(model: SpectralModel, k: int, rng: np.random.Generator) -> CoefficientFunction:
    """Random element of span{b_1..b_k} with unit H-norm."""
    a = model.approx_numbers(0, k)
    c = rng.standard_normal(k) * (a > 0)
    f = CoefficientFunction(c, model)
    return CoefficientFunction(c / h_norm(model, f), model)


def reconstruction_map(model: SpectralModel, samples: SampleSet, k: int, J: int,
                       rank_tolerance: float = DEFAULT_RANK_TOL):
    """Return ``(T, rank)``: L2-coefficients (length J) -> recovered coefficients (length J)."""
    G = build_design(model, k, samples)
    U, sv, Vh = np.linalg.svd(G, full_matrices=False)
    keep = sv > rank_tolerance * sv[0] if sv[0] > 0 else np.zeros_like(sv, dtype=bool)
    r = int(keep.sum())
    # pinv(G) @ G_full, accumulating U^* G_full over row chunks
    Uk = U[:, keep].conj().T
    w = 1.0 / np.sqrt(samples.rho)
    UtG = np.zeros((r, J), dtype=np.result_type(G, float))
    for lo in range(0, samples.n, _CHUNK_ROWS):
        hi = min(lo + _CHUNK_ROWS, samples.n)
        blk = w[lo:hi, None] * model.basis_matrix(samples.points[lo:hi], range(1, J + 1))
        UtG = UtG + Uk[:, lo:hi] @ blk
    head = Vh[keep].conj().T @ (UtG / sv[keep][:, None])
    T = np.zeros((J, J), dtype=head.dtype)
    T[:k] = head
    return T, r


def worstcase_error(model: SpectralModel, samples: SampleSet, k: int, J: int | None = None,
                    rank_tolerance: float = DEFAULT_RANK_TOL) -> tuple[float, bool]:
    """sup over the H unit ball of ||f - A f||_L2, restricted to span{b_1..b_J}.

    Exact when J covers the full (finite) rank. Returns ``(inf, exact)`` if G
    is rank-deficient.
    """
    if J is None:
        J = model.rank if model.rank is not None else max(2 * k, k + 256)
    if model.rank is not None:
        J = min(J, model.rank)
    J = max(J, k)
    exact = model.rank is not None and J >= model.rank
    T, r = reconstruction_map(model, samples, k, J, rank_tolerance)
    if r < k:
        return math.inf, exact
    a = model.approx_numbers(0, J)
    E = (np.eye(J) - T) * a[None, :]
    return float(np.linalg.norm(E, 2)), exact
