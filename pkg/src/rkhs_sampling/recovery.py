"""Weighted least-squares recovery from samples.

Given nodes x_i drawn from rho_k, the recovered function is the element of
span{b_1..b_k} minimising sum_i |g(x_i) - f(x_i)|^2 / rho(x_i). In matrix
form its coefficients are ``pinv(G) @ N f`` with
``G[i, j] = rho(x_i)^(-1/2) b_j(x_i)`` and ``N f = (rho(x_i)^(-1/2) f(x_i))_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .density import SampleSet
from .spectral_model import SpectralModel

DEFAULT_RANK_TOL = 1e-10
_CHUNK_ROWS = 8192


def default_truncation(model: SpectralModel, k: int) -> int:
    """Column cut-off J for the tail matrix."""
    if model.rank is not None:
        return max(model.rank, k + 1)
    return max(2 * k, k + 256)


def build_design(model: SpectralModel, k: int, samples: SampleSet) -> np.ndarray:
    if k < 1:
        raise ValueError("k must be >= 1")
    w = 1.0 / np.sqrt(samples.rho)
    return w[:, None] * model.basis_matrix(samples.points, range(1, k + 1))


def _tail_block(model: SpectralModel, k: int, J: int, points, w) -> np.ndarray:
    stop = J if model.rank is None else min(J, model.rank)
    if stop <= k:
        dtype = complex if model.is_complex else float
        return np.zeros((len(points), J - k), dtype=dtype)
    a = model.approx_numbers(k, stop)
    block = model.basis_matrix(points, range(k + 1, stop + 1)) * a[None, :]
    if stop < J:
        block = np.hstack([block, np.zeros((len(points), J - stop), dtype=block.dtype)])
    return w[:, None] * block


def tail_correction(model: SpectralModel, J: int, samples: SampleSet) -> float:
    """Frobenius bound on the columns j >= J dropped from the tail matrix."""
    if model.rank is not None and J >= model.rank:
        return 0.0
    return float(math.sqrt(np.sum(model.pointwise_tail_bound(J, samples.points) / samples.rho)))


def build_tail_design(model: SpectralModel, k: int, J: int, samples: SampleSet):
    """Return ``(Gamma_J, tail_correction)``.

    ``Gamma_J[i, j - k] = rho(x_i)^(-1/2) a_j b_{j+1}(x_i)`` for ``k <= j < J``.
    The true (infinite) tail matrix satisfies
    ``s_max(Gamma) <= sqrt(s_max(Gamma_J)^2 + correction^2)``.
    """
    if J <= k:
        raise ValueError(f"truncation J={J} must exceed k={k}")
    w = 1.0 / np.sqrt(samples.rho)
    return _tail_block(model, k, J, samples.points, w), tail_correction(model, J, samples)


def tail_gram(model: SpectralModel, k: int, J: int, samples: SampleSet) -> np.ndarray:
    """Gamma_J^* Gamma_J accumulated in row chunks (avoids the n x (J-k) matrix)."""
    if J <= k:
        raise ValueError(f"truncation J={J} must exceed k={k}")
    w = 1.0 / np.sqrt(samples.rho)
    gram = None
    for lo in range(0, samples.n, _CHUNK_ROWS):
        hi = min(lo + _CHUNK_ROWS, samples.n)
        blk = _tail_block(model, k, J, samples.points[lo:hi], w[lo:hi])
        part = blk.conj().T @ blk
        gram = part if gram is None else gram + part
    return gram


def weighted_info(samples: SampleSet, f_values) -> np.ndarray:
    f = np.asarray(f_values)
    if f.shape != (samples.n,):
        raise ValueError(f"expected {samples.n} function values, got shape {f.shape}")
    return f / np.sqrt(samples.rho)


@dataclass(frozen=True)
class RecoveryOutput:
    coefficients: np.ndarray
    rank: int
    smin_retained: float
    residual_norm: float
    singular_values: np.ndarray

    @property
    def rank_deficient(self) -> bool:
        return self.rank < self.coefficients.shape[0]


def solve(G: np.ndarray, y, rank_tolerance: float = DEFAULT_RANK_TOL) -> RecoveryOutput:
    """Minimum-norm least-squares solution ``pinv(G) @ y`` via the SVD.

    Singular values below ``rank_tolerance * s_max`` are discarded. With
    full numerical rank the result is the unique minimiser.
    """
    G = np.asarray(G)
    y = np.asarray(y)
    if G.size == 0:
        raise ValueError("empty design matrix")
    if y.shape != (G.shape[0],):
        raise ValueError("right-hand side length does not match design rows")
    U, sv, Vh = np.linalg.svd(G, full_matrices=False)
    smax = sv[0] if sv.size else 0.0
    keep = sv > rank_tolerance * smax if smax > 0 else np.zeros_like(sv, dtype=bool)
    r = int(keep.sum())
    proj = U[:, keep].conj().T @ y
    c = Vh[keep].conj().T @ (proj / sv[keep])
    if not np.iscomplexobj(G) and not np.iscomplexobj(y):
        c = c.real
    residual = float(np.linalg.norm(G @ c - y))
    return RecoveryOutput(
        coefficients=c,
        rank=r,
        smin_retained=float(sv[keep][-1]) if r else 0.0,
        residual_norm=residual,
        singular_values=sv,
    )


def evaluate_reconstruction(model: SpectralModel, c, x):
    c = np.asarray(c)
    scalar = np.ndim(x) == 0
    B = model.basis_matrix(x, range(1, len(c) + 1))
    vals = B @ c
    return vals[0] if scalar else vals


def recover(model: SpectralModel, k: int, samples: SampleSet, f_values,
            rank_tolerance: float = DEFAULT_RANK_TOL) -> RecoveryOutput:
    """Convenience wrapper: build G, weight the data, solve."""
    G = build_design(model, k, samples)
    return solve(G, weighted_info(samples, f_values), rank_tolerance)
