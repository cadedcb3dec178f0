"""Spectral descriptions of reproducing kernel Hilbert spaces embedded into L2.

A model supplies an L2-orthonormal eigenbasis ``b_1, b_2, ...`` of the
embedding together with the non-increasing approximation numbers
``a_0 >= a_1 >= ...``, where ``a_j = 1 / ||b_{j+1}||_H``. Everything else in
the package (density, design matrices, certificates) is expressed in these
terms; no kernel is ever diagonalised here.

Indexing follows the usual convention: basis functions are 1-based
(``b_1`` is the first), approximation numbers are 0-based (``a_0`` belongs to
``b_1``).
"""
from __future__ import annotations

import math
import warnings
from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np
from scipy.special import spence, zeta

# Budget for the cosine-series fallback in FourierSobolevModel.
_MAX_SERIES_TERMS = 4097
_SERIES_REL_TOL = 1e-12


class SpectralModel(ABC):
    """Abstract spectral model: basis evaluation plus approximation numbers."""

    #: number of basis functions; ``None`` for infinite rank
    rank: int | None = None
    is_complex: bool = False

    @abstractmethod
    def check_points(self, x) -> np.ndarray:
        """Validate points and return them as an array."""

    @abstractmethod
    def basis_eval(self, j: int, x):
        """Evaluate b_j at x (scalar or array)."""

    @abstractmethod
    def approx_number(self, j: int) -> float:
        """Return a_j (0-based)."""

    @abstractmethod
    def tail_sum(self, k: int) -> float:
        """Return sum_{j >= k} a_j^2."""

    @abstractmethod
    def head_sq_sum(self, x, k: int) -> np.ndarray:
        """Return sum_{j <= k} |b_j(x)|^2."""

    @abstractmethod
    def tail_weighted_sq_sum(self, x, k: int) -> np.ndarray:
        """Return sum_{j >= k} a_j^2 |b_{j+1}(x)|^2."""

    @abstractmethod
    def pointwise_tail_bound(self, J: int, x) -> np.ndarray:
        """Upper bound on sum_{j >= J} a_j^2 |b_{j+1}(x)|^2."""

    @property
    def is_discrete(self) -> bool:
        return False

    def approx_numbers(self, start: int, stop: int) -> np.ndarray:
        return np.array([self.approx_number(j) for j in range(start, stop)], dtype=float)

    def basis_matrix(self, x, js) -> np.ndarray:
        """Matrix with entries b_j(x_i) for the 1-based indices in ``js``."""
        x = self.check_points(x)
        js = list(js)
        out = np.empty((x.shape[0], len(js)), dtype=complex if self.is_complex else float)
        for col, j in enumerate(js):
            out[:, col] = self.basis_eval(j, x)
        return out


@dataclass(frozen=True, eq=False)
class DiscreteDiagonalModel(SpectralModel):
    """Finite-rank model on ``D = {0, ..., m-1}`` with counting measure.

    ``b_j`` is the indicator of atom ``j-1``, so the H-norm is
    ``||f||_H^2 = sum_x |f(x)|^2 / a_x^2``. All quantities are exact finite
    sums, which is what makes this model useful for brute-force checks.
    """

    a: tuple[float, ...]
    m: int = field(init=False)

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        if len(a) < 1:
            raise ValueError("need at least one atom")
        if any(not math.isfinite(v) or v < 0 for v in a):
            raise ValueError("approximation numbers must be finite and nonnegative")
        if any(a[i] < a[i + 1] for i in range(len(a) - 1)):
            raise ValueError("approximation numbers must be non-increasing")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "m", len(a))
        object.__setattr__(self, "_a2", np.array(a) ** 2)

    @property
    def rank(self) -> int:  # type: ignore[override]
        return self.m

    @property
    def is_discrete(self) -> bool:
        return True

    def atoms(self) -> np.ndarray:
        return np.arange(self.m)

    def check_points(self, x) -> np.ndarray:
        arr = np.atleast_1d(np.asarray(x))
        if arr.size and not np.issubdtype(arr.dtype, np.integer):
            if not np.all(arr == np.round(arr)):
                raise ValueError("discrete points must be integer atoms")
            arr = arr.astype(np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.m):
            raise ValueError(f"point outside domain {{0..{self.m - 1}}}")
        return arr

    def basis_eval(self, j: int, x):
        if not 1 <= j <= self.m:
            raise IndexError(f"basis index {j} out of range 1..{self.m}")
        scalar = np.ndim(x) == 0
        vals = (self.check_points(x) == j - 1).astype(float)
        return float(vals[0]) if scalar else vals

    def approx_number(self, j: int) -> float:
        if j < 0:
            raise IndexError("approximation numbers are indexed from 0")
        return self.a[j] if j < self.m else 0.0

    def tail_sum(self, k: int) -> float:
        if k < 0:
            raise IndexError("k must be nonnegative")
        return float(math.fsum(self._a2[k:]))

    def head_sq_sum(self, x, k: int) -> np.ndarray:
        x = self.check_points(x)
        return (x < k).astype(float)

    def tail_weighted_sq_sum(self, x, k: int) -> np.ndarray:
        x = self.check_points(x)
        return np.where(x >= k, self._a2[x], 0.0)

    def pointwise_tail_bound(self, J: int, x) -> np.ndarray:
        if J < 1:
            raise ValueError("J must be >= 1")
        return self.tail_weighted_sq_sum(x, J)


@dataclass(frozen=True, eq=False)
class FourierSobolevModel(SpectralModel):
    """Periodic Sobolev-type model on [0, 1) with Lebesgue measure.

    Basis order: ``b_1 = 1``, ``b_{2l} = sqrt(2) cos(2 pi l x)``,
    ``b_{2l+1} = sqrt(2) sin(2 pi l x)``; approximation numbers
    ``a_j = (j + 1)^(-s)``. Pairing cos/sin per frequency keeps
    ``|b_j|^2 <= 2`` everywhere.

    For ``s = 1`` the weighted tail ``sum_{j >= k} a_j^2 b_{j+1}(x)^2`` is
    evaluated in closed form through the dilogarithm; other ``s`` use a
    truncated cosine series whose error bound is :meth:`tail_error_bound`.
    """

    s: float = 1.0

    def __post_init__(self):
        if not self.s > 0.5:
            raise ValueError("smoothness s must exceed 1/2 (square-summable a_j)")
        object.__setattr__(self, "s", float(self.s))

    @property
    def exponent(self) -> float:
        """Decay exponent of a_j^2."""
        return 2.0 * self.s

    def check_points(self, x) -> np.ndarray:
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        if arr.size and (np.any(arr < 0.0) or np.any(arr >= 1.0) or not np.all(np.isfinite(arr))):
            raise ValueError("point outside domain [0, 1)")
        return arr

    def basis_eval(self, j: int, x):
        if j < 1:
            raise IndexError("basis index must be >= 1")
        scalar = np.ndim(x) == 0
        arr = self.check_points(x)
        if j == 1:
            vals = np.ones_like(arr)
        else:
            freq = j // 2
            trig = np.cos if j % 2 == 0 else np.sin
            vals = math.sqrt(2.0) * trig(2.0 * np.pi * freq * arr)
        return float(vals[0]) if scalar else vals

    def approx_number(self, j: int) -> float:
        if j < 0:
            raise IndexError("approximation numbers are indexed from 0")
        return float((j + 1) ** -self.s)

    def approx_numbers(self, start: int, stop: int) -> np.ndarray:
        return np.arange(start + 1, stop + 1, dtype=float) ** -self.s

    def tail_sum(self, k: int) -> float:
        # Hurwitz zeta: sum_{m >= k+1} m^{-2s}
        if k < 0:
            raise IndexError("k must be nonnegative")
        return float(zeta(self.exponent, k + 1))

    def head_sq_sum(self, x, k: int) -> np.ndarray:
        # complete cos/sin pairs contribute exactly 2 each
        x = self.check_points(x)
        if k <= 0:
            return np.zeros_like(x)
        if k % 2 == 1:
            return np.full_like(x, float(k))
        return (k - 1) + 2.0 * np.cos(np.pi * k * x) ** 2

    def _weighted_head(self, x: np.ndarray, k: int) -> np.ndarray:
        """sum_{m <= k} m^{-2s} b_m(x)^2"""
        p = self.exponent
        out = np.zeros_like(x)
        theta = 2.0 * np.pi * x
        for m in range(1, k + 1):
            if m == 1:
                out += 1.0
            else:
                ell = m // 2
                sign = 1.0 if m % 2 == 0 else -1.0
                out += m ** -p * (1.0 + sign * np.cos(2.0 * ell * theta))
        return out

    def _full_weighted_sum_s1(self, x: np.ndarray) -> np.ndarray:
        """sum_{m >= 1} m^{-2} b_m(x)^2 in closed form via the dilogarithm."""
        theta = 2.0 * np.pi * x
        z1 = np.exp(1j * theta)
        z2 = np.exp(2j * theta)
        li1 = spence(1.0 - z1)  # Li_2(z) = spence(1 - z)
        li2 = spence(1.0 - z2)
        # sum_l (2l)^-2 cos(2l theta) - sum_l (2l+1)^-2 cos(2l theta)
        even = 0.25 * li2.real
        odd = (np.exp(-1j * theta) * (li1 - 0.25 * li2 - z1)).real
        return math.pi ** 2 / 6.0 + even - odd

    def _series_length(self, k: int) -> int:
        """Last index M (odd, closing a cos/sin pair) of the cosine-series fallback."""
        p = self.exponent
        target = _SERIES_REL_TOL * self.tail_sum(k)
        # remainder past a complete pair ending at M is at most M^{-p}/2
        M = max(math.ceil((2.0 * target) ** (-1.0 / p)), k + 2)
        M = min(M, max(_MAX_SERIES_TERMS, k + 2))
        return M if M % 2 == 1 else M + 1

    def tail_error_bound(self, k: int) -> float:
        """Bound on the truncation error of :meth:`tail_weighted_sq_sum` (rounding aside)."""
        if self.s == 1.0:
            return 0.0
        return 0.5 * self._series_length(k) ** -self.exponent

    def _tail_series(self, x: np.ndarray, k: int) -> np.ndarray:
        p = self.exponent
        M = self._series_length(k)
        err = self.tail_error_bound(k)
        if err > _SERIES_REL_TOL * self.tail_sum(k):
            warnings.warn(
                f"density tail for s={self.s}, k={k} truncated with error bound {err:.2e}",
                RuntimeWarning,
                stacklevel=3,
            )
        out = np.full_like(x, self.tail_sum(k))
        theta = 2.0 * np.pi * x
        for m in range(max(k + 1, 2), M + 1):
            ell = m // 2
            sign = 1.0 if m % 2 == 0 else -1.0
            out += sign * m ** -p * np.cos(2.0 * ell * theta)
        return out

    def tail_weighted_sq_sum(self, x, k: int) -> np.ndarray:
        x = self.check_points(x)
        if self.s == 1.0:
            return np.maximum(self._full_weighted_sum_s1(x) - self._weighted_head(x, k), 0.0)
        return np.maximum(self._tail_series(x, k), 0.0)

    def pointwise_tail_bound(self, J: int, x) -> np.ndarray:
        if J < 1:
            raise ValueError("J must be >= 1")
        x = self.check_points(x)
        return np.full_like(x, 2.0 * self.tail_sum(J))


def model_from_spec(spec: dict) -> SpectralModel:
    """Build a model from the ``model`` block of a harness config."""
    kind = spec.get("kind")
    if kind == "discrete":
        a = spec.get("a")
        if a is None:
            raise ValueError("discrete model needs an explicit 'a' list")
        m = spec.get("m")
        if m is not None and int(m) != len(a):
            raise ValueError(f"model.m={m} does not match len(model.a)={len(a)}")
        return DiscreteDiagonalModel(tuple(a))
    if kind == "fourier":
        return FourierSobolevModel(float(spec.get("s", 1.0)))
    raise ValueError(f"unknown model kind {kind!r}")
