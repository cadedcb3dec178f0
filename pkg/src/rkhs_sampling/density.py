"""The mixture sampling density and reproducible i.i.d. sampling from it.

Seed derivation (stable file contract, reports store both values)::

    stream_seed(master, stream) = SeedSequence(master, spawn_key=(stream,))
                                    .generate_state(1, uint64)[0]
    rng = Generator(Philox(key=stream_seed))

Philox is counter-based, so each ``(master, stream)`` pair is an
independent stream and a trial can be regenerated from its stored seed alone.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectral_model import SpectralModel

MAX_CONSECUTIVE_REJECTIONS = 10**6


def stream_seed(master_seed: int, stream: int) -> int:
    """64-bit seed of stream ``stream`` under ``master_seed``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(stream),))
    return int(ss.generate_state(1, np.uint64)[0])


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed)))


def make_rng(master_seed: int, stream: int) -> np.random.Generator:
    return rng_from_seed(stream_seed(master_seed, stream))


@dataclass(frozen=True, eq=False)
class SamplingDensity:
    """rho_k = 1/2 (head leverage / k + a^2-weighted tail / tail_sum(k)).

    If ``tail_sum(k) == 0`` (finite rank, k at or beyond the last nonzero
    a_j) the tail component is dropped and the density is the pure head
    leverage function, which still integrates to one.
    """

    model: SpectralModel
    k: int
    tail: float = field(init=False)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.model.rank is not None and self.k > self.model.rank:
            raise ValueError(f"k={self.k} exceeds model rank {self.model.rank}")
        object.__setattr__(self, "tail", self.model.tail_sum(self.k))

    def head_part(self, x) -> np.ndarray:
        return self.model.head_sq_sum(x, self.k) / self.k

    def tail_part(self, x) -> np.ndarray:
        if self.tail == 0.0:
            return np.zeros(np.shape(self.model.check_points(x)))
        return self.model.tail_weighted_sq_sum(x, self.k) / self.tail

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        if self.tail == 0.0:
            vals = self.head_part(x)
        else:
            vals = 0.5 * (self.head_part(x) + self.tail_part(x))
        return float(vals[0]) if scalar else vals

    @property
    def envelope(self) -> float | None:
        """Rejection constant against the uniform proposal, if the model has one."""
        if self.model.is_discrete:
            return None
        # both mixture components are averages of |b_j|^2 <= 2
        return 2.0


def density_eval(d: SamplingDensity, x):
    return d(x)


@dataclass(frozen=True, eq=False)
class SampleSet:
    points: np.ndarray
    rho: np.ndarray
    k: int
    master_seed: int | None = None
    stream: int | None = None
    seed: int | None = None
    proposals: int | None = None

    def __post_init__(self):
        if self.points.shape[0] != self.rho.shape[0]:
            raise ValueError("points and density values differ in length")
        if np.any(self.rho <= 0):
            raise ValueError("density values must be strictly positive")

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def acceptance_rate(self) -> float | None:
        if not self.proposals:
            return None
        return self.n / self.proposals

    @classmethod
    def from_points(cls, d: SamplingDensity, points) -> "SampleSet":
        """Wrap externally chosen points (no seed), evaluating rho_k at them."""
        pts = d.model.check_points(points)
        return cls(points=pts, rho=np.asarray(d(pts), dtype=float), k=d.k)


def _inverse_cdf(d: SamplingDensity, n: int, rng: np.random.Generator):
    atoms = d.model.atoms()
    probs = np.asarray(d(atoms), dtype=float)
    cdf = np.cumsum(probs)
    u = rng.random(n) * cdf[-1]
    idx = np.searchsorted(cdf, u, side="right")
    idx = np.minimum(idx, len(atoms) - 1)
    # never land on a zero-mass atom through rounding at the right edge
    while np.any(probs[idx] == 0):
        bad = probs[idx] == 0
        idx[bad] -= 1
    return atoms[idx], probs[idx], n


def _rejection(d: SamplingDensity, n: int, rng: np.random.Generator):
    M = d.envelope
    accepted: list[np.ndarray] = []
    values: list[np.ndarray] = []
    have = 0
    proposals = 0
    streak = 0
    while have < n:
        batch = max(2 * (n - have), 1024)
        x = rng.random(batch)
        u = rng.random(batch)
        rho = d(x)
        keep = u * M < rho
        proposals += batch
        if keep.any():
            streak = 0
            accepted.append(x[keep])
            values.append(rho[keep])
            have += int(keep.sum())
        else:
            streak += batch
            if streak > MAX_CONSECUTIVE_REJECTIONS:
                raise RuntimeError("rejection sampler stalled: envelope violated")
    return np.concatenate(accepted)[:n], np.concatenate(values)[:n], proposals


def draw_samples(d: SamplingDensity, n: int, master_seed: int = 0, stream: int = 0) -> SampleSet:
    """Draw ``n`` i.i.d. points from rho_k d(mu) on stream ``(master_seed, stream)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    seed = stream_seed(master_seed, stream)
    rng = rng_from_seed(seed)
    if d.model.is_discrete:
        pts, rho, proposals = _inverse_cdf(d, n, rng)
    elif d.envelope is not None:
        pts, rho, proposals = _rejection(d, n, rng)
    else:
        raise NotImplementedError("model provides neither atoms nor an envelope")
    return SampleSet(
        points=pts,
        rho=rho,
        k=d.k,
        master_seed=int(master_seed),
        stream=int(stream),
        seed=seed,
        proposals=proposals,
    )


def importance_diagnostic(samples: SampleSet) -> float:
    """Mean of 1/rho over the sample; its expectation is mu(D)."""
    if samples.n == 0:
        raise ValueError("empty sample set")
    return float(np.mean(1.0 / samples.rho))
