"""Closed-form bounds and the computable error certificate.

For a realised node set the squared worst-case error of the weighted
least-squares method satisfies

    e^2 <= a_k^2 + s_max(Gamma)^2 / s_min(G)^2,

and with high probability s_min(G)^2 >= n/2 and
s_max(Gamma)^2 <= 3 n beta'_k^2 / 2, giving e^2 <= 4 beta'_k^2 (``proof_bound``).
The headline bound for even k_n is (4 / k_n) sum_{j >= k_n/2} a_j^2
(``theorem_rhs``), which equals 2 beta'_k^2, i.e. half of what the two
concentration events alone deliver. Both are reported.
Logarithms are natural throughout.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .density import SampleSet
from .recovery import build_design, default_truncation, tail_correction, tail_gram
from .spectral_model import SpectralModel


class DegenerateKError(ValueError):
    """k_n evaluates to zero: n is too small for theorem mode at this c."""

    def __init__(self, n: int, c: float):
        self.n = n
        self.c = c
        self.min_n = minimal_n(c)
        super().__init__(
            f"k_n = 0 for n={n}, c={c}; theorem mode needs n >= {self.min_n}"
        )


def _kn_ratio(n: float, c: float) -> float:
    return n / (256.0 * (2.0 + c) * math.log(n))


def k_of_n(n: int, c: float) -> int:
    """k_n = 2 * floor(n / (256 (2 + c) ln n)); raises DegenerateKError if 0."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if not c > 0:
        raise ValueError("c must be positive")
    k = 2 * math.floor(_kn_ratio(n, c))
    if k == 0:
        raise DegenerateKError(n, c)
    return k


def minimal_n(c: float) -> int:
    """Smallest n >= 3 with n / (256 (2 + c) ln n) >= 1, i.e. k_n >= 2."""
    # n / ln n is increasing for n >= 3
    lo, hi = 3, 4
    while _kn_ratio(hi, c) < 1.0:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if _kn_ratio(mid, c) >= 1.0:
            hi = mid
        else:
            lo = mid + 1
    return lo


def claim_regime_limit(n: int, c: float) -> float:
    """Largest k covered by the concentration claims: n / (128 (2 + c) ln n)."""
    return n / (128.0 * (2.0 + c) * math.log(n))


def beta(model: SpectralModel, k: int) -> float:
    if k < 1:
        raise ValueError("beta_k needs k >= 1")
    return math.sqrt(model.tail_sum(k) / k)


def beta_prime(model: SpectralModel, k: int) -> float:
    if k < 2:
        raise ValueError("beta'_k needs k >= 2")
    return beta(model, k // 2)


class OliveiraG(NamedTuple):
    value: float
    applicable: bool  # g <= 2
    claim_regime: bool  # g <= 1/2


def oliveira_g(n: int, R: float, c: float) -> OliveiraG:
    """Concentration radius g(n, R, c) = 4 R sqrt((2 + c) ln n / n)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    g = 4.0 * R * math.sqrt((2.0 + c) * math.log(n) / n)
    return OliveiraG(g, g <= 2.0, g <= 0.5)


def extreme_singular_values(M) -> tuple[float, float]:
    """(s_min, s_max) via a full SVD; s_min is the min(rows, cols)-th value."""
    M = np.asarray(M)
    if M.size == 0:
        raise ValueError("empty matrix")
    sv = np.linalg.svd(M, compute_uv=False)
    return float(sv[-1]), float(sv[0])


def corrected_smax(smax_truncated: float, correction: float) -> float:
    """Rigorous bound on s_max of the untruncated tail matrix.

    For a column split ``[A, B]``: ``||[A, B]||^2 <= ||A||^2 + ||B||_F^2``.
    """
    return math.sqrt(smax_truncated**2 + correction**2)


def basic_certificate(a_k: float, smin_G_sq: float, smax_Gamma: float) -> float:
    """a_k^2 + s_max^2 / s_min^2; ``inf`` for rank-deficient G."""
    if smin_G_sq <= 0:
        return math.inf
    return a_k**2 + smax_Gamma**2 / smin_G_sq


def check_claims(n: int, k: int, model: SpectralModel, smin_G_sq: float,
                 smax_Gamma: float) -> tuple[bool, bool]:
    bp = beta_prime(model, k)
    claim1 = smax_Gamma**2 <= n * 3.0 * bp**2 / 2.0
    claim2 = smin_G_sq >= n / 2.0
    return bool(claim1), bool(claim2)


def theorem_rhs(model: SpectralModel, k_n: int) -> float:
    """(4 / k_n) * sum_{j >= k_n/2} a_j^2 for even k_n >= 2."""
    if k_n < 2 or k_n % 2:
        raise ValueError("theorem bound needs an even k_n >= 2")
    return 4.0 / k_n * model.tail_sum(k_n // 2)


def proof_bound(model: SpectralModel, k: int) -> float:
    """a_k^2 + 3 beta'_k^2 <= 4 beta'_k^2: what both claims together certify."""
    return 4.0 * beta_prime(model, k) ** 2


@dataclass(frozen=True)
class Certificate:
    n: int
    k: int
    c: float
    J: int
    mode: str
    a_k: float
    beta_k: float
    beta_prime_k: float | None
    smin_G_sq: float
    smax_GammaJ: float
    tail_correction: float
    smax_Gamma: float
    cert_eq2: float
    claim1_pass: bool | None
    claim2_pass: bool | None
    theorem_rhs: float | None
    proof_bound: float | None
    g_value: float
    g_ok: bool

    def to_dict(self) -> dict:
        return asdict(self)


def certify(model: SpectralModel, samples: SampleSet, k: int, c: float,
            J: int | None = None, mode: str = "override",
            G: np.ndarray | None = None) -> Certificate:
    """Evaluate the certificate, claim flags and theorem bound for one node set."""
    n = samples.n
    J = default_truncation(model, k) if J is None else J
    if G is None:
        G = build_design(model, k, samples)
    smin, _ = extreme_singular_values(G) if n >= k else (0.0, None)
    smin_sq = smin**2
    gram = tail_gram(model, k, J, samples)
    smax_J = math.sqrt(max(float(np.linalg.eigvalsh(gram)[-1]), 0.0))
    corr = tail_correction(model, J, samples)
    smax = corrected_smax(smax_J, corr)
    a_k = model.approx_number(k)
    cert = basic_certificate(a_k, smin_sq, smax)
    if k >= 2:
        bp = beta_prime(model, k)
        claim1, claim2 = check_claims(n, k, model, smin_sq, smax)
    else:
        bp, claim1, claim2 = None, None, None
    rhs = theorem_rhs(model, k) if k >= 2 and k % 2 == 0 else None
    pbound = proof_bound(model, k) if k >= 2 else None
    g = oliveira_g(max(n, 2), math.sqrt(2 * k), c)
    return Certificate(
        n=n, k=k, c=c, J=J, mode=mode,
        a_k=a_k, beta_k=beta(model, k), beta_prime_k=bp,
        smin_G_sq=smin_sq, smax_GammaJ=smax_J, tail_correction=corr,
        smax_Gamma=smax, cert_eq2=cert,
        claim1_pass=claim1, claim2_pass=claim2, theorem_rhs=rhs, proof_bound=pbound,
        g_value=g.value, g_ok=g.claim_regime,
    )
