"""Seeded Monte Carlo trials of the weighted least-squares method.

Each trial draws a node set on stream ``(master_seed, trial_index)``,
evaluates the certificate and the two concentration events, and optionally
the worst-case error. Trials are independent, so they may run in a process
pool; aggregation is always an ordered reduction by trial index.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .certificates import certify, k_of_n, theorem_rhs
from .density import SampleSet, SamplingDensity, draw_samples, stream_seed
from .error_oracle import worstcase_error
from .recovery import DEFAULT_RANK_TOL, build_design, default_truncation, solve
from .spectral_model import SpectralModel, model_from_spec

WORSTCASE_MAX_K = 32
_NOT_ECHOED = ("out_csv", "out_json", "workers")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    model: dict
    n: int
    mode: str = "theorem"
    c: float = 1.0
    k: int | None = None
    J: int | None = None
    trials: int = 1
    master_seed: int = 0
    rank_tolerance: float = DEFAULT_RANK_TOL
    compute_worstcase: bool | None = None
    out_csv: str | None = None
    out_json: str | None = None
    workers: int = 1
    record_timing: bool = False

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        """Accept nested (``{"model": {"kind": ...}}``) or dotted (``"model.kind"``) keys."""
        raw = dict(raw)
        model = dict(raw.pop("model", {}) or {})
        for key in list(raw):
            if key.startswith("model."):
                model[key.split(".", 1)[1]] = raw.pop(key)
        known = {f.name for f in fields(cls)} - {"model"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "n" not in raw:
            raise ConfigError("config needs 'n'")
        cfg = cls(model=model, **raw)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        try:
            self.build_model()
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"bad model block: {exc}") from exc
        if self.mode not in ("theorem", "override"):
            raise ConfigError(f"mode must be 'theorem' or 'override', got {self.mode!r}")
        if int(self.n) < 1:
            raise ConfigError("n must be >= 1")
        if not self.c > 0:
            raise ConfigError("c must be positive")
        if int(self.trials) < 1:
            raise ConfigError("trials must be >= 1")
        if self.mode == "override":
            if self.k is None or int(self.k) < 1:
                raise ConfigError("override mode needs k >= 1")
        elif self.k is not None:
            raise ConfigError("k is fixed by the k_n formula in theorem mode; use mode=override")
        if not self.rank_tolerance > 0:
            raise ConfigError("rank_tolerance must be positive")

    def build_model(self) -> SpectralModel:
        return model_from_spec(self.model)

    def resolve_k(self) -> int:
        """k for this run; theorem mode raises DegenerateKError when k_n = 0."""
        if self.mode == "theorem":
            return k_of_n(int(self.n), self.c)
        return int(self.k)

    def to_dict(self) -> dict:
        """Config echo for reports; output paths and worker count are excluded."""
        d = asdict(self)
        for key in _NOT_ECHOED:
            d.pop(key)
        return d


@dataclass
class TrialRecord:
    trial_index: int
    seed: int | None
    n: int
    k: int
    c: float
    smin_G_sq: float | None = None
    smax_GammaJ: float | None = None
    tail_correction: float | None = None
    a_k: float | None = None
    beta_prime: float | None = None
    cert_eq2: float | None = None
    wc_sq: float | None = None
    wc_exact: bool | None = None
    claim1_pass: bool | None = None
    claim2_pass: bool | None = None
    theorem_pass: bool | None = None
    rank: int | None = None
    J: int | None = None
    theorem_rhs: float | None = None
    proof_bound: float | None = None
    error: str | None = None
    wall_clock: float | None = field(default=None, compare=False)


CSV_COLUMNS = (
    "trial_index", "seed", "n", "k", "c", "smin_G_sq", "smax_GammaJ",
    "tail_correction", "a_k", "beta_prime", "cert_eq2", "wc_sq", "wc_exact",
    "claim1_pass", "claim2_pass", "theorem_pass", "rank",
)


@dataclass
class AggregateReport:
    config: dict
    records: list[TrialRecord]
    k: int | None
    J: int | None
    theorem_rhs: float | None

    @property
    def trials(self) -> int:
        return len(self.records)

    @property
    def failed_trials(self) -> int:
        return sum(r.error is not None for r in self.records)

    def frequency(self, name: str) -> float | None:
        vals = [getattr(r, name) for r in self.records if getattr(r, name) is not None]
        if not vals:
            return None
        return sum(bool(v) for v in vals) / len(vals)

    def successes(self, name: str) -> int:
        return sum(getattr(r, name) is True for r in self.records)

    def probability_bounds(self) -> tuple[float | None, float | None]:
        """(1 - 4/n^c, 1 - 8/n^c), floored at 0."""
        n, c = self.config.get("n"), self.config.get("c")
        if not self.records or n is None:
            return None, None
        return max(0.0, 1.0 - 4.0 / n**c), max(0.0, 1.0 - 8.0 / n**c)

    def summary(self, include_timing: bool = False) -> dict:
        certs = [r.cert_eq2 for r in self.records if r.cert_eq2 is not None]
        finite = [v for v in certs if math.isfinite(v)]
        claim_bound, theorem_bound = self.probability_bounds()
        out = {
            "k": self.k,
            "J": self.J,
            "trials": self.trials,
            "failed_trials": self.failed_trials,
            "claim1_frequency": self.frequency("claim1_pass"),
            "claim2_frequency": self.frequency("claim2_pass"),
            "theorem_frequency": self.frequency("theorem_pass"),
            "claim_probability_bound": claim_bound,
            "theorem_probability_bound": theorem_bound,
            "mean_cert_eq2": (sum(finite) / len(finite)) if finite else None,
            "max_cert_eq2": (max(certs) if certs else None),
            "theorem_rhs": self.theorem_rhs,
        }
        if include_timing:
            times = [r.wall_clock for r in self.records if r.wall_clock is not None]
            out["wall_clock_per_trial"] = (sum(times) / len(times)) if times else None
        return out


def _want_worstcase(cfg: ExperimentConfig, model: SpectralModel, k: int) -> bool:
    if cfg.compute_worstcase is not None:
        return bool(cfg.compute_worstcase)
    return model.rank is not None or k <= WORSTCASE_MAX_K


def evaluate_trial(model: SpectralModel, samples: SampleSet, k: int, c: float,
                   J: int | None = None, *, trial_index: int = 0, mode: str = "override",
                   rank_tolerance: float = DEFAULT_RANK_TOL,
                   compute_worstcase: bool = True) -> TrialRecord:
    """Certificate, claims and (optionally) worst-case error for a given node set."""
    J = default_truncation(model, k) if J is None else J
    G = build_design(model, k, samples)
    cert = certify(model, samples, k, c, J=J, mode=mode, G=G)
    # the solver's numerical rank; the certificate's s_min is independent of it
    rank = solve(G, np.zeros(samples.n), rank_tolerance).rank
    rec = TrialRecord(
        trial_index=trial_index, seed=samples.seed, n=samples.n, k=k, c=c,
        smin_G_sq=cert.smin_G_sq, smax_GammaJ=cert.smax_GammaJ,
        tail_correction=cert.tail_correction, a_k=cert.a_k,
        beta_prime=cert.beta_prime_k, cert_eq2=cert.cert_eq2,
        claim1_pass=cert.claim1_pass, claim2_pass=cert.claim2_pass,
        rank=rank, J=J, theorem_rhs=cert.theorem_rhs, proof_bound=cert.proof_bound,
    )
    if compute_worstcase:
        wc, exact = worstcase_error(model, samples, k, J, rank_tolerance)
        rec.wc_sq, rec.wc_exact = wc**2, exact
    if cert.theorem_rhs is not None:
        ok = cert.cert_eq2 <= cert.theorem_rhs
        if rec.wc_exact:
            ok = ok and rec.wc_sq <= cert.theorem_rhs
        rec.theorem_pass = bool(ok)
    return rec


def run_trial(cfg: ExperimentConfig, trial_index: int) -> TrialRecord:
    """One trial on stream (master_seed, trial_index); failures become records."""
    t0 = time.perf_counter()
    model = cfg.build_model()
    k = cfg.resolve_k()
    try:
        density = SamplingDensity(model, k)
        samples = draw_samples(density, int(cfg.n), cfg.master_seed, trial_index)
        rec = evaluate_trial(
            model, samples, k, cfg.c, cfg.J, trial_index=trial_index, mode=cfg.mode,
            rank_tolerance=cfg.rank_tolerance,
            compute_worstcase=_want_worstcase(cfg, model, k),
        )
    except (ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        rec = TrialRecord(trial_index=trial_index, seed=stream_seed(cfg.master_seed, trial_index),
                          n=int(cfg.n), k=k, c=cfg.c, error=f"{type(exc).__name__}: {exc}")
    rec.wall_clock = time.perf_counter() - t0
    return rec


def _run_one(args):
    cfg, i = args
    return run_trial(cfg, i)


def run_trials(cfg: ExperimentConfig, workers: int | None = None) -> AggregateReport:
    model = cfg.build_model()
    k = cfg.resolve_k()
    J = default_truncation(model, k) if cfg.J is None else cfg.J
    workers = cfg.workers if workers is None else workers
    indices = range(int(cfg.trials))
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_one, [(cfg, i) for i in indices]))
    else:
        records = [run_trial(cfg, i) for i in indices]
    records.sort(key=lambda r: r.trial_index)
    rhs = theorem_rhs(model, k) if k >= 2 and k % 2 == 0 else None
    return AggregateReport(config=cfg.to_dict(), records=records, k=k, J=J, theorem_rhs=rhs)
