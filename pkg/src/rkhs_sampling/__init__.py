"""Weighted least-squares sampling recovery in reproducing kernel Hilbert spaces."""
from .certificates import (
    Certificate,
    DegenerateKError,
    basic_certificate,
    beta,
    beta_prime,
    certify,
    check_claims,
    extreme_singular_values,
    k_of_n,
    minimal_n,
    oliveira_g,
    proof_bound,
    theorem_rhs,
)
from .density import SampleSet, SamplingDensity, draw_samples, importance_diagnostic, stream_seed
from .error_oracle import CoefficientFunction, h_norm, l2_error, worstcase_error
from .experiment import AggregateReport, ExperimentConfig, TrialRecord, run_trials
from .recovery import (
    RecoveryOutput,
    build_design,
    build_tail_design,
    evaluate_reconstruction,
    solve,
    weighted_info,
)
from .spectral_model import DiscreteDiagonalModel, FourierSobolevModel, SpectralModel

__version__ = "0.1.0"
