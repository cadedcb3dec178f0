import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.stats import chi2

from rkhs_sampling import (
    DiscreteDiagonalModel,
    FourierSobolevModel,
    SampleSet,
    SamplingDensity,
    draw_samples,
    importance_diagnostic,
)
from rkhs_sampling.density import make_rng, stream_seed

from conftest import random_discrete_model


def test_density_eval_fix_a(fix_a):
    d = SamplingDensity(fix_a, 1)
    assert d(0) == 0.5
    assert d(1) == 0.5


def test_density_bounded_by_two(fix_b):
    d = SamplingDensity(fix_b, 2)
    x = np.linspace(0, 1, 5000, endpoint=False)
    assert np.max(d(x)) <= 2.0


def test_density_rejects_bad_k(fix_a):
    with pytest.raises(ValueError):
        SamplingDensity(fix_a, 0)
    with pytest.raises(ValueError):
        SamplingDensity(fix_a, 3)


def test_degenerate_tail_uses_leverage_only():
    model = DiscreteDiagonalModel((1.0, 0.5, 0.0, 0.0))
    d = SamplingDensity(model, 2)
    assert d.tail == 0.0
    assert np.allclose(d(model.atoms()), [0.5, 0.5, 0.0, 0.0])


@pytest.mark.parametrize("k", [1, 2, 4, 8, 16, 32])
def test_normalization_fourier(fix_b, k):
    N = 2**16
    x = np.arange(N) / N
    assert abs(np.mean(SamplingDensity(fix_b, k)(x)) - 1.0) < 1e-10


def test_normalization_discrete():
    rng = np.random.default_rng(3)
    for m in (2, 5, 16):
        model = random_discrete_model(rng, m)
        for k in range(1, m + 1):
            d = SamplingDensity(model, k)
            assert abs(np.sum(d(model.atoms())) - 1.0) < 1e-14


def test_density_half_mixture_lower_bounds(fix_b):
    x = np.linspace(0, 1, 1000, endpoint=False)
    for k in (1, 3, 10):
        d = SamplingDensity(fix_b, k)
        rho = d(x)
        assert np.all(rho >= fix_b.head_sq_sum(x, k) / (2 * k) - 1e-15)
        assert np.all(rho >= fix_b.tail_weighted_sq_sum(x, k) / (2 * d.tail) - 1e-15)


def test_draw_samples_fix_a_frequency(fix_a):
    s = draw_samples(SamplingDensity(fix_a, 1), 10**4, master_seed=7, stream=0)
    freq = np.mean(s.points == 0)
    assert 0.48 <= freq <= 0.52


@pytest.mark.parametrize("model,k", [(DiscreteDiagonalModel((1.0, 0.5, 0.3)), 2),
                                     (FourierSobolevModel(1.0), 4)])
def test_draw_samples_deterministic(model, k):
    d = SamplingDensity(model, k)
    s1 = draw_samples(d, 500, master_seed=11, stream=3)
    s2 = draw_samples(d, 500, master_seed=11, stream=3)
    s3 = draw_samples(d, 500, master_seed=11, stream=4)
    assert np.array_equal(s1.points, s2.points)
    assert np.array_equal(s1.rho, s2.rho)
    assert s1.seed == s2.seed == stream_seed(11, 3)
    assert not np.array_equal(s1.points, s3.points)


def test_stream_seed_is_stable():
    # frozen values of the documented derivation rule
    assert stream_seed(0, 0) == int(np.random.SeedSequence(0, spawn_key=(0,)).generate_state(1, np.uint64)[0])
    assert stream_seed(0, 0) != stream_seed(0, 1)
    assert make_rng(5, 2).random() == make_rng(5, 2).random()


def test_rejection_acceptance_rate(fix_b):
    s = draw_samples(SamplingDensity(fix_b, 2), 10**4, master_seed=1)
    assert s.acceptance_rate >= 0.45


def test_rejection_stall_detected():
    class Liar(FourierSobolevModel):
        def head_sq_sum(self, x, k):
            return np.zeros_like(self.check_points(x))

        def tail_weighted_sq_sum(self, x, k):
            return np.zeros_like(self.check_points(x))

    with pytest.raises(RuntimeError):
        draw_samples(SamplingDensity(Liar(1.0), 2), 10)


def test_importance_diagnostic_examples(fix_a, fix_b):
    s = draw_samples(SamplingDensity(fix_a, 1), 10**4, master_seed=2)
    assert abs(importance_diagnostic(s) - 2.0) < 0.05
    s = draw_samples(SamplingDensity(fix_b, 2), 10**4, master_seed=2)
    assert abs(importance_diagnostic(s) - 1.0) < 0.1
    single = SampleSet(points=np.array([0]), rho=np.array([0.5]), k=1)
    assert importance_diagnostic(single) == 2.0


def test_chi_square_discrete():
    model = DiscreteDiagonalModel((1.0, 0.8, 0.5, 0.4, 0.2, 0.1))
    d = SamplingDensity(model, 2)
    s = draw_samples(d, 10**5, master_seed=123)
    probs = d(model.atoms())
    counts = np.bincount(s.points, minlength=model.m)
    expected = probs * s.n
    stat = np.sum((counts - expected) ** 2 / expected)
    assert stat < chi2.ppf(0.999, model.m - 1)


def _brute_tail_upper(model, k, x, J):
    """Explicit partial sum up to J plus the pointwise remainder bound."""
    if model.rank is not None:
        J = min(J, model.rank)
    if J <= k:
        return np.zeros(len(x))
    a = model.approx_numbers(k, J)
    B = model.basis_matrix(x, range(k + 1, J + 1))
    tail = model.pointwise_tail_bound(J, x) if (model.rank is None or J < model.rank) else 0.0
    return (np.abs(B) ** 2) @ (a**2) + tail


@pytest.mark.parametrize("k", [2, 4, 8, 16, 32])
def test_leverage_bounds_fourier(fix_b, k):
    d = SamplingDensity(fix_b, k)
    x = np.concatenate([np.linspace(0, 1, 1000, endpoint=False),
                        draw_samples(d, 2000, master_seed=k).points])
    rho = d(x)
    head = np.sum(fix_b.basis_matrix(x, range(1, k + 1)) ** 2, axis=1)
    assert np.all(head <= 2 * k * rho + 1e-9)
    tail = _brute_tail_upper(fix_b, k, x, k + 2000)
    assert np.all(tail <= 2 * d.tail * rho + 1e-9)


@given(st.integers(2, 16), st.integers(0, 2**32 - 1))
def test_leverage_bounds_discrete(m, seed):
    rng = np.random.default_rng(seed)
    model = random_discrete_model(rng, m)
    for k in range(1, m + 1):
        d = SamplingDensity(model, k)
        x = model.atoms()
        rho = d(x)
        pos = rho > 0
        head = np.sum(model.basis_matrix(x, range(1, k + 1)) ** 2, axis=1)
        assert np.all(head[pos] <= 2 * k * rho[pos] + 1e-9)
        if d.tail > 0:
            tail = _brute_tail_upper(model, k, x, m)
            assert np.all(tail[pos] <= 2 * d.tail * rho[pos] + 1e-9)
