import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from rkhs_sampling import (
    DegenerateKError,
    DiscreteDiagonalModel,
    FourierSobolevModel,
    SamplingDensity,
    basic_certificate,
    beta,
    beta_prime,
    certify,
    check_claims,
    draw_samples,
    extreme_singular_values,
    k_of_n,
    minimal_n,
    oliveira_g,
    theorem_rhs,
)
from rkhs_sampling.certificates import claim_regime_limit, corrected_smax, proof_bound
from rkhs_sampling.error_oracle import worstcase_error

from conftest import random_discrete_model

BASEL = math.pi**2 / 6
LOG_GRID = [int(v) for v in np.logspace(3, 7, 25)]


def _kn_oracle(n, c):
    mpmath.mp.dps = 50
    return int(2 * mpmath.floor(mpmath.mpf(n) / (256 * (2 + mpmath.mpf(c)) * mpmath.log(n))))


def test_k_of_n_examples():
    assert k_of_n(10**4, 1) == 2
    assert k_of_n(10**5, 1) == 22
    assert k_of_n(10**6, 1) == 188
    with pytest.raises(DegenerateKError):
        k_of_n(2, 1)
    with pytest.raises(ValueError):
        k_of_n(1, 1)
    with pytest.raises(ValueError):
        k_of_n(100, 0)


@pytest.mark.parametrize("c", [0.5, 1, 2, 3.7])
def test_k_of_n_matches_high_precision(c):
    for n in LOG_GRID:
        want = _kn_oracle(n, c)
        if want == 0:
            with pytest.raises(DegenerateKError):
                k_of_n(n, c)
        else:
            assert k_of_n(n, c) == want


@pytest.mark.parametrize("c", [0.5, 1, 2])
def test_minimal_n_direct_search(c):
    n = 3
    while _kn_oracle(n, c) < 2:
        n += 1
    assert minimal_n(c) == n
    assert k_of_n(n, c) == 2
    with pytest.raises(DegenerateKError) as info:
        k_of_n(n - 1, c)
    assert info.value.min_n == n


def test_beta_examples(fix_a, fix_c):
    assert beta(fix_c, 1) == pytest.approx(math.sqrt(1 / 3), abs=1e-12)
    assert beta(fix_a, 1) == 0.5
    assert beta(fix_a, 2) == 0.0
    assert beta_prime(fix_a, 2) == beta(fix_a, 1)
    with pytest.raises(ValueError):
        beta(fix_a, 0)
    with pytest.raises(ValueError):
        beta_prime(fix_a, 1)


def test_oliveira_g_examples():
    g = oliveira_g(10**4, 2.0, 1.0)
    assert g.value == pytest.approx(0.42052174158055456, abs=1e-12)
    assert g.applicable and g.claim_regime
    assert oliveira_g(10**4, 0.0, 1.0).value == 0.0
    assert oliveira_g(10**5, math.sqrt(44), 1.0).value <= 0.5
    assert not oliveira_g(100, 10.0, 1.0).applicable


@pytest.mark.parametrize("c", [0.5, 1, 2])
def test_claim_regime_forces_small_g(c):
    for n in LOG_GRID:
        kmax = math.floor(claim_regime_limit(n, c))
        for k in {1, kmax // 2, kmax}:
            if 1 <= k <= kmax:
                assert oliveira_g(n, math.sqrt(2 * k), c).value <= 0.5 + 1e-12


@pytest.mark.parametrize("c", [0.5, 1, 2])
def test_k_of_n_inside_claim_regime(c):
    for n in LOG_GRID:
        try:
            k = k_of_n(n, c)
        except DegenerateKError:
            continue
        assert k <= claim_regime_limit(n, c)


def test_extreme_singular_values_examples():
    s = math.sqrt(2)
    assert extreme_singular_values([[s], [0.0]]) == pytest.approx((s, s), rel=1e-12)
    assert extreme_singular_values(np.eye(3)) == pytest.approx((1.0, 1.0))
    assert extreme_singular_values([[0.0], [1 / s]]) == pytest.approx((1 / s, 1 / s), rel=1e-12)


def test_basic_certificate_examples():
    assert basic_certificate(0.5, 2.0, math.sqrt(0.5)) == pytest.approx(0.5, abs=1e-15)
    assert basic_certificate(0.3, 1.0, 0.0) == pytest.approx(0.09)
    assert basic_certificate(0.3, 0.0, 1.0) == math.inf
    base = basic_certificate(0.0, 3.0, 1.0)
    assert basic_certificate(0.0, 3.0, 2.0) == pytest.approx(4 * base)


def test_check_claims_examples(fix_a):
    model = DiscreteDiagonalModel((1.0, 0.5, 0.0))
    assert check_claims(2, 2, model, 2.0, 0.0) == (True, True)
    assert check_claims(2, 2, model, 0.0, 0.0)[1] is False
    # threshold n * 3 beta'^2 / 2 = 0.75
    assert check_claims(2, 2, model, 2.0, math.sqrt(0.75))[0] is True
    assert check_claims(2, 2, model, 2.0, math.sqrt(0.76))[0] is False
    with pytest.raises(ValueError):
        check_claims(2, 1, fix_a, 2.0, 0.0)


def test_theorem_rhs_examples(fix_a, fix_b):
    assert theorem_rhs(fix_a, 2) == pytest.approx(0.5)
    assert theorem_rhs(fix_b, 2) == pytest.approx(2 * (BASEL - 1), abs=1e-12)
    assert theorem_rhs(DiscreteDiagonalModel((1.0, 0.5)), 4) == 0.0
    with pytest.raises(ValueError):
        theorem_rhs(fix_b, 3)
    with pytest.raises(ValueError):
        theorem_rhs(fix_b, 0)


def test_theorem_rhs_against_beta(fix_b, fix_c):
    # stated bound (4/k) T(k/2) is 2 beta'^2; the claims deliver 4 beta'^2
    for model in (fix_b, fix_c, FourierSobolevModel(1.7)):
        for k in range(2, 201, 2):
            assert theorem_rhs(model, k) == pytest.approx(2 * beta(model, k // 2) ** 2, abs=1e-12)
            assert proof_bound(model, k) == pytest.approx(4 * beta(model, k // 2) ** 2, abs=1e-12)


@pytest.mark.parametrize("model", [FourierSobolevModel(1.0), FourierSobolevModel(0.6),
                                   DiscreteDiagonalModel(tuple(2.0 ** -j for j in range(80))),
                                   DiscreteDiagonalModel(tuple(1 / (j + 1) for j in range(300)))])
def test_beta_chain(model):
    for k in range(2, 201):
        a2k, ak = model.approx_number(2 * k), model.approx_number(k)
        b, bp = beta(model, k), beta_prime(model, k)
        assert a2k <= b + 1e-12
        assert ak <= bp + 1e-12
        assert b <= bp + 1e-12


def test_corrected_smax_bounds():
    A = np.random.default_rng(0).standard_normal((40, 5))
    B = np.random.default_rng(1).standard_normal((40, 3))
    full = np.linalg.norm(np.hstack([A, B]), 2)
    bound = corrected_smax(np.linalg.norm(A, 2), np.linalg.norm(B, "fro"))
    assert full <= bound <= np.linalg.norm(A, 2) + np.linalg.norm(B, "fro")


def test_certify_fix_a(fix_a, fix_a_samples):
    cert = certify(fix_a, fix_a_samples, 1, 1.0, J=2)
    assert cert.smin_G_sq == pytest.approx(2.0, abs=1e-12)
    assert cert.smax_Gamma**2 == pytest.approx(0.5, abs=1e-12)
    assert cert.cert_eq2 == pytest.approx(0.5, abs=1e-12)
    assert cert.claim1_pass is None and cert.theorem_rhs is None


@given(st.integers(0, 2**32 - 1))
def test_certificate_dominates_worst_case(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 17))
    model = random_discrete_model(rng, m)
    k = int(rng.integers(1, m // 2 + 1))
    s = draw_samples(SamplingDensity(model, k), 20 * k, master_seed=seed)
    cert = certify(model, s, k, 1.0, J=m)
    wc, exact = worstcase_error(model, s, k, m)
    assert exact
    if math.isfinite(wc):
        assert wc**2 <= cert.cert_eq2 + 1e-9
    assert cert.cert_eq2 >= model.approx_number(k) ** 2
