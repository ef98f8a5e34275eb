import math
import random

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subg import oracle
from subg.certkit import CertKind, Certificate
from subg.deviation import MartingaleSpec, martingale_norm_bound
from subg.errors import DomainError, Diverges
from subg.oracle import (
    CenteredBernoulli,
    Discrete,
    Gaussian,
    MartingaleSimConfig,
    Method,
    Rademacher,
    Uniform,
    analytic_mgf,
    analytic_psi,
    even_moment,
    psi_quadrature,
    simulate_martingale,
    upper_incomplete_gamma_int,
    verify_certificate,
)

K = CertKind
MODELS = [
    Gaussian(0.0, 1.0),
    Gaussian(0.7, 2.0),
    Rademacher(1.0),
    Rademacher(0.3),
    Uniform(-1.0, 1.0),
    Uniform(0.5, 2.0),
    CenteredBernoulli(0.2, 3.0),
    Discrete((-2.0, 0.0, 1.0), (0.25, 0.25, 0.5)),
]


def mgf(v, rho=1.0):
    return Certificate.from_rho(K.MGF, v, rho)


# --- closed forms ---------------------------------------------------------------

def test_mgf_reference_values():
    assert analytic_mgf(Gaussian(0, 1), 2.0) == pytest.approx(math.exp(2), rel=1e-15)
    assert analytic_mgf(Rademacher(1), 1.0) == pytest.approx(math.cosh(1), rel=1e-15)
    assert analytic_mgf(Rademacher(1), 1.0) <= math.exp(0.5)
    assert analytic_mgf(Uniform(-1, 1), 0.0) == 1.0
    assert analytic_mgf(Uniform(-1, 1), 2.0) == pytest.approx(math.sinh(2) / 2, rel=1e-14)
    p, c = 0.2, 3.0
    want = p * math.exp(c * (1 - p) * 0.4) + (1 - p) * math.exp(-c * p * 0.4)
    assert analytic_mgf(CenteredBernoulli(p, c), 0.4) == pytest.approx(want, rel=1e-14)


@pytest.mark.parametrize("model", MODELS, ids=repr)
def test_mgf_at_zero_is_exactly_one(model):
    assert analytic_mgf(model, 0.0) == 1.0


def test_psi_reference_values():
    assert analytic_psi(Gaussian(0, 1), 4.0) == pytest.approx(math.sqrt(2), rel=1e-15)
    with pytest.raises(Diverges):
        analytic_psi(Gaussian(0, 1), 2.0)
    assert analytic_psi(Rademacher(1), 1.0) == pytest.approx(math.e, rel=1e-15)
    with pytest.raises(DomainError):
        analytic_psi(Rademacher(1), 0.0)


def test_even_moment_reference_values():
    assert even_moment(Gaussian(0, 1), 2) == pytest.approx(3.0, rel=1e-14)
    assert even_moment(Rademacher(1), 7) == 1.0
    assert even_moment(Uniform(-1, 1), 1) == pytest.approx(1 / 3, rel=1e-15)
    assert even_moment(Gaussian(1.0, 1.0), 1) == pytest.approx(2.0, rel=1e-14)
    assert even_moment(Gaussian(1.0, 1.0), 2) == pytest.approx(10.0, rel=1e-14)
    with pytest.raises(DomainError):
        even_moment(Gaussian(0, 1), 0)


@pytest.mark.parametrize("model", MODELS, ids=repr)
def test_moments_and_mgf_match_high_precision_quadrature(model):
    mpmath.mp.dps = 30
    if isinstance(model, Gaussian):
        mu, sd = model.mu, model.sd

        def expect(f):
            dens = lambda x: mpmath.npdf(x, mu, sd)  # noqa: E731
            return mpmath.quad(lambda x: f(x) * dens(x), [-mpmath.inf, mu, mpmath.inf])
    elif isinstance(model, Uniform):
        def expect(f):
            return mpmath.quad(f, [model.a, model.b]) / (model.b - model.a)
    else:
        v, p = model.atoms()

        def expect(f):
            return mpmath.fsum(pi * f(mpmath.mpf(vi)) for vi, pi in zip(v, p))

    for k in (1, 2, 5):
        assert model.even_moment(k) == pytest.approx(float(expect(lambda x: x ** (2 * k))), rel=1e-10)
    for lam in (-1.5, 0.3, 2.0):
        assert model.mgf(lam) == pytest.approx(float(expect(lambda x: mpmath.exp(lam * x))), rel=1e-10)


@pytest.mark.parametrize("mu,sd,s3", [(0, 1, 4), (0, 1, 2.5), (0.5, 1, 4), (-1, 0.5, 1), (0, 2, 100)])
def test_psi_quadrature_matches_gaussian_closed_form(mu, sd, s3):
    g = Gaussian(mu, sd)
    assert psi_quadrature(g, s3) == pytest.approx(analytic_psi(g, s3), rel=1e-10)


def test_uniform_psi_by_quadrature():
    # E exp(X^2) for U(-1, 1) equals int_0^1 exp(x^2) dx
    mpmath.mp.dps = 30
    want = float(mpmath.quad(lambda x: mpmath.exp(x * x), [0, 1]))
    assert analytic_psi(Uniform(-1, 1), 1.0) == pytest.approx(want, rel=1e-12)
    # small sigma3: log path stays finite
    assert math.isfinite(Uniform(-1, 1).log_psi(1e-3))


def test_exact_tails():
    g = Gaussian(0, 1)
    assert g.tail_abs(1.0) == pytest.approx(math.erfc(1 / math.sqrt(2)), rel=1e-15)
    assert Uniform(-1, 1).tail_upper(0.5) == 0.25
    assert Rademacher(1).tail_abs(1.0) == 1.0 and Rademacher(1).tail_abs(1.0 + 1e-12) == 0.0


def test_incomplete_gamma():
    assert upper_incomplete_gamma_int(1, 0.0) == 1.0
    assert upper_incomplete_gamma_int(3, 0.0) == 2.0
    assert upper_incomplete_gamma_int(2, 1.0) == pytest.approx(2 / math.e, rel=1e-15)
    assert upper_incomplete_gamma_int(172, 1.0) == math.inf
    mpmath.mp.dps = 30
    for kp1 in (1, 4, 20):
        for a in (0.1, 2.0, 15.0):
            assert upper_incomplete_gamma_int(kp1, a) == pytest.approx(float(mpmath.gammainc(kp1, a)), rel=1e-12)
    with pytest.raises(DomainError):
        upper_incomplete_gamma_int(0, 1.0)


def test_model_validation():
    for bad in [lambda: Gaussian(0, 0), lambda: Uniform(1, 1), lambda: Rademacher(-1),
                lambda: CenteredBernoulli(1.0), lambda: Discrete((1.0,), (0.5,))]:
        with pytest.raises(DomainError):
            bad()


def test_models_are_hashable_values():
    assert Gaussian(0, 1) == Gaussian(0.0, 1.0)
    assert len({Gaussian(0, 1), Gaussian(0, 1), Rademacher(1)}) == 2


def test_model_transforms():
    assert Gaussian(0, 1).shift(2).mean == 2.0
    assert Gaussian(1, 1).scale(-2) == Gaussian(-2, 2)
    assert Gaussian(0, 1).self_sum(2) == Gaussian(0, math.sqrt(2))
    two = Rademacher(1).self_sum(2)
    assert two.values == (-2.0, 0.0, 2.0) and two.probs == (0.25, 0.5, 0.25)
    assert Uniform(-1, 1).scale(-3) == Uniform(-3, 3)
    with pytest.raises(NotImplementedError):
        Uniform(-1, 1).self_sum(2)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**63 - 1), st.integers(1, 200_000))
def test_sampling_is_deterministic(seed, n):
    model = Gaussian(0, 1)
    assert np.array_equal(model.sample(n, seed), model.sample(n, seed))


def test_sampling_independent_of_thread_count(monkeypatch):
    model = Uniform(-1, 1)
    monkeypatch.setenv("SUBG_THREADS", "1")
    a = model.sample(300_000, 9)
    monkeypatch.setenv("SUBG_THREADS", "8")
    b = model.sample(300_000, 9)
    assert np.array_equal(a, b)


def test_sample_moments_are_plausible():
    for model in MODELS:
        x = model.sample(200_000, 3)
        se = math.sqrt(model.even_moment(1) / len(x))
        assert abs(x.mean() - model.mean) < 5 * se


# --- verification ---------------------------------------------------------------

def test_verify_examples():
    g = Gaussian(0, 1)
    assert verify_certificate(g, mgf(1)).violations == 0
    rep = verify_certificate(g, mgf(0.81))
    assert rep.violations >= 1
    assert rep.checks[0].violated and rep.checks[0].probe == pytest.approx(-6 / 0.9)
    assert verify_certificate(Rademacher(1), mgf(1)).violations == 0


def test_verify_each_kind_on_exact_certificates():
    g = Gaussian(0, 1)
    cases = [
        Certificate.from_rho(K.PSI_BOUND, 4.0, math.sqrt(2)),
        Certificate.from_rho(K.EVEN_MOMENTS, 2.0, 1.0),  # E Z^2k = (2k-1)!! <= 2^k k!
        Certificate.from_rho(K.TWO_SIDED_TAIL, 1.0, 2.0),
        Certificate.from_rho(K.ONE_SIDED_TAIL, 1.0, 1.0),
    ]
    for c in cases:
        rep = verify_certificate(g, c, probes=31, mc_samples=200_000, seed=4)
        assert rep.violations == 0, c


def test_verify_catches_false_certificates():
    g = Gaussian(0, 1)
    false = [
        Certificate.from_rho(K.PSI_BOUND, 4.0, 1.3),
        Certificate.from_rho(K.PSI_BOUND, 2.0, 100.0),  # diverges
        Certificate.from_rho(K.EVEN_MOMENTS, 1.0, 1.0),  # E Z^4 = 3 > 2
        Certificate.from_rho(K.TWO_SIDED_TAIL, 0.5, 1.5),
        Certificate.from_rho(K.ONE_SIDED_TAIL, 0.5, 0.6),
    ]
    for c in false:
        assert verify_certificate(g, c, probes=31, mc_samples=100_000).violations > 0, c


def test_monte_carlo_alone_detects_a_clear_violation():
    g = Gaussian(0, 1)
    rep = verify_certificate(g, Certificate.from_rho(K.TWO_SIDED_TAIL, 0.5, 1.5), probes=21, mc_samples=100_000)
    mc = [c for c in rep.checks if c.method is Method.MONTE_CARLO]
    assert rep.method is Method.MONTE_CARLO and any(c.violated for c in mc)
    assert all(c.slack_se == oracle.MC_SLACK_SE for c in mc)


def test_verification_report_json():
    rep = verify_certificate(Uniform(-1, 1), Certificate(K.PSI_BOUND, 1.0, 0.4))
    obj = rep.to_json()
    assert obj["method"] == "quadrature" and obj["violations"] == rep.violations
    assert len(obj["checks"]) == 1


def test_moment_check_with_zero_prefactor():
    c = Certificate.from_rho(K.EVEN_MOMENTS, 1.0, 0.0)
    assert verify_certificate(Rademacher(1), c, probes=5).violations == 5


@pytest.mark.parametrize("model", [m for m in MODELS[:5] if m.mean == 0], ids=repr)
def test_tightest_source_certificates_verify(model):
    v = model.sd**2 if isinstance(model, Gaussian) else max(abs(x) for x in
                                                            (getattr(model, "a", 0), getattr(model, "b", 0),
                                                             getattr(model, "c", 0))) ** 2
    assert verify_certificate(model, mgf(v), probes=101).violations == 0


def test_false_variance_proxy_is_caught_for_each_model():
    for model, v in [(Gaussian(0, 1), 0.9), (Rademacher(1), 0.9), (Uniform(-1, 1), 0.3)]:
        assert verify_certificate(model, mgf(v), probes=101).violations > 0


# --- martingale simulation ------------------------------------------------------

def test_degenerate_single_step():
    cfg = MartingaleSimConfig(MartingaleSpec(1, (1.0,), "I"), trials=1000, seed=0)
    res = simulate_martingale(cfg, [0.0, 0.5, 1.0, 1.0 + 1e-9, 2.0])
    assert res.norm_freq == (1.0, 1.0, 1.0, 0.0, 0.0)


def test_simulation_under_bound_and_zero_threshold():
    cfg = MartingaleSimConfig(MartingaleSpec(2, (1.0,) * 100, "II"), "rademacher", 20_000, seed=1)
    res = simulate_martingale(cfg, [0.0, 2.0])
    assert res.norm_freq[0] == 1.0
    bound = martingale_norm_bound(cfg.spec, 2.0).raw_bound
    assert bound == pytest.approx(3 * math.exp(-4 / 3))
    assert res.norm_freq[1] <= bound + 4 * res.norm_stderr[1]


def test_simulation_reproducible_across_threads(monkeypatch):
    cfg = MartingaleSimConfig(MartingaleSpec(3, (0.5, 2.0) * 10, "III"), "gaussian", 10_000, seed=77)
    monkeypatch.setenv("SUBG_THREADS", "1")
    a = simulate_martingale(cfg, [0, 0.5, 1, 2])
    monkeypatch.setenv("SUBG_THREADS", "0")
    b = simulate_martingale(cfg, [0, 0.5, 1, 2])
    assert a == b
    assert a.rows()[1] == (0.5, a.norm_freq[1], a.norm_stderr[1])


def test_gaussian_coordinates_calibrated():
    # E exp(phi_j^2 / sigma_j^2) = 1 / sqrt(1 - 2c) = e for the gaussian generator
    assert 1 / math.sqrt(1 - 2 * oracle._GAUSS_C) == pytest.approx(math.e, rel=1e-15)


def test_simulation_rejects_bad_grid():
    cfg = MartingaleSimConfig(MartingaleSpec(1, (1.0,), "I"), trials=10)
    with pytest.raises(DomainError):
        simulate_martingale(cfg, [])
    with pytest.raises(DomainError):
        simulate_martingale(cfg, [-1.0])
    with pytest.raises(DomainError):
        MartingaleSimConfig(MartingaleSpec(1, (1.0,), "I"), trials=0)


def test_short_soundness_sample():
    # quick version of the acceptance run, different seed
    from _chains import random_chain

    rng = random.Random(99)
    for _ in range(40):
        for step in random_chain(rng):
            rep = verify_certificate(step.model, step.cert, probes=41, mc_samples=100_000, seed=5)
            assert rep.violations == 0, (step.op, step.cert, step.model)
