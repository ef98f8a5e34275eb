import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from subg.certkit import CertKind, Certificate
from subg.deviation import (
    Assumption,
    MartingaleSpec,
    Side,
    chernoff_tail,
    gaussian_tail_sandwich,
    martingale_direction_bound,
    martingale_norm_bound,
    tail_curve,
)
from subg.errors import DomainError, EmptyInputError, NegativeInput, ParamRegimeMismatch


def mgf(v, rho=1.0):
    return Certificate.from_rho(CertKind.MGF, v, rho)


def normal_tail(x):
    mpmath.mp.dps = 40
    return float(mpmath.erfc(mpmath.mpf(x) / mpmath.sqrt(2)) / 2)


# --- Gaussian sandwich ----------------------------------------------------------

def test_sandwich_reference_points():
    lo, up = gaussian_tail_sandwich(0.0)
    assert up == 0.5
    assert lo == pytest.approx(math.sqrt(2 / math.pi) / 2, rel=1e-15)
    lo, up = gaussian_tail_sandwich(1.0)
    assert lo == pytest.approx(0.14955, abs=5e-6)
    assert up == pytest.approx(0.16785, abs=5e-6)
    assert lo < normal_tail(1.0) < up
    assert gaussian_tail_sandwich(10.0)[1] < 1e-22


def test_sandwich_brackets_erfc_and_decreases():
    xs = np.linspace(0, 10, 1001)
    prev = (1.0, 1.0)
    for x in xs:
        lo, up = gaussian_tail_sandwich(float(x))
        q = normal_tail(float(x))
        assert lo < q <= up
        assert lo < up and 0 < lo and up <= 0.5
        assert lo <= prev[0] and up <= prev[1]
        prev = (lo, up)


@pytest.mark.parametrize("x", [-1e-9, -3.0, math.nan, math.inf])
def test_sandwich_rejects_bad_input(x):
    with pytest.raises(NegativeInput):
        gaussian_tail_sandwich(x)


# --- Chernoff -------------------------------------------------------------------

def test_chernoff_examples():
    r = chernoff_tail(mgf(1), 0.0, Side.UPPER)
    assert (r.raw_bound, r.clamped) == (1.0, 1.0)
    assert chernoff_tail(mgf(1, 2), 2.0).raw_bound == pytest.approx(2 * math.exp(-2), rel=1e-15)
    both = chernoff_tail(mgf(1), 3.0, Side.BOTH)
    assert both.raw_bound == pytest.approx(2 * math.exp(-4.5), rel=1e-15)
    assert 2 * normal_tail(3.0) <= both.raw_bound
    assert chernoff_tail(mgf(1), 1.0, Side.LOWER).raw_bound == chernoff_tail(mgf(1), 1.0).raw_bound


def test_chernoff_needs_mgf():
    with pytest.raises(DomainError):
        chernoff_tail(Certificate(CertKind.PSI_BOUND, 1.0, 0.0), 1.0)
    with pytest.raises(DomainError):
        chernoff_tail(mgf(1), -1.0)


@given(st.floats(0.01, 100), st.floats(0, 10))
def test_chernoff_monotone_and_log_concave(v, lr):
    c = Certificate(CertKind.MGF, v, lr)
    ts = np.linspace(0, 10 * math.sqrt(v), 64)
    logs = np.array([chernoff_tail(c, float(t)).log_raw for t in ts])
    assert np.all(np.diff(logs) <= 1e-12)
    assert np.all(np.diff(logs, 2) <= 1e-9 * max(1.0, np.abs(logs).max()))
    clamped = [chernoff_tail(c, float(t)).clamped for t in ts]
    assert all(0.0 <= x <= 1.0 for x in clamped)


# --- martingale bounds ----------------------------------------------------------

def spec(assumption, d=1, n=1):
    return MartingaleSpec(d, (1.0,) * n, assumption)


def test_norm_bound_examples():
    for d in (1, 4, 100):
        assert martingale_norm_bound(spec("I", d), 2.0).raw_bound == pytest.approx(2 * math.exp(-1), rel=1e-14)
    assert martingale_norm_bound(spec("II", 3), 3.0).raw_bound == pytest.approx(4 * math.exp(-3), rel=1e-14)
    r = martingale_norm_bound(spec("III", 2), 3.0, eps=1 / 3)
    assert r.raw_bound == pytest.approx(49 * math.exp(-4 / 3), rel=1e-14)
    assert r.clamped == 1.0 and r.params["eps"] == pytest.approx(1 / 3)
    r = martingale_norm_bound(spec("III", 1), 0.0)
    assert r.raw_bound == pytest.approx(5.0, rel=1e-15) and r.clamped == 1.0


def test_defaults_match_parametric_forms():
    for lam in (0.0, 0.5, 2.0, 7.0):
        a = martingale_norm_bound(spec("I", 3), lam)
        b = martingale_norm_bound(spec("I", 3), lam, x=0.75)
        assert a.log_raw == b.log_raw
        a = martingale_norm_bound(spec("III", 3), lam)
        b = martingale_norm_bound(spec("III", 3), lam, eps=0.5)
        assert a.log_raw == b.log_raw and a.log_raw == pytest.approx(3 * math.log(5) - lam**2 / 12)


def test_covering_form_for_eps_one_third():
    # (1 + 2/eps)^d exp(-(1-eps)^2 lam^2 / 3) at eps = 1/3
    for d in (1, 2, 5):
        for lam in (1.0, 3.0, 6.0):
            r = martingale_norm_bound(spec("III", d), lam, eps=1 / 3)
            assert r.log_raw == pytest.approx(d * math.log(7) - 4 * lam * lam / 27, rel=1e-14)


def test_parameter_regime_mismatch():
    with pytest.raises(ParamRegimeMismatch):
        martingale_norm_bound(spec("I"), 1.0, eps=0.5)
    with pytest.raises(ParamRegimeMismatch):
        martingale_norm_bound(spec("II"), 1.0, eps=0.5)
    with pytest.raises(ParamRegimeMismatch):
        martingale_norm_bound(spec("III"), 1.0, x=0.5)
    with pytest.raises(ParamRegimeMismatch):
        martingale_norm_bound(spec("II"), 1.0, x=0.5)
    with pytest.raises(DomainError):
        martingale_norm_bound(spec("III"), 1.0, eps=1.0)


def test_huge_dimension_stays_in_log_scale():
    r = martingale_norm_bound(spec("III", 10**6), 10.0)
    assert math.isfinite(r.log_raw) and r.raw_bound == math.inf and r.clamped == 1.0
    r = martingale_norm_bound(spec("II", 10**6), 100.0)
    assert r.log_raw == pytest.approx(math.log(10**6 + 1) - 10**4 / 3)


def test_spec_validation():
    for bad in [(0, (1.0,), "I"), (2, (), "I"), (2, (1.0, -1.0), "II"), (1.5, (1.0,), "I")]:
        with pytest.raises(DomainError):
            MartingaleSpec(*bad)
    with pytest.raises(ValueError):
        MartingaleSpec(1, (1.0,), "IV")
    s = MartingaleSpec(2, [1.0, 3.0], Assumption.II)
    assert s.n == 2 and s.total_var_proxy == 4.0


def test_direction_bound():
    assert martingale_direction_bound(0.0).raw_bound == 1.0
    assert martingale_direction_bound(3.0).raw_bound == pytest.approx(math.exp(-3), rel=1e-15)
    assert martingale_direction_bound(math.sqrt(3)).raw_bound == pytest.approx(math.exp(-1), rel=1e-14)


# --- curves ---------------------------------------------------------------------

def test_tail_curves():
    c = tail_curve(mgf(1), [0, 1, 2])
    assert [r.clamped for r in c] == [1.0, pytest.approx(math.exp(-0.5)), pytest.approx(math.exp(-2))]
    assert [r.clamped for r in tail_curve(mgf(1), [0])] == [1.0]
    c = tail_curve(spec("II", 1), [0, 3])
    assert [r.clamped for r in c] == [1.0, pytest.approx(2 * math.exp(-3))]


def test_tail_curve_preconditions():
    with pytest.raises(EmptyInputError):
        tail_curve(mgf(1), [])
    with pytest.raises(DomainError):
        tail_curve(mgf(1), [2, 1])


@given(st.lists(st.floats(0, 20), min_size=1, max_size=30))
def test_tail_curve_non_increasing(ts):
    ts = sorted(ts)
    for src in (mgf(2.0, 3.0), spec("III", 3)):
        vals = [r.clamped for r in tail_curve(src, ts)]
        assert all(b <= a for a, b in zip(vals, vals[1:]))
