import math

import pytest
from hypothesis import given, strategies as st

from subg.certkit import (
    CertKind,
    Certificate,
    SignConstraint,
    VariableContext,
    min_log_prefactor,
    prefactor,
    validate,
)
from subg.errors import DomainError, NonFiniteError

K = CertKind
BOUNDARY_RHO = {K.TWO_SIDED_TAIL: 1.0, K.EVEN_MOMENTS: 0.0, K.PSI_BOUND: 1.0, K.MGF: 1.0, K.ONE_SIDED_TAIL: 0.5}


def test_five_kinds_with_stable_codes():
    assert [k.value for k in CertKind] == [1, 2, 3, 4, 5]
    assert {k.code for k in CertKind} == {"tail2", "moments", "psi", "mgf", "tail1"}
    for k in CertKind:
        assert CertKind.from_code(k.code) is k
    with pytest.raises(DomainError):
        CertKind.from_code("gauss")


def test_validate_examples():
    c = Certificate(K.MGF, 1.0, 0.0)
    assert validate(c) is c
    with pytest.raises(DomainError, match="rho >= 1/2"):
        validate(Certificate(K.ONE_SIDED_TAIL, 1.0, math.log(0.4)))
    validate(Certificate.from_rho(K.EVEN_MOMENTS, 1.0, 0.0))


@pytest.mark.parametrize("kind", list(CertKind))
def test_boundary_accepted_and_just_below_rejected(kind):
    rho = BOUNDARY_RHO[kind]
    validate(Certificate.from_rho(kind, 1.0, rho))
    with pytest.raises(DomainError):
        validate(Certificate.from_rho(kind, 1.0, rho - 1e-12))


@pytest.mark.parametrize("v", [math.nan, math.inf])
def test_non_finite_var_proxy(v):
    with pytest.raises(NonFiniteError):
        validate(Certificate(K.MGF, v, 0.0))


@pytest.mark.parametrize("v", [0.0, -1.0])
def test_non_positive_var_proxy(v):
    with pytest.raises(DomainError):
        validate(Certificate(K.MGF, v, 0.0))


def test_nan_or_infinite_log_prefactor():
    with pytest.raises(NonFiniteError):
        validate(Certificate(K.MGF, 1.0, math.nan))
    with pytest.raises(NonFiniteError):
        validate(Certificate(K.MGF, 1.0, math.inf))
    # -inf is only meaningful for even moments
    with pytest.raises(DomainError):
        validate(Certificate(K.MGF, 1.0, -math.inf))


def test_prefactor_and_overflow_flag():
    assert prefactor(Certificate(K.MGF, 1.0, 0.0)) == (1.0, False)
    assert prefactor(Certificate(K.MGF, 1.0, 1.0))[0] == pytest.approx(math.e, rel=1e-15)
    assert prefactor(Certificate(K.MGF, 1.0, 700.0))[1] is False
    assert prefactor(Certificate(K.MGF, 1.0, 1000.0)) == (math.inf, True)


def test_json_round_trip_including_zero_rho():
    zero = Certificate.from_rho(K.EVEN_MOMENTS, 2.0, 0.0)
    obj = zero.to_json()
    assert obj == {"kind": "moments", "sigma_sq": 2.0, "log_rho": None}
    assert Certificate.from_json(obj) == zero
    with pytest.raises(DomainError):
        Certificate.from_json({"kind": "mgf", "sigma_sq": 1.0, "log_rho": -0.5})


def test_value_semantics():
    a = Certificate(K.PSI_BOUND, 0.25, math.log(1.5))
    b = Certificate(K.PSI_BOUND, 0.25, math.log(1.5))
    assert a == b and hash(a) == hash(b)
    with pytest.raises(AttributeError):
        a.var_proxy = 2.0  # frozen
    assert VariableContext().sign is SignConstraint.UNCONSTRAINED
    assert VariableContext().mean_is_zero is False


def _cert(kind, v, excess):
    floor = min_log_prefactor(kind)
    if math.isinf(floor):
        floor = -30.0  # any finite ln rho is legal for even moments
    return Certificate(kind, v, floor + excess)


valid_certs = st.builds(_cert, st.sampled_from(list(CertKind)), st.floats(1e-6, 1e6), st.floats(0, 50))


@given(valid_certs)
def test_validate_idempotent_and_json_round_trip(cert):
    assert validate(validate(cert)) == cert
    assert Certificate.from_json(cert.to_json()) == cert
