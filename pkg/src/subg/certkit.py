"""Certificate types for the five equivalent subgaussian characterizations.

A :class:`Certificate` records one inequality about a random variable ``X``:

=====================  ==============================================
kind                   asserted inequality (sigma^2 = ``var_proxy``)
=====================  ==============================================
``TWO_SIDED_TAIL``     P[|X| >= l*sigma] <= rho * exp(-l^2/2), l >= 0
``EVEN_MOMENTS``       E[X^(2k)] <= rho * sigma^(2k) * k!,  k >= 1
``PSI_BOUND``          E[exp(X^2/sigma^2)] <= rho
``MGF``                E[exp(l*X)] <= rho * exp(sigma^2 l^2 / 2)
``ONE_SIDED_TAIL``     max(P[X >= l*sigma], P[X <= -l*sigma]) <= rho * exp(-l^2/2)
=====================  ==============================================

The prefactor is stored as ``log_prefactor = ln(rho)`` and the scale as the
variance proxy ``sigma^2``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError, NonFiniteError

__all__ = [
    "CertKind",
    "Certificate",
    "SignConstraint",
    "VariableContext",
    "validate",
    "prefactor",
    "min_log_prefactor",
    "OVERFLOW_LOG",
]

# exp() overflows double precision just above this
OVERFLOW_LOG = 709.78


class CertKind(enum.IntEnum):
    TWO_SIDED_TAIL = 1
    EVEN_MOMENTS = 2
    PSI_BOUND = 3
    MGF = 4
    ONE_SIDED_TAIL = 5

    @property
    def code(self) -> str:
        return _KIND_CODES[self]

    @classmethod
    def from_code(cls, code: str) -> "CertKind":
        try:
            return _CODE_KINDS[code]
        except KeyError:
            raise DomainError(
                f"unknown certificate kind {code!r}; expected one of {sorted(_CODE_KINDS)}"
            ) from None


_KIND_CODES = {
    CertKind.TWO_SIDED_TAIL: "tail2",
    CertKind.EVEN_MOMENTS: "moments",
    CertKind.PSI_BOUND: "psi",
    CertKind.MGF: "mgf",
    CertKind.ONE_SIDED_TAIL: "tail1",
}
_CODE_KINDS = {v: k for k, v in _KIND_CODES.items()}


class SignConstraint(enum.Enum):
    """Whether ``X`` is known to be one-signed (P[X>=0]=1 or P[X<=0]=1)."""

    UNCONSTRAINED = "unconstrained"
    ONE_SIGNED = "one-signed"


@dataclass(frozen=True)
class VariableContext:
    sign: SignConstraint = SignConstraint.UNCONSTRAINED
    # declared by the caller, never inferred
    mean_is_zero: bool = False


# smallest admissible ln(rho) per kind
_MIN_LOG = {
    CertKind.TWO_SIDED_TAIL: 0.0,
    CertKind.EVEN_MOMENTS: -math.inf,
    CertKind.PSI_BOUND: 0.0,
    CertKind.MGF: 0.0,
    CertKind.ONE_SIDED_TAIL: math.log(0.5),
}
_MIN_TEXT = {
    CertKind.TWO_SIDED_TAIL: "rho >= 1",
    CertKind.EVEN_MOMENTS: "rho >= 0",
    CertKind.PSI_BOUND: "rho >= 1",
    CertKind.MGF: "rho >= 1",
    CertKind.ONE_SIDED_TAIL: "rho >= 1/2",
}


def min_log_prefactor(kind: CertKind) -> float:
    return _MIN_LOG[kind]


@dataclass(frozen=True)
class Certificate:
    """An explicit (variance proxy, prefactor) certificate of a given kind.

    Construction does not validate; call :func:`validate` (every library
    operation validates its inputs and outputs).
    """

    kind: CertKind
    var_proxy: float
    log_prefactor: float = 0.0

    @classmethod
    def from_rho(cls, kind: CertKind, var_proxy: float, rho: float) -> "Certificate":
        if rho < 0 or math.isnan(rho):
            raise DomainError(f"prefactor must be non-negative, got {rho!r}")
        log_rho = math.log(rho) if rho > 0 else -math.inf
        return cls(CertKind(kind), float(var_proxy), log_rho)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.var_proxy)

    @property
    def rho(self) -> float:
        return prefactor(self)[0]

    def to_json(self) -> dict:
        # rho = 0 (ln rho = -inf) has no JSON number; it is written as null
        log_rho = None if self.log_prefactor == -math.inf else self.log_prefactor
        return {"kind": self.kind.code, "sigma_sq": self.var_proxy, "log_rho": log_rho}

    @classmethod
    def from_json(cls, obj: dict) -> "Certificate":
        log_rho = obj["log_rho"]
        log_rho = -math.inf if log_rho is None else float(log_rho)
        return validate(cls(CertKind.from_code(obj["kind"]), float(obj["sigma_sq"]), log_rho))

    def __str__(self) -> str:
        return f"{self.kind.name}(sigma^2={self.var_proxy:.6g}, rho={self.rho:.6g})"


def validate(cert: Certificate) -> Certificate:
    """Return ``cert`` unchanged if it satisfies its kind's domain, else raise."""
    kind = CertKind(cert.kind)
    v, lr = cert.var_proxy, cert.log_prefactor
    if not math.isfinite(v):
        raise NonFiniteError(f"{kind.name} variance proxy must be finite, got {v!r}")
    if v <= 0:
        raise DomainError(f"{kind.name} requires sigma^2 > 0, got {v!r}")
    if math.isnan(lr) or lr == math.inf:
        raise NonFiniteError(f"{kind.name} log-prefactor must not be NaN or +inf, got {lr!r}")
    if lr < _MIN_LOG[kind]:
        raise DomainError(f"{kind.name} requires {_MIN_TEXT[kind]}, got ln rho = {lr!r}")
    return cert


def prefactor(cert: Certificate) -> tuple[float, bool]:
    """Return ``(rho, overflowed)``; ``rho`` is ``inf`` when ``overflowed``."""
    lr = cert.log_prefactor
    if lr > OVERFLOW_LOG:
        return math.inf, True
    return math.exp(lr), False
