"""Transformations of certificates: centering, constant shifts, sums and maxima."""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from ._optimize import grid_golden
from .certkit import CertKind, Certificate, SignConstraint, VariableContext, validate
from .convert import (
    MinTailAt,
    best_convert,
    direct_convert,
    optimize_route,
    regime_kinds,
)
from .errors import DomainError, EmptyInputError, MeanNotZero

__all__ = [
    "CenteringResult",
    "ShiftParams",
    "PsiMode",
    "BoundaryWarning",
    "AUTO",
    "center",
    "centered_var_proxy",
    "center_along",
    "center_via_best_route",
    "shift",
    "recentering_equivalence",
    "sum_dependent",
    "sum_independent",
    "max_of",
    "psi_combine",
]

LN2 = math.log(2.0)
AUTO = "auto"

# breakpoints of the piecewise centering rules
PSI_LOW = 4.0 / 9.0
PSI_HIGH = 16.0 / 9.0
MOMENTS_BREAK = 29.0 / 90.0

SHIFT_X_MAX = 64.0
SHIFT_X_MIN = 1e-12


class BoundaryWarning(UserWarning):
    """A parameter search ended on the boundary of its search interval."""


@dataclass(frozen=True)
class CenteringResult:
    out: Certificate
    branch: str
    route: tuple[CertKind, ...] = ()
    lambdas: tuple[float | None, ...] = ()
    candidates: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def sigma(self) -> float:
        return self.out.sigma


def _psi_ratio(lr: float) -> tuple[float, str]:
    if lr < PSI_LOW:
        return 0.5 + 9.0 / 8.0 * lr, "a-low"
    if lr < PSI_HIGH:
        return 1.5 * math.sqrt(lr), "a-mid"
    return 9.0 / 8.0 * lr, "a-high"


def _moments_ratio(lr: float) -> tuple[float, str]:
    rho = math.exp(lr) if lr > -math.inf else 0.0
    if rho < MOMENTS_BREAK:
        return 29.0 / 45.0, "b-flat"
    d = rho - 19.0 / 90.0
    return 0.5 * (math.sqrt(d * d + 26.0 / 15.0 * rho) + rho + 19.0 / 90.0), "b-surd"


def _tail_ratio(lr: float) -> tuple[float, str]:
    return (8.0 + 7.0 * lr) / 3.0, "c"


def _mgf_ratio(lr: float) -> tuple[float, str]:
    if lr == 0.0:
        # already (sigma, 1); the closed form's limit 9/8 would be worse
        return 1.0, "d-bypass"
    s = math.sqrt(lr) * math.sqrt(lr + 2.0)
    ratio = 9.0 / 8.0 * (1.0 + math.sqrt((lr + 2.0) / lr)) * (lr + 0.5 * math.log1p(lr + s))
    return ratio, "d"


_RATIOS = {
    CertKind.PSI_BOUND: _psi_ratio,
    CertKind.EVEN_MOMENTS: _moments_ratio,
    CertKind.TWO_SIDED_TAIL: _tail_ratio,
    CertKind.MGF: _mgf_ratio,
}


def _one_sided_as_tail(cert: Certificate, sign: SignConstraint) -> Certificate:
    if sign is SignConstraint.ONE_SIGNED:
        return Certificate(CertKind.TWO_SIDED_TAIL, cert.var_proxy, max(cert.log_prefactor, 0.0))
    return direct_convert(cert, CertKind.TWO_SIDED_TAIL)


def centered_var_proxy(kind: CertKind, var_proxy: float, log_prefactor: float) -> tuple[float, str]:
    """Variance proxy of the (sigma, 1) MGF certificate implied for a mean-zero variable."""
    ratio, branch = _RATIOS[CertKind(kind)](log_prefactor)
    return ratio * var_proxy, branch


def center(cert: Certificate, ctx: VariableContext) -> CenteringResult:
    """MGF certificate with prefactor exactly 1 for a mean-zero variable.

    ONE_SIDED_TAIL input is first read as a two-sided tail (prefactor doubled,
    or unchanged for one-signed variables).
    """
    if not ctx.mean_is_zero:
        raise MeanNotZero("centering requires a variable declared mean-zero")
    validate(cert)
    src = cert
    prefix = ""
    if cert.kind is CertKind.ONE_SIDED_TAIL:
        src = _one_sided_as_tail(cert, ctx.sign)
        prefix = "tail1->"
    v, branch = centered_var_proxy(src.kind, src.var_proxy, src.log_prefactor)
    out = validate(Certificate(CertKind.MGF, v, 0.0))
    return CenteringResult(out, prefix + branch, (cert.kind,))


def center_along(
    cert: Certificate,
    ctx: VariableContext,
    route: Sequence[CertKind],
    lambdas: Sequence[float | None],
) -> CenteringResult:
    """Convert along ``route`` with the given per-edge lambdas, then center."""
    if len(route) != len(lambdas):
        raise DomainError("route and lambdas must have equal length")
    current = cert
    for kind, lam in zip(route, lambdas):
        current = direct_convert(current, kind, ctx.sign, lam)
    res = center(current, ctx)
    return CenteringResult(res.out, res.branch, (cert.kind,) + tuple(route), tuple(lambdas))


def center_via_best_route(cert: Certificate, ctx: VariableContext) -> CenteringResult:
    """Smallest centered variance proxy over all intermediate kinds.

    Each candidate converts ``cert`` to some kind ``K`` (best path, lambdas
    tuned for the final centered sigma^2) and applies ``K``'s centering case.
    ``candidates`` maps each kind ``K`` to its result.
    """
    if not ctx.mean_is_zero:
        raise MeanNotZero("centering requires a variable declared mean-zero")
    validate(cert)
    regime = ctx.sign
    candidates: dict[CertKind, CenteringResult] = {}
    for kind in regime_kinds(regime):
        if kind is CertKind.ONE_SIDED_TAIL and cert.kind is not kind:
            continue
        if kind == cert.kind:
            candidates[kind] = center(cert, ctx)
            continue
        ratio = _RATIOS[kind]
        mid, path, _ = optimize_route(cert, kind, regime, lambda v, lr, r=ratio: r(lr)[0] * v)
        res = center(mid, ctx)
        candidates[kind] = CenteringResult(res.out, res.branch, path.kinds, path.lambdas)
    best = min(candidates.values(), key=lambda r: (r.out.var_proxy, len(r.route)))
    return CenteringResult(best.out, best.branch, best.route, best.lambdas, candidates)


# --- constant shift -------------------------------------------------------------

@dataclass(frozen=True)
class ShiftParams:
    """Shift ``X -> X + c``; ``x > 0`` trades sigma^2 growth ``(1+x)`` against prefactor growth."""

    c: float
    x: float | Literal["auto"] = AUTO
    # Chernoff threshold used by the auto search; default 3 sigma
    t: float | None = None

    def __post_init__(self):
        if self.x != AUTO and not (float(self.x) > 0 and math.isfinite(float(self.x))):
            raise DomainError(f"shift parameter x must be positive, got {self.x!r}")


def _shifted(cert: Certificate, c: float, x: float) -> tuple[float, float]:
    v = cert.var_proxy
    return v * (1.0 + x), cert.log_prefactor + c * c / (2.0 * x * v)


def _search_x(objective, grid_points: int = 101) -> float:
    grid = np.linspace(math.log(SHIFT_X_MIN), math.log(SHIFT_X_MAX), grid_points)
    u, _ = grid_golden(lambda u: objective(math.exp(u)), grid)
    x = math.exp(u)
    if x >= SHIFT_X_MAX * (1.0 - 1e-6) or x <= SHIFT_X_MIN * (1.0 + 1e-6):
        warnings.warn(f"shift parameter search hit the boundary at x={x:.6g}", BoundaryWarning,
                      stacklevel=3)
    return x


def shift(cert: Certificate, params: ShiftParams) -> Certificate:
    """MGF certificate of ``X + c`` from an MGF certificate of ``X``."""
    validate(cert)
    if cert.kind is not CertKind.MGF:
        raise DomainError(f"shift needs an MGF certificate, got {cert.kind.name}")
    c = float(params.c)
    if not math.isfinite(c):
        raise DomainError(f"shift constant must be finite, got {c!r}")
    if c == 0.0:
        return cert
    if params.x == AUTO:
        t = 3.0 * cert.sigma if params.t is None else float(params.t)

        def chernoff_log(x):
            v, lr = _shifted(cert, c, x)
            return lr - t * t / (2.0 * v)

        x = _search_x(chernoff_log)
    else:
        x = float(params.x)
    v, lr = _shifted(cert, c, x)
    return validate(Certificate(CertKind.MGF, v, lr))


def recentering_equivalence(
    cert: Certificate,
    mean: float,
    regime: SignConstraint = SignConstraint.UNCONSTRAINED,
    x: float | Literal["auto"] = AUTO,
) -> Certificate:
    """(sigma', 1) MGF certificate of ``X - E[X]`` from any certificate of ``X``.

    Non-MGF input is converted to MGF first, tuned for the tail at three of its
    own sigmas.  With ``x`` on auto the shift parameter minimizes the final
    centered variance proxy.
    """
    validate(cert)
    if cert.kind is CertKind.MGF:
        mgf = cert
    else:
        mgf, _ = best_convert(cert, CertKind.MGF, regime, MinTailAt(3.0 * cert.sigma))
    ctx = VariableContext(SignConstraint.UNCONSTRAINED, mean_is_zero=True)
    c = -float(mean)
    if c == 0.0:
        return center(mgf, ctx).out
    if x == AUTO:
        def centered(xv):
            v, lr = _shifted(mgf, c, xv)
            return centered_var_proxy(CertKind.MGF, v, lr)[0]

        x = _search_x(centered)
    shifted = shift(mgf, ShiftParams(c, float(x)))
    return center(shifted, ctx).out


# --- closure --------------------------------------------------------------------

def _check_all(certs: Sequence[Certificate], kind: CertKind, op: str) -> list[Certificate]:
    certs = list(certs)
    if not certs:
        raise EmptyInputError(f"{op} needs at least one certificate")
    for c in certs:
        validate(c)
        if c.kind is not kind:
            raise DomainError(f"{op} needs {kind.name} certificates, got {c.kind.name}")
    return certs


def _weighted_log(weights: list[float], logs: list[float]) -> float:
    return math.fsum(w * lr for w, lr in zip(weights, logs)) / math.fsum(weights)


def _logsumexp(logs: list[float]) -> float:
    top = max(logs)
    return top + math.log(math.fsum(math.exp(lr - top) for lr in logs))


def sum_dependent(certs: Sequence[Certificate]) -> Certificate:
    """Sum of arbitrarily dependent variables: sigmas add, ln rho is sigma-weighted."""
    certs = _check_all(certs, CertKind.MGF, "sum_dependent")
    sig = [c.sigma for c in certs]
    total = math.fsum(sig)
    lr = _weighted_log(sig, [c.log_prefactor for c in certs])
    return validate(Certificate(CertKind.MGF, total * total, lr))


def sum_independent(certs: Sequence[Certificate]) -> Certificate:
    """Sum of independent variables: variance proxies add, prefactors multiply."""
    certs = _check_all(certs, CertKind.MGF, "sum_independent")
    v = math.fsum(c.var_proxy for c in certs)
    lr = math.fsum(c.log_prefactor for c in certs)
    return validate(Certificate(CertKind.MGF, v, lr))


def max_of(certs: Sequence[Certificate]) -> Certificate:
    certs = _check_all(certs, CertKind.MGF, "max_of")
    v = max(c.var_proxy for c in certs)
    lr = _logsumexp([c.log_prefactor for c in certs])
    return validate(Certificate(CertKind.MGF, v, lr))


class PsiMode(enum.Enum):
    SUM_ABS = "sum-abs"  # |X| <= sum |X_i|
    SQRT_SUM_SQ = "sqrt-sum-sq"  # |X| <= sqrt(sum X_i^2)
    INDEPENDENT_SUM = "independent-sum"  # X = sum X_i, X_i independent


def psi_combine(certs: Sequence[Certificate], mode: PsiMode) -> Certificate:
    certs = _check_all(certs, CertKind.PSI_BOUND, "psi_combine")
    mode = PsiMode(mode)
    logs = [c.log_prefactor for c in certs]
    if mode is PsiMode.SUM_ABS:
        sig = [c.sigma for c in certs]
        total = math.fsum(sig)
        v, lr = total * total, _weighted_log(sig, logs)
    elif mode is PsiMode.SQRT_SUM_SQ:
        w = [c.var_proxy for c in certs]
        v, lr = math.fsum(w), _weighted_log(w, logs)
    else:
        v, lr = math.fsum(c.var_proxy for c in certs), math.fsum(logs)
    return validate(Certificate(CertKind.PSI_BOUND, v, lr))

