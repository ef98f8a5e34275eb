"""Deviation-probability bounds.

Thresholds for the martingale bounds are in normalized units: ``lam`` means the
event ``||sum phi_i|| >= lam * sqrt(sum sigma_i^2)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

from .certkit import CertKind, Certificate, validate
from .errors import DomainError, EmptyInputError, NegativeInput, ParamRegimeMismatch

__all__ = [
    "Assumption",
    "Side",
    "MartingaleSpec",
    "BoundReport",
    "gaussian_tail_sandwich",
    "chernoff_tail",
    "martingale_norm_bound",
    "martingale_direction_bound",
    "tail_curve",
]

LN2 = math.log(2.0)
SQRT_2PI = math.sqrt(2.0 * math.pi)

DEFAULT_X = 0.75
DEFAULT_EPS = 0.5


class Assumption(enum.Enum):
    I = "I"  # noqa: E741  per-coordinate psi condition with sum_j sigma_ij^2 <= sigma_i^2
    II = "II"  # psi condition on the Euclidean norm of each difference
    III = "III"  # psi condition on every one-dimensional projection


class Side(enum.Enum):
    UPPER = "upper"
    LOWER = "lower"
    BOTH = "both"


@dataclass(frozen=True)
class MartingaleSpec:
    d: int
    step_proxies: tuple[float, ...]
    assumption: Assumption

    def __post_init__(self):
        object.__setattr__(self, "step_proxies", tuple(float(s) for s in self.step_proxies))
        object.__setattr__(self, "assumption", Assumption(self.assumption))
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"dimension d must be a positive integer, got {self.d!r}")
        if not self.step_proxies:
            raise DomainError("a martingale needs at least one step")
        for s in self.step_proxies:
            if not (s > 0 and math.isfinite(s)):
                raise DomainError(f"step variance proxies must be positive and finite, got {s!r}")

    @property
    def n(self) -> int:
        return len(self.step_proxies)

    @property
    def total_var_proxy(self) -> float:
        return math.fsum(self.step_proxies)


@dataclass(frozen=True)
class BoundReport:
    threshold: float
    raw_bound: float
    clamped: float
    log_raw: float
    params: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_log(cls, threshold: float, log_raw: float, **params) -> "BoundReport":
        raw = math.exp(log_raw) if log_raw < 709.78 else math.inf
        return cls(threshold, raw, min(raw, 1.0), log_raw, params)

    def to_json(self) -> dict:
        return {
            "threshold": self.threshold,
            "raw_bound": self.raw_bound if math.isfinite(self.raw_bound) else None,
            "log_raw": self.log_raw,
            "clamped": self.clamped,
            "params": dict(self.params),
        }


def _nonneg(value: float, name: str) -> float:
    value = float(value)
    if not (value >= 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
    return value


def gaussian_tail_sandwich(x: float) -> tuple[float, float]:
    """Lower and upper bounds on the standard normal tail ``1 - Phi(x)``, ``x >= 0``.

    Both bounds are ``sqrt(2/pi) exp(-x^2/2) / (x + sqrt(x^2 + k))`` with
    ``k = 4`` (strict lower) and ``k = 8/pi`` (upper); the upper bound is
    exact at ``x = 0``.
    """
    x = float(x)
    if not (x >= 0 and math.isfinite(x)):
        raise NegativeInput(f"x must be finite and >= 0, got {x!r}")
    g = math.exp(-0.5 * x * x)
    # multiplied through by sqrt(2 pi) so that x = 0 evaluates exactly
    a = SQRT_2PI * x
    lower = 2.0 * g / (a + math.sqrt(2.0 * math.pi * x * x + 8.0 * math.pi))
    upper = 2.0 * g / (a + math.sqrt(2.0 * math.pi * x * x + 16.0))
    return lower, upper


def chernoff_tail(cert: Certificate, t: float, side: Side = Side.UPPER) -> BoundReport:
    """``rho exp(-t^2 / (2 sigma^2))``, doubled for ``Side.BOTH``."""
    validate(cert)
    if cert.kind is not CertKind.MGF:
        raise DomainError(f"chernoff_tail needs an MGF certificate, got {cert.kind.name}")
    t = _nonneg(t, "threshold t")
    side = Side(side)
    log_raw = cert.log_prefactor - t * t / (2.0 * cert.var_proxy)
    if side is Side.BOTH:
        log_raw += LN2
    return BoundReport.from_log(t, log_raw, side=side.value)


def martingale_norm_bound(
    spec: MartingaleSpec,
    lam: float,
    eps: float | None = None,
    x: float | None = None,
) -> BoundReport:
    """Bound on ``P[||sum phi_i|| >= lam sqrt(sum sigma_i^2)]``.

    ``x`` in (0, 1) tunes assumption I (default 3/4, giving ``2 exp(-lam^2/4)``);
    ``eps`` in (0, 1) is the covering radius for assumption III (default 1/2,
    giving ``5^d exp(-lam^2/12)``).  Assumption II has no free parameter.
    """
    lam = _nonneg(lam, "lambda")
    a = spec.assumption
    if eps is not None and a is not Assumption.III:
        raise ParamRegimeMismatch(f"eps applies only to assumption III, not {a.value}")
    if x is not None and a is not Assumption.I:
        raise ParamRegimeMismatch(f"x applies only to assumption I, not {a.value}")
    lam2 = lam * lam
    if a is Assumption.I:
        x = DEFAULT_X if x is None else _open_unit(x, "x")
        return BoundReport.from_log(lam, -0.5 * math.log1p(-x) - x * lam2 / 3.0,
                                    assumption="I", x=x)
    if a is Assumption.II:
        return BoundReport.from_log(lam, math.log(spec.d + 1) - lam2 / 3.0, assumption="II")
    eps = DEFAULT_EPS if eps is None else _open_unit(eps, "eps")
    log_raw = spec.d * math.log1p(2.0 / eps) - (1.0 - eps) ** 2 * lam2 / 3.0
    return BoundReport.from_log(lam, log_raw, assumption="III", eps=eps)


def _open_unit(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 < value < 1.0:
        raise DomainError(f"{name} must lie in (0, 1), got {value!r}")
    return value


def martingale_direction_bound(lam: float) -> BoundReport:
    """Bound on ``P[e^T sum phi_i >= lam sqrt(sum sigma_i^2)]`` for a fixed unit ``e``."""
    lam = _nonneg(lam, "lambda")
    return BoundReport.from_log(lam, -lam * lam / 3.0)


def tail_curve(
    source: Union[Certificate, MartingaleSpec],
    thresholds: Sequence[float],
    side: Side = Side.UPPER,
    **kwargs,
) -> list[BoundReport]:
    """Pointwise bounds over an ascending threshold grid.

    Extra keyword arguments (``eps``, ``x``) go to :func:`martingale_norm_bound`.
    """
    grid = [float(t) for t in thresholds]
    if not grid:
        raise EmptyInputError("tail_curve needs at least one threshold")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise DomainError("tail_curve thresholds must be ascending")
    if isinstance(source, MartingaleSpec):
        return [martingale_norm_bound(source, t, **kwargs) for t in grid]
    return [chernoff_tail(source, t, side) for t in grid]
