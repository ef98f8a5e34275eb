"""Ground truth for checking certificates.

Analytic distributions with exact MGFs, moments, psi-values and tails; a
certificate verifier that probes the defining inequality of each kind; and a
vector-martingale simulator.
"""
from __future__ import annotations

import abc
import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate, special

from . import _rng
from .certkit import CertKind, Certificate, validate
from .deviation import MartingaleSpec
from .errors import DomainError, Diverges

__all__ = [
    "DistributionModel",
    "Gaussian",
    "Uniform",
    "Discrete",
    "Rademacher",
    "CenteredBernoulli",
    "analytic_mgf",
    "analytic_psi",
    "even_moment",
    "psi_quadrature",
    "upper_incomplete_gamma_int",
    "Method",
    "Check",
    "VerificationReport",
    "verify_certificate",
    "Generator",
    "MartingaleSimConfig",
    "SimulationResult",
    "simulate_martingale",
    "MC_SLACK_SE",
]

# Monte Carlo slack, in binomial standard errors of the bound
MC_SLACK_SE = 4.0
# relative slack for closed-form and quadrature comparisons (rounding only)
EXACT_RTOL = 1e-9
QUAD_RTOL = 1e-8

_SAMPLE_BLOCK = 1 << 16
_TRIAL_BLOCK = 4096


def _logsumexp(a: np.ndarray) -> float:
    return float(special.logsumexp(a))


class DistributionModel(abc.ABC):
    """A distribution with exactly computable characteristics."""

    # subclasses report which psi evaluation path they use
    psi_method = "closed-form"

    @property
    @abc.abstractmethod
    def mean(self) -> float: ...

    @abc.abstractmethod
    def log_mgf(self, lam: float) -> float: ...

    @abc.abstractmethod
    def log_even_moment(self, k: int) -> float:
        """``ln E[X^(2k)]`` (``-inf`` for a point mass at zero)."""

    @abc.abstractmethod
    def log_psi(self, sigma3_sq: float) -> float:
        """``ln E[exp(X^2 / sigma3_sq)]``; raises :class:`Diverges` if infinite."""

    @abc.abstractmethod
    def tail_upper(self, t: float) -> float:
        """``P[X >= t]``."""

    @abc.abstractmethod
    def tail_lower(self, t: float) -> float:
        """``P[X <= -t]``."""

    @abc.abstractmethod
    def _draw(self, rng: np.random.Generator, m: int) -> np.ndarray: ...

    @abc.abstractmethod
    def shift(self, c: float) -> "DistributionModel": ...

    @abc.abstractmethod
    def scale(self, k: float) -> "DistributionModel": ...

    def self_sum(self, m: int) -> "DistributionModel":
        """Distribution of the sum of ``m`` independent copies."""
        raise NotImplementedError(f"{type(self).__name__} has no closed-form self-convolution")

    def mgf(self, lam: float) -> float:
        return math.exp(self.log_mgf(lam))

    def even_moment(self, k: int) -> float:
        return math.exp(self.log_even_moment(k))

    def psi(self, sigma3_sq: float) -> float:
        return math.exp(self.log_psi(sigma3_sq))

    def tail_abs(self, t: float) -> float:
        """``P[|X| >= t]`` for ``t > 0``."""
        return min(1.0, self.tail_upper(t) + self.tail_lower(t))

    def sample(self, n: int, seed: int = 0) -> np.ndarray:
        """``n`` draws; identical for equal ``(n, seed)`` on any thread count."""
        pieces = _rng.map_blocks(
            lambda br: self._draw(_rng.block_generator(seed, br[0]), br[2] - br[1]),
            _rng.block_ranges(int(n), _SAMPLE_BLOCK),
        )
        return np.concatenate(pieces) if pieces else np.empty(0)


def _positive(value: float, name: str) -> float:
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return value


def _finite(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class Gaussian(DistributionModel):
    mu: float = 0.0
    sd: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "mu", _finite(self.mu, "mean"))
        object.__setattr__(self, "sd", _positive(self.sd, "sd"))

    @property
    def mean(self) -> float:
        return self.mu

    def log_mgf(self, lam: float) -> float:
        return self.mu * lam + 0.5 * self.sd**2 * lam * lam

    def log_even_moment(self, k: int) -> float:
        # E (mu + sZ)^(2k) = sum_j C(2k, 2j) mu^(2k-2j) s^(2j) (2j-1)!!
        mu, s = self.mu, self.sd
        js = np.arange(k + 1)
        log_dfact = special.gammaln(2 * js + 1) - js * math.log(2.0) - special.gammaln(js + 1)
        log_binom = special.gammaln(2 * k + 1) - special.gammaln(2 * js + 1) - special.gammaln(2 * k - 2 * js + 1)
        if mu == 0.0:
            return float(log_dfact[k] + 2 * k * math.log(s))
        terms = log_binom + (2 * k - 2 * js) * math.log(abs(mu)) + 2 * js * math.log(s) + log_dfact
        return _logsumexp(terms)

    def log_psi(self, sigma3_sq: float) -> float:
        s2 = self.sd**2
        gap = sigma3_sq - 2.0 * s2
        if gap <= 0:
            raise Diverges(f"E exp(X^2/{sigma3_sq!r}) is infinite for sd^2={s2!r}")
        return -0.5 * math.log(gap / sigma3_sq) + self.mu**2 / gap

    def tail_upper(self, t: float) -> float:
        return 0.5 * math.erfc((t - self.mu) / (self.sd * math.sqrt(2.0)))

    def tail_lower(self, t: float) -> float:
        return 0.5 * math.erfc((t + self.mu) / (self.sd * math.sqrt(2.0)))

    def _draw(self, rng, m):
        return self.mu + self.sd * rng.standard_normal(m)

    def shift(self, c):
        return Gaussian(self.mu + c, self.sd)

    def scale(self, k):
        return Gaussian(self.mu * k, self.sd * abs(k))

    def self_sum(self, m):
        return Gaussian(self.mu * m, self.sd * math.sqrt(m))


@dataclass(frozen=True)
class Uniform(DistributionModel):
    a: float = -1.0
    b: float = 1.0
    psi_method = "quadrature"

    def __post_init__(self):
        a, b = _finite(self.a, "a"), _finite(self.b, "b")
        if not a < b:
            raise DomainError(f"Uniform needs a < b, got ({a!r}, {b!r})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def mean(self) -> float:
        return 0.5 * (self.a + self.b)

    def log_mgf(self, lam: float) -> float:
        w = (self.b - self.a) * lam
        if w == 0.0:
            return 0.0
        if w < 0:
            # mirror so the exponent is positive
            return self.b * lam + _log_expm1_over(-w)
        return self.a * lam + _log_expm1_over(w)

    def log_even_moment(self, k: int) -> float:
        a, b = self.a, self.b
        if b <= 0:
            a, b = -b, -a
        n = 2 * k + 1
        if a < 0:
            top = np.logaddexp(n * math.log(b), n * math.log(-a))
        elif a == 0:
            top = n * math.log(b)
        else:
            top = n * math.log(b) + math.log1p(-((a / b) ** n))
        return float(top - math.log(n) - math.log(self.b - self.a))

    def log_psi(self, sigma3_sq: float) -> float:
        return psi_quadrature(self, sigma3_sq, log=True)

    def tail_upper(self, t: float) -> float:
        return min(1.0, max(0.0, (self.b - t) / (self.b - self.a)))

    def tail_lower(self, t: float) -> float:
        return min(1.0, max(0.0, (-t - self.a) / (self.b - self.a)))

    def _draw(self, rng, m):
        return rng.uniform(self.a, self.b, m)

    def shift(self, c):
        return Uniform(self.a + c, self.b + c)

    def scale(self, k):
        lo, hi = sorted((self.a * k, self.b * k))
        return Uniform(lo, hi)


def _log_expm1_over(w: float) -> float:
    """``ln((e^w - 1) / w)`` for ``w > 0``."""
    if w > 30.0:
        return w - math.log(w) + math.log1p(-math.exp(-w))
    return math.log(math.expm1(w) / w)


class _Atomic(DistributionModel):
    """Finitely supported distributions; every expectation is a finite sum."""

    @abc.abstractmethod
    def atoms(self) -> tuple[tuple[float, ...], tuple[float, ...]]: ...

    def _arrays(self):
        v, p = self.atoms()
        return np.asarray(v, dtype=float), np.asarray(p, dtype=float)

    @property
    def mean(self) -> float:
        v, p = self.atoms()
        return math.fsum(vi * pi for vi, pi in zip(v, p))

    def log_mgf(self, lam):
        v, p = self._arrays()
        return _logsumexp(np.log(p) + lam * v)

    def log_even_moment(self, k):
        v, p = self._arrays()
        keep = v != 0
        if not keep.any():
            return -math.inf
        return _logsumexp(np.log(p[keep]) + 2 * k * np.log(np.abs(v[keep])))

    def log_psi(self, sigma3_sq):
        v, p = self._arrays()
        return _logsumexp(np.log(p) + v * v / sigma3_sq)

    def tail_upper(self, t):
        v, p = self.atoms()
        return min(1.0, math.fsum(pi for vi, pi in zip(v, p) if vi >= t))

    def tail_lower(self, t):
        v, p = self.atoms()
        return min(1.0, math.fsum(pi for vi, pi in zip(v, p) if vi <= -t))

    def _draw(self, rng, m):
        v, p = self._arrays()
        idx = np.searchsorted(np.cumsum(p), rng.random(m), side="right")
        return v[np.minimum(idx, len(v) - 1)]

    def shift(self, c):
        v, p = self.atoms()
        return Discrete(tuple(x + c for x in v), p)

    def scale(self, k):
        v, p = self.atoms()
        return Discrete(tuple(x * k for x in v), p)

    def self_sum(self, m, max_atoms: int = 1 << 14):
        v, p = self.atoms()
        dist = {0.0: 1.0}
        for _ in range(int(m)):
            nxt: dict[float, float] = {}
            for x, px in dist.items():
                for y, py in zip(v, p):
                    nxt[x + y] = nxt.get(x + y, 0.0) + px * py
            if len(nxt) > max_atoms:
                raise NotImplementedError(f"self-sum support exceeds {max_atoms} atoms")
            dist = nxt
        vals = tuple(sorted(dist))
        return Discrete(vals, tuple(dist[x] for x in vals))


@dataclass(frozen=True)
class Discrete(_Atomic):
    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        v = tuple(_finite(x, "value") for x in self.values)
        p = tuple(float(x) for x in self.probs)
        if not v or len(v) != len(p):
            raise DomainError("Discrete needs equally many values and probabilities (at least one)")
        if any(not (x > 0) for x in p) or abs(math.fsum(p) - 1.0) > 1e-12:
            raise DomainError("Discrete probabilities must be positive and sum to 1")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "probs", p)

    def atoms(self):
        return self.values, self.probs


@dataclass(frozen=True)
class Rademacher(_Atomic):
    """``+-scale`` with probability one half each."""

    c: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "c", _positive(self.c, "scale"))

    def atoms(self):
        return (-self.c, self.c), (0.5, 0.5)

    def log_mgf(self, lam):
        x = abs(self.c * lam)
        # ln cosh x, stable for large x
        return x + math.log1p(math.exp(-2.0 * x)) - math.log(2.0)

    def log_psi(self, sigma3_sq):
        return self.c**2 / sigma3_sq

    def log_even_moment(self, k):
        return 2 * k * math.log(self.c)

    def scale(self, k):
        return Rademacher(self.c * abs(k))


@dataclass(frozen=True)
class CenteredBernoulli(_Atomic):
    """``scale * (B - p)`` with ``B ~ Bernoulli(p)``."""

    p: float = 0.5
    c: float = 1.0

    def __post_init__(self):
        p = float(self.p)
        if not 0.0 < p < 1.0:
            raise DomainError(f"CenteredBernoulli needs 0 < p < 1, got {p!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "c", _positive(self.c, "scale"))

    def atoms(self):
        c, p = self.c, self.p
        return (-c * p, c * (1.0 - p)), (1.0 - p, p)

    @property
    def mean(self) -> float:
        return 0.0


# functional façade


def analytic_mgf(model: DistributionModel, lam: float) -> float:
    return model.mgf(float(lam))


def analytic_psi(model: DistributionModel, sigma3_sq: float) -> float:
    """``E exp(X^2 / sigma3_sq)``; raises :class:`Diverges` where it is infinite."""
    return model.psi(_positive(sigma3_sq, "sigma3_sq"))


def even_moment(model: DistributionModel, k: int) -> float:
    if int(k) != k or k < 1:
        raise DomainError(f"moment order k must be a positive integer, got {k!r}")
    return model.even_moment(int(k))


def psi_quadrature(model: DistributionModel, sigma3_sq: float, log: bool = False) -> float:
    """``E exp(X^2/sigma3_sq)`` by adaptive quadrature (abs 1e-14, rel 1e-12)."""
    s = _positive(sigma3_sq, "sigma3_sq")
    if isinstance(model, Uniform):
        a, b = model.a, model.b
        peak = max(a * a, b * b) / s
        val, _ = integrate.quad(lambda x: math.exp(x * x / s - peak), a, b,
                                epsabs=1e-14, epsrel=1e-12, limit=200)
        out = peak + math.log(val / (b - a))
    elif isinstance(model, Gaussian):
        mu, sd = model.mean, model.sd
        if s <= 2.0 * sd * sd:
            raise Diverges(f"E exp(X^2/{s!r}) is infinite for sd^2={sd * sd!r}")
        # integrand in z = (x - mu)/sd, scaled by the exponent at its maximiser
        q = lambda z: -0.5 * z * z + (mu + sd * z) ** 2 / s  # noqa: E731
        zstar = (mu * sd / s) / (0.5 - sd * sd / s)
        peak = q(zstar)
        val, _ = integrate.quad(lambda z: math.exp(q(z) - peak), -np.inf, np.inf,
                                epsabs=1e-14, epsrel=1e-12, limit=200)
        out = peak + math.log(val / math.sqrt(2.0 * math.pi))
    elif isinstance(model, _Atomic):
        out = model.log_psi(s)
    else:
        raise DomainError(f"no quadrature rule for {type(model).__name__}")
    return out if log else math.exp(out)


def upper_incomplete_gamma_int(kp1: int, a: float) -> float:
    """``Gamma(k+1, a) = k! e^(-a) sum_{i<=k} a^i / i!``; ``inf`` for ``k > 170``."""
    if int(kp1) != kp1 or kp1 < 1:
        raise DomainError(f"kp1 must be a positive integer, got {kp1!r}")
    a = float(a)
    if not (a >= 0 and math.isfinite(a)):
        raise DomainError(f"a must be finite and >= 0, got {a!r}")
    k = int(kp1) - 1
    if k > 170:
        return math.inf
    if a == 0.0:
        return float(math.factorial(k))
    la = math.log(a)
    logs = [i * la - math.lgamma(i + 1) for i in range(k + 1)]
    out = math.lgamma(k + 1) - a + _logsumexp(np.array(logs))
    return math.exp(out) if out < 709.78 else math.inf


# certificate verification


class Method(enum.Enum):
    CLOSED_FORM = "closed-form"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class Check:
    """One probe of a certificate's inequality."""

    probe: float
    bound: float
    observed: float
    slack_se: float
    method: Method
    violated: bool
    stderr: float = 0.0

    def to_json(self) -> dict:
        def num(x):
            return x if math.isfinite(x) else None

        return {
            "probe": self.probe,
            "bound": num(self.bound),
            "observed": num(self.observed),
            "stderr": self.stderr,
            "slack_se": self.slack_se,
            "method": self.method.value,
            "violated": self.violated,
        }


@dataclass(frozen=True)
class VerificationReport:
    cert: Certificate
    checks: tuple[Check, ...]
    method: Method = field(default=Method.CLOSED_FORM)

    @property
    def violations(self) -> int:
        return sum(c.violated for c in self.checks)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        return {
            "cert": self.cert.to_json(),
            "method": self.method.value,
            "violations": self.violations,
            "checks": [c.to_json() for c in self.checks],
        }


def _exp(x: float) -> float:
    return math.exp(x) if x < 709.78 else math.inf


def _exact_check(probe, log_bound, log_obs, method, rtol):
    violated = log_obs > log_bound + rtol if log_bound > -math.inf else log_obs > -math.inf
    return Check(probe, _exp(log_bound), _exp(log_obs), 0.0, method, bool(violated))


@functools.lru_cache(maxsize=16)
def _sorted_samples(model: DistributionModel, n: int, seed: int) -> np.ndarray:
    return np.sort(model.sample(n, seed))


def _mc_check(probe, bound, hits, n) -> Check:
    freq = hits / n
    b = min(bound, 1.0)
    se = math.sqrt(max(b * (1.0 - b), 0.0) / n)
    violated = freq > b + MC_SLACK_SE * se + 1e-15
    return Check(probe, bound, freq, MC_SLACK_SE, Method.MONTE_CARLO, bool(violated), se)


def verify_certificate(
    model: DistributionModel,
    cert: Certificate,
    probes: int = 41,
    mc_samples: int = 0,
    seed: int = 0,
) -> VerificationReport:
    """Test ``cert``'s defining inequality against ``model`` at ``probes`` points.

    Tail kinds are always checked against exact tail probabilities; with
    ``mc_samples > 0`` they are also checked on an empirical sample, allowing
    ``MC_SLACK_SE`` binomial standard errors of the bound.
    """
    validate(cert)
    probes = max(int(probes), 1)
    v, lr = cert.var_proxy, cert.log_prefactor
    sigma = math.sqrt(v)
    kind = cert.kind
    checks: list[Check] = []
    method = Method.CLOSED_FORM

    if kind is CertKind.MGF:
        for lam in np.linspace(-6.0 / sigma, 6.0 / sigma, probes):
            lam = float(lam)
            checks.append(_exact_check(lam, lr + 0.5 * v * lam * lam, model.log_mgf(lam),
                                       Method.CLOSED_FORM, EXACT_RTOL))
    elif kind is CertKind.PSI_BOUND:
        method = Method(model.psi_method)
        rtol = QUAD_RTOL if method is Method.QUADRATURE else EXACT_RTOL
        try:
            log_obs = model.log_psi(v)
        except Diverges:
            log_obs = math.inf
        checks.append(_exact_check(v, lr, log_obs, method, rtol))
    elif kind is CertKind.EVEN_MOMENTS:
        for k in range(1, min(probes, 60) + 1):
            log_bound = lr + k * math.log(v) + math.lgamma(k + 1)
            checks.append(_exact_check(float(k), log_bound, model.log_even_moment(k),
                                       Method.CLOSED_FORM, EXACT_RTOL))
    else:
        two_sided = kind is CertKind.TWO_SIDED_TAIL
        grid = [float(x) for x in np.linspace(0.0, 5.0, probes)]
        for lam in grid:
            t = lam * sigma
            bound = _exp(lr - 0.5 * lam * lam)
            if t == 0.0:
                obs = 1.0
            elif two_sided:
                obs = model.tail_abs(t)
            else:
                obs = max(model.tail_upper(t), model.tail_lower(t))
            violated = obs > bound * (1.0 + EXACT_RTOL)
            checks.append(Check(lam, bound, obs, 0.0, Method.CLOSED_FORM, bool(violated)))
        if mc_samples > 0:
            method = Method.MONTE_CARLO
            xs = _sorted_samples(model, int(mc_samples), int(seed))
            n = len(xs)
            for lam in grid:
                t = lam * sigma
                bound = _exp(lr - 0.5 * lam * lam)
                up = n - int(np.searchsorted(xs, t, side="left"))
                down = int(np.searchsorted(xs, -t, side="right"))
                if t == 0.0:
                    hits = n
                else:
                    hits = up + down if two_sided else max(up, down)
                checks.append(_mc_check(lam, bound, hits, n))
    return VerificationReport(cert, tuple(checks), method)


# martingale simulation


class Generator(enum.Enum):
    RADEMACHER_COORDS = "rademacher"
    GAUSSIAN_COORDS = "gaussian"


# Gaussian coordinate variance factor c with E exp(c Z^2) = e, i.e. 1/sqrt(1-2c) = e
_GAUSS_C = 0.5 * (1.0 - math.exp(-2.0))


@dataclass(frozen=True)
class MartingaleSimConfig:
    """Each step ``i`` has independent coordinates of scale ``sigma_i / sqrt(d)``.

    ``RADEMACHER_COORDS`` uses signs ``+-sigma_i/sqrt(d)``; ``GAUSSIAN_COORDS``
    uses normals whose psi-moment at ``sigma_i^2/d`` equals ``e``.  Both satisfy
    all three martingale assumptions.
    """

    spec: MartingaleSpec
    generator: Generator = Generator.RADEMACHER_COORDS
    trials: int = 10_000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "generator", Generator(self.generator))
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError(f"trials must be a positive integer, got {self.trials!r}")


@dataclass(frozen=True)
class SimulationResult:
    thresholds: tuple[float, ...]
    trials: int
    norm_freq: tuple[float, ...]
    norm_stderr: tuple[float, ...]
    dir_freq: tuple[float, ...]
    dir_stderr: tuple[float, ...]

    def rows(self, directional: bool = False) -> list[tuple[float, float, float]]:
        f, s = (self.dir_freq, self.dir_stderr) if directional else (self.norm_freq, self.norm_stderr)
        return list(zip(self.thresholds, f, s))

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "thresholds": list(self.thresholds),
            "norm": {"frequency": list(self.norm_freq), "stderr": list(self.norm_stderr)},
            "direction": {"frequency": list(self.dir_freq), "stderr": list(self.dir_stderr)},
        }


def _block_counts(cfg: MartingaleSimConfig, lam2: np.ndarray, start: int, stop: int, block: int):
    spec = cfg.spec
    d, n, m = spec.d, spec.n, stop - start
    rng = _rng.block_generator(cfg.seed, block)
    step_sd = np.sqrt(np.asarray(spec.step_proxies) / d)
    total = np.zeros((m, d))
    for i in range(n):
        if cfg.generator is Generator.RADEMACHER_COORDS:
            z = 2.0 * rng.integers(0, 2, size=(m, d)) - 1.0
        else:
            z = math.sqrt(_GAUSS_C) * rng.standard_normal((m, d))
        total += step_sd[i] * z
    scale2 = spec.total_var_proxy
    norm2 = np.einsum("ij,ij->i", total, total)
    # direction (1, ..., 1)/sqrt(d)
    proj = total.sum(axis=1) / math.sqrt(d)
    norm_hits = (norm2[:, None] >= lam2[None, :] * scale2).sum(axis=0)
    lam = np.sqrt(lam2)
    dir_hits = (proj[:, None] >= lam[None, :] * math.sqrt(scale2)).sum(axis=0)
    return norm_hits.astype(np.int64), dir_hits.astype(np.int64)


def simulate_martingale(cfg: MartingaleSimConfig, thresholds: Sequence[float]) -> SimulationResult:
    """Empirical ``P[||S_n|| >= lam sqrt(sum sigma_i^2)]`` and the analogous
    one-sided probability along the unit vector ``(1, ..., 1)/sqrt(d)``.

    Trials are simulated in fixed blocks, each with its own keyed stream, so
    the result is bit-identical for any ``SUBG_THREADS`` setting.
    """
    grid = np.asarray([float(t) for t in thresholds])
    if grid.size == 0 or np.any(grid < 0) or not np.all(np.isfinite(grid)):
        raise DomainError("thresholds must be a non-empty list of finite values >= 0")
    lam2 = grid * grid
    parts = _rng.map_blocks(
        lambda br: _block_counts(cfg, lam2, br[1], br[2], br[0]),
        _rng.block_ranges(cfg.trials, _TRIAL_BLOCK),
    )
    norm_hits = sum(p[0] for p in parts)
    dir_hits = sum(p[1] for p in parts)
    T = cfg.trials

    def stats(hits):
        f = hits / T
        return tuple(float(x) for x in f), tuple(float(math.sqrt(x * (1 - x) / T)) for x in f)

    nf, ns = stats(norm_hits)
    df, ds = stats(dir_hits)
    return SimulationResult(tuple(float(x) for x in grid), T, nf, ns, df, ds)
