"""Conversions between certificate kinds.

Every entry of the two conversion tables (general variables, and one-signed
variables where the two tail kinds coincide) is a :class:`ConversionEdge`
mapping ``(sigma^2, ln rho)`` of the source kind to ``(C^2 sigma^2, ln phi(rho))``
of the target kind.  Some entries carry a free parameter ``lam`` in (0, 1).

:func:`best_convert` composes edges along every simple path between two kinds
and tunes the free parameters for a chosen :class:`Objective`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from ._optimize import grid_golden
from .certkit import (
    OVERFLOW_LOG,
    CertKind,
    Certificate,
    SignConstraint,
    validate,
)
from .errors import DomainError, MissingLambda, NoSuchEdge, UnexpectedLambda

__all__ = [
    "ConversionEdge",
    "ConversionPath",
    "MinVarProxy",
    "MinPrefactor",
    "MinTailAt",
    "Objective",
    "edge",
    "edges",
    "direct_convert",
    "convert_identity",
    "best_convert",
    "optimize_route",
    "evaluate_path",
    "moment_bound_from_tail",
    "tail_moment_series",
    "table_consistency_report",
    "TableReport",
    "EntryCheck",
    "LAMBDA_LO",
    "LAMBDA_HI",
]

LN2 = math.log(2.0)

# open interval (0, 1) is searched on this closed sub-interval
LAMBDA_LO = 1e-6
LAMBDA_HI = 1.0 - 1e-6
LAMBDA_GRID = np.linspace(LAMBDA_LO, LAMBDA_HI, 101)
SWEEPS = 3

K1 = CertKind.TWO_SIDED_TAIL
K2 = CertKind.EVEN_MOMENTS
K3 = CertKind.PSI_BOUND
K4 = CertKind.MGF
K5 = CertKind.ONE_SIDED_TAIL

UNCONSTRAINED = SignConstraint.UNCONSTRAINED
ONE_SIGNED = SignConstraint.ONE_SIGNED


# --- prefactor rules, all in log scale: (lam, ln rho) -> ln rho' -------------

def _phi_same(lam, lr):
    return lr


def _phi_double(lam, lr):
    return lr + LN2


def _phi_minus_one(lam, lr):
    # ln(rho - 1)
    if lr == 0.0:
        return -math.inf
    if lr < 30.0:
        return math.log(math.expm1(lr))
    return lr + math.log1p(-math.exp(-lr))


def _phi_power(lam, lr):
    # rho^lam / (1 - lam)
    return lam * lr - math.log1p(-lam)


def _phi_power_double(lam, lr):
    # (2 rho)^lam / (1 - lam)
    return lam * (lr + LN2) - math.log1p(-lam)


def _phi_one_plus(lam, lr):
    # 1 + lam rho / (1 - lam)
    if lr == -math.inf:
        return 0.0
    a = math.log(lam) - math.log1p(-lam) + lr
    return a + math.log1p(math.exp(-a)) if a > 0 else math.log1p(math.exp(a))


def _phi_mgf_to_psi(lam, lr):
    # (1 - lam)^-1 min{rho sqrt(1 - lam), (2 rho)^lam}
    l1m = math.log1p(-lam)
    return -l1m + min(lr + 0.5 * l1m, lam * (lr + LN2))


def _phi_mgf_to_psi_one_signed(lam, lr):
    # min{rho / sqrt(1 - lam), rho^lam / (1 - lam)}
    l1m = math.log1p(-lam)
    return min(lr - 0.5 * l1m, lam * lr - l1m)


def _c_const(value: float) -> Callable[[float | None], float]:
    return lambda lam: value


def _c_half_inv(lam):
    return 1.0 / (2.0 * lam)


def _c_inv(lam):
    return 1.0 / lam


def _c_two_inv(lam):
    return 2.0 / lam


@dataclass(frozen=True)
class ConversionEdge:
    """One table entry: a certificate of ``source`` implies one of ``target``.

    ``c_sq`` maps ``lam`` to the squared scale constant and ``phi`` maps
    ``(lam, ln rho)`` to the new log-prefactor.  ``proved`` marks entries
    established directly rather than by chaining other entries.
    """

    source: CertKind
    target: CertKind
    regime: SignConstraint
    c_sq: Callable = field(compare=False, repr=False)
    phi: Callable = field(compare=False, repr=False)
    has_lambda: bool
    proved: bool
    c_text: str = field(compare=False, default="")
    phi_text: str = field(compare=False, default="")

    def apply(self, var_proxy: float, log_prefactor: float, lam: float | None = None):
        return var_proxy * self.c_sq(lam), self.phi(lam, log_prefactor)


def _e(source, target, regime, c_sq, phi, has_lambda, proved, c_text, phi_text):
    return ConversionEdge(source, target, regime, c_sq, phi, has_lambda, proved, c_text, phi_text)


def _build_tables() -> dict[SignConstraint, dict[tuple[CertKind, CertKind], ConversionEdge]]:
    one_plus = "1 + lam*rho/(1-lam)"
    power = "rho^lam/(1-lam)"
    power2 = "(2rho)^lam/(1-lam)"
    U = UNCONSTRAINED
    general = [
        # target TWO_SIDED_TAIL
        _e(K2, K1, U, _c_half_inv, _phi_one_plus, True, False, "1/(2lam)", one_plus),
        _e(K3, K1, U, _c_const(0.5), _phi_same, False, True, "1/2", "rho"),
        _e(K4, K1, U, _c_const(1.0), _phi_double, False, False, "1", "2rho"),
        _e(K5, K1, U, _c_const(1.0), _phi_double, False, True, "1", "2rho"),
        # target EVEN_MOMENTS
        _e(K1, K2, U, _c_const(2.0), _phi_same, False, True, "2", "rho"),
        _e(K3, K2, U, _c_const(1.0), _phi_minus_one, False, True, "1", "rho - 1"),
        _e(K4, K2, U, _c_const(2.0), _phi_double, False, False, "2", "2rho"),
        _e(K5, K2, U, _c_const(2.0), _phi_double, False, False, "2", "2rho"),
        # target PSI_BOUND
        _e(K1, K3, U, _c_two_inv, _phi_power, True, True, "2/lam", power),
        _e(K2, K3, U, _c_inv, _phi_one_plus, True, True, "1/lam", one_plus),
        _e(K4, K3, U, _c_two_inv, _phi_mgf_to_psi, True, True, "2/lam",
           "min{rho*sqrt(1-lam), (2rho)^lam}/(1-lam)"),
        _e(K5, K3, U, _c_two_inv, _phi_power_double, True, False, "2/lam", power2),
        # target MGF
        _e(K1, K4, U, _c_inv, _phi_power, True, False, "1/lam", power),
        _e(K2, K4, U, _c_half_inv, _phi_one_plus, True, False, "1/(2lam)", one_plus),
        _e(K3, K4, U, _c_const(0.5), _phi_same, False, True, "1/2", "rho"),
        _e(K5, K4, U, _c_inv, _phi_power_double, True, False, "1/lam", power2),
        # target ONE_SIDED_TAIL
        _e(K1, K5, U, _c_inv, _phi_power, True, False, "1/lam", power),
        _e(K2, K5, U, _c_half_inv, _phi_one_plus, True, False, "1/(2lam)", one_plus),
        _e(K3, K5, U, _c_const(0.5), _phi_same, False, False, "1/2", "rho"),
        _e(K4, K5, U, _c_const(1.0), _phi_same, False, True, "1", "rho"),
    ]
    S = ONE_SIGNED
    signed = [
        _e(K2, K1, S, _c_half_inv, _phi_one_plus, True, False, "1/(2lam)", one_plus),
        _e(K3, K1, S, _c_const(0.5), _phi_same, False, True, "1/2", "rho"),
        _e(K4, K1, S, _c_const(1.0), _phi_same, False, True, "1", "rho"),
        _e(K1, K2, S, _c_const(2.0), _phi_same, False, True, "2", "rho"),
        _e(K3, K2, S, _c_const(1.0), _phi_minus_one, False, True, "1", "rho - 1"),
        _e(K4, K2, S, _c_const(2.0), _phi_same, False, False, "2", "rho"),
        _e(K1, K3, S, _c_two_inv, _phi_power, True, True, "2/lam", power),
        _e(K2, K3, S, _c_inv, _phi_one_plus, True, True, "1/lam", one_plus),
        _e(K4, K3, S, _c_two_inv, _phi_mgf_to_psi_one_signed, True, True, "2/lam",
           "min{rho/sqrt(1-lam), rho^lam/(1-lam)}"),
        _e(K1, K4, S, _c_inv, _phi_power, True, False, "1/lam", power),
        _e(K2, K4, S, _c_half_inv, _phi_one_plus, True, False, "1/(2lam)", one_plus),
        _e(K3, K4, S, _c_const(0.5), _phi_same, False, True, "1/2", "rho"),
    ]
    return {
        UNCONSTRAINED: {(e.source, e.target): e for e in general},
        ONE_SIGNED: {(e.source, e.target): e for e in signed},
    }


_TABLES = _build_tables()


def regime_kinds(regime: SignConstraint) -> tuple[CertKind, ...]:
    if regime is ONE_SIGNED:
        return (K1, K2, K3, K4)
    return tuple(CertKind)


def edges(regime: SignConstraint = UNCONSTRAINED) -> list[ConversionEdge]:
    """All table entries of ``regime``, ordered by (target, source)."""
    table = _TABLES[SignConstraint(regime)]
    return sorted(table.values(), key=lambda e: (e.target, e.source))


def edge(source: CertKind, target: CertKind,
         regime: SignConstraint = UNCONSTRAINED) -> ConversionEdge:
    try:
        return _TABLES[SignConstraint(regime)][(CertKind(source), CertKind(target))]
    except KeyError:
        note = ""
        if regime is ONE_SIGNED and K5 in (source, target):
            note = "; for one-signed variables use TWO_SIDED_TAIL in place of ONE_SIDED_TAIL"
        raise NoSuchEdge(
            f"no conversion {CertKind(source).name} -> {CertKind(target).name} "
            f"in regime {SignConstraint(regime).value}{note}"
        ) from None


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not 0.0 < lam < 1.0:
        raise DomainError(f"lambda must lie in the open interval (0, 1), got {lam!r}")
    return lam


def convert_identity(cert: Certificate) -> Certificate:
    return validate(cert)


def direct_convert(
    cert: Certificate,
    target: CertKind,
    regime: SignConstraint = UNCONSTRAINED,
    lam: float | None = None,
) -> Certificate:
    """Apply exactly one table entry to ``cert``."""
    validate(cert)
    target = CertKind(target)
    if target == cert.kind and not (regime is ONE_SIGNED and target is K5):
        if lam is not None:
            raise UnexpectedLambda("identity conversion takes no lambda")
        return convert_identity(cert)
    e = edge(cert.kind, target, regime)
    if e.has_lambda and lam is None:
        raise MissingLambda(f"{cert.kind.name} -> {target.name} needs lambda in (0, 1)")
    if not e.has_lambda and lam is not None:
        raise UnexpectedLambda(f"{cert.kind.name} -> {target.name} takes no lambda")
    if lam is not None:
        lam = _check_lambda(lam)
    v, lr = e.apply(cert.var_proxy, cert.log_prefactor, lam)
    return validate(Certificate(target, v, lr))


# --- objectives ---------------------------------------------------------------

@dataclass(frozen=True)
class MinVarProxy:
    """Smallest variance proxy; ties broken by smaller prefactor."""

    def score(self, v: float, lr: float) -> float:
        return v

    def tiebreak(self, v: float, lr: float) -> float:
        return lr


@dataclass(frozen=True)
class MinPrefactor:
    """Smallest prefactor among results with ``var_proxy <= var_proxy_cap``.

    Without an explicit cap, ``best_convert`` caps at the variance proxy of the
    direct table entry (evaluated at ``lam = 1/2`` when it is parameterized),
    because the uncapped infimum is approached only as sigma^2 diverges.
    """

    var_proxy_cap: float | None = None

    def score(self, v: float, lr: float) -> float:
        if self.var_proxy_cap is not None and v > self.var_proxy_cap * (1.0 + 1e-12):
            return math.inf
        return lr

    def tiebreak(self, v: float, lr: float) -> float:
        return v


@dataclass(frozen=True)
class MinTailAt:
    """Smallest log Chernoff-type bound ``ln rho - t^2 / (2 sigma^2)`` at ``t``."""

    t: float

    def __post_init__(self):
        if not (self.t >= 0 and math.isfinite(self.t)):
            raise DomainError(f"MinTailAt threshold must be finite and >= 0, got {self.t!r}")

    def score(self, v: float, lr: float) -> float:
        return lr - self.t * self.t / (2.0 * v)

    def tiebreak(self, v: float, lr: float) -> float:
        return v


Objective = Union[MinVarProxy, MinPrefactor, MinTailAt]


@dataclass(frozen=True)
class ConversionPath:
    """A chain of table entries with one ``lam`` per entry (``None`` if unparameterized)."""

    source: CertKind
    edges: tuple[ConversionEdge, ...]
    lambdas: tuple[float | None, ...]
    c_sq: float
    log_prefactor: float

    @property
    def kinds(self) -> tuple[CertKind, ...]:
        return (self.source,) + tuple(e.target for e in self.edges)

    def describe(self) -> str:
        parts = [self.source.name]
        for e, lam in zip(self.edges, self.lambdas):
            parts.append(f"-[{lam:.6g}]->" if lam is not None else "->")
            parts.append(e.target.name)
        return " ".join(parts)


def evaluate_path(
    var_proxy: float,
    log_prefactor: float,
    path_edges: Sequence[ConversionEdge],
    lambdas: Sequence[float | None],
) -> tuple[float, float]:
    v, lr = var_proxy, log_prefactor
    for e, lam in zip(path_edges, lambdas):
        v, lr = e.apply(v, lr, lam)
    return v, lr


def simple_paths(source: CertKind, target: CertKind,
                 regime: SignConstraint) -> list[tuple[ConversionEdge, ...]]:
    """Every simple path from ``source`` to ``target`` through the regime's table."""
    if source == target:
        return [()]
    table = _TABLES[regime]
    others = [k for k in regime_kinds(regime) if k not in (source, target)]
    paths = []
    for r in range(len(others) + 1):
        for middle in itertools.permutations(others, r):
            kinds = (source,) + middle + (target,)
            paths.append(tuple(table[(a, b)] for a, b in zip(kinds, kinds[1:])))
    return paths


def _optimize_lambdas(
    v0: float,
    lr0: float,
    path_edges: tuple[ConversionEdge, ...],
    score: Callable[[float, float], float],
) -> tuple[tuple[float | None, ...], float]:
    slots = [i for i, e in enumerate(path_edges) if e.has_lambda]
    lambdas: list[float | None] = [0.5 if e.has_lambda else None for e in path_edges]

    def total(lams) -> float:
        v, lr = evaluate_path(v0, lr0, path_edges, lams)
        if not math.isfinite(v) or math.isnan(lr):
            return math.inf
        return score(v, lr)

    if not slots:
        return tuple(lambdas), total(lambdas)
    best = total(lambdas)
    for _ in range(SWEEPS if len(slots) > 1 else 1):
        start = best
        for i in slots:
            # only edge i and its successors change while lambda_i varies
            v_i, lr_i = evaluate_path(v0, lr0, path_edges[:i], lambdas[:i])
            e_i, rest, rest_lams = path_edges[i], path_edges[i + 1:], lambdas[i + 1:]

            def f(x):
                v, lr = evaluate_path(*e_i.apply(v_i, lr_i, x), rest, rest_lams)
                if not math.isfinite(v) or math.isnan(lr):
                    return math.inf
                return score(v, lr)

            x, fx = grid_golden(f, LAMBDA_GRID)
            if fx <= best:
                lambdas[i], best = x, fx
        if not best < start - 1e-15 * abs(start):
            break
    return tuple(lambdas), best


def optimize_route(
    cert: Certificate,
    target: CertKind,
    regime: SignConstraint,
    score: Callable[[float, float], float],
    tiebreak: Callable[[float, float], float] | None = None,
) -> tuple[Certificate, ConversionPath, float]:
    """Minimize ``score(sigma^2, ln rho)`` over all simple paths and their lambdas.

    One-signed regime: ONE_SIDED_TAIL endpoints are read as TWO_SIDED_TAIL
    (same variance proxy, prefactor raised to at least 1).
    """
    validate(cert)
    regime = SignConstraint(regime)
    target = CertKind(target)
    src = cert
    if regime is ONE_SIGNED and src.kind is K5:
        src = Certificate(K1, src.var_proxy, max(src.log_prefactor, 0.0))
    inner_target = K1 if (regime is ONE_SIGNED and target is K5) else target

    best = None
    for path_edges in simple_paths(src.kind, inner_target, regime):
        lams, value = _optimize_lambdas(src.var_proxy, src.log_prefactor, path_edges, score)
        v, lr = evaluate_path(src.var_proxy, src.log_prefactor, path_edges, lams)
        key = (value, tiebreak(v, lr) if tiebreak else 0.0, len(path_edges))
        if best is None or key < best[0]:
            best = (key, path_edges, lams, v, lr)
    _, path_edges, lams, v, lr = best
    out = validate(Certificate(target, v, lr))
    path = ConversionPath(src.kind, path_edges, lams, v / cert.var_proxy, lr)
    return out, path, best[0][0]


def _default_cap(cert: Certificate, target: CertKind, regime: SignConstraint) -> float:
    src_kind = cert.kind
    if regime is ONE_SIGNED:
        src_kind = K1 if src_kind is K5 else src_kind
        target = K1 if target is K5 else target
    if src_kind == target:
        return cert.var_proxy
    e = edge(src_kind, target, regime)
    return cert.var_proxy * e.c_sq(0.5 if e.has_lambda else None)


def best_convert(
    cert: Certificate,
    target: CertKind,
    regime: SignConstraint = UNCONSTRAINED,
    objective: Objective = MinVarProxy(),
) -> tuple[Certificate, ConversionPath]:
    """Tightest certificate of kind ``target`` reachable from ``cert`` under ``objective``."""
    validate(cert)
    regime = SignConstraint(regime)
    if isinstance(objective, MinPrefactor) and objective.var_proxy_cap is None:
        objective = MinPrefactor(_default_cap(cert, CertKind(target), regime))
    out, path, _ = optimize_route(cert, target, regime, objective.score, objective.tiebreak)
    return out, path


# --- sharpened even moments from a two-sided tail -------------------------------

MAX_MOMENT_ORDER = 170


def _log_tail_series(k: int, a: float) -> float:
    # ln sum_{i=0}^{k} a^i / i!, a >= 0
    if a == 0.0:
        return 0.0
    logs = [i * math.log(a) - math.lgamma(i + 1) for i in range(k + 1)]
    top = max(logs)
    return top + math.log(math.fsum(math.exp(x - top) for x in logs))


def tail_moment_series(k: int, log_rho: float) -> float:
    """``f_k(rho) = sum_{i=0}^{k} (ln rho)^i / i!``."""
    return math.exp(_log_tail_series(k, log_rho))


def moment_bound_from_tail(tail: Certificate, k: int) -> float:
    """Bound on ``E[X^(2k)]`` implied by a two-sided tail certificate.

    Equals ``f_k(rho) * 2^k * sigma^(2k) * k!``, which never exceeds the generic
    ``rho * 2^k * sigma^(2k) * k!``.  Returns ``inf`` for ``k > 170`` or when the
    bound leaves double range.
    """
    validate(tail)
    if tail.kind is not K1:
        raise DomainError(f"moment_bound_from_tail needs a TWO_SIDED_TAIL certificate, got {tail.kind.name}")
    if int(k) != k or k < 1:
        raise DomainError(f"moment order k must be a positive integer, got {k!r}")
    k = int(k)
    if k > MAX_MOMENT_ORDER:
        return math.inf
    log_bound = _log_tail_series(k, tail.log_prefactor) + k * (LN2 + math.log(tail.var_proxy)) + math.lgamma(k + 1)
    if log_bound > OVERFLOW_LOG:
        return math.inf
    return math.exp(log_bound)


# --- consistency of chained entries ---------------------------------------------

@dataclass(frozen=True)
class EntryCheck:
    source: CertKind
    target: CertKind
    proved: bool
    passed: bool
    witness: tuple[CertKind, ...] | None
    max_rel_error: float


@dataclass(frozen=True)
class TableReport:
    regime: SignConstraint
    entries: tuple[EntryCheck, ...]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)


def _rel(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b))


def table_consistency_report(
    regime: SignConstraint,
    samples: Sequence[tuple[float, float]],
    rtol: float = 1e-12,
) -> TableReport:
    """Check that each chained (non-proved) entry equals a composition of proved ones.

    ``samples`` holds ``(lam, rho)`` pairs; every parameterized edge on a
    candidate composition receives the same ``lam``.  Proved entries pass
    vacuously.  The first composition matching at every sample is the witness.
    """
    regime = SignConstraint(regime)
    table = _TABLES[regime]
    proved = {key: e for key, e in table.items() if e.proved}
    kinds = regime_kinds(regime)
    results = []
    for e in edges(regime):
        if e.proved:
            results.append(EntryCheck(e.source, e.target, True, True, (e.source, e.target), 0.0))
            continue
        others = [k for k in kinds if k not in (e.source, e.target)]
        witness, witness_err, best_err = None, math.inf, math.inf
        for r in range(1, len(others) + 1):
            for middle in itertools.permutations(others, r):
                chain = (e.source,) + middle + (e.target,)
                steps = [proved.get((a, b)) for a, b in zip(chain, chain[1:])]
                if any(s is None for s in steps):
                    continue
                err = 0.0
                for lam, rho in samples:
                    lr = math.log(rho) if rho > 0 else -math.inf
                    lam_e = lam if e.has_lambda else None
                    v_tab, l_tab = e.apply(1.0, lr, lam_e)
                    lams = [lam if s.has_lambda else None for s in steps]
                    v_c, l_c = evaluate_path(1.0, lr, steps, lams)
                    err = max(err, _rel(v_tab, v_c), _log_rel(l_tab, l_c))
                best_err = min(best_err, err)
                if err <= rtol:
                    witness, witness_err = chain, err
                    break
            if witness is not None:
                break
        err = witness_err if witness is not None else best_err
        results.append(EntryCheck(e.source, e.target, False, witness is not None, witness, err))
    return TableReport(regime, tuple(results))


def _log_rel(la: float, lb: float) -> float:
    # relative error between exp(la) and exp(lb)
    if la == lb:
        return 0.0
    if math.isinf(la) or math.isinf(lb):
        return math.inf
    return abs(math.expm1(abs(la - lb)))
