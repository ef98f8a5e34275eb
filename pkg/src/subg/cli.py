"""``subg``: run JSON pipelines of certificate operations, dump conversion tables.

Exit codes: 0 success, 1 failed table check, 2 schema error, 3 reference
error, 4 library domain error, 5 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from . import convert, deviation, oracle, transform
from .certkit import CertKind, Certificate, SignConstraint, VariableContext, prefactor, validate
from .errors import EmptyInputError, SubgError

__all__ = [
    "SchemaError",
    "PipelineReferenceError",
    "PipelineIOError",
    "run_pipeline",
    "emit_curve_csv",
    "load_doc",
    "example_pipeline_path",
    "main",
]

SUPPORTED_VERSIONS = ("1",)

EXIT_OK, EXIT_CHECK, EXIT_SCHEMA, EXIT_REFERENCE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3, 4, 5


class SchemaError(Exception):
    """The pipeline document is malformed."""


class PipelineReferenceError(Exception):
    """An op names a variable that does not exist or has the wrong type."""


class PipelineIOError(OSError):
    pass


# --- schema ---------------------------------------------------------------------

def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _num(obj: dict, key: str, where: str, *, required: bool = True, default=None,
         positive: bool = False, nonneg: bool = False):
    if key not in obj:
        if required:
            raise SchemaError(f"{where}: missing field '{key}'")
        return default
    x = obj[key]
    if not _is_number(x):
        raise SchemaError(f"{where}: field '{key}' must be a number, got {json.dumps(x)}")
    if positive and not x > 0:
        raise SchemaError(f"{where}: field '{key}' must be > 0, got {x}")
    if nonneg and not x >= 0:
        raise SchemaError(f"{where}: field '{key}' must be >= 0, got {x}")
    return float(x)


def _int(obj: dict, key: str, where: str, *, required: bool = True, default=None, minimum: int = 0):
    if key not in obj:
        if required:
            raise SchemaError(f"{where}: missing field '{key}'")
        return default
    x = obj[key]
    if isinstance(x, bool) or not isinstance(x, int) or x < minimum:
        raise SchemaError(f"{where}: field '{key}' must be an integer >= {minimum}, got {json.dumps(x)}")
    return x


def _str(obj: dict, key: str, where: str, choices=None, *, required: bool = True, default=None):
    if key not in obj:
        if required:
            raise SchemaError(f"{where}: missing field '{key}'")
        return default
    x = obj[key]
    if not isinstance(x, str) or not x:
        raise SchemaError(f"{where}: field '{key}' must be a non-empty string, got {json.dumps(x)}")
    if choices is not None and x not in choices:
        raise SchemaError(f"{where}: field '{key}' must be one of {sorted(choices)}, got {x!r}")
    return x


def _num_list(obj: dict, key: str, where: str, *, required: bool = True, nonempty: bool = True):
    if key not in obj:
        if required:
            raise SchemaError(f"{where}: missing field '{key}'")
        return None
    xs = obj[key]
    if not isinstance(xs, list) or not all(_is_number(x) for x in xs):
        raise SchemaError(f"{where}: field '{key}' must be a list of numbers")
    if nonempty and not xs:
        raise SchemaError(f"{where}: field '{key}' must not be empty")
    return [float(x) for x in xs]


def _name_list(obj: dict, key: str, where: str) -> list[str]:
    if key not in obj:
        raise SchemaError(f"{where}: missing field '{key}'")
    xs = obj[key]
    if not isinstance(xs, list) or not xs or not all(isinstance(x, str) and x for x in xs):
        raise SchemaError(f"{where}: field '{key}' must be a non-empty list of names")
    return xs


def _record(x, where: str, allowed: set[str]) -> dict:
    if not isinstance(x, dict):
        raise SchemaError(f"{where}: expected an object, got {json.dumps(x)[:40]}")
    extra = sorted(set(x) - allowed)
    if extra:
        raise SchemaError(f"{where}: unknown field '{extra[0]}'")
    return x


_KIND_CODES = {k.code for k in CertKind}
_REGIMES = {s.value for s in SignConstraint}
_SIDES = {s.value for s in deviation.Side}
_ASSUMPTIONS = {a.value for a in deviation.Assumption}
_GENERATORS = {g.value for g in oracle.Generator}
_PSI_MODES = {m.value for m in transform.PsiMode}
_OBJECTIVES = {"min-var-proxy", "min-prefactor", "min-tail-at"}

_MODEL_FIELDS = {
    "gaussian": {"mean", "sd"},
    "uniform": {"a", "b"},
    "rademacher": {"scale"},
    "centered-bernoulli": {"p", "scale"},
    "discrete": {"values", "probs"},
}


def _parse_model(m, where: str) -> oracle.DistributionModel:
    if not isinstance(m, dict):
        raise SchemaError(f"{where}: expected an object")
    fam = _str(m, "family", where, set(_MODEL_FIELDS))
    _record(m, where, _MODEL_FIELDS[fam] | {"family"})
    # well-typed but out-of-domain parameters surface as library errors
    if fam == "gaussian":
        return oracle.Gaussian(_num(m, "mean", where, required=False, default=0.0),
                               _num(m, "sd", where))
    if fam == "uniform":
        return oracle.Uniform(_num(m, "a", where), _num(m, "b", where))
    if fam == "rademacher":
        return oracle.Rademacher(_num(m, "scale", where, required=False, default=1.0))
    if fam == "centered-bernoulli":
        return oracle.CenteredBernoulli(_num(m, "p", where),
                                        _num(m, "scale", where, required=False, default=1.0))
    return oracle.Discrete(tuple(_num_list(m, "values", where)), tuple(_num_list(m, "probs", where)))


def _parse_cert(c, where: str) -> Certificate:
    c = _record(c, where, {"kind", "sigma_sq", "rho", "log_rho"})
    kind = CertKind.from_code(_str(c, "kind", where, _KIND_CODES))
    v = _num(c, "sigma_sq", where, positive=True)
    if ("rho" in c) == ("log_rho" in c):
        raise SchemaError(f"{where}: exactly one of 'rho' or 'log_rho' is required")
    if "rho" in c:
        cert = Certificate.from_rho(kind, v, _num(c, "rho", where, nonneg=True))
    elif c["log_rho"] is None:
        cert = Certificate(kind, v, -math.inf)
    else:
        cert = Certificate(kind, v, _num(c, "log_rho", where))
    try:
        return validate(cert)
    except SubgError as exc:
        raise type(exc)(f"{where}: {exc}") from None


def _parse_martingale(m, where: str) -> deviation.MartingaleSpec:
    m = _record(m, where, {"assumption", "d", "step_proxies", "n", "step_var"})
    assumption = _str(m, "assumption", where, _ASSUMPTIONS)
    d = _int(m, "d", where, minimum=1)
    if "step_proxies" in m:
        if "n" in m or "step_var" in m:
            raise SchemaError(f"{where}: give either 'step_proxies' or 'n' (with optional 'step_var')")
        steps = _num_list(m, "step_proxies", where)
        if not all(s > 0 for s in steps):
            raise SchemaError(f"{where}: field 'step_proxies' entries must be > 0")
    else:
        n = _int(m, "n", where, required=False, default=1, minimum=1)
        steps = [_num(m, "step_var", where, required=False, default=1.0, positive=True)] * n
    return deviation.MartingaleSpec(d, tuple(steps), assumption)


# per-verb argument fields; references are validated separately
_VERB_FIELDS: dict[str, set[str]] = {
    "convert": {"input", "target", "lambda", "regime"},
    "best-convert": {"input", "target", "regime", "objective"},
    "center": {"input", "sign", "mean_is_zero", "best_route"},
    "shift": {"input", "c", "x", "t"},
    "recenter": {"input", "mean", "regime", "x"},
    "sum": {"inputs"},
    "sum-indep": {"inputs"},
    "max": {"inputs"},
    "psi-combine": {"inputs", "mode"},
    "chernoff": {"input", "t", "side"},
    "martingale-bound": {"martingale", "lambda", "threshold", "eps", "x"},
    "direction-bound": {"lambda"},
    "verify": {"model", "cert", "probes", "mc_samples", "seed"},
    "tail-curve": {"input", "martingale", "thresholds", "side", "eps", "x"},
    "simulate": {"martingale", "generator", "trials", "seed", "thresholds"},
}
VERBS = tuple(_VERB_FIELDS)


@dataclass(frozen=True)
class Op:
    index: int
    verb: str
    args: dict
    out: str

    @property
    def where(self) -> str:
        return f"op #{self.index} ({self.verb} -> {self.out})"


@dataclass(frozen=True)
class PipelineDoc:
    version: str
    vars: dict
    ops: tuple[Op, ...]
    outputs: tuple[str, ...]


def _check_args(verb: str, args: dict, where: str) -> None:
    """Type-check verb arguments without resolving references."""
    if verb in ("convert", "best-convert"):
        _str(args, "input", where)
        _str(args, "target", where, _KIND_CODES)
        _str(args, "regime", where, _REGIMES, required=False)
        if verb == "convert":
            _num(args, "lambda", where, required=False)
        elif "objective" in args:
            obj = _record(args["objective"], where + " objective", {"type", "cap", "t"})
            kind = _str(obj, "type", where + " objective", _OBJECTIVES)
            if kind == "min-tail-at":
                _num(obj, "t", where + " objective", nonneg=True)
            elif kind == "min-prefactor":
                _num(obj, "cap", where + " objective", required=False, positive=True)
    elif verb == "center":
        _str(args, "input", where)
        _str(args, "sign", where, _REGIMES, required=False)
        for flag in ("mean_is_zero", "best_route"):
            if flag in args and not isinstance(args[flag], bool):
                raise SchemaError(f"{where}: field '{flag}' must be true or false")
    elif verb == "shift":
        _str(args, "input", where)
        _num(args, "c", where)
        if args.get("x", "auto") != "auto":
            _num(args, "x", where, positive=True)
        _num(args, "t", where, required=False, nonneg=True)
    elif verb == "recenter":
        _str(args, "input", where)
        _num(args, "mean", where)
        _str(args, "regime", where, _REGIMES, required=False)
        if args.get("x", "auto") != "auto":
            _num(args, "x", where, positive=True)
    elif verb in ("sum", "sum-indep", "max", "psi-combine"):
        _name_list(args, "inputs", where)
        if verb == "psi-combine":
            _str(args, "mode", where, _PSI_MODES)
    elif verb == "chernoff":
        _str(args, "input", where)
        _num(args, "t", where, nonneg=True)
        _str(args, "side", where, _SIDES, required=False)
    elif verb == "martingale-bound":
        if "martingale" not in args:
            raise SchemaError(f"{where}: missing field 'martingale'")
        _parse_martingale(args["martingale"], where + " martingale")
        if ("lambda" in args) == ("threshold" in args):
            raise SchemaError(f"{where}: exactly one of 'lambda' or 'threshold' is required")
        _num(args, "lambda", where, required=False, nonneg=True)
        _num(args, "threshold", where, required=False, nonneg=True)
        _num(args, "eps", where, required=False)
        _num(args, "x", where, required=False)
    elif verb == "direction-bound":
        _num(args, "lambda", where, nonneg=True)
    elif verb == "verify":
        _str(args, "model", where)
        _str(args, "cert", where)
        _int(args, "probes", where, required=False, minimum=1)
        _int(args, "mc_samples", where, required=False, minimum=0)
        _int(args, "seed", where, required=False, minimum=0)
    elif verb == "tail-curve":
        if ("input" in args) == ("martingale" in args):
            raise SchemaError(f"{where}: exactly one of 'input' or 'martingale' is required")
        if "input" in args:
            _str(args, "input", where)
        else:
            _parse_martingale(args["martingale"], where + " martingale")
        _num_list(args, "thresholds", where)
        _str(args, "side", where, _SIDES, required=False)
        _num(args, "eps", where, required=False)
        _num(args, "x", where, required=False)
    elif verb == "simulate":
        if "martingale" not in args:
            raise SchemaError(f"{where}: missing field 'martingale'")
        _parse_martingale(args["martingale"], where + " martingale")
        _str(args, "generator", where, _GENERATORS, required=False)
        _int(args, "trials", where, required=False, minimum=1)
        _int(args, "seed", where, required=False, minimum=0)
        _num_list(args, "thresholds", where)


def _reject_constant(token: str):
    raise SchemaError(f"non-standard JSON constant {token}")


def load_doc(text: str) -> dict:
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"document is not valid JSON: {exc}") from None


def parse_pipeline(raw: Any) -> PipelineDoc:
    """Validate ``raw`` (decoded JSON) against the pipeline schema."""
    doc = _record(raw, "document", {"version", "vars", "ops", "outputs"})
    for key in ("version", "vars", "ops", "outputs"):
        if key not in doc:
            raise SchemaError(f"document: missing field '{key}'")
    version = doc["version"]
    if not isinstance(version, str) or version not in SUPPORTED_VERSIONS:
        raise SchemaError(f"document: field 'version' must be one of {list(SUPPORTED_VERSIONS)}, got {json.dumps(version)}")
    if not isinstance(doc["vars"], list):
        raise SchemaError("document: field 'vars' must be a list")
    if not isinstance(doc["ops"], list):
        raise SchemaError("document: field 'ops' must be a list")
    if not isinstance(doc["outputs"], list) or not all(isinstance(x, str) for x in doc["outputs"]):
        raise SchemaError("document: field 'outputs' must be a list of names")

    names: set[str] = set()
    variables: dict[str, Any] = {}
    for i, entry in enumerate(doc["vars"]):
        where = f"vars[{i}]"
        entry = _record(entry, where, {"name", "model", "cert"})
        name = _str(entry, "name", where)
        if name in names:
            raise SchemaError(f"{where}: field 'name' duplicates {name!r}")
        if ("model" in entry) == ("cert" in entry):
            raise SchemaError(f"{where}: exactly one of 'model' or 'cert' is required")
        names.add(name)
        if "model" in entry:
            variables[name] = _parse_model(entry["model"], f"{where}.model")
        else:
            variables[name] = _parse_cert(entry["cert"], f"{where}.cert")

    ops = []
    for i, entry in enumerate(doc["ops"]):
        where = f"ops[{i}]"
        entry = _record(entry, where, {"verb", "args", "out"})
        verb = _str(entry, "verb", where, set(VERBS))
        out = _str(entry, "out", where)
        if out in names:
            raise SchemaError(f"{where}: field 'out' duplicates {out!r}")
        names.add(out)
        args = _record(entry.get("args", {}), f"{where}.args", _VERB_FIELDS[verb])
        _check_args(verb, args, f"{where}.args")
        ops.append(Op(i, verb, args, out))
    return PipelineDoc(version, variables, tuple(ops), tuple(doc["outputs"]))


# --- execution ------------------------------------------------------------------

@dataclass
class Curve:
    """A curve of bound reports (``kind='bound'``) or simulated frequencies."""

    kind: str
    header: tuple[str, ...]
    rows: list[tuple[float, ...]]
    payload: Any


def _finite_or_none(x: float):
    return x if math.isfinite(x) else None


def _clean(obj):
    if isinstance(obj, float):
        return _finite_or_none(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _cert_json(cert: Certificate) -> dict:
    rho, overflowed = prefactor(cert)
    out = {"type": "certificate", **cert.to_json(), "rho": rho}
    if overflowed:
        out["rho_overflow"] = True
    return out


def _model_json(m: oracle.DistributionModel) -> dict:
    if isinstance(m, oracle.Gaussian):
        params = {"family": "gaussian", "mean": m.mu, "sd": m.sd}
    elif isinstance(m, oracle.Uniform):
        params = {"family": "uniform", "a": m.a, "b": m.b}
    elif isinstance(m, oracle.Rademacher):
        params = {"family": "rademacher", "scale": m.c}
    elif isinstance(m, oracle.CenteredBernoulli):
        params = {"family": "centered-bernoulli", "p": m.p, "scale": m.c}
    else:
        v, p = m.atoms()
        params = {"family": "discrete", "values": list(v), "probs": list(p)}
    return {"type": "model", **params}


def _path_json(path: convert.ConversionPath) -> dict:
    return {"kinds": [k.code for k in path.kinds], "lambdas": list(path.lambdas), "describe": path.describe()}


class Runner:
    def __init__(self, doc: PipelineDoc):
        self.doc = doc
        self.values: dict[str, Any] = dict(doc.vars)
        self.rendered: dict[str, Any] = {}
        self.warnings: list[str] = []

    # reference helpers
    def _get(self, op: Op, name: str, want: type, label: str):
        if name not in self.values:
            raise PipelineReferenceError(f"{op.where}: unknown name {name!r}")
        value = self.values[name]
        if not isinstance(value, want):
            raise PipelineReferenceError(f"{op.where}: {name!r} is not a {label}")
        return value

    def cert(self, op: Op, name: str) -> Certificate:
        return self._get(op, name, Certificate, "certificate")

    def model(self, op: Op, name: str) -> oracle.DistributionModel:
        return self._get(op, name, oracle.DistributionModel, "model")

    def warn(self, op: Op, msg: str) -> None:
        self.warnings.append(f"{op.where}: {msg}")

    def _bound_note(self, op: Op, rep: deviation.BoundReport) -> None:
        if rep.raw_bound > 1.0:
            self.warn(op, f"bound {rep.raw_bound:.6g} at threshold {rep.threshold:.6g} clamped to 1")

    def _record_cert(self, op: Op, cert: Certificate, extra: dict | None = None) -> Certificate:
        if prefactor(cert)[1]:
            self.warn(op, "prefactor exceeds double range; reported as null with log_rho")
        self.rendered[op.out] = {**_cert_json(cert), **(extra or {})}
        return cert

    def run(self) -> dict:
        for op in self.doc.ops:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                try:
                    self.values[op.out] = getattr(self, "op_" + op.verb.replace("-", "_"))(op)
                except (PipelineReferenceError, SchemaError):
                    raise
                except SubgError as exc:
                    raise type(exc)(f"{op.where}: {exc}") from None
            for w in caught:
                self.warn(op, str(w.message))
        results = {}
        for name in self.doc.outputs:
            if name not in self.values:
                raise PipelineReferenceError(f"outputs: unknown name {name!r}")
            if name not in self.rendered:
                v = self.values[name]
                self.rendered[name] = _cert_json(v) if isinstance(v, Certificate) else _model_json(v)
            results[name] = self.rendered[name]
        return {"version": self.doc.version, "results": results, "warnings": self.warnings}

    # verbs
    def op_convert(self, op):
        a = op.args
        cert = convert.direct_convert(self.cert(op, a["input"]), CertKind.from_code(a["target"]),
                                      SignConstraint(a.get("regime", "unconstrained")), a.get("lambda"))
        return self._record_cert(op, cert)

    def op_best_convert(self, op):
        a = op.args
        spec = a.get("objective", {"type": "min-var-proxy"})
        objective = {
            "min-var-proxy": lambda: convert.MinVarProxy(),
            "min-prefactor": lambda: convert.MinPrefactor(spec.get("cap")),
            "min-tail-at": lambda: convert.MinTailAt(float(spec["t"])),
        }[spec["type"]]()
        cert, path = convert.best_convert(self.cert(op, a["input"]), CertKind.from_code(a["target"]),
                                          SignConstraint(a.get("regime", "unconstrained")), objective)
        return self._record_cert(op, cert, {"path": _path_json(path)})

    def op_center(self, op):
        a = op.args
        ctx = VariableContext(SignConstraint(a.get("sign", "unconstrained")), a.get("mean_is_zero", False))
        fn = transform.center_via_best_route if a.get("best_route", False) else transform.center
        res = fn(self.cert(op, a["input"]), ctx)
        extra = {"branch": res.branch, "route": [k.code for k in res.route]}
        if res.lambdas:
            extra["lambdas"] = list(res.lambdas)
        return self._record_cert(op, res.out, extra)

    def op_shift(self, op):
        a = op.args
        params = transform.ShiftParams(float(a["c"]), a.get("x", "auto"), a.get("t"))
        return self._record_cert(op, transform.shift(self.cert(op, a["input"]), params))

    def op_recenter(self, op):
        a = op.args
        cert = transform.recentering_equivalence(self.cert(op, a["input"]), float(a["mean"]),
                                                 SignConstraint(a.get("regime", "unconstrained")),
                                                 a.get("x", "auto"))
        return self._record_cert(op, cert)

    def _combine(self, op, fn, *extra):
        certs = [self.cert(op, n) for n in op.args["inputs"]]
        return self._record_cert(op, fn(certs, *extra))

    def op_sum(self, op):
        return self._combine(op, transform.sum_dependent)

    def op_sum_indep(self, op):
        return self._combine(op, transform.sum_independent)

    def op_max(self, op):
        return self._combine(op, transform.max_of)

    def op_psi_combine(self, op):
        return self._combine(op, transform.psi_combine, transform.PsiMode(op.args["mode"]))

    def op_chernoff(self, op):
        a = op.args
        rep = deviation.chernoff_tail(self.cert(op, a["input"]), float(a["t"]),
                                      deviation.Side(a.get("side", "upper")))
        self._bound_note(op, rep)
        self.rendered[op.out] = {"type": "bound", **rep.to_json()}
        return rep

    def op_martingale_bound(self, op):
        a = op.args
        spec = _parse_martingale(a["martingale"], op.where)
        if "threshold" in a:
            # absolute threshold, in units of the martingale itself
            lam = float(a["threshold"]) / math.sqrt(spec.total_var_proxy)
        else:
            lam = float(a["lambda"])
        rep = deviation.martingale_norm_bound(spec, lam, eps=a.get("eps"), x=a.get("x"))
        self._bound_note(op, rep)
        self.rendered[op.out] = {"type": "bound", **rep.to_json()}
        return rep

    def op_direction_bound(self, op):
        rep = deviation.martingale_direction_bound(float(op.args["lambda"]))
        self.rendered[op.out] = {"type": "bound", **rep.to_json()}
        return rep

    def op_verify(self, op):
        a = op.args
        report = oracle.verify_certificate(
            self.model(op, a["model"]), self.cert(op, a["cert"]),
            probes=a.get("probes", 41), mc_samples=a.get("mc_samples", 0), seed=a.get("seed", 0),
        )
        if report.violations:
            self.warn(op, f"{report.violations} verification violation(s)")
        self.rendered[op.out] = {"type": "verification", **report.to_json()}
        return report

    def op_tail_curve(self, op):
        a = op.args
        if "input" in a:
            source = self.cert(op, a["input"])
            curve = deviation.tail_curve(source, a["thresholds"], deviation.Side(a.get("side", "upper")))
        else:
            spec = _parse_martingale(a["martingale"], op.where)
            kw = {k: a[k] for k in ("eps", "x") if k in a}
            curve = deviation.tail_curve(spec, a["thresholds"], **kw)
        if any(r.raw_bound > 1.0 for r in curve):
            self.warn(op, "some bounds exceed 1 and were clamped")
        self.rendered[op.out] = {"type": "curve", "points": [r.to_json() for r in curve]}
        return Curve("bound", ("threshold", "raw_bound", "clamped"),
                     [(r.threshold, r.raw_bound, r.clamped) for r in curve], curve)

    def op_simulate(self, op):
        a = op.args
        cfg = oracle.MartingaleSimConfig(
            _parse_martingale(a["martingale"], op.where),
            oracle.Generator(a.get("generator", "rademacher")),
            a.get("trials", 10_000),
            a.get("seed", 0),
        )
        res = oracle.simulate_martingale(cfg, a["thresholds"])
        self.rendered[op.out] = {"type": "simulation", **res.to_json()}
        return Curve("simulation", ("threshold", "frequency", "stderr"), res.rows(), res)


def run_pipeline(doc: PipelineDoc | dict) -> dict:
    """Execute every op in order; returns the JSON-ready report."""
    if not isinstance(doc, PipelineDoc):
        doc = parse_pipeline(doc)
    return Runner(doc).run()


def _fmt(x: float) -> str:
    return format(x, ".17g")


def emit_curve_csv(curve, path: str | Path,
                   header: tuple[str, ...] = ("threshold", "raw_bound", "clamped")) -> None:
    """Write ``curve`` (BoundReports or row tuples) as CSV with LF line endings."""
    rows = [(r.threshold, r.raw_bound, r.clamped) if isinstance(r, deviation.BoundReport) else tuple(r)
            for r in curve]
    if not rows:
        raise EmptyInputError("refusing to write an empty curve")
    text = ",".join(header) + "\n" + "".join(",".join(_fmt(x) for x in row) + "\n" for row in rows)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise PipelineIOError(f"cannot write {path}: {exc.strerror or exc}") from None


def example_pipeline_path() -> Path:
    return Path(str(resources.files("subg") / "data" / "example_pipeline.json"))


# --- tables ---------------------------------------------------------------------

_TABLE_SAMPLES = [(lam, rho) for lam in (0.1, 0.3, 0.5, 0.7, 0.9) for rho in (1.0, 1.5, 2.0, 5.0, 100.0)]


def format_table(regime: SignConstraint) -> str:
    lines = [f"# regime: {regime.value}", "source   target   C^2        phi(rho)                                  lam  status"]
    for e in convert.edges(regime):
        status = "proved" if e.proved else "chained"
        lines.append(f"{e.source.code:<8} {e.target.code:<8} {e.c_text:<10} {e.phi_text:<41} "
                     f"{'yes' if e.has_lambda else 'no ':<4} {status}")
    return "\n".join(lines)


def _cmd_tables(args) -> int:
    regimes = {"unsigned": [SignConstraint.UNCONSTRAINED], "signed": [SignConstraint.ONE_SIGNED],
               None: list(SignConstraint)}[args.regime]
    ok = True
    for regime in regimes:
        print(format_table(regime))
        if args.check:
            report = convert.table_consistency_report(regime, _TABLE_SAMPLES)
            for e in report.entries:
                if e.proved:
                    continue
                via = " -> ".join(k.code for k in e.witness) if e.witness else "none"
                print(f"check {e.source.code}->{e.target.code}: {'PASS' if e.passed else 'FAIL'} "
                      f"via {via} (max rel err {e.max_rel_error:.3g})")
            ok = ok and report.passed
        print()
    return EXIT_OK if ok else EXIT_CHECK


def _cmd_run(args) -> int:
    try:
        text = Path(args.doc).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read {args.doc}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    try:
        doc = parse_pipeline(load_doc(text))
        report = Runner(doc)
        out = report.run()
        if args.csv:
            outdir = Path(args.csv)
            try:
                outdir.mkdir(parents=True, exist_ok=True)
            except OSError as exc:
                raise PipelineIOError(f"cannot create {outdir}: {exc.strerror or exc}") from None
            for name in doc.outputs:
                value = report.values[name]
                if isinstance(value, Curve):
                    emit_curve_csv(value.rows, outdir / f"{name}.csv", value.header)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except PipelineReferenceError as exc:
        print(f"reference error: {exc}", file=sys.stderr)
        return EXIT_REFERENCE
    except PipelineIOError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SubgError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    indent = 2 if args.pretty else None
    sys.stdout.write(json.dumps(_clean(out), indent=indent, sort_keys=True, allow_nan=False) + "\n")
    return EXIT_OK


def _cmd_example(args) -> int:
    sys.stdout.write(example_pipeline_path().read_text(encoding="utf-8"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subg", description="Subgaussian certificate calculus.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a JSON pipeline document")
    run.add_argument("doc", help="path to the pipeline JSON")
    run.add_argument("--csv", metavar="DIR", help="write every output curve to DIR/<name>.csv")
    run.add_argument("--pretty", action="store_true", help="indent the JSON output")
    run.set_defaults(func=_cmd_run)

    tables = sub.add_parser("tables", help="print the conversion tables")
    tables.add_argument("--regime", choices=["signed", "unsigned"],
                        help="'signed' is the one-signed table, 'unsigned' the general one (default: both)")
    tables.add_argument("--check", action="store_true", help="verify chained entries against proved ones")
    tables.set_defaults(func=_cmd_tables)

    example = sub.add_parser("example", help="print the bundled example pipeline")
    example.set_defaults(func=_cmd_example)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
