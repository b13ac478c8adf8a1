"""Command-line front end.

Usage::

    jetmorse <command> --config FILE [--seed N] [--output PATH] [--format json|csv]

A config is one flat JSON object: ``command`` (optional, must match the
positional command), ``seed``, ``output``, ``format``, ``ratio`` and the
command's parameters.  Unknown keys are rejected.  Rationals are written as
strings such as ``"3/2"``.  Setting exactly one parameter to
``{"range": [a, b]}`` (inclusive, optional ``"step"``) or
``{"values": [...]}`` turns the run into a sweep.

Exit codes: 0 success, 2 validation error, 3 numerical diagnostic (for
example degenerate Morse cells over threshold).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .errors import DomainError
from .exact import to_fraction
from . import gg_tower, ideal_closure, jet_algebra, morse_engine

COMMANDS = ("dim", "jets", "morse", "bounded", "closure", "gg", "certify")
RESERVED = ("command", "seed", "output", "format", "ratio")
SIG_DIGITS = 12
EXIT_OK, EXIT_VALIDATION, EXIT_DIAGNOSTIC = 0, 2, 3


class ConfigError(ValueError):
    def __init__(self, key: Optional[str], message: str):
        super().__init__(message)
        self.key = key
        self.message = message


# ---------------------------------------------------------------------------
# value parsers; each returns a canonical python value


def _int(lo: Optional[int] = None, hi: Optional[int] = None) -> Callable[[str, Any], int]:
    def parse(key: str, v: Any) -> int:
        if isinstance(v, bool):
            raise ConfigError(key, "expected an integer")
        if isinstance(v, str):
            try:
                v = int(v.strip())
            except ValueError:
                raise ConfigError(key, f"expected an integer, got {v!r}") from None
        if isinstance(v, float) and v.is_integer():
            v = int(v)
        if not isinstance(v, int):
            raise ConfigError(key, f"expected an integer, got {v!r}")
        if lo is not None and v < lo:
            raise ConfigError(key, f"must be >= {lo}")
        if hi is not None and v > hi:
            raise ConfigError(key, f"must be <= {hi}")
        return v

    return parse


def _rational(positive: bool = False) -> Callable[[str, Any], Fraction]:
    def parse(key: str, v: Any) -> Fraction:
        try:
            f = to_fraction(v)
        except ValueError as exc:
            raise ConfigError(key, str(exc)) from None
        if positive and f <= 0:
            raise ConfigError(key, "must be positive")
        return f

    return parse


def _real(positive: bool = True) -> Callable[[str, Any], float]:
    def parse(key: str, v: Any) -> float:
        f = float(_rational()(key, v))
        if positive and f <= 0:
            raise ConfigError(key, "must be positive")
        return f

    return parse


def _choice(options: Sequence[str]) -> Callable[[str, Any], str]:
    def parse(key: str, v: Any) -> str:
        if v not in options:
            raise ConfigError(key, f"expected one of {list(options)}, got {v!r}")
        return v

    return parse


def _text(key: str, v: Any) -> str:
    if not isinstance(v, str) or not v.strip():
        raise ConfigError(key, "expected a non-empty string")
    return v


def _bool(key: str, v: Any) -> bool:
    if not isinstance(v, bool):
        raise ConfigError(key, "expected true or false")
    return v


def _int_vectors(key: str, v: Any) -> List[List[int]]:
    if not isinstance(v, list) or not v:
        raise ConfigError(key, "expected a non-empty list of exponent vectors")
    out = []
    for i, row in enumerate(v):
        if not isinstance(row, list) or not row:
            raise ConfigError(f"{key}[{i}]", "expected a list of integers")
        out.append([_int(0)(f"{key}[{i}]", x) for x in row])
    if len({len(r) for r in out}) != 1:
        raise ConfigError(key, "exponent vectors must share one length")
    return out


def _int_vector(key: str, v: Any) -> List[int]:
    if not isinstance(v, list) or not v:
        raise ConfigError(key, "expected a list of integers")
    return [_int(0)(f"{key}[{i}]", x) for i, x in enumerate(v)]


def _weights(key: str, v: Any) -> List[Tuple[Any, Fraction]]:
    if not isinstance(v, list):
        raise ConfigError(key, "expected a list of [point, lambda] pairs")
    out = []
    for i, pair in enumerate(v):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigError(f"{key}[{i}]", "expected [point, lambda]")
        point, lam = pair
        if isinstance(point, str) and point.strip().lower() in ("inf", "infinity"):
            pt: Any = "inf"
        else:
            pt = _rational()(f"{key}[{i}]", point)
        lam = _rational()(f"{key}[{i}]", lam)
        if lam == 0:
            raise ConfigError(f"{key}[{i}]", "lambda must be nonzero")
        out.append((pt, lam))
    return out


def _matrix_map(key: str, v: Any) -> Dict[str, List[List[Fraction]]]:
    if not isinstance(v, dict) or not v:
        raise ConfigError(key, "expected a map from form tokens to matrices")
    out = {}
    for tok, mat in v.items():
        sub = f"{key}.{tok}"
        if not isinstance(mat, list):
            mat = [[mat]]
        rows = []
        for i, row in enumerate(mat):
            if not isinstance(row, list):
                raise ConfigError(sub, "expected a square matrix")
            rows.append([_rational()(f"{sub}[{i}]", x) for x in row])
        if any(len(r) != len(rows) for r in rows):
            raise ConfigError(sub, "expected a square matrix")
        if any(rows[i][j] != rows[j][i] for i in range(len(rows)) for j in range(len(rows))):
            raise ConfigError(sub, "matrix must be symmetric")
        out[tok] = rows
    return out


def _rational_list(key: str, v: Any) -> List[Fraction]:
    if not isinstance(v, list) or not v:
        raise ConfigError(key, "expected a list of rationals")
    return [_rational(True)(f"{key}[{i}]", x) for i, x in enumerate(v)]


_MODEL = _choice(tuple(morse_engine.MODEL_DIMS))
_NO_DEFAULT = object()

# command -> {param: (parser, default)}
SCHEMAS: Dict[str, Dict[str, Tuple[Callable, Any]]] = {
    "dim": {"k": (_int(1), _NO_DEFAULT), "m": (_int(0), _NO_DEFAULT), "r": (_int(1), _NO_DEFAULT)},
    "jets": {
        "k": (_int(1), _NO_DEFAULT),
        "m": (_int(0), _NO_DEFAULT),
        "r": (_int(1), _NO_DEFAULT),
        "limit": (_int(0), 1000),
    },
    "morse": {
        "model": (_MODEL, _NO_DEFAULT),
        "field": (_text, _NO_DEFAULT),
        "grid": (_int(1), 64),
        "m": (_int(1), 10),
        "r": (_int(1), 1),
        "tol": (_real(), 1e-9),
        "degenerate_threshold": (_real(), 1e-3),
        "mc_samples": (_int(1), morse_engine.DEFAULT_MC_SAMPLES),
    },
    "bounded": {"d": (_int(), _NO_DEFAULT), "weights": (_weights, []), "m": (_int(1), _NO_DEFAULT)},
    "closure": {
        "generators": (_int_vectors, _NO_DEFAULT),
        "p": (_rational(True), Fraction(1)),
        "beta": (_int_vector, None),
    },
    "gg": {
        "model": (_MODEL, "P1"),
        "vb": (_matrix_map, _NO_DEFAULT),
        "theta_F": (_text, "0*w"),
        "k": (_int(1), _NO_DEFAULT),
        "q": (_int(0), 0),
        "N": (_int(2), 100_000),
        "shards": (_int(1), 8),
        "grid": (_int(1), 4),
        "eta_grid": (_int(1), 64),
        "eps": (_rational_list, None),
        "trace_model": (_bool, False),
        "tol": (_real(), 1e-9),
    },
    "certify": {
        "model": (_MODEL, _NO_DEFAULT),
        "eta": (_text, _NO_DEFAULT),
        "grid": (_int(1), 64),
        "m_ref": (_int(1), 1),
        "r": (_int(1), 1),
        "tol": (_real(), 1e-9),
        "degenerate_threshold": (_real(), 1e-3),
        "mc_samples": (_int(1), morse_engine.DEFAULT_MC_SAMPLES),
    },
}


@dataclass
class ExperimentConfig:
    command: str
    parameters: Dict[str, Any]
    seed: int = 0
    output: Optional[str] = None
    format: str = "json"
    sweep_key: Optional[str] = None
    sweep_values: Optional[List[Any]] = None
    ratio: Optional[Dict[str, str]] = None


def _ranged(value: Any) -> bool:
    return isinstance(value, dict) and ("range" in value or "values" in value)


def _expand_range(key: str, spec: Dict[str, Any]) -> List[Any]:
    extra = set(spec) - {"range", "values", "step"}
    if extra:
        raise ConfigError(f"{key}.{sorted(extra)[0]}", "unknown key in ranged parameter")
    if "values" in spec:
        if "range" in spec or "step" in spec or not isinstance(spec["values"], list) or not spec["values"]:
            raise ConfigError(key, "'values' must be a non-empty list on its own")
        return list(spec["values"])
    rng = spec["range"]
    if not isinstance(rng, list) or len(rng) != 2:
        raise ConfigError(f"{key}.range", "expected [start, stop]")
    start, stop = (_int()(f"{key}.range", x) for x in rng)
    step = _int(1)(f"{key}.step", spec.get("step", 1))
    if stop < start:
        raise ConfigError(f"{key}.range", "stop must be >= start")
    return list(range(start, stop + 1, step))


def parse_config(doc: Any, command: Optional[str] = None) -> ExperimentConfig:
    """Validate a config document; raises :class:`ConfigError` naming the bad key."""
    if not isinstance(doc, dict):
        raise ConfigError(None, "config must be a JSON object")
    cmd = doc.get("command", command)
    if cmd is None:
        raise ConfigError("command", "missing command")
    if cmd not in COMMANDS:
        raise ConfigError("command", f"unknown command {cmd!r}; expected one of {list(COMMANDS)}")
    if command is not None and cmd != command:
        raise ConfigError("command", f"config is for {cmd!r} but {command!r} was requested")
    schema = SCHEMAS[cmd]
    for key in doc:
        if key not in RESERVED and key not in schema:
            raise ConfigError(key, f"unknown key for command {cmd!r}")
    seed = _int(0, 2**64 - 1)("seed", doc.get("seed", 0))
    fmt = _choice(("json", "csv"))("format", doc.get("format", "json"))
    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output", "expected a path string")
    ranged = [k for k in schema if _ranged(doc.get(k))]
    if len(ranged) > 1:
        raise ConfigError(ranged[1], f"only one ranged parameter allowed, found {ranged}")
    params: Dict[str, Any] = {}
    sweep_key, sweep_values = None, None
    for key, (parser, default) in schema.items():
        if key in ranged:
            raw_values = _expand_range(key, doc[key])
            sweep_key = key
            sweep_values = [parser(key, v) for v in raw_values]
            params[key] = sweep_values[0]
        elif key in doc:
            params[key] = parser(key, doc[key]) if doc[key] is not None else None
            if params[key] is None and default is _NO_DEFAULT:
                raise ConfigError(key, "value required")
        elif default is _NO_DEFAULT:
            raise ConfigError(key, "missing required parameter")
        else:
            params[key] = default
    ratio = doc.get("ratio")
    if ratio is not None:
        if sweep_key is None:
            raise ConfigError("ratio", "a ratio column needs a ranged parameter")
        if not isinstance(ratio, dict) or set(ratio) != {"numerator", "denominator"}:
            raise ConfigError("ratio", "expected {numerator, denominator} payload fields")
        if not all(isinstance(v, str) for v in ratio.values()):
            raise ConfigError("ratio", "field names must be strings")
    return ExperimentConfig(cmd, params, seed, output, fmt, sweep_key, sweep_values, ratio)


# ---------------------------------------------------------------------------
# canonical serialization


def _round(x: float) -> Any:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    r = float(f"{x:.{SIG_DIGITS}g}")
    return 0.0 if r == 0 else r


def canonical(obj: Any) -> Any:
    """JSON-ready copy: floats to 12 significant digits, rationals as strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return canonical(obj.tolist())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(canonical(obj), sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def serialize_config(cfg: ExperimentConfig) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"command": cfg.command, "seed": cfg.seed}
    for key, value in cfg.parameters.items():
        if key == cfg.sweep_key:
            doc[key] = {"values": canonical(cfg.sweep_values)}
        else:
            doc[key] = canonical(value)
    if cfg.ratio:
        doc["ratio"] = dict(cfg.ratio)
    return doc


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(dumps(serialize_config(cfg)).encode()).hexdigest()


# ---------------------------------------------------------------------------
# command handlers; each returns (payload, provenance extras, diagnostic flag)


def _run_dim(p, seed, chash):
    return {"dimension": jet_algebra.dim_gg(p["k"], p["m"], p["r"])}, {}, False


def _run_jets(p, seed, chash):
    count = jet_algebra.dim_gg(p["k"], p["m"], p["r"])
    profiles = []
    for prof in jet_algebra.enumerate_profiles(p["k"], p["m"], p["r"]):
        if len(profiles) >= p["limit"]:
            break
        profiles.append([list(a) for a in prof.alphas])
    return {"count": count, "profiles": profiles, "truncated": len(profiles) < count}, {}, False


def _model(p) -> morse_engine.ModelManifold:
    return morse_engine.ModelManifold(p["model"], p["grid"], mc_samples=p["mc_samples"])


def _parse_field(model, key, text):
    try:
        return morse_engine.parse_field(model, text)
    except ValueError as exc:
        raise ConfigError(key, str(exc)) from None


def _run_morse(p, seed, chash):
    model = _model(p)
    fld = _parse_field(model, "field", p["field"])
    spec = morse_engine.morse_integrals(fld, p["tol"], p["degenerate_threshold"])
    n, m, r = model.n, p["m"], p["r"]
    exact_h, chi = None, None
    if fld.constant and fld.line_class is not None:
        try:
            exact_h = [r * h for h in morse_engine.exact_cohomology(model, fld.line_class, m)]
            chi = sum((-1) ** q * h for q, h in enumerate(exact_h))
        except DomainError:
            exact_h = None
    payload = {
        "integrals": spec.integrals,
        "plain_integral": spec.plain_integral,
        "index_mass": spec.index_mass,
        "degenerate_mass": spec.degenerate_mass,
        "flagged": spec.flagged,
        "wm_bound": [morse_engine.wm_bound(q, m, r, spec) for q in range(n + 1)],
        "sm_alternating": [morse_engine.sm_alternating(q, m, r, spec) for q in range(n + 1)],
        "lower_bound": [morse_engine.lower_bound_q(q, m, r, spec) for q in range(n + 1)],
        "rr_estimate": morse_engine.rr_estimate(m, r, spec),
        "exact_cohomology": exact_h,
        "exact_chi": chi,
    }
    return payload, {"grid": spec.grid_meta}, spec.flagged


def _run_bounded(p, seed, chash):
    try:
        metric = morse_engine.QDivisorMetricP1(p["d"], tuple(p["weights"]))
    except DomainError as exc:
        raise ConfigError("weights", str(exc)) from None
    return {"dimension": morse_engine.bounded_sections_p1(metric, p["m"])}, {}, False


def _run_closure(p, seed, chash):
    gens = p["generators"]
    ideal = ideal_closure.MonomialIdeal(len(gens[0]), tuple(tuple(g) for g in gens))
    closed = ideal_closure.closure_power(ideal, p["p"])
    payload: Dict[str, Any] = {
        "input_generators": [list(g) for g in ideal.generators],
        "p": p["p"],
        "generators": [list(g) for g in closed.generators],
    }
    if p["beta"] is not None:
        if len(p["beta"]) != ideal.n:
            raise ConfigError("beta", f"expected {ideal.n} exponents")
        payload["member"] = ideal_closure.membership(ideal, p["p"], p["beta"])
    return payload, {}, False


def _run_gg(p, seed, chash):
    model = morse_engine.ModelManifold(p["model"], p["grid"])
    theta_f = _parse_field(model, "theta_F", p["theta_F"])
    try:
        vb = gg_tower.VBundleCurvature.from_forms(
            model, {tok: np.array([[float(x) for x in row] for row in mat]) for tok, mat in p["vb"].items()}
        )
    except DomainError as exc:
        raise ConfigError("vb", str(exc)) from None
    k = p["k"]
    sched = gg_tower.EpsilonSchedule.default(k)
    if p["eps"] is not None:
        try:
            sched = gg_tower.EpsilonSchedule(tuple(p["eps"]))
        except DomainError as exc:
            raise ConfigError("eps", str(exc)) from None
        if sched.k != k:
            raise ConfigError("eps", f"expected {k} weights")
    est = gg_tower.gg_morse_mc(
        k, p["q"], vb, theta_f, sched, p["N"], seed, p["shards"], p["tol"], p["trace_model"]
    )
    fine = morse_engine.ModelManifold(p["model"], p["eta_grid"])
    eta_field = gg_tower.eta_forms(vb, morse_engine.parse_field(fine, p["theta_F"])).eta
    eta_spec = morse_engine.morse_integrals(eta_field)
    rhs = gg_tower.rhs_coefficient(k, model.n, vb.r, eta_spec, p["q"])
    cal = gg_tower.k1_calibration(vb.r, seed=seed)
    ratio = cal * est.value / rhs if rhs else None
    ratio_err = cal * est.stderr / abs(rhs) if rhs else None
    payload = {
        "value": est.value,
        "stderr": est.stderr,
        "N": est.N,
        "seed": seed,
        "config_hash": chash,
        "k": k,
        "q": p["q"],
        "n": est.n,
        "r": est.r,
        "rhs": rhs,
        "calibration": cal,
        "ratio": ratio,
        "ratio_stderr": ratio_err,
        "eta_integrals": eta_spec.integrals,
        "metadata": est.meta,
    }
    return payload, {"N": est.N, "shards": est.shards, "grid": model.meta()}, False


def _run_certify(p, seed, chash):
    model = _model(p)
    fld = _parse_field(model, "eta", p["eta"])
    spec = morse_engine.morse_integrals(fld, p["tol"], p["degenerate_threshold"])
    cert = gg_tower.certify_bigness(spec, p["m_ref"], p["r"])
    payload = {
        "positive": cert.positive,
        "margin": cert.margin,
        "kahler_current_mode": cert.kahler_current_mode,
        "h0_lower": cert.h0_lower,
        "integrals": spec.integrals,
        "degenerate_mass": spec.degenerate_mass,
        "flagged": spec.flagged,
    }
    return payload, {"grid": spec.grid_meta}, spec.flagged


HANDLERS = {
    "dim": _run_dim,
    "jets": _run_jets,
    "morse": _run_morse,
    "bounded": _run_bounded,
    "closure": _run_closure,
    "gg": _run_gg,
    "certify": _run_certify,
}


def _timestamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _record(cfg: ExperimentConfig, params: Dict[str, Any]) -> Tuple[Dict[str, Any], bool]:
    single = ExperimentConfig(cfg.command, params, cfg.seed)
    chash = config_hash(single)
    try:
        payload, prov, flagged = HANDLERS[cfg.command](params, cfg.seed, chash)
    except DomainError as exc:
        raise ConfigError(None, str(exc)) from None
    provenance = {"tool": "jetmorse", "version": __version__, "seed": cfg.seed}
    provenance.update(prov)
    record = {
        "command": cfg.command,
        "config_hash": chash,
        "timestamp": _timestamp(),
        "payload": canonical(payload),
        "provenance": canonical(provenance),
    }
    return record, flagged


def run(cfg: ExperimentConfig) -> Tuple[Dict[str, Any], bool]:
    """Execute a single (non-swept) experiment; returns ``(record, diagnostic_flag)``."""
    return _record(cfg, dict(cfg.parameters))


def _lookup(payload: Any, path: str) -> Any:
    cur = payload
    for part in path.split("."):
        if isinstance(cur, dict) and part in cur:
            cur = cur[part]
        elif isinstance(cur, list) and part.lstrip("-").isdigit() and -len(cur) <= int(part) < len(cur):
            cur = cur[int(part)]
        else:
            raise ConfigError("ratio", f"payload has no field {path!r}")
    return cur


def _flatten(prefix: str, value: Any, out: Dict[str, Any]) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else k, value[k], out)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(f"{prefix}.{i}", v, out)
    else:
        out[prefix] = value


def sweep(cfg: ExperimentConfig) -> Tuple[List[Dict[str, Any]], Dict[str, Any], bool]:
    """Run one record per value of the ranged parameter, plus a table."""
    if cfg.sweep_key is None:
        raise ConfigError(None, "sweep needs exactly one ranged parameter")
    records, rows, flagged = [], [], False
    for value in cfg.sweep_values:
        params = dict(cfg.parameters)
        params[cfg.sweep_key] = value
        rec, flag = _record(cfg, params)
        flagged = flagged or flag
        records.append(rec)
        flat: Dict[str, Any] = {cfg.sweep_key: canonical(value)}
        _flatten("", {k: v for k, v in rec["payload"].items() if k not in ("metadata", "profiles")}, flat)
        if cfg.ratio:
            num = _lookup(rec["payload"], cfg.ratio["numerator"])
            den = _lookup(rec["payload"], cfg.ratio["denominator"])
            try:
                flat["ratio_column"] = _round(float(num) / float(den)) if float(den) != 0 else None
            except (TypeError, ValueError):
                raise ConfigError("ratio", "ratio fields must be numeric") from None
        rows.append(flat)
    columns: List[str] = []
    for row in rows:
        for c in row:
            if c not in columns:
                columns.append(c)
    table = {"columns": columns, "rows": [[row.get(c) for c in columns] for row in rows]}
    return records, table, flagged


def _csv(columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if v is None else (json.dumps(v) if isinstance(v, bool) else v) for v in row])
    return buf.getvalue()


def render(cfg: ExperimentConfig, records: List[Dict[str, Any]], table: Optional[Dict[str, Any]]) -> str:
    if cfg.format == "csv":
        if table is None:
            flat: Dict[str, Any] = {}
            _flatten("", {k: v for k, v in records[0]["payload"].items() if k not in ("metadata", "profiles")}, flat)
            table = {"columns": list(flat), "rows": [list(flat.values())]}
        return _csv(table["columns"], table["rows"])
    if table is None:
        return json.dumps(records[0], sort_keys=True, indent=2) + "\n"
    return json.dumps({"records": records, "table": table}, sort_keys=True, indent=2) + "\n"


def _error(key: Optional[str], message: str, kind: str = "validation") -> int:
    sys.stderr.write(json.dumps({"error": {"type": kind, "key": key, "message": message}}, sort_keys=True) + "\n")
    return EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jetmorse", description="Jet differentials and Morse integral experiments.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON config file ('-' for stdin)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--output", default=None, help="write the result here instead of stdout")
    parser.add_argument("--format", choices=("json", "csv"), default=None)
    parser.add_argument("--version", action="version", version=f"jetmorse {__version__}")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config == "-":
            text = sys.stdin.read()
        else:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        return _error("config", f"cannot read config: {exc}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        return _error("config", f"invalid JSON: {exc}")
    if isinstance(doc, dict):
        if args.seed is not None:
            doc["seed"] = args.seed
        if args.format is not None:
            doc["format"] = args.format
        if args.output is not None:
            doc["output"] = args.output
    try:
        cfg = parse_config(doc, args.command)
        if cfg.sweep_key is None:
            record, flagged = run(cfg)
            text_out = render(cfg, [record], None)
        else:
            records, table, flagged = sweep(cfg)
            text_out = render(cfg, records, table)
    except ConfigError as exc:
        return _error(exc.key, exc.message)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text_out)
    else:
        sys.stdout.write(text_out)
    return EXIT_DIAGNOSTIC if flagged else EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
