"""Command-line interface.

Configuration files are flat ``key = value`` documents in SI units with ``#``
comments. Unknown keys are rejected. Run ``spinpair --help`` for commands.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .experiment import (
    ExperimentKind,
    enhancement_peak_time,
    longitudinal_trajectory,
)
from .fitting import (
    AllStartsFailed,
    DataSet,
    InvalidTimes,
    ModelFamily,
    TooFewPoints,
    fit_relaxation_model,
    generate_solomon_dataset,
)
from .physsys import CODATA, SpinPairSystem, dipolar_constant, larmor_frequencies
from .propagator import DegenerateSpectrum
from .spectral import Isotropic, ModelFree, collective_rates, sample_at_transitions
from .superop import (
    FIRST_ORDER_LABELS,
    ZERO_ORDER_LABELS,
    build_first_order,
    build_second_order,
    build_zero_order,
    closed_form_rates,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERIC = 2

DEFAULT_SEED = 20240101

# gyromagnetic ratios in rad s^-1 T^-1
NUCLEI = {
    "1H": 267.52218744e6,
    "19F": 251.815e6,
    "13C": 67.2828e6,
    "15N": -27.116e6,
}

_FLOAT_KEYS = {
    "gamma_i", "gamma_s", "b0", "r", "temperature", "tau_c", "order_param_sq", "tau_m", "tau_e",
    "prefactor", "kappa", "t_start", "t_stop",
}
_TEXT_KEYS = {"nucleus_i", "nucleus_s", "model", "kind", "t_spacing", "format", "output"}
_INT_KEYS = {"t_count"}
KNOWN_KEYS = _FLOAT_KEYS | _TEXT_KEYS | _INT_KEYS
REQUIRED_KEYS = ("gamma_i|nucleus_i", "gamma_s|nucleus_s", "b0", "r", "model")


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ValidationError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class TimeGrid:
    start: float = 0.0
    stop: float = 10.0
    count: int = 201
    spacing: str = "linear"

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.logspace(math.log10(self.start), math.log10(self.stop), self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class RunConfig:
    system: SpinPairSystem
    model: Isotropic | ModelFree
    kind: ExperimentKind = ExperimentKind.INVERSION_S
    grid: TimeGrid = field(default_factory=TimeGrid)
    fmt: str = "csv"
    output: str | None = None
    kappa: float | None = None

    def dipolar(self) -> float:
        return dipolar_constant(self.system, CODATA) if self.kappa is None else self.kappa


def _tokenize(text: str) -> dict[str, tuple[str, int]]:
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(lineno, f"expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lower()
        if not key or not value:
            raise ParseError(lineno, "empty key or value")
        if key not in KNOWN_KEYS:
            raise ParseError(lineno, f"unknown key {key!r}")
        if key in entries:
            raise ParseError(lineno, f"duplicate key {key!r}")
        entries[key] = (value, lineno)
    return entries


def _typed(entries) -> dict:
    out = {}
    for key, (value, lineno) in entries.items():
        if key in _FLOAT_KEYS:
            try:
                out[key] = float(value)
            except ValueError:
                raise ParseError(lineno, f"{key} must be a number, got {value!r}") from None
            if not math.isfinite(out[key]):
                raise ValidationError(key, "must be finite")
        elif key in _INT_KEYS:
            try:
                out[key] = int(value)
            except ValueError:
                raise ParseError(lineno, f"{key} must be an integer, got {value!r}") from None
        else:
            out[key] = value
    return out


def _gamma(values: dict, which: str) -> float:
    gkey, nkey = f"gamma_{which}", f"nucleus_{which}"
    if gkey in values and nkey in values:
        raise ValidationError(gkey, f"give either {gkey} or {nkey}, not both")
    if gkey in values:
        return values[gkey]
    name = values[nkey]
    for label, gamma in NUCLEI.items():
        if label.lower() == name.lower():
            return gamma
    raise ValidationError(nkey, f"unknown nucleus {name!r} (known: {', '.join(NUCLEI)})")


def _positive(values: dict, key: str) -> float:
    if key not in values:
        raise ValidationError(key, "required for this model")
    v = values[key]
    if v <= 0:
        raise ValidationError(key, f"must be > 0, got {v!r}")
    return v


def parse_config(text: str) -> RunConfig:
    values = _typed(_tokenize(text))
    missing = [k for k in REQUIRED_KEYS if not any(alt in values for alt in k.split("|"))]
    if missing:
        raise ValidationError(missing[0], "missing required keys: " + ", ".join(missing))

    gamma_i, gamma_s = _gamma(values, "i"), _gamma(values, "s")
    for key in ("b0", "r", "temperature"):
        if key in values and values[key] <= 0:
            raise ValidationError(key, f"must be > 0, got {values[key]!r}")
    if gamma_i == gamma_s:
        raise ValidationError("gamma_s", "the two spins must have different gyromagnetic ratios")
    if gamma_i == 0 or gamma_s == 0:
        raise ValidationError("gamma_i" if gamma_i == 0 else "gamma_s", "must be nonzero")
    system = SpinPairSystem(gamma_i, gamma_s, values["b0"], values["r"], values.get("temperature", 300.0))

    model_name = values["model"].lower()
    if model_name == "isotropic":
        model = Isotropic(_positive(values, "tau_c"))
    elif model_name in ("model-free", "model_free", "modelfree"):
        s2 = _positive(values, "order_param_sq")
        if s2 > 1:
            raise ValidationError("order_param_sq", f"must lie in (0, 1], got {s2!r}")
        prefactor = values.get("prefactor", 2.0)
        if prefactor <= 0:
            raise ValidationError("prefactor", "must be > 0")
        model = ModelFree(s2, _positive(values, "tau_m"), _positive(values, "tau_e"), prefactor)
    else:
        raise ValidationError("model", f"expected isotropic or model-free, got {values['model']!r}")

    kind = ExperimentKind.INVERSION_S
    if "kind" in values:
        try:
            kind = ExperimentKind.parse(values["kind"])
        except ValueError as exc:
            raise ValidationError("kind", str(exc)) from None

    grid = _grid(values)
    fmt = values.get("format", "csv").lower()
    if fmt not in ("csv", "json"):
        raise ValidationError("format", f"expected csv or json, got {fmt!r}")
    kappa = values.get("kappa")
    if kappa is not None and kappa <= 0:
        raise ValidationError("kappa", "must be > 0")
    return RunConfig(system, model, kind, grid, fmt, values.get("output"), kappa)


def _grid(values: dict) -> TimeGrid:
    grid = TimeGrid(
        start=values.get("t_start", 0.0),
        stop=values.get("t_stop", 10.0),
        count=values.get("t_count", 201),
        spacing=values.get("t_spacing", "linear").lower(),
    )
    if grid.spacing not in ("linear", "log"):
        raise ValidationError("t_spacing", f"expected linear or log, got {grid.spacing!r}")
    if grid.count < 2:
        raise ValidationError("t_count", "must be >= 2")
    if grid.start < 0:
        raise ValidationError("t_start", "must be >= 0")
    if grid.stop <= grid.start:
        raise ValidationError("t_stop", "must exceed t_start")
    if grid.spacing == "log" and grid.start <= 0:
        raise ValidationError("t_start", "must be > 0 for log spacing")
    return grid


# ------------------------------------------------------------------ output

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(header, columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in zip(*columns):
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, path: str | None) -> None:
    """Write to ``path`` atomically, or to stdout."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".spinpair-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _model_dict(model) -> dict:
    if isinstance(model, Isotropic):
        return {"type": "Isotropic", "tau_c": model.tau_c}
    return {"type": "ModelFree", "order_param_sq": model.order_param_sq, "tau_m": model.tau_m,
            "tau_e": model.tau_e, "prefactor": model.prefactor}


def read_dataset(path: str) -> DataSet:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InvalidTimes(f"{path}: empty dataset")
    header = [h.strip() for h in rows[0]]
    if "t_s" not in header:
        raise InvalidTimes(f"{path}: header must contain t_s")
    ycol = "upsilon" if "upsilon" in header else "upsilon_I"
    if ycol not in header:
        raise InvalidTimes(f"{path}: header must contain upsilon or upsilon_I")
    ti, yi = header.index("t_s"), header.index(ycol)
    try:
        data = [(float(r[ti]), float(r[yi])) for r in rows[1:] if r]
    except (ValueError, IndexError) as exc:
        raise InvalidTimes(f"{path}: malformed row ({exc})") from None
    t, y = (np.array(col) for col in zip(*data)) if data else (np.array([]), np.array([]))
    return DataSet(t, y, label=os.path.basename(path))


# ---------------------------------------------------------------- commands

def _load(args) -> RunConfig:
    with open(args.config, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _output_path(args, cfg: RunConfig | None) -> str | None:
    if getattr(args, "output", None):
        return args.output
    return cfg.output if cfg else None


def cmd_rates(args) -> int:
    cfg = _load(args)
    samples = sample_at_transitions(cfg.model, larmor_frequencies(cfg.system))
    rs = closed_form_rates(samples, cfg.dipolar())
    coll = collective_rates(samples)
    times = {("T" + k[1:]): (1.0 / v if v > 0 else None) for k, v in rs.rates().items()}
    doc = {
        "kappa": rs.kappa,
        "samples": dict(zip(("j0", "jS", "jI", "jPlus", "jMinus"), samples.as_tuple())),
        "jp": coll.jp,
        "jn": coll.jn,
        "iota": rs.iotas(),
        "rates": rs.rates(),
        "times": times,
    }
    _emit(_json(doc), _output_path(args, None))
    return EXIT_OK


def cmd_superop(args) -> int:
    cfg = _load(args)
    samples = sample_at_transitions(cfg.model, larmor_frequencies(cfg.system))
    doc = {
        "units": "s",
        "zero_order": {"basis": list(ZERO_ORDER_LABELS), "matrix": build_zero_order(samples).tolist()},
        "first_order": {"basis": list(FIRST_ORDER_LABELS), "matrix": build_first_order(samples).tolist()},
        "second_order": {"basis": ["r14"], "matrix": [[build_second_order(samples)]]},
    }
    _emit(_json(doc), _output_path(args, None))
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = _load(args)
    kind = ExperimentKind.parse(args.kind) if args.kind else cfg.kind
    traj = longitudinal_trajectory(kind, cfg.system, cfg.model, CODATA, cfg.grid.values(), kappa=cfg.kappa)
    fmt = args.format or cfg.fmt
    if fmt == "json":
        text = _json({"kind": kind.value, "times": traj.times.tolist(),
                      "upsilon_I": traj.upsilon_I.tolist(), "upsilon_S": traj.upsilon_S.tolist()})
    else:
        text = _write_csv(["t_s", "upsilon_I", "upsilon_S"], [traj.times, traj.upsilon_I, traj.upsilon_S])
    _emit(text, _output_path(args, cfg))
    return EXIT_OK


def cmd_tmax(args) -> int:
    cfg = _load(args)
    samples = sample_at_transitions(cfg.model, larmor_frequencies(cfg.system))
    peak = enhancement_peak_time(cfg.dipolar(), collective_rates(samples))
    note = " (equal-rate limit)" if peak.degenerate_limit else ""
    sys.stdout.write(f"t_m = {peak.t_m:.5g} s{note}\n")
    return EXIT_OK


def cmd_fit(args) -> int:
    cfg = _load(args)
    data = read_dataset(args.data)
    prefactor = cfg.model.prefactor if isinstance(cfg.model, ModelFree) else 2.0
    result = fit_relaxation_model(data, cfg.system, CODATA, ModelFamily.parse(args.family),
                                  kappa=cfg.kappa, prefactor=prefactor)
    doc = {
        "family": result.family,
        "model": _model_dict(result.model),
        "parameters": result.parameters,
        "sse": result.sse,
        "iterations": result.iterations,
        "converged": result.converged,
        "gradient_norm": result.gradient_norm,
        "kappa": result.kappa,
        "data": data.label,
        "points": len(data),
    }
    _emit(_json(doc), args.output)
    return EXIT_OK


def cmd_generate(args) -> int:
    times = _load(args).grid.values() if args.config else None
    seed = int(os.environ.get("SPINPAIR_SEED", DEFAULT_SEED))
    data = generate_solomon_dataset(args.t1, args.d1, args.amplitude, times, noise=args.noise, seed=seed)
    _emit(_write_csv(["t_s", "upsilon"], [data.times, data.upsilon]), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinpair", description="Relaxation of a dipole-coupled unlike spin-1/2 pair")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p, required=True):
        p.add_argument("--config", required=required, help="key = value configuration file")
        p.add_argument("--output", help="output path (default: stdout)")
        return p

    with_config(sub.add_parser("rates", help="eigenvalues, rates and time constants (JSON)")).set_defaults(func=cmd_rates)
    with_config(sub.add_parser("superop", help="dump the three relaxation matrices (JSON)")).set_defaults(func=cmd_superop)

    p = with_config(sub.add_parser("experiment", help="longitudinal trajectory (CSV or JSON)"))
    p.add_argument("--kind", choices=[k.value for k in ExperimentKind])
    p.add_argument("--format", choices=["csv", "json"])
    p.set_defaults(func=cmd_experiment)

    sub.add_parser("tmax", help="time of maximum enhancement").add_argument("--config", required=True)
    sub.choices["tmax"].set_defaults(func=cmd_tmax)

    p = with_config(sub.add_parser("fit", help="fit a spectral-density model to a dataset (JSON)"))
    p.add_argument("--data", required=True, help="CSV with columns t_s,upsilon")
    p.add_argument("--family", default="isotropic", choices=[f.value for f in ModelFamily])
    p.set_defaults(func=cmd_fit)

    p = with_config(sub.add_parser("generate-data", help="synthetic Solomon dataset (CSV)"), required=False)
    p.add_argument("--t1", type=float, default=1.27, help="fast time constant, s")
    p.add_argument("--d1", type=float, default=2.55, help="slow time constant, s")
    p.add_argument("--amplitude", type=float, default=0.5)
    p.add_argument("--noise", type=float, default=0.0, help="Gaussian noise standard deviation")
    p.set_defaults(func=cmd_generate)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    try:
        return args.func(args)
    except (ParseError, ValidationError, InvalidTimes, TooFewPoints, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (AllStartsFailed, DegenerateSpectrum, OverflowError, FloatingPointError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(run())
