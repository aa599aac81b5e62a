"""Command-line front end.

Tolerances are layered: command-line flags override the ``[casimir]``
section of ``--config``, which overrides ``CASIMIR_REL_TOL``, which
overrides the built-in defaults. Numbers are written in scientific
notation with 9 significant digits so identical requests give
byte-identical output.
"""

import argparse
import configparser
import json
import math
import sys
from dataclasses import dataclass
from typing import Optional

from . import closed_form as cf
from . import validation
from .core import BoundaryPair, CasimirReport, PlateConfig, SeriesControl, ThermalState, default_control
from .errors import ConvergenceError, ValidationError

__all__ = [
    "CSV_HEADER",
    "RunRequest",
    "Range",
    "parse_range",
    "format_number",
    "report_to_json",
    "report_from_json",
    "compute",
    "scan",
    "limits",
    "build_parser",
    "main",
]

CSV_HEADER = "axis,value,energy_per_area,free_energy_per_area,entropy_per_area,pressure,err_E,err_F,err_S,err_P"
LIMITS_HEADER = "n_dim,bc,d,entropy_high_T,free_energy_high_T_per_T,pressure_high_T_per_T"
CONFIG_SECTION = "casimir"
CONFIG_KEYS = {"rel_tol": float, "abs_tol": float, "max_terms": int, "extrapolation_tol": float}

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_CONVERGENCE = 0, 1, 2, 3

_REPORT_FIELDS = (
    "engine", "n_dim", "bc", "d", "T", "energy_per_area", "free_energy_per_area",
    "entropy_per_area", "pressure", "error_bounds", "classical_ratio",
)
_ERROR_FIELDS = ("energy", "free_energy", "entropy", "pressure")


@dataclass(frozen=True)
class Range:
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ValidationError("range count must be >= 2")
        if not self.start < self.stop:
            raise ValidationError("range start must be below stop")

    def points(self):
        # endpoints exact; interior points by a fixed formula for reproducibility
        k = self.count - 1
        return [self.start + (self.stop - self.start) * i / k for i in range(k)] + [self.stop]


@dataclass(frozen=True)
class RunRequest:
    command: str
    bc: BoundaryPair
    n_dim: int
    separation: object  # float or Range
    temperature: object  # float or Range; 0 is zero temperature
    ctrl: SeriesControl
    output_format: str = "json"
    output_path: Optional[str] = None


def parse_range(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"range {text!r} must look like start:stop:count")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValidationError(f"range {text!r} must look like start:stop:count") from None
    return Range(start, stop, count)


def format_number(x):
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    # adding 0.0 folds -0.0 into 0.0
    return "%.8e" % (x + 0.0)


def _csv_number(x):
    x = float(x)
    return "nan" if math.isnan(x) else "%.8e" % (x + 0.0)


# ---------------------------------------------------------------- serialization

def _json_object(items, indent):
    pad = "  " * (indent + 1)
    body = ",\n".join(f"{pad}{json.dumps(k)}: {v}" for k, v in items)
    return "{\n" + body + "\n" + "  " * indent + "}"


def _report_json(data, indent=0):
    items = []
    for key in _REPORT_FIELDS:
        value = data[key]
        if key == "error_bounds":
            text = _json_object([(k, format_number(value[k])) for k in _ERROR_FIELDS], indent + 1)
        elif key in ("engine", "bc"):
            text = json.dumps(value)
        else:
            text = format_number(value)
        items.append((key, text))
    return _json_object(items, indent)


def report_to_json(report):
    return _report_json(report.to_dict())


def report_from_json(text):
    return CasimirReport.from_dict(json.loads(text))


def _failed_point(n_dim, bc, d, T):
    nan = float("nan")
    return {
        "engine": None, "n_dim": n_dim, "bc": bc.value, "d": d, "T": T,
        "energy_per_area": nan, "free_energy_per_area": nan, "entropy_per_area": nan, "pressure": nan,
        "error_bounds": dict.fromkeys(_ERROR_FIELDS, nan), "classical_ratio": nan,
    }


def _csv_row(axis, value, data):
    eb = data["error_bounds"]
    nums = [data["energy_per_area"], data["free_energy_per_area"], data["entropy_per_area"], data["pressure"]]
    nums += [eb[k] for k in _ERROR_FIELDS]
    return ",".join([axis, _csv_number(value)] + [_csv_number(v) for v in nums])


# ---------------------------------------------------------------- operations

def compute(req):
    """One report for a single (d, T) point."""
    if isinstance(req.separation, Range) or isinstance(req.temperature, Range):
        raise ValidationError("compute takes a single point; use scan for ranges")
    cfg = PlateConfig(req.n_dim, req.separation)
    return cf.casimir_report(cfg, ThermalState.from_temperature(req.temperature), req.bc, req.ctrl)


def scan(req):
    """Evaluate along the ranged axis.

    Returns ``(axis, rows, worst_exit)`` where rows are ``(value, dict)``
    in increasing axis order; failed points carry NaN fields.
    """
    d_ranged = isinstance(req.separation, Range)
    t_ranged = isinstance(req.temperature, Range)
    if d_ranged == t_ranged:
        raise ValidationError("scan needs exactly one of --sep-range / --temp-range")
    axis = "d" if d_ranged else "T"
    grid = (req.separation if d_ranged else req.temperature).points()
    rows, status = [], EXIT_OK
    for v in grid:
        d, T = (v, req.temperature) if d_ranged else (req.separation, v)
        try:
            data = cf.casimir_report(PlateConfig(req.n_dim, d), ThermalState.from_temperature(T), req.bc,
                                     req.ctrl).to_dict()
        except ConvergenceError:
            data, status = _failed_point(req.n_dim, req.bc, d, T), max(status, EXIT_CONVERGENCE)
        except ValueError:
            data, status = _failed_point(req.n_dim, req.bc, d, T), max(status, EXIT_INVALID)
        rows.append((v, data))
    return axis, rows, status


def limits(req):
    if isinstance(req.separation, Range):
        raise ValidationError("limits takes a single separation")
    cfg = PlateConfig(req.n_dim, req.separation)
    s_inf = cf.entropy_high_T(cfg, req.bc)
    return {
        "n_dim": cfg.n_dim,
        "bc": req.bc.value,
        "d": cfg.separation,
        "entropy_high_T": s_inf,
        "free_energy_high_T_per_T": -s_inf,
        "pressure_high_T_per_T": cf.high_T_pressure_coefficient(cfg, req.bc),
    }


# ---------------------------------------------------------------- argument handling

def _add_common(p, *, point_only):
    p.add_argument("--bc", choices=("dd", "dn", "nn"), default="dd", type=str.lower)
    p.add_argument("--dim", type=int, default=3, metavar="N")
    if point_only:
        p.add_argument("--sep", type=float, default=1.0, metavar="d")
    else:
        sep = p.add_mutually_exclusive_group()
        sep.add_argument("--sep", type=float, metavar="d")
        sep.add_argument("--sep-range", metavar="a:b:k")
        temp = p.add_mutually_exclusive_group()
        temp.add_argument("--temp", type=float, metavar="T")
        temp.add_argument("--temp-range", metavar="a:b:k")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", metavar="PATH")
    _add_tolerances(p)


def _add_tolerances(p):
    p.add_argument("--rel-tol", type=float)
    p.add_argument("--abs-tol", type=float)
    p.add_argument("--max-terms", type=int)
    p.add_argument("--config", metavar="FILE", help="INI file with a [casimir] section")


def build_parser():
    parser = argparse.ArgumentParser(prog="casimir", description="Casimir observables between parallel plates.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="single point")
    _add_common(p, point_only=True)
    p.add_argument("--temp", type=float, default=0.0, metavar="T")

    _add_common(sub.add_parser("scan", help="one ranged axis"), point_only=False)

    p = sub.add_parser("validate", help="cross-engine checks")
    _add_tolerances(p)
    p.add_argument("--inject-fault", choices=validation.FAULTS, help="debug: corrupt one engine on purpose")

    p = sub.add_parser("limits", help="high-temperature limits")
    p.add_argument("--bc", choices=("dd", "dn"), default="dd", type=str.lower)
    p.add_argument("--dim", type=int, default=3, metavar="N")
    p.add_argument("--sep", type=float, default=1.0, metavar="d")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", metavar="PATH")
    return parser


def _read_config(path):
    cp = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ValidationError(f"malformed config {path}: {exc}") from None
    if not cp.has_section(CONFIG_SECTION):
        return {}
    out = {}
    for key, raw in cp.items(CONFIG_SECTION):
        if key not in CONFIG_KEYS:
            raise ValidationError(f"unknown config key {key!r}; allowed: {', '.join(CONFIG_KEYS)}")
        try:
            out[key] = CONFIG_KEYS[key](raw)
        except ValueError:
            raise ValidationError(f"config key {key!r}: bad value {raw!r}") from None
    return out


def resolve_control(args):
    """Flags > config file > environment > defaults."""
    changes = {}
    if getattr(args, "config", None):
        changes.update(_read_config(args.config))
    for key in ("rel_tol", "abs_tol", "max_terms"):
        value = getattr(args, key, None)
        if value is not None:
            changes[key] = value
    ctrl = default_control()
    return ctrl.replace(**changes) if changes else ctrl


def _request(args, ctrl):
    separation = args.sep
    temperature = args.temp
    if getattr(args, "sep_range", None):
        separation = parse_range(args.sep_range)
    if getattr(args, "temp_range", None):
        temperature = parse_range(args.temp_range)
    if separation is None:
        separation = 1.0
    if temperature is None:
        temperature = 0.0
    for t in (temperature.start,) if isinstance(temperature, Range) else (temperature,):
        if not t >= 0.0:
            raise ValidationError("temperature must be >= 0")
    return RunRequest(args.command, BoundaryPair.parse(args.bc), args.dim, separation, temperature, ctrl,
                      args.format, args.out)


# ---------------------------------------------------------------- rendering

def _render_compute(req, report):
    data = report.to_dict()
    if req.output_format == "csv":
        return CSV_HEADER + "\n" + _csv_row("T", report.T, data) + "\n"
    return _report_json(data) + "\n"


def _render_scan(req, axis, rows):
    if req.output_format == "csv":
        return "".join([CSV_HEADER + "\n"] + [_csv_row(axis, v, data) + "\n" for v, data in rows])
    if not rows:
        return "[]\n"
    return "[\n" + ",\n".join("  " + _report_json(data, 1) for _, data in rows) + "\n]\n"


def _render_limits(req, data):
    if req.output_format == "csv":
        vals = [str(data["n_dim"]), data["bc"]] + [_csv_number(data[k]) for k in LIMITS_HEADER.split(",")[2:]]
        return LIMITS_HEADER + "\n" + ",".join(vals) + "\n"
    items = [(k, json.dumps(v) if isinstance(v, str) else format_number(v)) for k, v in data.items()]
    return _json_object(items, 0) + "\n"


def _emit(text, path, stdout):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _run_validate(args, stdout):
    ctrl = resolve_control(args)
    results, errors = validation.run_checks(ctrl, fault=args.inject_fault)
    for r in results:
        stdout.write(r.line() + "\n")
    for e in errors:
        stdout.write(f"ERROR {e}\n")
    failed = sum(not r.passed for r in results)
    stdout.write(f"{len(results) - failed} passed, {failed} failed, {len(errors)} convergence errors\n")
    if errors:
        return EXIT_CONVERGENCE
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def main(argv=None, stdout=None, stderr=None):
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return _run_validate(args, stdout)
        if args.command == "limits":
            req = RunRequest("limits", BoundaryPair.parse(args.bc), args.dim, args.sep, 0.0,
                             default_control(), args.format, args.out)
            _emit(_render_limits(req, limits(req)), req.output_path, stdout)
            return EXIT_OK
        req = _request(args, resolve_control(args))
        if args.command == "compute":
            _emit(_render_compute(req, compute(req)), req.output_path, stdout)
            return EXIT_OK
        axis, rows, status = scan(req)
        _emit(_render_scan(req, axis, rows), req.output_path, stdout)
        if status:
            stderr.write("error: some scan points failed (emitted as nan)\n")
        return status
    except ConvergenceError as exc:
        stderr.write(f"convergence error: {exc}\n")
        return EXIT_CONVERGENCE
    except ValidationError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except ValueError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
