"""Command-line front end: ``photonlim curves|adaptive|simulate|check``.

Exit codes: 0 ok, 2 usage, 3 I/O, 4 size cap, 5 numerical validity.  ``check``
returns 1 when any audited item fails.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from photonlim import adaptive, capacity, feedback
from photonlim.binary_channel import DolinarChannel, helstrom_error

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_CAP, EXIT_NUMERIC = 0, 2, 3, 4, 5

CURVE_COLUMNS = ("scheme", "E", "aux", "pie_bits_per_photon", "die_bits_per_mode")
ADAPTIVE_COLUMNS = ("code", "mode", "E", "mi_bits", "die", "pie")


class UsageError(Exception):
    pass


class ValidityError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    schemes: list[str] = field(default_factory=lambda: ["holevo"])
    e_min: float = 1e-4
    e_max: float = 10.0
    points: int = 200
    spacing: str = "log"
    code: str = "parity32"
    modes: list[str] = field(default_factory=lambda: ["adaptive", "fixed"])
    E: float = 0.2
    xi: float = 0.5
    trials: int = 100_000
    seed: int = 0
    dt_factor: float = feedback.DEFAULT_DT_FACTOR
    lo_cap: float = float(feedback.DEFAULT_CAP_FACTOR)
    out: str | None = None
    format: str = "csv"

    def __post_init__(self):
        if not self.e_min > 0 and self.spacing == "log":
            raise UsageError("--e-min must be positive for log spacing")
        if self.points < 1:
            raise UsageError("--points must be >= 1")
        if self.points > 1 and not self.e_min < self.e_max:
            raise UsageError("--e-min must be below --e-max")
        if self.spacing not in ("log", "linear"):
            raise UsageError("--spacing must be log or linear")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        if self.trials < 1:
            raise UsageError("--trials must be >= 1")
        if self.seed < 0:
            raise UsageError("--seed must be nonnegative")
        if not self.lo_cap > 0:
            raise UsageError("--lo-cap must be positive")
        for m in self.modes:
            if m not in ("adaptive", "fixed"):
                raise UsageError(f"unknown mode {m!r}")

    def grid(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.e_min])
        if self.spacing == "log":
            return np.geomspace(self.e_min, self.e_max, self.points)
        return np.linspace(self.e_min, self.e_max, self.points)


# --- config handling -----------------------------------------------------------


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


_FIELD_TYPES: dict[str, Callable[[str], object]] = {
    "schemes": _csv_list, "e_min": float, "e_max": float, "points": int, "spacing": str,
    "code": str, "modes": _csv_list, "E": float, "xi": float, "trials": int, "seed": int,
    "dt_factor": float, "lo_cap": float, "out": str, "format": str,
}


def read_config_file(path: str) -> dict[str, object]:
    """Parse ``key = value`` lines; ``#`` starts a comment, dashes and underscores are equivalent."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in _FIELD_TYPES:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _FIELD_TYPES[key](value)
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    add = common.add_argument
    add("--config", metavar="PATH", help="key = value file supplying defaults for any flag")
    add("--schemes", type=_csv_list, help="comma-separated scheme names")
    add("--e-min", type=float)
    add("--e-max", type=float)
    add("--points", type=int)
    add("--spacing", choices=("log", "linear"))
    add("--code", help="parity32 | hamming74 | uncoded:N | file:PATH")
    add("--modes", type=_csv_list, help="comma-separated subset of adaptive,fixed")
    add("--E", type=float, help="photons per symbol for simulate")
    add("--xi", type=float, help="prior of +alpha for simulate")
    add("--trials", type=int)
    add("--seed", type=int)
    add("--dt-factor", type=float, help="rate * dt bound per step (at most 0.01)")
    add("--lo-cap", type=float, help="LO amplitude cap as a multiple of |alpha|")
    add("--out", metavar="PATH")
    add("--format", choices=("csv", "json"))

    parser = _Parser(prog="photonlim", description="Photon- and dimension-efficiency tools.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("curves", parents=[common], help="tradeoff curves (PIE vs DIE)")
    sub.add_parser("adaptive", parents=[common], help="coded adaptive receiver sweep")
    sub.add_parser("simulate", parents=[common], help="feedback receiver Monte Carlo")
    sub.add_parser("check", parents=[common], help="self-check report")
    return parser


def parse_config(argv: Sequence[str]) -> RunConfig:
    ns = build_parser().parse_args(list(argv))
    values: dict[str, object] = {}
    if ns.config:
        values.update(read_config_file(ns.config))
    for key in _FIELD_TYPES:
        v = getattr(ns, key)
        if v is not None:
            values[key] = v
    return RunConfig(command=ns.command, **values)


# --- workers -------------------------------------------------------------------


def worker_count() -> int:
    raw = os.environ.get("PHOTONLIM_THREADS")
    cpus = os.cpu_count() or 1
    if raw is None or raw.strip() == "":
        return cpus
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"PHOTONLIM_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"PHOTONLIM_THREADS must be a positive integer, got {raw!r}")
    return n


def _ordered_map(fn, tasks: list) -> list:
    """``map`` over a process pool when more than one worker is allowed; results in task order."""
    n = min(worker_count(), len(tasks))
    if n <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * n))))


# --- formatting ----------------------------------------------------------------


def fmt_number(v: float | None) -> str:
    """Locale-independent, round-trip (17 significant digits); None as empty."""
    if v is None:
        return ""
    v = float(v)
    if not math.isfinite(v):
        raise ValidityError(f"non-finite value {v}")
    return format(v, ".17g")


def _finite(v: float | None) -> float | None:
    if v is not None and not math.isfinite(v):
        raise ValidityError(f"non-finite value {v}")
    return None if v is None else float(v)


def write_csv(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO(newline="")
    buf.write(",".join(header) + "\n")
    for row in rows:
        cells = [c if isinstance(c, str) else fmt_number(c) for c in row]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def load_schema() -> dict:
    return json.loads(resources.files("photonlim").joinpath("schemas/output.schema.json").read_text())


def validate_json(doc: dict) -> None:
    import jsonschema

    jsonschema.validate(doc, load_schema())


def dump_json(doc: dict) -> str:
    validate_json(doc)
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# --- curves --------------------------------------------------------------------


def parse_scheme(name: str) -> tuple[capacity.Scheme, int | None]:
    """Kebab-case scheme name; fixed-order PPM takes its order as ``ppm-counting-fixed:M``."""
    base, _, order = name.partition(":")
    try:
        scheme = capacity.Scheme(base)
    except ValueError:
        known = ", ".join(s.value for s in capacity.Scheme)
        raise UsageError(f"unknown scheme {name!r} (known: {known})") from None
    if scheme is capacity.Scheme.PPM_COUNTING_FIXED_M:
        if not order.isdigit() or int(order) < 2:
            raise UsageError("ppm-counting-fixed needs an order, e.g. ppm-counting-fixed:16")
        return scheme, int(order)
    if order:
        raise UsageError(f"scheme {base} takes no order")
    return scheme, None


def _curve_task(task):
    name, value = task
    scheme, m = parse_scheme(name)
    return capacity.curve_point(scheme, value, m)


def curve_rows(cfg: RunConfig) -> list[tuple]:
    if not cfg.schemes:
        raise UsageError("no schemes given")
    for name in cfg.schemes:
        parse_scheme(name)
    grid = cfg.grid()
    tasks = [(name, float(v)) for name in cfg.schemes for v in grid]
    points = _ordered_map(_curve_task, tasks)
    return [
        (name, _finite(p.energy), _finite(p.aux), _finite(p.pie), _finite(p.die))
        for (name, _), p in zip(tasks, points)
    ]


def cmd_curves(cfg: RunConfig) -> int:
    rows = curve_rows(cfg)
    if cfg.format == "csv":
        text = write_csv(CURVE_COLUMNS, rows)
    else:
        text = dump_json({
            "command": "curves", "columns": list(CURVE_COLUMNS),
            "rows": [dict(zip(CURVE_COLUMNS, r)) for r in rows],
        })
    emit(text, cfg.out)
    return EXIT_OK


# --- adaptive ------------------------------------------------------------------


def _adaptive_task(task):
    code, mode, E = task
    return adaptive.metrics(adaptive.run_exact(code, E, mode))


def adaptive_rows(cfg: RunConfig) -> tuple[list[str], list[tuple]]:
    try:
        code = adaptive.make_code(cfg.code)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    adaptive._check_size(code)
    if not cfg.modes:
        raise UsageError("no modes given")
    tasks = [(code, m, float(E)) for m in cfg.modes for E in cfg.grid()]
    results = _ordered_map(_adaptive_task, tasks)
    header = list(ADAPTIVE_COLUMNS) + [f"bit_error_{j}" for j in range(1, code.n + 1)]
    rows = []
    for (_, mode, E), r in zip(tasks, results):
        vals = [_finite(v) for v in (E, r.mi, r.die, r.pie, *r.bit_error)]
        rows.append((code.name, mode, *vals))
    return header, rows


def cmd_adaptive(cfg: RunConfig) -> int:
    header, rows = adaptive_rows(cfg)
    if cfg.format == "csv":
        text = write_csv(header, rows)
    else:
        text = dump_json({
            "command": "adaptive", "columns": header,
            "rows": [
                {"code": r[0], "mode": r[1], "E": r[2], "mi_bits": r[3], "die": r[4], "pie": r[5],
                 "bit_error": list(r[6:])}
                for r in rows
            ],
        })
    emit(text, cfg.out)
    return EXIT_OK


# --- simulate ------------------------------------------------------------------


def simulate_report(cfg: RunConfig) -> dict:
    if not cfg.E > 0 or not math.isfinite(cfg.E):
        raise UsageError("--E must be positive")
    if not 0.0 < cfg.xi < 1.0:
        raise UsageError("--xi must lie strictly between 0 and 1")
    c = feedback.bpsk(cfg.E, cfg.xi)
    cap = cfg.lo_cap * math.sqrt(cfg.E)
    try:
        r = feedback.run_monte_carlo(c, 1.0, cfg.trials, cfg.seed, cap=cap, dt_factor=cfg.dt_factor)
    except feedback.NumericalValidityError as exc:
        raise ValidityError(str(exc)) from exc
    h = helstrom_error(DolinarChannel(math.exp(-4.0 * cfg.E), min(cfg.xi, 1.0 - cfg.xi)))
    z = (r.pe_estimate - h) / r.stderr if r.stderr > 0 else None
    return {"pe_estimate": r.pe_estimate, "stderr": r.stderr, "helstrom": h, "z_score": z}


def cmd_simulate(cfg: RunConfig) -> int:
    emit(dump_json(simulate_report(cfg)), cfg.out)
    return EXIT_OK


# --- check ---------------------------------------------------------------------


@dataclass(frozen=True)
class CheckItem:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def check_reciprocal() -> CheckItem:
    s = np.linspace(0.0, 1.0, 101)
    err = max(abs(capacity.reciprocal_identity(float(v)) - 1.0) for v in s)
    return CheckItem("reciprocal-identity", err <= 1e-12, f"max |C_hol(s) + C_dol(1-s) - 1| = {err:.3e} over 101 s")


def check_asymptotes() -> list[CheckItem]:
    cps = np.arange(4.0, 20.0 + 1e-9, 0.5)
    r1 = np.array([capacity.approx1(c) / capacity.ppm_optimal_at_pie(c).die for c in cps])
    r2 = np.array([capacity.approx2(c) / capacity.holevo_at_pie(c).die for c in cps])
    ok1 = bool(np.all((r1 > 1.0) & (r1 <= 1.10)))
    ok2 = bool(np.all((r2 >= 0.90) & (r2 < 1.0)))
    worst1 = cps[np.argmax(r1)]
    worst2 = cps[np.argmin(r2)]
    return [
        CheckItem("approx1-vs-ppm", ok1,
                  f"approx1/ppm die in [{r1.min():.6f}, {r1.max():.6f}] for c_p in [4, 20] (max at c_p={worst1:g}); need (1, 1.10]"),
        CheckItem("approx2-vs-holevo", ok2,
                  f"approx2/holevo die in [{r2.min():.6f}, {r2.max():.6f}] for c_p in [4, 20] (min at c_p={worst2:g}); need [0.90, 1)"),
    ]


# each pair (upper, lower) must satisfy die(upper) >= die(lower) at equal energy
DOMINANCE_PAIRS = (
    ("holevo", "bpsk-holevo"),
    ("holevo", "ook-holevo"),
    ("holevo", "heterodyne"),
    ("holevo", "homodyne"),
    ("bpsk-holevo", "bpsk-dolinar"),
    ("ook-holevo", "ook-dolinar"),
    ("ook-dolinar", "ook-counting"),
)


def check_dominance(grid: np.ndarray | None = None) -> CheckItem:
    grid = RunConfig("check").grid() if grid is None else grid
    names = sorted({n for pair in DOMINANCE_PAIRS for n in pair})
    tasks = [(n, float(v)) for n in names for v in grid]
    points = _ordered_map(_curve_task, tasks)
    die = {n: np.array([p.die for p in points[i * grid.size:(i + 1) * grid.size]])
           for i, n in enumerate(names)}
    bad = []
    for hi, lo in DOMINANCE_PAIRS:
        slack = die[hi] - die[lo] + 1e-12 * np.maximum(1.0, die[hi])
        if np.any(slack < 0):
            bad.append(f"{hi}<{lo} at E={grid[np.argmin(slack)]:.4g}")
    detail = f"{len(DOMINANCE_PAIRS)} orderings over {grid.size} energies"
    return CheckItem("dominance-ordering", not bad, detail + ("; violated: " + ", ".join(bad) if bad else ""))


def cmd_check(cfg: RunConfig) -> int:
    items = [check_reciprocal(), *check_asymptotes(), check_dominance(cfg.grid())]
    lines = "".join(item.line() + "\n" for item in items)
    emit(lines, cfg.out)
    return EXIT_OK if all(i.passed for i in items) else 1


COMMANDS = {"curves": cmd_curves, "adaptive": cmd_adaptive, "simulate": cmd_simulate, "check": cmd_check}


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"photonlim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except adaptive.EnumerationLimitError as exc:
        print(f"photonlim: size cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValidityError, feedback.NumericalValidityError, FloatingPointError) as exc:
        print(f"photonlim: numerical validity: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"photonlim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        # parameter outside a model's domain, e.g. zero energy for OOK
        print(f"photonlim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
