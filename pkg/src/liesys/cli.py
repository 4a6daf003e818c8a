"""Command-line front end.

    liesys solve riccati --b0 1 --b1 0 --b2 1 --x0 0 --t0 0 --t1 1 --out r.csv
    liesys check-integrability --b0 "2*(1+t^2)" --b1 "3*(1+t^2)" --b2 "(1+t^2)/2" --c0 1 --c2 1
    liesys verify-algebra --system riccati --points 20

Exit codes: 0 success, 1 usage error, 2 numerical error.  Errors are printed
as ``error[<kind>]: <message>``.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import ermakov as erm
from . import groupflow, liecore, riccati
from .curves import RiccatiCoeffs, as_curve
from .errors import ConfigError, LieSysError, NumericalError, ParseError, UsageError
from .expr import ExprCurve, parse, unparse
from .liecore import ProjTrajectory, ProjValue
from .numkit import IntegratorOptions, Trajectory, integrate_ode

COMMANDS = ("solve", "superpose", "invariant", "transform", "reduce", "check-integrability", "verify-algebra")
SYSTEMS = ("riccati", "oscillator", "pinney", "ermakov", "group", "hamiltonian", "generalized")

# option name -> (type, default, help)
OPTIONS: dict[str, tuple[type, object, str]] = {
    "b0": (str, None, "Riccati coefficient b0(t)"),
    "b1": (str, None, "Riccati coefficient b1(t)"),
    "b2": (str, None, "Riccati coefficient b2(t)"),
    "x0": (str, None, "initial value (Riccati: number or inf)"),
    "v0": (float, None, "initial velocity"),
    "y0": (float, None, "initial y"),
    "z0": (float, None, "initial z"),
    "vx0": (float, None, "initial x velocity"),
    "vy0": (float, None, "initial y velocity"),
    "vz0": (float, None, "initial z velocity"),
    "omega": (str, None, "angular frequency omega(t)"),
    "mass": (str, "1", "mass m(t)"),
    "c": (float, None, "Pinney constant (alias k)"),
    "f": (str, None, "Ermakov f(u), expression in u"),
    "g": (str, None, "Ermakov g(u), expression in u"),
    "alpha": (str, None, "transformation entry alpha(t)"),
    "beta": (str, None, "transformation entry beta(t)"),
    "gamma": (str, None, "transformation entry gamma(t)"),
    "delta": (str, None, "transformation entry delta(t)"),
    "particular": (str, None, "particular solution x1(t) as an expression"),
    "x1": (str, None, "initial value of a particular solution to integrate"),
    "k": (float, None, "superposition constant"),
    "kprime": (float, None, "second constant of the partial rule"),
    "k1": (float, None, "linear combination coefficient"),
    "k2": (float, None, "linear combination coefficient"),
    "inputs": (str, None, "comma-separated CSV files with solutions"),
    "branch": (str, "auto", "Pinney branch: plus, minus or auto"),
    "c0": (float, None, "solvable-form constant c0"),
    "c2": (float, None, "solvable-form constant c2"),
    "tol": (float, 1e-8, "criterion tolerance"),
    "grid": (int, 201, "criterion grid points"),
    "points": (int, 20, "sample points for verify-algebra"),
    "seed": (int, 0, "random seed"),
    "h": (float, 1e-5, "finite-difference step"),
    "route": (str, "direct", "Riccati solver: direct or group"),
    "t0": (float, 0.0, "start time"),
    "t1": (float, 1.0, "end time"),
    "samples": (int, 101, "uniform output samples"),
    "out": (str, None, "CSV output path (default stdout)"),
    "report": (str, None, "report output path (default stdout)"),
    "method": (str, "rk45", "integrator: rk45 or rk4"),
    "rtol": (float, 1e-10, "relative tolerance"),
    "atol": (float, 1e-12, "absolute tolerance"),
    "step": (float, 1e-3, "fixed step for rk4"),
    "max_steps": (int, 200_000, "integrator step limit"),
}

CONFIG_KEYS = frozenset(OPTIONS) | {"command", "system"}

REQUIRED = {
    ("solve", "riccati"): ("b0", "b1", "b2", "x0"),
    ("solve", "group"): ("b0", "b1", "b2"),
    ("solve", "oscillator"): ("omega", "x0", "v0"),
    ("solve", "pinney"): ("omega", "c", "x0", "v0"),
    ("solve", "ermakov"): ("omega", "f", "g", "x0", "y0", "vx0", "vy0"),
    ("superpose", "riccati"): ("inputs", "k"),
    ("superpose", "oscillator"): ("inputs",),
    ("superpose", "pinney"): ("inputs", "c", "y0", "vy0"),
    ("invariant", "oscillator"): ("omega", "x0", "vx0", "z0", "vz0"),
    ("invariant", "ermakov"): ("omega", "c", "x0", "y0", "vx0", "vy0"),
    ("invariant", "generalized"): ("omega", "f", "g", "x0", "y0", "vx0", "vy0"),
    ("invariant", "pinney"): ("omega", "c", "x0", "y0", "z0", "vx0", "vy0", "vz0"),
    ("transform", "riccati"): ("b0", "b1", "b2", "alpha", "beta", "gamma", "delta"),
    ("reduce", "riccati"): ("b0", "b1", "b2"),
    ("check-integrability", "riccati"): ("b0", "b1", "b2", "c0", "c2"),
    ("verify-algebra", "riccati"): (),
    ("verify-algebra", "oscillator"): (),
    ("verify-algebra", "hamiltonian"): (),
    ("verify-algebra", "pinney"): (),
    ("verify-algebra", "ermakov"): (),
}

DEFAULT_SYSTEM = {"transform": "riccati", "reduce": "riccati", "check-integrability": "riccati"}


@dataclass
class Scenario:
    command: str
    system: str
    params: dict = field(default_factory=dict)
    t0: float = 0.0
    t1: float = 1.0
    out: str | None = None
    report: str | None = None
    integrator: IntegratorOptions = field(default_factory=IntegratorOptions)

    def __getitem__(self, key):
        return self.params[key]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="liesys", description="Lie-system toolkit for SL(2,R)-type equations.")
    p.add_argument("command", nargs="?", choices=COMMANDS)
    p.add_argument("system_pos", nargs="?", metavar="system", choices=SYSTEMS)
    p.add_argument("--system", choices=SYSTEMS)
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--batch", metavar="DIR", help="run every *.conf in DIR in parallel")
    p.add_argument("--jobs", type=int, default=None, help="worker processes for --batch")
    for name, (typ, _default, help_) in OPTIONS.items():
        flag = "--" + name.replace("_", "-")
        p.add_argument(flag, dest=name, type=typ, default=None, help=help_)
    return p


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--beta -tan(t)`` into ``--beta=-tan(t)`` so argparse keeps it as a value."""
    flags = {"--" + k.replace("_", "-") for k in OPTIONS} | {"--system", "--config", "--batch", "--jobs"}
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if tok in flags and nxt is not None and nxt.startswith("-") and nxt.split("=", 1)[0] not in flags \
                and nxt not in ("-h", "--help"):
            out.append(f"{tok}={nxt}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def read_config(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {str(path)!r} not found")
    out: dict[str, str] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if not value:
            raise ConfigError(f"empty value for {key!r}", lineno)
        out[key] = value
    return out


def _coerce(key: str, value):
    typ = OPTIONS[key][0]
    if value is None or isinstance(value, typ):
        return value
    try:
        return typ(value)
    except ValueError:
        raise UsageError(f"invalid value {value!r} for --{key.replace('_', '-')}") from None


def load_scenario(config_path=None, argv=None) -> Scenario:
    """Merge a config file with command-line flags (flags win) and validate."""
    ns = build_parser().parse_args(_glue_negative_values(list(argv or [])))
    file_vals = read_config(config_path or ns.config) if (config_path or ns.config) else {}
    merged: dict[str, object] = {}
    for key in OPTIONS:
        flag_val = getattr(ns, key)
        if flag_val is not None:
            merged[key] = flag_val
        elif key in file_vals:
            merged[key] = _coerce(key, file_vals[key])
        else:
            merged[key] = OPTIONS[key][1]
    command = ns.command or file_vals.get("command")
    if command is None:
        raise UsageError("missing command; choose one of: " + ", ".join(COMMANDS))
    if command not in COMMANDS:
        raise UsageError(f"unknown command {command!r}")
    system = ns.system_pos or ns.system or file_vals.get("system") or DEFAULT_SYSTEM.get(command)
    if system is None:
        raise UsageError(f"{command} needs a system")
    required = REQUIRED.get((command, system))
    if required is None:
        raise UsageError(f"{command} does not support system {system!r}")
    missing = [k for k in required if merged.get(k) is None]
    if missing:
        raise UsageError("missing required " + ", ".join("--" + m.replace("_", "-") for m in missing))
    if merged["method"] not in ("rk45", "rk4"):
        raise UsageError("--method must be rk45 or rk4")
    if merged["samples"] < 2:
        raise UsageError("--samples must be at least 2")
    t0, t1 = float(merged.pop("t0")), float(merged.pop("t1"))
    if not t1 > t0:
        raise UsageError("--t1 must be greater than --t0")
    try:
        opts = IntegratorOptions(method=merged["method"], step=merged["step"], abs_tol=merged["atol"],
                                 rel_tol=merged["rtol"], max_steps=merged["max_steps"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return Scenario(command, system, merged, t0, t1, merged.pop("out"), merged.pop("report"), opts)


# -------------------------------------------------------------------- output

def _fmt(v) -> str:
    if isinstance(v, ProjValue):
        return "inf" if v.is_inf else _fmt(v.x)
    v = float(v)
    if math.isinf(v):
        return "inf"
    s = "%.12g" % v
    return "0" if s == "-0" else s


def write_csv(header: list[str], rows, target) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    _emit(buf.getvalue(), target)


def _emit(text: str, target) -> None:
    if target is None:
        sys.stdout.write(text)
    else:
        Path(target).write_text(text)


def write_report(items: dict, target) -> None:
    lines = []
    for k, v in items.items():
        if isinstance(v, bool):
            v = "true" if v else "false"
        elif isinstance(v, (float, np.floating)):
            v = _fmt(v)
        lines.append(f"{k}: {v}")
    _emit("\n".join(lines) + "\n", target)


def read_csv(path) -> tuple[list[str], np.ndarray]:
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"input file {str(path)!r} not found")
    with path.open() as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2 or not rows[0] or rows[0][0] != "t":
        raise UsageError(f"{path}: expected a header starting with 't' and at least one data row")
    data = np.array([[math.inf if c.strip() in ("inf", "+inf", "-inf") else float(c) for c in r]
                     for r in rows[1:]])
    return rows[0], data


# ------------------------------------------------------------------ commands

def _coeffs(sc: Scenario) -> RiccatiCoeffs:
    return RiccatiCoeffs(ExprCurve(sc["b0"]), ExprCurve(sc["b1"]), ExprCurve(sc["b2"]))


def _grid(sc: Scenario) -> np.ndarray:
    return np.linspace(sc.t0, sc.t1, sc["samples"])


def _run_solve(sc: Scenario) -> None:
    grid = _grid(sc)
    if sc.system in ("riccati", "group"):
        b = _coeffs(sc)
        if sc.system == "group":
            g = groupflow.solve_group_equation(b, sc.t0, sc.t1, sc.integrator)
            mats = g.at(grid)
            write_csv(["t", "alpha", "beta", "gamma", "delta"],
                      ([t, *m.reshape(4)] for t, m in zip(grid, mats)), sc.out)
            return
        x0 = ProjValue.parse(sc["x0"])
        if sc["route"] == "group":
            path = groupflow.transport_solution(groupflow.solve_group_equation(b, sc.t0, sc.t1, sc.integrator), x0)
        elif sc["route"] == "direct":
            path = riccati.solve_direct(b, x0, sc.t0, sc.t1, sc.integrator)
        else:
            raise UsageError("--route must be direct or group")
        values = path.resample(grid).values
        write_csv(["t", "x"], zip(grid, values), sc.out)
        if sc.out is not None:
            write_report({"command": "solve", "system": "riccati", "t1": sc.t1, "x_final": values[-1]}, sc.report)
        return
    if sc.system == "oscillator":
        fld = erm.oscillator_field(erm.OscillatorSpec(sc["omega"], sc["mass"]))
        x0, cols = [float(sc["x0"]), sc["v0"]], ["x", "v"]
    elif sc.system == "pinney":
        fld = erm.pinney_field(erm.PinneySpec(sc["omega"], sc["c"]))
        x0, cols = [float(sc["x0"]), sc["v0"]], ["x", "v"]
    else:
        fld = erm.ermakov_field(erm.ErmakovSpec(sc["omega"], sc["f"], sc["g"]))
        x0, cols = [float(sc["x0"]), sc["y0"], sc["vx0"], sc["vy0"]], ["x", "y", "vx", "vy"]
    tr = integrate_ode(fld, x0, sc.t0, sc.t1, sc.integrator)
    write_csv(["t", *cols], ([t, *s] for t, s in zip(grid, tr.at(grid))), sc.out)


def _inputs(sc: Scenario, count: tuple[int, ...]) -> list[tuple[list[str], np.ndarray]]:
    files = [s.strip() for s in sc["inputs"].split(",") if s.strip()]
    if len(files) not in count:
        raise UsageError(f"--inputs needs {' or '.join(map(str, count))} files, got {len(files)}")
    data = [read_csv(f) for f in files]
    t_ref = data[0][1][:, 0]
    for name, (_, d) in zip(files, data):
        if d.shape[0] != t_ref.shape[0] or not np.array_equal(d[:, 0], t_ref):
            raise UsageError(f"{name}: time column differs from {files[0]}")
    return data


def _run_superpose(sc: Scenario) -> None:
    if sc.system == "riccati":
        data = _inputs(sc, (3,))
        t = data[0][1][:, 0]
        paths = [ProjTrajectory.from_values(t, d[:, 1]) for _, d in data]
        res = riccati.superpose_paths(*paths, sc["k"])
        write_csv(["t", "x"], zip(t, res.values), sc.out)
        return
    if sc.system == "oscillator":
        data = _inputs(sc, (1, 2))
        t = data[0][1][:, 0]
        trajs = [Trajectory(t, d[:, 1:3]) for _, d in data]
        if len(trajs) == 1:
            if sc["k"] is None or sc["kprime"] is None:
                raise UsageError("partial superposition needs --k and --kprime")
            res = erm.partial_superpose_oscillator(trajs[0], sc["k"], sc["kprime"])
        else:
            if sc["k1"] is None or sc["k2"] is None:
                raise UsageError("linear superposition needs --k1 and --k2")
            res = erm.linear_superpose(trajs[0], trajs[1], sc["k1"], sc["k2"])
        write_csv(["t", "x", "v"], ([ti, *s] for ti, s in zip(t, res.states)), sc.out)
        return
    data = _inputs(sc, (2,))
    t = data[0][1][:, 0]
    xt, zt = (Trajectory(t, d[:, 1:3]) for _, d in data)
    state6 = [xt.states[0, 0], sc["y0"], zt.states[0, 0], xt.states[0, 1], sc["vy0"], zt.states[0, 1]]
    inv = erm.pinney_invariants(state6, sc["c"])
    branch, sign = erm.select_branch(xt.states[0], zt.states[0], inv, sc["y0"], sc["vy0"])
    if sc["branch"] != "auto":
        if sc["branch"] not in ("plus", "minus"):
            raise UsageError("--branch must be plus, minus or auto")
        branch = sc["branch"]
    res = erm.pinney_superpose(xt, zt, inv, branch, sign)
    write_csv(["t", "y", "vy"], ([ti, *s] for ti, s in zip(t, res.states)), sc.out)
    if sc.out is not None:
        write_report({"I1": inv.I1, "I2": inv.I2, "W": inv.W, "branch": branch}, sc.report)


def _run_invariant(sc: Scenario) -> None:
    grid = _grid(sc)
    if sc.system == "oscillator":
        fld = erm.oscillator_field(erm.OscillatorSpec(sc["omega"], sc["mass"]), copies=2)
        tr = integrate_ode(fld, [float(sc["x0"]), sc["vx0"], sc["z0"], sc["vz0"]], sc.t0, sc.t1, sc.integrator)
        names = ["W"]
        vals = [[erm.wronskian(s[0], s[1], s[2], s[3])] for s in tr.at(grid)]
    elif sc.system in ("ermakov", "generalized"):
        if sc.system == "ermakov":
            spec = erm.ErmakovSpec(sc["omega"], sc["c"], 0.0)
        else:
            spec = erm.ErmakovSpec(sc["omega"], sc["f"], sc["g"])
        tr = integrate_ode(erm.ermakov_field(spec), [float(sc["x0"]), sc["y0"], sc["vx0"], sc["vy0"]],
                           sc.t0, sc.t1, sc.integrator)
        if sc.system == "ermakov":
            names = ["F"]
            vals = [[erm.ermakov_invariant(sc["c"], s)] for s in tr.at(grid)]
        else:
            names = ["F"]
            vals = [[erm.generalized_first_integral(spec, s)] for s in tr.at(grid)]
    else:
        fld = erm.pinney_system_field(sc["omega"], sc["c"])
        s0 = [float(sc["x0"]), sc["y0"], sc["z0"], sc["vx0"], sc["vy0"], sc["vz0"]]
        tr = integrate_ode(fld, s0, sc.t0, sc.t1, sc.integrator)
        names = ["I1", "I2", "W"]
        vals = []
        for s in tr.at(grid):
            inv = erm.pinney_invariants(s, sc["c"])
            vals.append([inv.I1, inv.I2, inv.W])
    vals = np.array(vals)
    if sc.out is not None:
        write_csv(["t", *names], ([t, *v] for t, v in zip(grid, vals)), sc.out)
    report = {"system": sc.system}
    for i, n in enumerate(names):
        report[f"{n}_initial"] = vals[0, i]
        report[f"{n}_max_drift"] = float(np.max(np.abs(vals[:, i] - vals[0, i])))
    write_report(report, sc.report)


def _coeff_rows(b: RiccatiCoeffs, grid):
    for t in grid:
        yield [t, *(float(c(t)) for c in b)]


def _run_transform(sc: Scenario) -> None:
    b = _coeffs(sc)
    A = groupflow.MatrixCurve(*(ExprCurve(sc[k]) for k in ("alpha", "beta", "gamma", "delta")))
    grid = _grid(sc)
    det_dev = A.check_unit_det(grid)
    explicit = riccati.transform_coefficients(b, A)
    matrix = groupflow.gauge_transform(b, A)
    diff = max(abs(float(p(t)) - float(m(t))) for t in grid for p, m in zip(explicit, matrix))
    write_csv(["t", "b0", "b1", "b2"], _coeff_rows(explicit, grid), sc.out)
    if sc.out is not None or sc.report is not None:
        write_report({"max_det_deviation": det_dev, "max_route_difference": diff}, sc.report)


def _run_reduce(sc: Scenario) -> None:
    b = _coeffs(sc)
    grid = _grid(sc)
    if sc["particular"] is not None:
        x1 = ExprCurve(sc["particular"])
        check = grid
    elif sc["x1"] is not None:
        x1 = riccati.solve_direct(b, ProjValue.parse(sc["x1"]), sc.t0, sc.t1, sc.integrator)
        check = None
    else:
        raise UsageError("reduce needs --particular or --x1")
    reduced = riccati.reduce_by_particular(b, x1, check)
    write_csv(["t", "b0", "b1", "b2"], _coeff_rows(reduced, grid), sc.out)
    if sc.out is not None or sc.report is not None:
        write_report({
            "particular_residual": riccati.particular_residual(b, x1, check),
            "in_span_a1_a2": groupflow.check_subalgebra(reduced, "a1a2", grid),
        }, sc.report)


def _run_check(sc: Scenario) -> None:
    b = _coeffs(sc)
    grid = np.linspace(sc.t0, sc.t1, sc["grid"])
    rep = riccati.check_scaling_integrability(b, sc["c0"], sc["c2"], grid, sc["tol"])
    c0, c2 = sc["c0"], sc["c2"]
    b0s, b2s = unparse(b.b0.expr), unparse(b.b2.expr)
    items = {
        "holds": rep.holds,
        "K": rep.K,
        "L": rep.L,
        "max_deviation": rep.max_deviation,
        "tolerance": rep.tol,
        "scale": f"sqrt(({b2s})*{_fmt(c0)}/(({b0s})*{_fmt(c2)}))",
        "D": f"sqrt(({b2s})*{_fmt(c0)}/(({b0s})*{_fmt(c2)}))*({b0s})/{_fmt(c0)}",
        "D_t0": float(rep.D(sc.t0)),
        "scale_t0": float(rep.scale(sc.t0)),
    }
    write_report(items, sc.report)


def _run_verify(sc: Scenario) -> None:
    rng = np.random.default_rng(sc["seed"])
    n = sc["points"]
    if sc.system == "riccati":
        fields, table = riccati.riccati_fields(), liecore.sl2_table("riccati")
        pts = [(0.0, rng.uniform(-2, 2, 1)) for _ in range(n)]
    elif sc.system == "hamiltonian":
        fields, table = erm.hamiltonian_oscillator_fields(), liecore.sl2_table("riccati")
        pts = [(0.0, rng.uniform(-2, 2, 2)) for _ in range(n)]
    elif sc.system == "oscillator":
        fields, table = erm.oscillator_generators(2), liecore.sl2_table("sode")
        pts = [(0.0, rng.uniform(-2, 2, 4)) for _ in range(n)]
    elif sc.system == "pinney":
        c = 1.0 if sc["c"] is None else sc["c"]
        fields, table = erm.pinney_fields(c), liecore.sl2_table("sode")
        pts = [(0.0, np.array([rng.uniform(0.5, 2.0), rng.uniform(-2, 2)])) for _ in range(n)]
    else:
        fields = erm.ermakov_fields(sc["f"] or "1+u^2", sc["g"] or "u")
        table = liecore.sl2_table("sode")
        pts = [(0.0, np.concatenate([rng.uniform(0.5, 2.0, 2), rng.uniform(-2, 2, 2)])) for _ in range(n)]
    res = liecore.verify_structure_constants(fields, table, pts, sc["h"])
    write_report({"system": sc.system, "points": n, "max_residual": res, "closes": res <= 1e-6}, sc.report)


_HANDLERS = {
    "solve": _run_solve,
    "superpose": _run_superpose,
    "invariant": _run_invariant,
    "transform": _run_transform,
    "reduce": _run_reduce,
    "check-integrability": _run_check,
    "verify-algebra": _run_verify,
}


def run(scenario: Scenario) -> int:
    """Execute a validated scenario; returns the process exit code."""
    try:
        _HANDLERS[scenario.command](scenario)
    except (UsageError, ParseError) as exc:
        _error(exc)
        return 1
    except LieSysError as exc:
        _error(exc)
        return 2
    except ValueError as exc:
        # argument validation inside the library (bad grid, branch name, ...)
        _error(UsageError(str(exc)))
        return 1
    return 0


def _error(exc: LieSysError) -> None:
    print(f"error[{exc.kind}]: {exc}", file=sys.stderr)


def _run_config(path: str) -> tuple[str, int]:
    try:
        return path, run(load_scenario(path, []))
    except (UsageError, ParseError) as exc:
        _error(exc)
        return path, 1


def run_batch(directory, jobs: int | None = None) -> int:
    files = sorted(str(p) for p in Path(directory).glob("*.conf"))
    if not files:
        raise UsageError(f"no *.conf files in {str(directory)!r}")
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(_run_config, files))
    for path, code in results:
        print(f"{path}: {code}")
    return max(code for _, code in results)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        ns = build_parser().parse_args(_glue_negative_values(argv))
        if ns.batch:
            return run_batch(ns.batch, ns.jobs)
        scenario = load_scenario(None, argv)
    except (UsageError, ParseError) as exc:
        _error(exc)
        return 1
    except NumericalError as exc:
        _error(exc)
        return 2
    return run(scenario)


if __name__ == "__main__":
    sys.exit(main())
