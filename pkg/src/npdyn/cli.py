"""Command-line driver.

    npdyn reduced3 --gammas 1,2,3 --state=0.1,-0.2,0.3 --t-end 10 --out u.csv --report r.json
    npdyn vortex --config run.json
    npdyn check --suite all

Exit codes: 0 success, 2 usage/validation error, 3 runtime failure (a
partial trajectory is still written).
"""

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import costate, discrete, flows, nambu, qmcheck, suites, vortex
from .errors import ConfigError, IntegrationError, IrreversibilityError, NpdynError
from .flows import IntegratorConfig, Trajectory, integrate

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 2, 3

METHOD_ALIASES = {"rk4": "rk4", "midpoint": "implicit_midpoint", "implicit_midpoint": "implicit_midpoint"}

DEFAULTS = {
    "method": "rk4",
    "dt": 1e-3,
    "t_end": 10.0,
    "record_every": 1,
    "system": "vortex3",
    "field": "rotation",
    "map": "cat",
    "mode": "verbatim",
    "steps": 100,
    "tau": 1e-2,
    "d": 1,
    "r_min": 1.0,
    "r_max": 2.0,
    "points": 201,
    "weight": None,
    "inertia": [1.0, 2.0, 3.0],
    "unit": None,
    "collision_eps": vortex.COLLISION_EPS,
}


@dataclass
class RunConfig:
    kind: str
    params: dict = field(default_factory=dict)
    out: str = None
    report: str = None
    timing: bool = True

    def get(self, key):
        return self.params.get(key, DEFAULTS.get(key))

    def vector(self, key, required=True):
        val = self.params.get(key)
        if val is None:
            if required:
                raise ConfigError(f"{self.kind}: missing required parameter '{key}'")
            return None
        arr = np.asarray(val, dtype=float)
        if arr.ndim != 1 or not np.all(np.isfinite(arr)):
            raise ConfigError(f"'{key}' must be a list of finite numbers")
        return arr

    def integrator(self):
        method = METHOD_ALIASES.get(str(self.get("method")))
        if method is None:
            raise ConfigError(f"unknown method {self.get('method')!r}; use rk4 or midpoint")
        try:
            return IntegratorConfig(method, float(self.get("dt")), float(self.get("t_end")), int(self.get("record_every")))
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None


@dataclass
class Plan:
    """A validated run: everything built, nothing executed."""

    columns: list
    execute: object  # () -> (Trajectory-like rows, report extras)
    system: str


def _pairs_to_z(state):
    if state.shape[0] % 2:
        raise ConfigError("vortex state must list x1,y1,x2,y2,...")
    return state[0::2] + 1j * state[1::2]


def _continuous_plan(cfg, v, x0, monitors, columns, system, det_checks=True):
    icfg = cfg.integrator()
    if x0.shape != (v.dim,):
        raise ConfigError(f"state has {x0.shape[0]} components, system needs {v.dim}")

    def execute():
        extras = {}
        if det_checks:
            rep = discrete.coherence_check(v, x0)
            extras["det_checks"] = {"coherence_at_initial_state": rep.as_dict()}
        return integrate(v, x0, icfg, monitors), extras

    return Plan(["t"] + columns + list(monitors), execute, system)


def plan_vortex(cfg):
    gam = cfg.vector("gammas")
    z = _pairs_to_z(cfg.vector("state"))
    unit = cfg.get("unit")
    eps = float(cfg.get("collision_eps"))
    c = vortex.VortexConfiguration(gam, z, None if unit is None else float(unit), eps)
    monitors = {
        "H": vortex.hamiltonian_monitor(c.gammas, eps),
        "Px": lambda s: vortex.impulse(c.gammas, s).real,
        "Py": lambda s: vortex.impulse(c.gammas, s).imag,
    }
    cols = [f"{a}{i + 1}" for i in range(c.n) for a in ("x", "y")]
    return _continuous_plan(cfg, vortex.vortex_field(c.gammas, eps), c.state, monitors, cols, "vortex")


def plan_reduced3(cfg):
    gam = cfg.vector("gammas")
    u0 = cfg.vector("state")
    s = vortex.ReducedState(u0, gam)
    if np.any(s.gammas == 0):
        raise ConfigError("circulations must be nonzero")
    return _continuous_plan(
        cfg, vortex.reduced_field(s.gammas), s.u, vortex.reduced_monitors(s.gammas), ["u1", "u2", "u3"], "reduced3"
    )


def plan_nambu(cfg):
    name = cfg.get("system")
    if name == "vortex3":
        gam = cfg.vector("gammas")
        if gam.shape != (3,) or np.any(gam == 0):
            raise ConfigError("vortex3 needs three nonzero circulations")
        sysm = vortex.reduced_nambu_system(gam)
    elif name == "euler-top":
        sysm = nambu.euler_top(cfg.get("inertia"))
    elif name == "oscillator":
        sysm = nambu.oscillator()
    else:
        raise ConfigError(f"unknown Nambu system {name!r}; use vortex3, euler-top or oscillator")
    if cfg.get("weight") is not None:
        sysm = nambu.NambuSystem(sysm.dim, sysm.hamiltonians, float(cfg.get("weight")), sysm.gradients, sysm.names)
    x0 = cfg.vector("state")
    monitors = dict(zip(sysm.names, sysm.hamiltonians))
    cols = [f"x{i + 1}" for i in range(sysm.dim)]
    return _continuous_plan(cfg, sysm.as_field(), x0, monitors, cols, f"nambu:{name}")


def _base_field(cfg):
    name = cfg.get("field")
    if name == "rotation":
        return flows.rotation_field()
    if name == "vortex":
        gam = cfg.vector("gammas")
        return vortex.vortex_field(gam)
    if name == "reduced3":
        gam = cfg.vector("gammas")
        if gam.shape != (3,):
            raise ConfigError("reduced3 field needs three circulations")
        return vortex.reduced_field(gam)
    raise ConfigError(f"unknown field {name!r}; use rotation, vortex or reduced3")


def plan_costate(cfg):
    v = _base_field(cfg)
    x0 = cfg.vector("state")
    psi0 = cfg.vector("psi")
    if x0.shape != (v.dim,) or psi0.shape != (v.dim,):
        raise ConfigError(f"state and psi must both have {v.dim} components")
    if cfg.get("field") == "vortex":
        vortex.VortexConfiguration(cfg.vector("gammas"), _pairs_to_z(x0))
    cols = [f"x{i + 1}" for i in range(v.dim)] + [f"psi{i + 1}" for i in range(v.dim)]
    return _continuous_plan(
        cfg, costate.extend(v), np.concatenate([x0, psi0]), {"H1": costate.h1_monitor(v)}, cols, f"costate:{v.name}"
    )


def _discrete_system(cfg):
    name = cfg.get("map")
    maps = {
        "cat": discrete.cat_map,
        "shear": discrete.shear_map,
        "henon": discrete.henon_map,
        "fanout": discrete.fanout_map,
    }
    if name in maps:
        return maps[name]()
    if name == "euler-rotation":
        return discrete.euler_map(flows.rotation_field(), float(cfg.get("tau")))
    raise ConfigError(f"unknown map {name!r}; use {', '.join(list(maps) + ['euler-rotation'])}")


class _Rows:
    """Minimal trajectory stand-in for discrete orbits (t holds the step index)."""

    def __init__(self, times, states, monitors):
        self.times = np.asarray(times, dtype=float)
        self.states = np.asarray(states, dtype=float).reshape(len(times), -1)
        self.monitors = {k: np.asarray(m, dtype=float) for k, m in monitors.items()}

    def drift(self, name):
        return Trajectory.drift(self, name)


def plan_discrete(cfg):
    dsys = _discrete_system(cfg)
    S0 = cfg.vector("state")
    if S0.shape != (dsys.dim,):
        raise ConfigError(f"state must have {dsys.dim} components")
    l0 = cfg.vector("costate", required=False)
    l0 = np.ones(dsys.dim) if l0 is None else l0
    dS0 = cfg.vector("tangent", required=False)
    dS0 = np.ones(dsys.dim) if dS0 is None else dS0
    if l0.shape != S0.shape or dS0.shape != S0.shape:
        raise ConfigError("costate and tangent must match the state length")
    mode = cfg.get("mode")
    if mode not in discrete.MODES:
        raise ConfigError(f"mode must be one of {discrete.MODES}")
    steps = int(cfg.get("steps"))
    if steps < 1:
        raise ConfigError("steps must be >= 1")

    def execute():
        rev0 = discrete.reversibility(dsys, S0)
        extras = {"det_checks": {"initial": {"reversible": rev0.reversible, "det": rev0.det, "condition": rev0.condition}}}
        es = discrete.ExtendedDiscreteState(S0, l0)
        S, L, dS = [S0], [l0], [dS0, discrete.transport_tangent(dsys, S0, dS0)]
        shift = 1 if mode == "verbatim" else 0
        pair = [float(np.dot(l0, dS[shift]))]
        min_det = abs(rev0.det)
        try:
            for _ in range(steps):
                es = discrete.costate_step(dsys, es, mode)
                S.append(es.S)
                L.append(es.l)
                dS.append(discrete.transport_tangent(dsys, S[-1], dS[-1]))
                pair.append(float(np.dot(es.l, dS[len(S) - 1 + shift])))
                min_det = min(min_det, abs(discrete.reversibility(dsys, es.S).det))
        except IrreversibilityError as exc:
            err = IntegrationError(str(exc), t=float(len(S) - 1))
            err.partial = _Rows(range(len(S)), np.hstack([S, L]), {"pairing": pair})
            err.report_extras = extras
            raise err from None
        extras["det_checks"]["min_abs_det"] = min_det
        orbit = np.array(S[:-1])
        extras["discrete_hamiltonian"] = discrete.discrete_hamiltonian(dsys, orbit, np.array(L[1:]))
        return _Rows(range(len(S)), np.hstack([S, L]), {"pairing": pair}), extras

    cols = [f"S{i + 1}" for i in range(dsys.dim)] + [f"l{i + 1}" for i in range(dsys.dim)]
    return Plan(["t"] + cols + ["pairing"], execute, f"discrete:{dsys.name}")


def plan_qmcheck(cfg):
    try:
        g = qmcheck.RadialGrid(float(cfg.get("r_min")), float(cfg.get("r_max")), int(cfg.get("points")), int(cfg.get("d")))
    except NpdynError as exc:
        raise ConfigError(str(exc)) from None

    def execute():
        r = g.r
        V = qmcheck.conformal_potential(g.d, r)
        res = np.zeros_like(r)
        res[1:-1] = qmcheck.radial_laplacian(V, r, g.d) - 0.5 * V[1:-1] ** 2
        rows = _Rows(r, np.stack([V, res], axis=1), {})
        extras = {
            "det_checks": {},
            "stationarity": {
                "d": g.d,
                "h": g.h,
                "max_residual": qmcheck.stationarity_residual(g),
                "order": qmcheck.convergence_order(g),
            },
        }
        return rows, extras

    return Plan(["r", "V", "residual"], execute, "qmcheck")


PLANNERS = {
    "vortex": plan_vortex,
    "reduced3": plan_reduced3,
    "nambu": plan_nambu,
    "costate": plan_costate,
    "discrete": plan_discrete,
    "qmcheck": plan_qmcheck,
}


def validate(cfg: RunConfig) -> Plan:
    """Build the run; any problem raises ConfigError (including coincident vortices)."""
    if cfg.kind not in PLANNERS:
        raise ConfigError(f"unknown system kind {cfg.kind!r}")
    try:
        return PLANNERS[cfg.kind](cfg)
    except ConfigError:
        raise
    except (NpdynError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def _fmt(x):
    return repr(float(x))


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        mons = [rows.monitors[c] for c in columns[1 + rows.states.shape[1]:]]
        for i in range(rows.times.shape[0]):
            w.writerow([_fmt(rows.times[i])] + [_fmt(s) for s in rows.states[i]] + [_fmt(m[i]) for m in mons])


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.generic):
        return _json_safe(obj.item())
    return obj


def build_report(plan, rows, extras, runtime, status="ok", error=None):
    integrals = {}
    for name in rows.monitors if rows is not None else ():
        initial, d_abs, d_rel = rows.drift(name)
        integrals[name] = {"initial": initial, "max_drift_abs": d_abs, "max_drift_rel": d_rel}
    report = {
        "system": plan.system,
        "status": status,
        "samples": 0 if rows is None else int(rows.times.shape[0]),
        "integrals": integrals,
        "det_checks": extras.pop("det_checks", {}),
    }
    report.update(extras)
    if error is not None:
        report["error"] = error
    report["runtime_seconds"] = runtime
    return _json_safe(report)


def run(cfg: RunConfig, stderr=None) -> int:
    stderr = stderr or sys.stderr
    try:
        plan = validate(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    start = time.perf_counter()
    status, code, error, extras = "ok", EXIT_OK, None, {}
    try:
        rows, extras = plan.execute()
    except IntegrationError as exc:
        rows, status, code, error = exc.partial, "failed", EXIT_RUNTIME, f"{type(exc).__name__}: {exc}"
        extras = getattr(exc, "report_extras", {})
        print(f"runtime error: {error}", file=stderr)
    except NpdynError as exc:
        rows, status, code, error = None, "failed", EXIT_RUNTIME, f"{type(exc).__name__}: {exc}"
        print(f"runtime error: {error}", file=stderr)
    runtime = time.perf_counter() - start if cfg.timing else None
    if cfg.out and rows is not None:
        write_csv(cfg.out, plan.columns, rows)
    report = build_report(plan, rows, extras, runtime, status, error)
    text = json.dumps(report, indent=2) + "\n"
    if cfg.report:
        Path(cfg.report).write_text(text)
    else:
        sys.stdout.write(text)
    return code


# -- argument parsing ----------------------------------------------------------


def _floats(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_common(p):
    p.add_argument("--config", help="JSON file with run parameters")
    p.add_argument("--gammas", type=_floats)
    p.add_argument("--state", type=_floats, help="initial state; use --state=-1,0 for negatives")
    p.add_argument("--dt", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--method", choices=["rk4", "midpoint"])
    p.add_argument("--record-every", dest="record_every", type=int)
    p.add_argument("--out", help="trajectory CSV path")
    p.add_argument("--report", help="JSON report path (default stdout)")
    p.add_argument("--no-timing", action="store_true", help="write runtime_seconds as null")


def build_parser():
    parser = argparse.ArgumentParser(prog="npdyn", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="kind", required=True)
    p = sub.add_parser("vortex", help="N point vortices")
    _add_common(p)
    p.add_argument("--unit", type=float, help="quantisation unit for circulations")
    p.add_argument("--collision-eps", dest="collision_eps", type=float)
    p = sub.add_parser("reduced3", help="reduced three-vortex system in u variables")
    _add_common(p)
    p = sub.add_parser("nambu", help="Nambu flow from a catalogue system")
    _add_common(p)
    p.add_argument("--system", choices=["vortex3", "euler-top", "oscillator"])
    p.add_argument("--weight", type=float)
    p.add_argument("--inertia", type=_floats)
    p = sub.add_parser("costate", help="costate-extended flow")
    _add_common(p)
    p.add_argument("--field", choices=["rotation", "vortex", "reduced3"])
    p.add_argument("--psi", type=_floats)
    p = sub.add_parser("discrete", help="discrete map with its linear costate")
    _add_common(p)
    p.add_argument("--map", choices=["cat", "shear", "henon", "fanout", "euler-rotation"])
    p.add_argument("--costate", type=_floats)
    p.add_argument("--tangent", type=_floats)
    p.add_argument("--steps", type=int)
    p.add_argument("--mode", choices=list(discrete.MODES))
    p.add_argument("--tau", type=float)
    p = sub.add_parser("qmcheck", help="conformal potential stationarity on a radial grid")
    _add_common(p)
    p.add_argument("--d", type=int)
    p.add_argument("--r-min", dest="r_min", type=float)
    p.add_argument("--r-max", dest="r_max", type=float)
    p.add_argument("--points", type=int)
    p = sub.add_parser("check", help="run built-in property suites")
    p.add_argument("--suite", default="all", choices=["all"] + list(suites.SUITES))
    return parser


_NON_PARAMS = {"kind", "config", "out", "report", "no_timing", "suite"}


def config_from_args(args) -> RunConfig:
    params = {}
    out = report = None
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        if data.get("kind", args.kind) != args.kind:
            raise ConfigError(f"config is for {data['kind']!r}, not {args.kind!r}")
        data.pop("kind", None)
        out, report = data.pop("out", None), data.pop("report", None)
        params.update({k.replace("-", "_"): v for k, v in data.items()})
    for k, v in vars(args).items():
        if k not in _NON_PARAMS and v is not None:
            params[k] = v
    return RunConfig(args.kind, params, args.out or out, args.report or report, not args.no_timing)


def run_check(suite, stream=None) -> int:
    stream = stream or sys.stdout
    names = list(suites.SUITES) if suite == "all" else [suite]
    results = suites.run_suites(names)
    for name, label, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  [{name}] {label}: {detail}", file=stream)
    failed = sum(1 for r in results if not r[2])
    print(f"{len(results) - failed}/{len(results)} checks passed", file=stream)
    return EXIT_OK if failed == 0 else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.kind == "check":
        return run_check(args.suite)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
