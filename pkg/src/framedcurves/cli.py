"""Command-line front end.

Every subcommand accepts ``--config FILE`` (a JSON object whose keys are the
long option names with dashes replaced by underscores); explicit flags win
over the file. Each run produces a JSON run record with the resolved
configuration, the metrics and the written files. Exit status is 0 on
success, 1 for invalid parameters or unwritable outputs and 2 for usage
errors.
"""

import argparse
import dataclasses
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .critical import (ElasticaParams, QuadraticModelParams, SolveOptions,
                       elastica_first_integral, multiplier_witness, quadratic_conservation,
                       reg1_residual, solve)
from .energy import density_from_name, evaluate_energy, probe_density
from .errors import DomainError
from .frames import CurvatureTorsionProfile, closure_defect, integrate_frame
from .io import (dump_record, export_curve, read_curve_csv, run_record, write_run_record)
from .minimize import DiscreteProblem, minimize_energy
from .shooting import (MODEL_FIELDS, RefineOptions, SearchSpace, default_ranges,
                       random_search, refine, reproduce_table)
from .tables import TABLES

TWO_PI = 2 * math.pi
SEED_ENV = "ELASTICA_SEED"
MODEL_TABLE = {"planar": 1, "space": 3, "quadratic": 4}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- option groups ------------------------------------------------------------------

def _common(p):
    p.add_argument("--config", help="JSON file with option values")
    p.add_argument("--record", help="run-record path (default: <out-dir>/<command>.json or stdout)")
    p.add_argument("--out-dir", help="directory for output files")
    p.add_argument("--seed", type=int, help=f"random seed (fallback: ${SEED_ENV}, then 0)")
    p.add_argument("--threads", type=int, help="worker threads (default: all cores)")


def _export_opts(p):
    p.add_argument("--out", help="curve CSV path")
    p.add_argument("--svg", help="SVG projection path")
    p.add_argument("--plane", choices=("xy", "xz", "yz"))


def _solver(p):
    p.add_argument("--tol", type=float, help="local error tolerance of the integrator")
    p.add_argument("--n", type=int, help="number of arc steps N")
    p.add_argument("--kappa-floor", type=float, help="curvature floor for the stop event")


def _ode_params(p):
    p.add_argument("--model", choices=tuple(MODEL_FIELDS))
    for name in ("c1", "c2", "k0", "k1", "c", "t0", "t1", "t2"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--length", type=float, help="arc length L")


def _profile_source(p):
    p.add_argument("--kappa", type=float, help="constant curvature")
    p.add_argument("--tau", type=float, help="constant torsion")
    p.add_argument("--length", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--profile", help="curve CSV whose kappa, tau columns are used")


def _density(p):
    p.add_argument("--density", choices=("euler", "quadratic", "sadowsky", "langer_singer"))
    p.add_argument("--density-params", type=float, nargs="*")


ODE_DEFAULTS = dict(model="planar", c1=1.0, c2=0.0, k0=1.0, k1=0.0, c=None, t0=0.0,
                    t1=0.0, t2=0.0, length=TWO_PI)
SOLVER_DEFAULTS = dict(tol=1e-12, n=4096, kappa_floor=1e-8)
EXPORT_DEFAULTS = dict(out=None, svg=None, plane="xy")
PROFILE_DEFAULTS = dict(kappa=1.0, tau=0.0, length=TWO_PI, n=4096, profile=None)

DEFAULTS = {
    "integrate": dict(**PROFILE_DEFAULTS, **EXPORT_DEFAULTS),
    "energy": dict(**PROFILE_DEFAULTS, density="euler", density_params=[], rule="simpson",
                   probe=False, a_range=[-5.0, 5.0], b_range=[-5.0, 5.0], grid=[101, 101],
                   fd_step=1e-6, pairs=10000),
    "solve": dict(**ODE_DEFAULTS, **SOLVER_DEFAULTS, **EXPORT_DEFAULTS),
    "search": dict(model="planar", ranges=None, table=None, lengths=None, budget=1000,
                   threshold=1e-6, top=0, **SOLVER_DEFAULTS),
    "refine": dict(**ODE_DEFAULTS, **SOLVER_DEFAULTS, **EXPORT_DEFAULTS, threshold=1e-6,
                   max_iter=2000, include_length=False),
    "minimize": dict(density="euler", density_params=[], length=TWO_PI, n=100, w_pos=10.0,
                     w_tan=10.0, weight_factor=2.0, max_iter=20000, grad_tol=1e-4,
                     gap_tol=1e-6, fd_step=1e-6, quadrature="trapezoid", **EXPORT_DEFAULTS),
    "verify": dict(**ODE_DEFAULTS, **SOLVER_DEFAULTS, density=None, density_params=[]),
    "reproduce": dict(table=1, svg_plane=None, refine=False, **SOLVER_DEFAULTS),
}
COMMON_DEFAULTS = dict(record=None, out_dir=None, seed=None, threads=None)


def build_parser():
    parser = _Parser(prog="framedcurves", description=__doc__.splitlines()[0],
                     argument_default=argparse.SUPPRESS)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("integrate", help="rebuild a curve from curvature and torsion",
                       argument_default=argparse.SUPPRESS)
    _common(p), _profile_source(p), _export_opts(p)

    p = sub.add_parser("energy", help="energy of a profile and density probes",
                       argument_default=argparse.SUPPRESS)
    _common(p), _profile_source(p), _density(p)
    p.add_argument("--rule", choices=("simpson", "trapezoid"))
    p.add_argument("--probe", action="store_true", help="also probe the density hypotheses")
    p.add_argument("--a-range", type=float, nargs=2)
    p.add_argument("--b-range", type=float, nargs=2)
    p.add_argument("--grid", type=int, nargs=2)
    p.add_argument("--fd-step", type=float)
    p.add_argument("--pairs", type=int)

    p = sub.add_parser("solve", help="solve a critical-point ODE and rebuild the curve",
                       argument_default=argparse.SUPPRESS)
    _common(p), _ode_params(p), _solver(p), _export_opts(p)

    p = sub.add_parser("search", help="random search for closed curves",
                       argument_default=argparse.SUPPRESS)
    _common(p), _solver(p)
    p.add_argument("--model", choices=tuple(MODEL_FIELDS))
    p.add_argument("--range", dest="ranges", action="append", metavar="NAME=LO:HI")
    p.add_argument("--table", type=int, choices=sorted(TABLES),
                   help="table whose columns give the default ranges and lengths")
    p.add_argument("--lengths", type=float, nargs="+")
    p.add_argument("--budget", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--top", type=int, help="records kept in the run record (0: all)")

    p = sub.add_parser("refine", help="Nelder-Mead refinement of the closure defect",
                       argument_default=argparse.SUPPRESS)
    _common(p), _ode_params(p), _solver(p), _export_opts(p)
    p.add_argument("--threshold", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--include-length", action="store_true")

    p = sub.add_parser("minimize", help="discrete energy minimization with closure penalty",
                       argument_default=argparse.SUPPRESS)
    _common(p), _density(p), _export_opts(p)
    p.add_argument("--length", type=float)
    p.add_argument("--n", type=int)
    for name in ("w-pos", "w-tan", "weight-factor", "grad-tol", "gap-tol", "fd-step"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--quadrature", choices=("trapezoid", "simpson"))

    p = sub.add_parser("verify", help="certificates of an ODE solution",
                       argument_default=argparse.SUPPRESS)
    _common(p), _ode_params(p), _solver(p), _density(p)

    p = sub.add_parser("reproduce", help="solve every row of a published table",
                       argument_default=argparse.SUPPRESS)
    _common(p), _solver(p)
    p.add_argument("--table", type=int, choices=sorted(TABLES))
    p.add_argument("--svg-plane", choices=("xy", "xz", "yz"),
                   help="also write SVG projections on this plane")
    p.add_argument("--refine", action="store_true",
                   help="refine rows of the closed-curve tables (1 and 3)")
    return parser


# --- configuration --------------------------------------------------------------------

def _actions(parser, command):
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    return {a.dest: a for a in sub.choices[command]._actions if a.dest != "help"}


def _coerce(action, value):
    if value is None:
        return None
    if isinstance(action, argparse._StoreTrueAction):
        if not isinstance(value, bool):
            raise UsageError(f"config key {action.dest!r} must be true or false")
        return value
    if action.dest == "ranges":
        return value
    conv = action.type or (lambda v: v)
    try:
        if action.nargs in ("*", "+") or isinstance(action.nargs, int):
            return [conv(v) for v in value]
        value = conv(value)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"config key {action.dest!r}: {exc}") from exc
    if action.choices is not None and value not in action.choices:
        raise UsageError(f"config key {action.dest!r} must be one of {list(action.choices)}")
    return value


def resolve_config(parser, args):
    """Defaults, then the config file, then explicit flags."""
    command = args.command
    flags = {k: v for k, v in vars(args).items() if k != "command"}
    config = {**COMMON_DEFAULTS, **DEFAULTS[command]}
    actions = _actions(parser, command)
    path = flags.pop("config", None)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        for key, value in data.items():
            if key not in actions or key == "config":
                raise UsageError(f"unknown config key {key!r} for {command}")
            config[key] = _coerce(actions[key], value)
    config.update(flags)
    if config.get("seed") is None:
        env = os.environ.get(SEED_ENV)
        try:
            config["seed"] = int(env) if env not in (None, "") else 0
        except ValueError as exc:
            raise UsageError(f"{SEED_ENV} must be an integer") from exc
    if config.get("threads") is None:
        config["threads"] = os.cpu_count() or 1
    return config


# --- helpers ---------------------------------------------------------------------------

def _ode_from_config(cfg):
    model = cfg["model"]
    if model == "quadratic":
        if cfg["c"] is None:
            raise DomainError("quadratic model needs --c")
        return QuadraticModelParams(cfg["c"], cfg["k0"], cfg["k1"], cfg["t0"], cfg["t1"],
                                    cfg["t2"], cfg["length"])
    c2 = 0.0 if model == "planar" else cfg["c2"]
    if model == "planar" and cfg["c2"] not in (0, 0.0, None):
        raise DomainError("planar model needs c2 == 0")
    return ElasticaParams(cfg["c1"], c2, cfg["k0"], cfg["k1"], cfg["length"])


def _solve_options(cfg):
    return SolveOptions(tol=cfg["tol"], n=cfg["n"], kappa_floor=cfg["kappa_floor"])


def _profile_from_config(cfg):
    if cfg.get("profile"):
        return read_curve_csv(cfg["profile"]).profile
    return CurvatureTorsionProfile.constant(cfg["kappa"], cfg["tau"], cfg["length"], cfg["n"])


def _out_path(cfg, key):
    path = cfg.get(key)
    if path and cfg.get("out_dir") and not os.path.isabs(path):
        path = os.path.join(cfg["out_dir"], path)
    return path


def _export(curve, cfg):
    outputs = []
    if cfg.get("out"):
        outputs += export_curve(curve, _out_path(cfg, "out"), ("csv",))
    if cfg.get("svg"):
        outputs += export_curve(curve, _out_path(cfg, "svg"), ("svg",), cfg["plane"])
    return outputs


def _closure_metrics(curve):
    rep = closure_defect(curve)
    return {"d": rep.defect, "position_gap": rep.position_gap, "tangent_gap": rep.tangent_gap}


def _params_dict(params):
    return dataclasses.asdict(params)


def _certificates(sol, density=None):
    """Metrics of the applicable checks; failed preconditions are reported, not raised."""
    out = {}

    def attempt(name, fn):
        try:
            out.update(fn())
        except DomainError as exc:
            out[name] = f"not applicable: {exc}"

    if sol.model in ("planar", "space"):
        def first():
            fi = elastica_first_integral(sol)
            return {"first_integral_deviation": fi.deviation,
                    "first_integral_minus_c1": float(np.nanmax(np.abs(fi.values - sol.constants[0]))),
                    "energy_integral_drift": fi.energy_drift}
        attempt("first_integral", first)
    if sol.model == "quadratic":
        attempt("conservation", lambda: {"conservation_deviation": quadratic_conservation(sol)[1]})
    if density is not None and sol.s.shape[0] >= 5:
        def witness():
            w = multiplier_witness(density, sol)
            return {"lambda_defect": w.lam_defect, "lambda_mean": w.lam_mean.tolist(),
                    "mu_defect": w.mu_defect}

        def reg1():
            r = reg1_residual(density, sol)
            return {"reg1_first": r.sup_first, "reg1_second": r.sup_second}
        attempt("multiplier_witness", witness)
        attempt("reg1_residual", reg1)
    return out


def _solution_metrics(sol):
    m = {"termination": sol.termination, "s_stop": sol.s_stop, "steps": sol.steps,
         "nodes": int(sol.s.shape[0]), "min_abs_kappa": float(np.min(np.abs(sol.kappa)))}
    return m


# --- commands --------------------------------------------------------------------------

def cmd_integrate(cfg):
    profile = _profile_from_config(cfg)
    curve = integrate_frame(profile)
    gram = np.einsum("kji,kjl->kil", curve.frames, curve.frames) - np.eye(3)
    metrics = {**_closure_metrics(curve), "length": profile.length, "n": profile.n,
               "orthonormality_drift": float(np.max(np.abs(gram)))}
    return metrics, _export(curve, cfg)


def cmd_energy(cfg):
    density = density_from_name(cfg["density"], cfg["density_params"])
    profile = _profile_from_config(cfg)
    metrics = {"energy": evaluate_energy(density, profile, cfg["rule"])}
    if cfg["probe"]:
        rep = probe_density(density, tuple(cfg["a_range"]), tuple(cfg["b_range"]),
                            tuple(cfg["grid"]), cfg["fd_step"], cfg["pairs"], cfg["seed"])
        metrics["probe"] = {
            name: dataclasses.asdict(getattr(rep, name)) if getattr(rep, name) is not None else None
            for name in ("coercivity", "upper_growth", "partial_growth", "convexity")}
        metrics["probe"]["partial_fd_deviation"] = rep.partial_fd_deviation
        metrics["probe"]["ok"] = rep.ok
    return metrics, []


def cmd_solve(cfg):
    params = _ode_from_config(cfg)
    sol = solve(params, _solve_options(cfg), model=None if cfg["model"] == "quadratic" else cfg["model"])
    metrics = {"params": _params_dict(params), **_solution_metrics(sol)}
    outputs = []
    if sol.s.shape[0] >= 3:
        curve = sol.curve()
        if sol.completed:
            metrics.update(_closure_metrics(curve))
        outputs = _export(curve, cfg)
    metrics.update(_certificates(sol))
    return metrics, outputs


def _parse_ranges(raw):
    if raw is None:
        return None
    if isinstance(raw, dict):
        return {k: tuple(v) for k, v in raw.items()}
    ranges = {}
    for item in raw:
        try:
            name, span = item.split("=")
            lo, hi = span.split(":")
            ranges[name] = (float(lo), float(hi))
        except ValueError as exc:
            raise UsageError(f"bad range {item!r}; expected NAME=LO:HI") from exc
    return ranges


def cmd_search(cfg):
    model = cfg["model"]
    table = cfg["table"] or MODEL_TABLE[model]
    rows = [p for _, p in TABLES[table]]
    if any(isinstance(p, QuadraticModelParams) != (model == "quadratic") for p in rows):
        raise DomainError(f"table {table} does not hold {model} rows")
    ranges = _parse_ranges(cfg["ranges"]) or default_ranges(model, rows)
    cfg["ranges"] = {k: list(v) for k, v in ranges.items()}
    lengths = cfg["lengths"] or sorted({p.length for p in rows})
    cfg["lengths"] = list(lengths)
    space = SearchSpace(model, ranges, tuple(lengths), cfg["threshold"], cfg["budget"],
                        cfg["seed"], _solve_options(cfg))
    records = random_search(space, threads=cfg["threads"])
    kept = records if cfg["top"] <= 0 else records[: cfg["top"]]
    metrics = {
        "trials": len(records),
        "accepted": sum(r.accepted for r in records),
        "best_d": records[0].d if records else None,
        "records": [dataclasses.asdict(r) for r in kept],
    }
    return metrics, []


def cmd_refine(cfg):
    params = _ode_from_config(cfg)
    opts = RefineOptions(cfg["threshold"], cfg["max_iter"], cfg["include_length"],
                         solve=_solve_options(cfg))
    res = refine(params, opts, model=cfg["model"])
    metrics = {"start": _params_dict(params), "params": _params_dict(res.params),
               "d_start": res.d_start, "d": res.d, "success": res.success,
               "iterations": res.iterations, "evaluations": res.evaluations}
    outputs = []
    if cfg.get("out") or cfg.get("svg"):
        sol = solve(res.params, _solve_options(cfg),
                    model=None if cfg["model"] == "quadratic" else cfg["model"])
        outputs = _export(sol.curve(), cfg)
    return metrics, outputs


def cmd_minimize(cfg):
    density = density_from_name(cfg["density"], cfg["density_params"])
    problem = DiscreteProblem(density, cfg["length"], cfg["n"], cfg["w_pos"], cfg["w_tan"],
                              cfg["weight_factor"], max_iter=cfg["max_iter"],
                              grad_tol=cfg["grad_tol"], gap_tol=cfg["gap_tol"],
                              fd_step=cfg["fd_step"], quadrature=cfg["quadrature"])
    res = minimize_energy(problem, seed=cfg["seed"])
    curve = integrate_frame(res.profile)
    k0 = TWO_PI / cfg["length"]
    metrics = {"energy": res.energy, "position_gap": res.position_gap,
               "tangent_gap": res.tangent_gap, "defect": closure_defect(curve).defect,
               "iterations": res.iterations, "converged": res.converged,
               "gradient_norm": res.gradient_norm, "weights": list(res.weights),
               "max_abs_kappa_minus_circle": float(np.max(np.abs(res.profile.kappa - k0))),
               "max_abs_tau": float(np.max(np.abs(res.profile.tau)))}
    return metrics, _export(curve, cfg)


def cmd_verify(cfg):
    params = _ode_from_config(cfg)
    name = cfg["density"] or ("quadratic" if cfg["model"] == "quadratic" else "euler")
    cfg["density"] = name
    density = density_from_name(name, cfg["density_params"])
    sol = solve(params, _solve_options(cfg), model=None if cfg["model"] == "quadratic" else cfg["model"])
    metrics = {"params": _params_dict(params), **_solution_metrics(sol),
               **_certificates(sol, density)}
    return metrics, []


def cmd_reproduce(cfg):
    table = cfg["table"]
    out_dir = cfg["out_dir"] or "runs"
    cfg["out_dir"] = out_dir
    report = reproduce_table(table, _solve_options(cfg))
    outputs, rows = [], []
    for row in report.rows:
        info = row.to_dict()
        if row.solution is not None:
            info.update(_certificates(row.solution))
        if row.curve is not None:
            base = os.path.join(out_dir, f"table{table}_{row.label}")
            formats = ("csv", "svg") if cfg["svg_plane"] else ("csv",)
            outputs += export_curve(row.curve, base, formats, cfg["svg_plane"] or "xy")
        if cfg["refine"] and table in (1, 3) and math.isfinite(row.d):
            res = refine(row.params, RefineOptions(solve=_solve_options(cfg)))
            info["refined"] = {"params": _params_dict(res.params), "d": res.d,
                               "success": res.success, "iterations": res.iterations}
        rows.append(info)
    return {"table": table, "rows": rows}, outputs


COMMANDS = {
    "integrate": cmd_integrate,
    "energy": cmd_energy,
    "solve": cmd_solve,
    "search": cmd_search,
    "refine": cmd_refine,
    "minimize": cmd_minimize,
    "verify": cmd_verify,
    "reproduce": cmd_reproduce,
}


def run(argv=None, stdout=None, stderr=None):
    """Parse ``argv``, execute the subcommand and return the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve_config(parser, args)
        if isinstance(cfg.get("ranges"), list):
            cfg["ranges"] = {k: list(v) for k, v in _parse_ranges(cfg["ranges"]).items()}
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return 2
    except SystemExit as exc:       # --help / --version
        return int(exc.code or 0)

    command = args.command
    start = time.perf_counter()
    try:
        metrics, outputs = COMMANDS[command](cfg)
        duration = time.perf_counter() - start
        record_cfg = {k: v for k, v in cfg.items() if k != "record"}
        record = run_record(__version__, command, record_cfg, metrics, outputs, duration)
        path = cfg.get("record")
        if path is None and cfg.get("out_dir"):
            name = f"table{cfg['table']}.json" if command == "reproduce" else f"{command}.json"
            path = os.path.join(cfg["out_dir"], name)
        if path is None:
            stdout.write(dump_record(record))
        else:
            write_run_record(record, path)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
