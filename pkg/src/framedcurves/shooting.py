"""Closure search over ODE constants: random sampling, local refinement, tables.

A trial solves one of the critical-point systems, rebuilds the curve from
the origin with the identity frame and scores it with the closure defect
``d = |r(L)| + |t(L) - e1|``. Solves that stop at the curvature floor (or
otherwise fail) score ``d = inf``.
"""

import dataclasses
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .critical import (ElasticaParams, QuadraticModelParams, SolveOptions, solve)
from .errors import DomainError
from .frames import closure_defect, integrate_endpoints
from .tables import TABLES

__all__ = [
    "MODEL_FIELDS",
    "model_of",
    "free_values",
    "make_params",
    "closure_objective",
    "SearchSpace",
    "SearchRecord",
    "random_search",
    "default_ranges",
    "RefineOptions",
    "RefineResult",
    "refine",
    "TableRow",
    "TableReport",
    "reproduce_table",
]

MODEL_FIELDS = {
    "planar": ("c1", "kappa0", "kappa1"),
    "space": ("c1", "c2", "kappa0", "kappa1"),
    "quadratic": QuadraticModelParams.FIELDS,
}


def model_of(params):
    if isinstance(params, QuadraticModelParams):
        return "quadratic"
    return "planar" if params.c2 == 0 else "space"


def make_params(model, values, length):
    """Build the parameter object of ``model`` from its free values."""
    if model not in MODEL_FIELDS:
        raise DomainError(f"unknown model {model!r}")
    values = [float(v) for v in values]
    names = MODEL_FIELDS[model]
    if len(values) != len(names):
        raise DomainError(f"{model} needs {len(names)} values {names}")
    kw = dict(zip(names, values), length=length)
    if model == "quadratic":
        return QuadraticModelParams(**kw)
    return ElasticaParams(**kw)


def free_values(model, params):
    return tuple(getattr(params, name) for name in MODEL_FIELDS[model])


def closure_objective(params, options=None, model=None, length=None):
    """Closure defect of the curve generated by ``params``.

    Returns ``(d, diagnostics)``; ``diagnostics`` holds the termination,
    stopping point, the two gaps and the model. ``length`` overrides
    ``params.length``.
    """
    options = options or SolveOptions()
    if length is not None:
        params = dataclasses.replace(params, length=length)
    model = model or model_of(params)
    if model == "planar" and isinstance(params, ElasticaParams) and params.c2 != 0:
        raise DomainError("planar model needs c2 == 0")
    sol = solve(params, options, model=None if model == "quadratic" else model)
    diag = {"model": model, "termination": sol.termination, "s_stop": sol.s_stop,
            "steps": sol.steps}
    if not sol.completed:
        diag.update(position_gap=np.inf, tangent_gap=np.inf)
        return np.inf, diag
    k, t = sol.profile().step_values()
    R, r = integrate_endpoints(k, t, sol.step)
    pos = float(np.linalg.norm(r))
    tan = float(np.linalg.norm(R[:, 0] - (1.0, 0.0, 0.0)))
    diag.update(position_gap=pos, tangent_gap=tan)
    return pos + tan, diag


# --- random search ------------------------------------------------------------

def default_ranges(model, table_rows, spread=0.5):
    """Hull of the rows' columns widened by ``spread`` times each bound's size."""
    names = MODEL_FIELDS[model]
    cols = np.array([free_values(model, p) for p in table_rows])
    lo, hi = cols.min(axis=0), cols.max(axis=0)
    lo = lo - spread * np.abs(lo)
    hi = hi + spread * np.abs(hi)
    return {n: (float(a), float(b)) for n, a, b in zip(names, lo, hi)}


@dataclass(frozen=True)
class SearchSpace:
    """Sampling box, candidate lengths and budget of a random search."""

    model: str
    ranges: dict
    lengths: tuple
    threshold: float = 1e-6
    budget: int = 1000
    seed: int = 0
    options: SolveOptions = field(default_factory=SolveOptions)

    def __post_init__(self):
        if self.model not in MODEL_FIELDS:
            raise DomainError(f"unknown model {self.model!r}")
        names = MODEL_FIELDS[self.model]
        missing = set(names) - set(self.ranges)
        extra = set(self.ranges) - set(names)
        if missing or extra:
            raise DomainError(f"ranges must name exactly {names}")
        ranges = {}
        for name in names:
            lo, hi = (float(v) for v in self.ranges[name])
            if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
                raise DomainError(f"range for {name} must be finite with lo <= hi")
            ranges[name] = (lo, hi)
        object.__setattr__(self, "ranges", ranges)
        lengths = tuple(float(v) for v in np.atleast_1d(self.lengths))
        if not lengths or not all(np.isfinite(v) and v > 0 for v in lengths):
            raise DomainError("need at least one positive candidate length")
        object.__setattr__(self, "lengths", lengths)
        if not self.threshold > 0:
            raise DomainError("threshold must be positive")
        if self.budget < 0:
            raise DomainError("budget must be nonnegative")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")

    def sample(self, index):
        """Parameters and length of trial ``index`` (pure function of seed, index)."""
        rng = np.random.default_rng([self.seed, index])
        lo, hi = np.array([self.ranges[n] for n in MODEL_FIELDS[self.model]]).T
        values = lo + (hi - lo) * rng.random(lo.size)
        return tuple(float(v) for v in values), self.lengths[index % len(self.lengths)]


@dataclass(frozen=True)
class SearchRecord:
    index: int
    params: tuple
    length: float
    d: float
    termination: str
    accepted: bool


def _trial(space, index):
    values, length = space.sample(index)
    try:
        params = make_params(space.model, values, length)
        d, diag = closure_objective(params, space.options, model=space.model)
        term = diag["termination"]
    except DomainError:
        d, term = np.inf, "invalid"
    accepted = term == "completed" and d < space.threshold
    return SearchRecord(index, values, length, float(d), term, accepted)


def random_search(space, threads=1):
    """Evaluate ``space.budget`` independent trials, best first.

    Records are sorted by ``d`` with ties broken by the parameter tuple.
    Trial ``i`` draws from a generator seeded by ``(seed, i)``, so the
    result does not depend on ``threads``.
    """
    if threads is None:
        threads = os.cpu_count() or 1
    indices = range(space.budget)
    if threads <= 1 or space.budget <= 1:
        records = [_trial(space, i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda i: _trial(space, i), indices))
    return sorted(records, key=lambda r: (r.d, r.params, r.length, r.index))


# --- refinement -----------------------------------------------------------------

@dataclass(frozen=True)
class RefineOptions:
    threshold: float = 1e-6
    max_iter: int = 2000
    include_length: bool = False
    restart_every: int = 200
    simplex_scale: float = 0.05
    solve: SolveOptions = field(default_factory=SolveOptions)


@dataclass(frozen=True)
class RefineResult:
    params: object
    d: float
    d_start: float
    iterations: int
    evaluations: int
    success: bool


class _Reached(Exception):
    pass


def refine(params, options=None, model=None):
    """Nelder-Mead on the free constants (and optionally L) to minimize ``d``.

    Stops as soon as ``d < options.threshold`` or after ``options.max_iter``
    simplex iterations in total. Every ``options.restart_every`` iterations
    the simplex is rebuilt around the best vertex (edges of relative size
    ``options.simplex_scale``), which keeps it from flattening on the
    long narrow valleys of ``d``. The result never has a larger defect than
    the start.
    """
    options = options or RefineOptions()
    model = model or model_of(params)
    x0 = list(free_values(model, params))
    if options.include_length:
        x0.append(params.length)
    x0 = np.array(x0)
    d0, _ = closure_objective(params, options.solve, model=model)
    if not np.isfinite(d0):
        raise DomainError("closure defect is not finite at the starting point")

    best = {"x": x0, "d": d0}
    evals = [0]

    def build(x):
        if options.include_length:
            return make_params(model, x[:-1], x[-1])
        return make_params(model, x, params.length)

    def f(x):
        evals[0] += 1
        try:
            d, _ = closure_objective(build(x), options.solve, model=model)
        except DomainError:
            return np.inf
        if d < best["d"]:
            best["x"], best["d"] = x.copy(), d
        if d < options.threshold:
            raise _Reached
        return d

    iterations = 0
    dim = x0.size
    while d0 >= options.threshold and iterations < options.max_iter:
        xb = best["x"]
        edges = options.simplex_scale * np.maximum(np.abs(xb), 1e-3)
        simplex = np.vstack([xb, xb + np.diag(edges)])
        counter = [0]

        def count(_):
            counter[0] += 1

        try:
            minimize(f, xb, method="Nelder-Mead", callback=count,
                     options={"maxiter": min(options.restart_every,
                                             options.max_iter - iterations),
                              "initial_simplex": simplex, "xatol": 1e-15,
                              "fatol": 1e-15, "adaptive": dim > 2})
        except _Reached:
            iterations += counter[0]
            break
        iterations += max(counter[0], 1)
    p = build(best["x"])
    return RefineResult(p, float(best["d"]), float(d0), iterations, evals[0],
                        bool(best["d"] < options.threshold))


# --- table reproduction -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TableRow:
    label: str
    params: object
    termination: str
    s_stop: float | None
    d: float
    min_abs_kappa: float
    solution: object = field(repr=False, default=None)
    curve: object = field(repr=False, default=None)

    def to_dict(self):
        return {"label": self.label, "model": model_of(self.params),
                "params": dataclasses.asdict(self.params), "termination": self.termination,
                "s_stop": self.s_stop, "d": self.d, "min_abs_kappa": self.min_abs_kappa}


@dataclass(frozen=True, eq=False)
class TableReport:
    table: int
    rows: list

    def to_dict(self):
        return {"table": self.table, "rows": [r.to_dict() for r in self.rows]}


def reproduce_table(table, options=None):
    """Solve every row of a published table and rebuild its curve.

    Rows that stop early keep the partial curve; ``d`` is reported for every
    row (it is the acceptance quantity for the closed-curve tables 1 and 3).
    """
    if table not in TABLES:
        raise DomainError(f"unknown table {table!r}; choose from {sorted(TABLES)}")
    options = options or SolveOptions()
    rows = []
    for label, params in TABLES[table]:
        sol = solve(params, options)
        curve = sol.curve() if sol.s.shape[0] >= 3 else None
        d = closure_defect(curve).defect if (curve is not None and sol.completed) else np.inf
        rows.append(TableRow(label, params, sol.termination, sol.s_stop, float(d),
                             float(np.min(np.abs(sol.kappa))), sol, curve))
    return TableReport(table, rows)
