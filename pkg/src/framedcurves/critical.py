"""Critical-point ODE systems: solvers and certificates.

Three initial-value problems are solved on a uniform arclength grid:

* planar elastica ``2k'' + k^3 - c1 k = 0`` (torsion zero),
* space elastica ``2k'' - 2 c2^2 / k^3 + k^3 - c1 k = 0`` with
  ``tau = c2 / k^2`` eliminated,
* the quadratic model for ``f = (k^2 + tau^2) / 2``, written as a first-order
  system in ``(k, k', tau, u, u')`` with ``u = tau' / k``.

Solutions are certified by the elastica first integral, the quadratic-model
conservation monitor, a reconstruction of the Lagrange multipliers
``(mu, lambda)`` of the weak Euler-Lagrange system, and pointwise residuals
of the multiplier-free fourth-order system.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _ode
from ._numerics import derivative
from .errors import DomainError
from .frames import CurvatureTorsionProfile, integrate_frame

__all__ = [
    "ElasticaParams",
    "QuadraticModelParams",
    "SolveOptions",
    "ODESolution",
    "FirstIntegral",
    "MultiplierWitness",
    "Reg1Residual",
    "integrate_model",
    "solve",
    "solve_planar_elastica",
    "solve_space_elastica",
    "solve_quadratic_model",
    "elastica_first_integral",
    "quadratic_conservation",
    "multiplier_witness",
    "reg1_residual",
]

MODELS = {"planar": _ode.PLANAR, "space": _ode.SPACE, "quadratic": _ode.QUADRATIC}


def _check_finite(obj, names):
    for name in names:
        v = getattr(obj, name)
        if not np.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class ElasticaParams:
    """Constants of the elastica equations and the arc length."""

    c1: float
    c2: float = 0.0
    kappa0: float = 1.0
    kappa1: float = 0.0
    length: float = 2 * np.pi

    FIELDS = ("c1", "c2", "kappa0", "kappa1")

    def __post_init__(self):
        for name in (*self.FIELDS, "length"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_finite(self, (*self.FIELDS, "length"))
        if self.length <= 0:
            raise DomainError("length must be positive")
        if self.c2 != 0 and self.kappa0 == 0:
            raise DomainError("space elastica with c2 != 0 needs kappa0 != 0")


@dataclass(frozen=True)
class QuadraticModelParams:
    """Constant ``c``, initial jets of curvature and torsion, arc length.

    ``tau0, tau1, tau2`` are ``tau(0), tau'(0), tau''(0)``.
    """

    c: float
    kappa0: float
    kappa1: float
    tau0: float
    tau1: float
    tau2: float
    length: float

    FIELDS = ("c", "kappa0", "kappa1", "tau0", "tau1", "tau2")

    def __post_init__(self):
        for name in (*self.FIELDS, "length"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_finite(self, (*self.FIELDS, "length"))
        if self.length <= 0:
            raise DomainError("length must be positive")
        if self.kappa0 == 0:
            raise DomainError("quadratic model needs kappa0 != 0")


@dataclass(frozen=True)
class SolveOptions:
    tol: float = 1e-12
    n: int = 4096
    kappa_floor: float = 1e-8
    max_steps: int = 10_000_000

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError("tolerance must be positive")
        if self.n < 2:
            raise DomainError("need at least 2 grid intervals")


@dataclass(frozen=True, eq=False)
class ODESolution:
    """Curvature and torsion series along a solution, with derivatives.

    ``ddkappa`` and ``ddtau`` come from the ODE right-hand side (or from the
    caller for prescribed series). When the solve stopped early the series
    cover the grid nodes up to ``s_stop``.
    """

    model: str
    s: np.ndarray
    kappa: np.ndarray
    dkappa: np.ndarray
    ddkappa: np.ndarray
    tau: np.ndarray
    dtau: np.ndarray
    ddtau: np.ndarray
    u: np.ndarray | None = None
    du: np.ndarray | None = None
    termination: str = "completed"
    s_stop: float | None = None
    params: object = None
    steps: int = 0
    constants: tuple = field(default=(), repr=False)

    @classmethod
    def from_series(cls, s, kappa, dkappa, ddkappa, tau=None, dtau=None, ddtau=None):
        """Wrap prescribed series (not necessarily a solution) for the checkers."""
        s = np.asarray(s, dtype=float)
        zero = np.zeros_like(s)
        return cls("prescribed", s, *(np.asarray(x, dtype=float) for x in (
            kappa, dkappa, ddkappa,
            zero if tau is None else tau,
            zero if dtau is None else dtau,
            zero if ddtau is None else ddtau)))

    @property
    def completed(self):
        return self.termination == "completed"

    @property
    def step(self):
        return self.s[1] - self.s[0]

    def profile(self):
        if self.s.shape[0] < 3:
            raise DomainError("solution has fewer than 3 nodes")
        return CurvatureTorsionProfile(self.s[-1] - self.s[0], self.kappa, self.tau)

    def curve(self, init=None, x0=None):
        return integrate_frame(self.profile(), init, x0)


def integrate_model(model, constants, y0, grid, tol=1e-12, kappa_floor=None,
                    max_steps=10_000_000):
    """Low-level integration of one of the model ODEs through ``grid``.

    ``grid`` may be decreasing (backward integration). Returns
    ``(states, termination, s_stop, steps)``.
    """
    code = MODELS[model]
    grid = np.ascontiguousarray(grid, dtype=float)
    use_floor = kappa_floor is not None
    states, done, status, s_stop, steps = _ode.integrate(
        code, np.asarray(constants, dtype=float), np.asarray(y0, dtype=float), grid,
        tol, tol, kappa_floor if use_floor else 0.0, use_floor, max_steps)
    return states[:done], _ode.STATUS_NAMES[status], float(s_stop), int(steps)


def _grid(length, n):
    return length * np.arange(n + 1) / n


def _finish(model, params, grid, states, termination, s_stop, steps, constants):
    m = states.shape[0]
    s = grid[:m]
    F = _ode.rhs_batch(MODELS[model], np.asarray(constants, dtype=float), states)
    k, k1, k2 = states[:, 0], states[:, 1], F[:, 1]
    u = du = None
    if model == "planar":
        tau = dtau = ddtau = np.zeros(m)
    elif model == "space":
        c2 = constants[1]
        tau = c2 / k**2
        dtau = -2 * c2 * k1 / k**3
        ddtau = -2 * c2 * (k2 * k - 3 * k1**2) / k**4
    else:
        tau, u, du = states[:, 2], states[:, 3], states[:, 4]
        dtau = F[:, 2]
        ddtau = k1 * u + k * du
    return ODESolution(model, s, k, k1, k2, tau, dtau, ddtau, u, du, termination,
                       None if termination == "completed" else s_stop, params, steps,
                       tuple(constants))


def solve_planar_elastica(params, options=None):
    """Solve ``2k'' + k^3 - c1 k = 0`` from ``(kappa0, kappa1)`` over ``[0, L]``.

    The normalized form is regular where ``k`` vanishes, so no curvature
    floor applies.
    """
    options = options or SolveOptions()
    if params.c2 != 0:
        raise DomainError("planar elastica needs c2 == 0")
    grid = _grid(params.length, options.n)
    constants = (params.c1, 0.0)
    states, term, s_stop, steps = integrate_model(
        "planar", constants, (params.kappa0, params.kappa1), grid, options.tol,
        None, options.max_steps)
    return _finish("planar", params, grid, states, term, s_stop, steps, constants)


def solve_space_elastica(params, options=None):
    """Solve the space elastica with ``tau = c2 / k^2`` eliminated.

    Integration stops with ``termination == "curvature_vanished"`` once
    ``|k|`` drops below ``options.kappa_floor`` (only when ``c2 != 0``; with
    ``c2 == 0`` the problem is the planar one).
    """
    options = options or SolveOptions()
    grid = _grid(params.length, options.n)
    constants = (params.c1, params.c2)
    floor = options.kappa_floor if params.c2 != 0 else None
    states, term, s_stop, steps = integrate_model(
        "space", constants, (params.kappa0, params.kappa1), grid, options.tol,
        floor, options.max_steps)
    return _finish("space", params, grid, states, term, s_stop, steps, constants)


def solve_quadratic_model(params, options=None):
    """Solve the critical-point system of ``f = (k^2 + tau^2) / 2``.

    State ``(k, k', tau, u, u')`` with ``u = tau'/k``; initial values
    ``u(0) = tau1/kappa0`` and ``u'(0) = (tau2 kappa0 - tau1 kappa1)/kappa0^2``.
    Stops at the curvature floor.
    """
    options = options or SolveOptions()
    p = params
    grid = _grid(p.length, options.n)
    y0 = (p.kappa0, p.kappa1, p.tau0, p.tau1 / p.kappa0,
          (p.tau2 * p.kappa0 - p.tau1 * p.kappa1) / p.kappa0**2)
    states, term, s_stop, steps = integrate_model(
        "quadratic", (p.c,), y0, grid, options.tol, options.kappa_floor, options.max_steps)
    return _finish("quadratic", params, grid, states, term, s_stop, steps, (p.c,))


def solve(params, options=None, model=None):
    """Dispatch on the parameter type; ``model`` forces planar or space."""
    if isinstance(params, QuadraticModelParams):
        return solve_quadratic_model(params, options)
    if model is None:
        model = "planar" if params.c2 == 0 else "space"
    if model == "planar":
        return solve_planar_elastica(params, options)
    if model == "space":
        return solve_space_elastica(params, options)
    raise DomainError(f"model {model!r} does not match elastica parameters")


# --- certificates -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FirstIntegral:
    """Elastica first integrals along a solution.

    ``values`` is ``I = 2k''/k - 2 tau^2 + k^2`` with ``k''`` from the ODE
    right-hand side (NaN where ``|k|`` is below the floor on planar
    solutions). ``energy`` is ``H = k'^2 - c1 k^2/2 + k^4/4 + c2^2/k^2``,
    which involves no second derivative, so its drift measures integration
    error.
    """

    values: np.ndarray
    deviation: float
    energy: np.ndarray
    energy_drift: float


def _require_floor(sol, floor):
    if np.min(np.abs(sol.kappa)) < floor:
        raise DomainError("curvature drops below the floor along the solution")


def elastica_first_integral(sol, kappa_floor=1e-8):
    """First integral ``I`` and its sup deviation from ``I(0)``."""
    if sol.model not in ("planar", "space"):
        raise DomainError("first integral applies to elastica solutions")
    c1, c2 = sol.constants
    k = sol.kappa
    if sol.model == "space" and c2 != 0:
        _require_floor(sol, kappa_floor)
    ok = np.abs(k) >= kappa_floor
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.where(ok, 2 * sol.ddkappa / k - 2 * sol.tau**2 + k**2, np.nan)
        energy = sol.dkappa**2 - 0.5 * c1 * k**2 + 0.25 * k**4
        if c2 != 0:
            energy = energy + c2**2 / k**2
    ref = values[np.argmax(ok)]
    return FirstIntegral(values, float(np.nanmax(np.abs(values - ref))),
                         energy, float(np.max(np.abs(energy - energy[0]))))


def quadratic_conservation(sol, kappa_floor=1e-8):
    """Monitor ``Q = k''/k + (2 tau/k) u' + u^2 + (k^2 + tau^2)/2``.

    ``k''`` is recomputed by finite differences of the ``k'`` series, so the
    monitor is independent of the right-hand side. Returns ``(Q, sup|Q - c|)``.
    """
    if sol.model != "quadratic":
        raise DomainError("conservation monitor applies to quadratic-model solutions")
    _require_floor(sol, kappa_floor)
    k, tau, u, du = sol.kappa, sol.tau, sol.u, sol.du
    kpp = derivative(sol.dkappa, sol.step)
    Q = kpp / k + 2 * tau * du / k + u**2 + 0.5 * (k**2 + tau**2)
    return Q, float(np.max(np.abs(Q - sol.constants[0])))


def _jets(density, sol):
    """``f_a, f_b`` and their first two arclength derivatives along ``sol``."""
    s, a, b = sol.s, sol.kappa, sol.tau
    a1, a2, b1, b2 = sol.dkappa, sol.ddkappa, sol.dtau, sol.ddtau
    _, fa, fb = density.value(s, a, b)
    faa, fab, fbb = density.hessian(s, a, b)
    faaa, faab, fabb, fbbb = density.third(s, a, b)
    fa1 = faa * a1 + fab * b1
    fb1 = fab * a1 + fbb * b1
    fa2 = faa * a2 + fab * b2 + faaa * a1**2 + 2 * faab * a1 * b1 + fabb * b1**2
    fb2 = fab * a2 + fbb * b2 + faab * a1**2 + 2 * fabb * a1 * b1 + fbbb * b1**2
    return fa, fb, fa1, fb1, fa2, fb2


@dataclass(frozen=True, eq=False)
class MultiplierWitness:
    """Reconstructed multipliers; a critical point has constant ``lam``."""

    mu: np.ndarray
    dmu: np.ndarray
    lam: np.ndarray            # (N + 1, 3), world coordinates
    lam_frame: np.ndarray      # (N + 1, 3), components on (t, n, b)
    lam_mean: np.ndarray
    lam_defect: float          # sup |lam(s) - mean|
    mu_defect: float           # sup |mu' - finite-difference derivative of mu|


def multiplier_witness(density, sol, curve=None, kappa_floor=1e-8):
    """Reconstruct ``mu`` and ``lambda(s)`` from a solution and its curve.

    ``mu = f_b'/k``; ``lambda . n = -f_a' - mu tau``;
    ``lambda . b = k f_b - tau f_a + mu'``;
    ``lambda . t = f_a''/k - (tau^2/k) f_a + (2 tau/k) mu' + tau' mu / k + tau f_b``.
    Derivatives of ``f_a, f_b`` follow from the chain rule with the ODE
    supplied derivatives of ``k`` and ``tau``.
    """
    _require_floor(sol, kappa_floor)
    if curve is None:
        curve = sol.curve()
    if curve.frames.shape[0] != sol.s.shape[0]:
        raise DomainError("curve and solution grids differ")
    k, k1, tau, tau1 = sol.kappa, sol.dkappa, sol.tau, sol.dtau
    fa, fb, fa1, fb1, fa2, fb2 = _jets(density, sol)
    mu = fb1 / k
    dmu = (fb2 * k - fb1 * k1) / k**2
    lam_n = -fa1 - mu * tau
    lam_b = k * fb - tau * fa + dmu
    lam_t = fa2 / k - tau**2 / k * fa + 2 * tau / k * dmu + tau1 * mu / k + tau * fb
    lam_frame = np.column_stack([lam_t, lam_n, lam_b])
    lam = np.einsum("kij,kj->ki", curve.frames, lam_frame)
    mean = lam.mean(axis=0)
    return MultiplierWitness(
        mu, dmu, lam, lam_frame, mean,
        float(np.max(np.linalg.norm(lam - mean, axis=1))),
        float(np.max(np.abs(dmu - derivative(mu, sol.step)))))


@dataclass(frozen=True, eq=False)
class Reg1Residual:
    first: np.ndarray
    second: np.ndarray
    sup_first: float
    sup_second: float


def reg1_residual(density, sol, kappa_floor=1e-8):
    """Pointwise residuals of the multiplier-free Euler-Lagrange pair.

    first:  2(tau f_a)' - tau' f_a - (f_b'/k)'' + (tau^2/k) f_b' - (k f_b)'
    second: -k f_a' - tau f_b' - P'  with
            P = f_a''/k - (tau^2/k) f_a + (2 tau/k)(f_b'/k)' + tau' f_b'/k^2 + tau f_b

    Inner derivatives come from the ODE jets; the outer derivatives are
    fourth-order finite differences on the grid.
    """
    _require_floor(sol, kappa_floor)
    h = sol.step
    k, k1, tau, tau1 = sol.kappa, sol.dkappa, sol.tau, sol.dtau
    fa, fb, fa1, fb1, fa2, fb2 = _jets(density, sol)
    mu = fb1 / k
    dmu = (fb2 * k - fb1 * k1) / k**2
    first = (2 * derivative(tau * fa, h) - tau1 * fa - derivative(dmu, h)
             + tau**2 / k * fb1 - derivative(k * fb, h))
    P = fa2 / k - tau**2 / k * fa + 2 * tau / k * dmu + tau1 * mu / k + tau * fb
    second = -k * fa1 - tau * fb1 - derivative(P, h)
    return Reg1Residual(first, second, float(np.max(np.abs(first))),
                        float(np.max(np.abs(second))))
