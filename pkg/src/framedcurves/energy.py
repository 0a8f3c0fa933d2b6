"""Energy densities f(s, a, b) of curvature ``a`` and torsion ``b``.

The catalog covers the Euler bending density, the isotropic quadratic
density, the corrected Sadowsky density for narrow developable strips and
the Langer-Singer rod density. Every catalog density comes with closed-form
first, second and third partial derivatives; the higher ones are used by the
critical-point checkers to differentiate ``f_a`` and ``f_b`` along solutions.
"""

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from ._numerics import simpson, trapezoid
from .errors import DomainError

__all__ = [
    "EnergyDensity",
    "DensityProbeReport",
    "density_from_name",
    "evaluate_density",
    "evaluate_energy",
    "probe_density",
]

KINDS = ("euler", "quadratic", "sadowsky", "langer_singer", "custom")


def _zeros(a, b):
    return np.zeros(np.broadcast(a, b).shape)


# --- Euler: f = a^2 -------------------------------------------------------

def _euler(a, b, order):
    z = _zeros(a, b)
    if order == 0:
        return a * a + z, 2 * a + z, z
    if order == 1:
        return 2 + z, z, z
    return z, z, z, z


# --- quadratic: f = (a^2 + b^2) / 2 ---------------------------------------

def _quadratic(a, b, order):
    z = _zeros(a, b)
    if order == 0:
        return 0.5 * (a * a + b * b) + z, a + z, b + z
    if order == 1:
        return 1 + z, z, 1 + z
    return z, z, z, z


# --- corrected Sadowsky ---------------------------------------------------
# outer branch |a| > |b|:  (a^2 + b^2)^2 / a^2 = a^2 + 2 b^2 + b^4 / a^2
# inner branch |a| <= |b|: 4 b^2

def _sadowsky_outer(a, b, order):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    # evaluated everywhere and masked afterwards, so silence the inner region
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        r = b / a
        if order == 0:
            return (a * a + 2 * b * b + b * b * r * r,
                    2 * a - 2 * b * r**3,
                    4 * b + 4 * b * r * r)
        if order == 1:
            return 2 + 6 * r**4, -8 * r**3, 4 + 12 * r * r
        return -24 * r**4 / a, 24 * r**3 / a, -24 * r * r / a, 24 * r / a


def _sadowsky_inner(a, b, order):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    z = _zeros(a, b)
    if order == 0:
        return 4 * b * b + z, z, 8 * b + z
    if order == 1:
        return z, z, 8 + z
    return z, z, z, z


def _sadowsky(a, b, order):
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    outer = np.abs(a) > np.abs(b)
    out_vals = _sadowsky_outer(a, b, order)
    in_vals = _sadowsky_inner(a, b, order)
    return tuple(np.where(outer, o, i) for o, i in zip(out_vals, in_vals))


def _sadowsky_smooth(a, b, radius):
    # second derivatives jump across the seam |a| = |b|
    return np.abs(np.abs(a) - np.abs(b)) > radius


# --- Langer-Singer: f = l1 + l2 b + l3 a^2 / 2 ----------------------------

def _langer_singer(params):
    l1, l2, l3 = params

    def fn(a, b, order):
        z = _zeros(a, b)
        if order == 0:
            return l1 + l2 * b + 0.5 * l3 * a * a + z, l3 * a + z, l2 + z
        if order == 1:
            return l3 + z, z, z
        return z, z, z, z
    return fn


@dataclass(frozen=True)
class EnergyDensity:
    """An energy density with its partials and declared growth constants.

    Parameters
    ----------
    kind : str
        One of ``euler``, ``quadratic``, ``sadowsky``, ``langer_singer``,
        ``custom``.
    params : tuple
        ``(l1, l2, l3)`` for ``langer_singer``; empty otherwise.
    p : float
        Growth exponent (> 1).
    coercivity : (c1, c2, c3) or None
        Declared lower bound ``f >= c1|a|^p + c2|b|^p + c3``; ``None`` when
        no such bound is claimed.
    growth : float or None
        Declared ``c`` in ``f <= c(1 + |a|^p + |b|^p)`` and
        ``|f_a|, |f_b| <= c(1 + |a|^(p-1) + |b|^(p-1))``.
    derivatives : callable, optional
        For ``custom`` densities: ``derivatives(s, a, b, order)`` returning
        ``(f, f_a, f_b)`` for order 0, ``(f_aa, f_ab, f_bb)`` for order 1 and
        ``(f_aaa, f_aab, f_abb, f_bbb)`` for order 2.
    """

    kind: str
    params: tuple = ()
    p: float = 2.0
    coercivity: tuple | None = None
    growth: float | None = None
    derivatives: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown density kind {self.kind!r}")
        if not self.p > 1:
            raise DomainError("growth exponent p must exceed 1")
        if self.kind == "langer_singer" and len(self.params) != 3:
            raise DomainError("langer_singer needs parameters (l1, l2, l3)")
        if self.kind == "custom" and self.derivatives is None:
            raise DomainError("custom densities need a derivatives callable")
        if self.coercivity is not None:
            c1, c2, _ = self.coercivity
            if c1 <= 0 or c2 <= 0:
                raise DomainError("declared coercivity constants c1, c2 must be positive")
        if self.growth is not None and self.growth < 0:
            raise DomainError("declared growth constant must be nonnegative")

    @classmethod
    def euler(cls):
        return cls("euler", growth=2.0)

    @classmethod
    def quadratic(cls):
        return cls("quadratic", coercivity=(0.5, 0.5, 0.0), growth=1.0)

    @classmethod
    def sadowsky(cls):
        return cls("sadowsky", coercivity=(1.0, 2.0, 0.0), growth=8.0)

    @classmethod
    def langer_singer(cls, l1, l2, l3):
        params = (float(l1), float(l2), float(l3))
        return cls("langer_singer", params, growth=sum(abs(x) for x in params))

    @classmethod
    def custom(cls, derivatives, p=2.0, coercivity=None, growth=None):
        return cls("custom", (), p, coercivity, growth, derivatives)

    def with_constants(self, **changes):
        """Copy with other declared constants (``p``, ``coercivity``, ``growth``)."""
        return replace(self, **changes)

    def _fn(self):
        if self.kind == "euler":
            return _euler
        if self.kind == "quadratic":
            return _quadratic
        if self.kind == "sadowsky":
            return _sadowsky
        if self.kind == "langer_singer":
            return _langer_singer(self.params)
        return None

    def _eval(self, s, a, b, order):
        fn = self._fn()
        if fn is None:
            out = self.derivatives(s, a, b, order)
        else:
            out = fn(np.asarray(a, dtype=float), np.asarray(b, dtype=float), order)
        return tuple(np.asarray(x, dtype=float) for x in out)

    def value(self, s, a, b):
        """``(f, f_a, f_b)``, vectorized over array arguments."""
        return self._eval(s, a, b, 0)

    def hessian(self, s, a, b):
        """``(f_aa, f_ab, f_bb)``."""
        return self._eval(s, a, b, 1)

    def third(self, s, a, b):
        """``(f_aaa, f_aab, f_abb, f_bbb)``."""
        return self._eval(s, a, b, 2)

    def smooth_mask(self, a, b, radius):
        """False where a finite-difference stencil of ``radius`` would cross a kink."""
        if self.kind == "sadowsky":
            return _sadowsky_smooth(np.asarray(a), np.asarray(b), radius)
        return np.ones(np.broadcast(a, b).shape, dtype=bool)


def density_from_name(name, params=()):
    """Catalog density by name, as used in configuration files."""
    params = tuple(params or ())
    if name == "langer_singer":
        return EnergyDensity.langer_singer(*params)
    if params:
        raise DomainError(f"density {name!r} takes no parameters")
    if name == "euler":
        return EnergyDensity.euler()
    if name == "quadratic":
        return EnergyDensity.quadratic()
    if name == "sadowsky":
        return EnergyDensity.sadowsky()
    raise DomainError(f"unknown density {name!r}")


def evaluate_density(density, s, a, b):
    """Value and partials ``(f, f_a, f_b)`` at finite ``(s, a, b)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b)) and np.all(np.isfinite(s))):
        raise DomainError("density arguments must be finite")
    f, fa, fb = density.value(s, a, b)
    if f.ndim == 0:
        return float(f), float(fa), float(fb)
    return f, fa, fb


def evaluate_energy(density, profile, rule="simpson"):
    """Energy ``int_0^L f(s, kappa, tau) ds`` of a profile.

    ``rule`` selects composite Simpson (default; trapezoid on a trailing odd
    interval) or the plain trapezoid rule.
    """
    f, _, _ = density.value(profile.s, profile.kappa, profile.tau)
    if rule == "simpson":
        return float(simpson(f, profile.step))
    if rule == "trapezoid":
        return float(trapezoid(f, profile.step))
    raise DomainError(f"unknown quadrature rule {rule!r}")


@dataclass(frozen=True)
class Violations:
    count: int = 0
    worst: tuple | None = None       # (a, b) of the largest violation
    worst_amount: float = 0.0
    checked: bool = True


@dataclass(frozen=True)
class DensityProbeReport:
    coercivity: Violations
    upper_growth: Violations
    partial_growth: Violations
    convexity: Violations
    partial_fd_deviation: float
    samples: int
    pairs: int

    @property
    def ok(self):
        return not any(v.count for v in
                       (self.coercivity, self.upper_growth, self.partial_growth, self.convexity))


def _violations(excess, a, b, checked=True):
    """Summarize ``excess > 0`` entries (amount by which a bound fails)."""
    bad = excess > 0
    count = int(np.count_nonzero(bad))
    if not count:
        return Violations(0, None, 0.0, checked)
    i = int(np.argmax(np.where(bad, excess, -np.inf)))
    return Violations(count, (float(a.flat[i]), float(b.flat[i])), float(excess.flat[i]), checked)


def probe_density(density, a_range=(-5.0, 5.0), b_range=(-5.0, 5.0), grid=(101, 101),
                  fd_step=1e-6, pairs=10_000, seed=0, s=0.0, slack=1e-12):
    """Sample the declared growth and convexity hypotheses of a density.

    Checks coercivity, upper growth and partial growth against the declared
    constants at every grid point, midpoint convexity on ``pairs`` random
    pairs from the box, and closed-form partials against central finite
    differences (relative step ``fd_step``, skipping stencils that cross a
    kink). Violations are counted, never raised. ``slack`` is a relative
    tolerance for rounding.
    """
    if grid[0] < 3 or grid[1] < 3:
        raise DomainError("probe grid needs at least 3 samples per axis")
    if not all(np.isfinite(v) for v in (*a_range, *b_range)):
        raise DomainError("probe box must be finite")
    a, b = np.meshgrid(np.linspace(*a_range, grid[0]), np.linspace(*b_range, grid[1]),
                       indexing="ij")
    f, fa, fb = density.value(s, a, b)
    p = density.p
    tol = slack * np.maximum(1.0, np.abs(f))

    if density.coercivity is not None:
        c1, c2, c3 = density.coercivity
        lower = c1 * np.abs(a) ** p + c2 * np.abs(b) ** p + c3
        coercivity = _violations(lower - f - tol, a, b)
    else:
        coercivity = Violations(checked=False)

    if density.growth is not None:
        c = density.growth
        upper = c * (1 + np.abs(a) ** p + np.abs(b) ** p)
        upper_growth = _violations(f - upper - tol, a, b)
        pbound = c * (1 + np.abs(a) ** (p - 1) + np.abs(b) ** (p - 1))
        ptol = slack * np.maximum(1.0, pbound)
        partial_growth = _violations(np.maximum(np.abs(fa), np.abs(fb)) - pbound - ptol, a, b)
    else:
        upper_growth = partial_growth = Violations(checked=False)

    rng = np.random.default_rng(seed)
    x = rng.uniform([a_range[0], b_range[0]], [a_range[1], b_range[1]], size=(pairs, 2))
    y = rng.uniform([a_range[0], b_range[0]], [a_range[1], b_range[1]], size=(pairs, 2))
    m = 0.5 * (x + y)
    fx = density.value(s, x[:, 0], x[:, 1])[0]
    fy = density.value(s, y[:, 0], y[:, 1])[0]
    fm = density.value(s, m[:, 0], m[:, 1])[0]
    avg = 0.5 * (fx + fy)
    convexity = _violations(fm - avg - slack * np.maximum(1.0, np.abs(avg)), m[:, 0], m[:, 1])

    ha = fd_step * np.maximum(1.0, np.abs(a))
    hb = fd_step * np.maximum(1.0, np.abs(b))
    fd_a = (density.value(s, a + ha, b)[0] - density.value(s, a - ha, b)[0]) / (2 * ha)
    fd_b = (density.value(s, a, b + hb)[0] - density.value(s, a, b - hb)[0]) / (2 * hb)
    smooth = density.smooth_mask(a, b, 2 * np.maximum(ha, hb))
    dev = np.maximum(np.abs(fd_a - fa) / np.maximum(1.0, np.abs(fa)),
                     np.abs(fd_b - fb) / np.maximum(1.0, np.abs(fb)))
    fd_dev = float(np.max(dev[smooth])) if np.any(smooth) else 0.0

    return DensityProbeReport(coercivity, upper_growth, partial_growth, convexity,
                              fd_dev, int(a.size), int(pairs))
