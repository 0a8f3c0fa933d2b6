"""Framed curves reconstructed from curvature and torsion.

A frame is stored as a rotation matrix whose columns are ``(t, n, b)``. Along
an arclength-parametrized curve it obeys

    t' = k n,   n' = -k t + tau b,   b' = -tau n,

so it rotates with the Darboux vector ``tau t + k b``, which in body
coordinates is the constant-direction vector ``(tau, 0, k)``. Each arc step
with frozen ``(k, tau)`` is therefore a rigid motion with a closed form
(rotation by Rodrigues' formula, displacement along a helix segment). The
steps are composed as 4x4 homogeneous transforms with a parallel prefix scan.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from ._numerics import simpson
from .errors import DomainError

__all__ = [
    "Frame",
    "CurvatureTorsionProfile",
    "FramedCurve",
    "ClosureReport",
    "integrate_frame",
    "integrate_endpoints",
    "extract_curvature_torsion",
    "closure_defect",
    "planar_closure_integrals",
]

FRAME_TOL = 1e-12
PLANAR_TOL = 1e-12
INTERPOLATIONS = ("linear", "midpoint")


def _readonly(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.flags.writeable = False
    return a


def check_rotation(m, tol=FRAME_TOL):
    """Raise DomainError unless ``m`` is a rotation matrix within ``tol``."""
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 3) or not np.all(np.isfinite(m)):
        raise DomainError("frame must be a finite 3x3 matrix")
    gram = m.T @ m
    if np.max(np.abs(gram - np.eye(3))) > tol:
        raise DomainError("frame vectors are not orthonormal")
    if abs(np.linalg.det(m) - 1.0) > tol:
        raise DomainError("frame is not positively oriented")


@dataclass(frozen=True, eq=False)
class Frame:
    """Positively oriented orthonormal triple (tangent, normal, binormal)."""

    t: np.ndarray
    n: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        for name in ("t", "n", "b"):
            object.__setattr__(self, name, _readonly(np.reshape(getattr(self, name), 3)))
        check_rotation(self.matrix)

    @classmethod
    def identity(cls):
        e = np.eye(3)
        return cls(e[0], e[1], e[2])

    @classmethod
    def from_matrix(cls, m):
        m = np.asarray(m, dtype=float)
        return cls(m[:, 0], m[:, 1], m[:, 2])

    @property
    def matrix(self):
        return np.column_stack([self.t, self.n, self.b])


@dataclass(frozen=True, eq=False)
class CurvatureTorsionProfile:
    """Curvature and torsion sampled at ``N + 1`` uniform nodes on ``[0, L]``.

    ``interpolation="linear"`` treats the samples as a piecewise-linear
    function; each arc step then uses the average of its two end values
    (the midpoint value of the linear interpolant). ``"midpoint"`` uses the
    separately stored per-step samples ``kappa_mid``/``tau_mid`` instead,
    which :meth:`from_functions` fills with exact midpoint evaluations.
    """

    length: float
    kappa: np.ndarray
    tau: np.ndarray
    interpolation: str = "linear"
    kappa_mid: np.ndarray | None = None
    tau_mid: np.ndarray | None = None

    def __post_init__(self):
        length = float(self.length)
        if not np.isfinite(length) or length <= 0:
            raise DomainError(f"length must be positive and finite, got {self.length!r}")
        object.__setattr__(self, "length", length)
        kappa = _readonly(self.kappa)
        tau = _readonly(self.tau)
        if kappa.ndim != 1 or kappa.shape != tau.shape:
            raise DomainError("kappa and tau must be 1-d arrays of equal length")
        if kappa.shape[0] < 3:
            raise DomainError("a profile needs at least 3 nodes (N >= 2)")
        if not (np.all(np.isfinite(kappa)) and np.all(np.isfinite(tau))):
            raise DomainError("profile values must be finite")
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "tau", tau)
        if self.interpolation not in INTERPOLATIONS:
            raise DomainError(f"unknown interpolation {self.interpolation!r}")
        if self.interpolation == "midpoint":
            if self.kappa_mid is None or self.tau_mid is None:
                raise DomainError("midpoint interpolation needs kappa_mid and tau_mid")
            km, tm = _readonly(self.kappa_mid), _readonly(self.tau_mid)
            if km.shape != (self.n,) or tm.shape != (self.n,):
                raise DomainError("midpoint samples must have one value per step")
            if not (np.all(np.isfinite(km)) and np.all(np.isfinite(tm))):
                raise DomainError("profile values must be finite")
            object.__setattr__(self, "kappa_mid", km)
            object.__setattr__(self, "tau_mid", tm)

    @classmethod
    def constant(cls, kappa, tau=0.0, length=2 * np.pi, n=4096):
        return cls(length, np.full(n + 1, float(kappa)), np.full(n + 1, float(tau)))

    @classmethod
    def from_functions(cls, kappa_fn, tau_fn=None, length=2 * np.pi, n=4096,
                       interpolation="linear"):
        """Sample callables ``kappa_fn(s)`` and ``tau_fn(s)`` (default 0)."""
        if tau_fn is None:
            tau_fn = np.zeros_like
        s = length * np.arange(n + 1) / n
        mid = length * (np.arange(n) + 0.5) / n
        kwargs = {}
        if interpolation == "midpoint":
            kwargs = dict(kappa_mid=np.broadcast_to(kappa_fn(mid), mid.shape),
                          tau_mid=np.broadcast_to(tau_fn(mid), mid.shape))
        return cls(length, np.broadcast_to(kappa_fn(s), s.shape),
                   np.broadcast_to(tau_fn(s), s.shape), interpolation, **kwargs)

    @property
    def n(self):
        """Number of arc steps N."""
        return self.kappa.shape[0] - 1

    @property
    def step(self):
        return self.length / self.n

    @property
    def s(self):
        return self.length * np.arange(self.n + 1) / self.n

    def step_values(self):
        """Frozen ``(kappa, tau)`` used on each of the N arc steps."""
        if self.interpolation == "midpoint":
            return np.asarray(self.kappa_mid), np.asarray(self.tau_mid)
        return 0.5 * (self.kappa[:-1] + self.kappa[1:]), 0.5 * (self.tau[:-1] + self.tau[1:])

    def is_planar(self, atol=PLANAR_TOL):
        taus = [self.tau] if self.tau_mid is None else [self.tau, self.tau_mid]
        return all(np.max(np.abs(t)) <= atol for t in taus)


@dataclass(frozen=True, eq=False)
class FramedCurve:
    """Node positions and frames of a curve generated by a profile."""

    x0: np.ndarray
    positions: np.ndarray
    frames: np.ndarray
    profile: CurvatureTorsionProfile

    def __post_init__(self):
        for name in ("x0", "positions", "frames"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))

    @property
    def s(self):
        return self.profile.s

    @property
    def length(self):
        return self.profile.length

    @property
    def t(self):
        return self.frames[:, :, 0]

    @property
    def n(self):
        return self.frames[:, :, 1]

    @property
    def b(self):
        return self.frames[:, :, 2]

    def frame(self, i):
        return Frame.from_matrix(self.frames[i])


@dataclass(frozen=True)
class ClosureReport:
    defect: float
    position_gap: float
    tangent_gap: float
    planar_integrals: tuple[float, float] | None = None


def _theta_minus_sin_over_cube(theta):
    """(theta - sin theta) / theta**3, accurate down to theta = 0."""
    theta = np.asarray(theta, dtype=float)
    out = np.empty_like(theta)
    small = theta < 0.5
    t2 = theta[small] ** 2
    out[small] = (1 / 6 - t2 / 120 * (1 - t2 / 42 * (1 - t2 / 72 * (1 - t2 / 110 * (1 - t2 / 156)))))
    big = ~small
    tb = theta[big]
    out[big] = (tb - np.sin(tb)) / tb**3
    return out


def step_transforms(kappa, tau, h):
    """Homogeneous 4x4 transforms (body frame) of arc steps of length ``h``.

    ``kappa`` and ``tau`` may carry any leading batch shape; the result has
    shape ``kappa.shape + (4, 4)``.
    """
    kappa = np.asarray(kappa, dtype=float)
    tau = np.asarray(tau, dtype=float)
    w2 = kappa**2 + tau**2
    theta = h * np.sqrt(w2)
    a = h * np.sinc(theta / np.pi)                           # sin(theta)/w
    c = 0.5 * h * h * np.sinc(theta / (2 * np.pi)) ** 2      # (1 - cos theta)/w^2
    g = h**3 * _theta_minus_sin_over_cube(theta)             # (h - sin(theta)/w)/w^2

    G = np.zeros(kappa.shape + (4, 4))
    # Q = I + a W + c W^2 with W = hat(tau, 0, kappa)
    G[..., 0, 0] = 1.0 - c * kappa**2
    G[..., 0, 1] = -a * kappa
    G[..., 0, 2] = c * tau * kappa
    G[..., 1, 0] = a * kappa
    G[..., 1, 1] = 1.0 - c * w2
    G[..., 1, 2] = -a * tau
    G[..., 2, 0] = c * tau * kappa
    G[..., 2, 1] = a * tau
    G[..., 2, 2] = 1.0 - c * tau**2
    # displacement: integral of exp(sigma W) e1 over [0, h]
    G[..., 0, 3] = h - g * kappa**2
    G[..., 1, 3] = c * kappa
    G[..., 2, 3] = g * tau * kappa
    G[..., 3, 3] = 1.0
    return G


def _prefix_products(G):
    # Hillis-Steele inclusive scan along axis -3
    P = np.array(G)
    n = P.shape[-3]
    offset = 1
    while offset < n:
        P[..., offset:, :, :] = P[..., :-offset, :, :] @ P[..., offset:, :, :]
        offset *= 2
    return P


def _total_product(G):
    while G.shape[-3] > 1:
        n = G.shape[-3]
        m = n // 2
        prod = G[..., 0:2 * m:2, :, :] @ G[..., 1:2 * m:2, :, :]
        if n % 2:
            prod = np.concatenate([prod, G[..., -1:, :, :]], axis=-3)
        G = prod
    return G[..., 0, :, :]


def _init_matrix(init):
    if init is None:
        return np.eye(3)
    if isinstance(init, Frame):
        return init.matrix
    m = np.asarray(init, dtype=float)
    check_rotation(m)
    return m


def integrate_frame(profile, init=None, x0=None):
    """Reconstruct the framed curve generated by ``profile``.

    Every arc step advances the frame by the exact rotation about the
    Darboux vector and the position by the matching helix-segment
    displacement, using the step's frozen ``(kappa, tau)``. Orthonormality
    is preserved to rounding error and constant profiles are exact.

    Parameters
    ----------
    profile : CurvatureTorsionProfile
    init : Frame or (3, 3) array, optional
        Frame at ``s = 0``; identity by default.
    x0 : array_like, optional
        Base point; origin by default.
    """
    if not isinstance(profile, CurvatureTorsionProfile):
        raise DomainError("profile must be a CurvatureTorsionProfile")
    R0 = _init_matrix(init)
    x0 = np.zeros(3) if x0 is None else np.asarray(x0, dtype=float).reshape(3)
    if not np.all(np.isfinite(x0)):
        raise DomainError("base point must be finite")

    k, t = profile.step_values()
    P = _prefix_products(step_transforms(k, t, profile.step))
    frames = np.empty((profile.n + 1, 3, 3))
    positions = np.empty((profile.n + 1, 3))
    frames[0] = R0
    positions[0] = x0
    frames[1:] = R0 @ P[:, :3, :3]
    positions[1:] = x0 + P[:, :3, 3] @ R0.T
    return FramedCurve(x0, positions, frames, profile)


def integrate_endpoints(kappa_steps, tau_steps, h):
    """End frame and end point for batches of step values.

    Starts from the identity frame at the origin. ``kappa_steps`` has shape
    ``(..., N)``; returns ``(R_end, r_end)`` with shapes ``(..., 3, 3)`` and
    ``(..., 3)``.
    """
    G = _total_product(step_transforms(kappa_steps, tau_steps, h))
    return G[..., :3, :3], G[..., :3, 3]


def extract_curvature_torsion(curve):
    """Recover ``(kappa, tau)`` at the nodes of a framed curve.

    Uses centered differences taken on the rotation group: the relative
    rotation between nodes ``i - 1`` and ``i + 1`` is logged and divided by
    ``2h``, which is exact for constant profiles and second order otherwise.
    End nodes are extrapolated linearly from the two nearest step values.
    """
    R = np.asarray(curve.frames)
    n = R.shape[0] - 1
    if n < 2:
        raise DomainError("need at least 3 nodes")
    h = curve.length / n
    rel_mid = np.einsum("kji,kjl->kil", R[:-1], R[1:])
    w_mid = Rotation.from_matrix(rel_mid).as_rotvec() / h
    rel_c = np.einsum("kji,kjl->kil", R[:-2], R[2:])
    w = np.empty((n + 1, 3))
    w[1:-1] = Rotation.from_matrix(rel_c).as_rotvec() / (2 * h)
    w[0] = 1.5 * w_mid[0] - 0.5 * w_mid[1]
    w[-1] = 1.5 * w_mid[-1] - 0.5 * w_mid[-2]
    return CurvatureTorsionProfile(curve.length, w[:, 2], w[:, 0])


def planar_closure_integrals(profile):
    """Closure integrals ``(C, S)`` of a planar profile.

    ``C = int cos(theta)``, ``S = int sin(theta)`` with ``theta`` the turning
    angle accumulated exactly over the profile's arc steps; both vanish
    for a closed curve. Composite Simpson quadrature on the node grid.
    """
    if not profile.is_planar():
        raise DomainError("planar closure integrals need tau == 0")
    k, _ = profile.step_values()
    theta = np.concatenate([[0.0], np.cumsum(k * profile.step)])
    return simpson(np.cos(theta), profile.step), simpson(np.sin(theta), profile.step)


def closure_defect(curve, mode="spatial"):
    """Closure defect ``d = |r(L) - r(0)| + |t(L) - t(0)|``.

    With the base point at the origin and the initial tangent on the first
    axis this is the stop quantity ``|r(L)| + |t(L) - e1|``.
    """
    if mode not in ("planar", "spatial"):
        raise DomainError(f"unknown closure mode {mode!r}")
    planar = curve.profile.is_planar()
    if mode == "planar" and not planar:
        raise DomainError("planar closure requested for a profile with nonzero tau")
    pos = float(np.linalg.norm(curve.positions[-1] - curve.positions[0]))
    tan = float(np.linalg.norm(curve.frames[-1][:, 0] - curve.frames[0][:, 0]))
    integrals = planar_closure_integrals(curve.profile) if planar else None
    return ClosureReport(pos + tan, pos, tan, integrals)
