"""Dormand-Prince 5(4) integrator for the critical-point ODE systems.

The integrator lands exactly on every node of the requested output grid
(steps are adaptive between nodes), so node values are integrator values and
not interpolants. Cubic Hermite interpolation on accepted steps is used only
to localize the curvature-floor event.

Models (state vectors):
  PLANAR     (k, k')            2 k'' + k^3 - c1 k = 0
  SPACE      (k, k')            2 k'' - 2 c2^2 / k^3 + k^3 - c1 k = 0
  QUADRATIC  (k, k', tau, u, u')
      tau' = k u,  u'' = tau k' + tau^2 u,
      k'' = k (c - (k^2 + tau^2) / 2) - 2 tau u' - k u^2
"""

import numpy as np
from numba import njit

PLANAR = 0
SPACE = 1
QUADRATIC = 2

COMPLETED = 0
CURVATURE_VANISHED = 1
BLOW_UP = 2
STEP_UNDERFLOW = 3

STATUS_NAMES = {
    COMPLETED: "completed",
    CURVATURE_VANISHED: "curvature_vanished",
    BLOW_UP: "blow_up",
    STEP_UNDERFLOW: "step_underflow",
}

# Dormand-Prince tableau
C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

EVENT_TOL = 1e-12


@njit(cache=True, nogil=True)
def rhs(model, p, y, out):
    k = y[0]
    kp = y[1]
    out[0] = kp
    if model == PLANAR:
        out[1] = 0.5 * (p[0] * k - k * k * k)
    elif model == SPACE:
        out[1] = 0.5 * (p[0] * k - k * k * k + 2.0 * p[1] * p[1] / (k * k * k))
    else:
        c = p[0]
        tau = y[2]
        u = y[3]
        up = y[4]
        out[1] = k * (c - 0.5 * (k * k + tau * tau)) - 2.0 * tau * up - k * u * u
        out[2] = k * u
        out[3] = up
        out[4] = tau * kp + tau * tau * u


@njit(cache=True, nogil=True)
def _rms(v, scale):
    acc = 0.0
    for i in range(v.size):
        q = v[i] / scale[i]
        acc += q * q
    return np.sqrt(acc / v.size)


@njit(cache=True, nogil=True)
def _hermite(y0, m0, y1, m1, H, theta):
    t2 = theta * theta
    t3 = t2 * theta
    return ((2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + theta) * H * m0
            + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * H * m1)


@njit(cache=True, nogil=True)
def _locate_floor(k0, m0, k1, m1, H, floor):
    """Fraction of the step where |k| first reaches ``floor``."""
    lo = 0.0
    hi = 1.0
    if k0 * k1 < 0.0:
        # bracket the zero crossing first; |k| = floor lies before it
        a = 0.0
        b = 1.0
        while (b - a) * abs(H) > EVENT_TOL:
            mid = 0.5 * (a + b)
            if _hermite(k0, m0, k1, m1, H, mid) * k0 > 0.0:
                a = mid
            else:
                b = mid
        hi = b
    if abs(k0) <= floor:
        return 0.0
    while (hi - lo) * abs(H) > EVENT_TOL:
        mid = 0.5 * (lo + hi)
        if abs(_hermite(k0, m0, k1, m1, H, mid)) > floor:
            lo = mid
        else:
            hi = mid
    return hi


@njit(cache=True, nogil=True)
def integrate(model, p, y0, grid, rtol, atol, floor, use_floor, max_steps):
    """Integrate from ``grid[0]`` through every node of ``grid``.

    Returns ``(states, n_done, status, s_stop, n_steps)`` where
    ``states[:n_done]`` holds the state at the first ``n_done`` nodes.
    """
    n = grid.size
    dim = y0.size
    out = np.empty((n, dim))
    out[0, :] = y0
    s_stop = grid[n - 1]
    if use_floor and abs(y0[0]) < floor:
        return out, 1, CURVATURE_VANISHED, grid[0], 0
    if n == 1:
        return out, 1, COMPLETED, grid[0], 0

    direction = 1.0 if grid[n - 1] >= grid[0] else -1.0
    y = y0.copy()
    f = np.empty(dim)
    rhs(model, p, y, f)
    k2 = np.empty(dim)
    k3 = np.empty(dim)
    k4 = np.empty(dim)
    k5 = np.empty(dim)
    k6 = np.empty(dim)
    k7 = np.empty(dim)
    tmp = np.empty(dim)
    ynew = np.empty(dim)
    err = np.empty(dim)
    scale = np.empty(dim)

    # starting step (Hairer, Norsett & Wanner heuristic)
    for i in range(dim):
        scale[i] = atol + rtol * abs(y[i])
    d0 = _rms(y, scale)
    d1 = _rms(f, scale)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    span = abs(grid[n - 1] - grid[0])
    h0 = min(h0, span)
    for i in range(dim):
        tmp[i] = y[i] + direction * h0 * f[i]
    rhs(model, p, tmp, k2)
    for i in range(dim):
        err[i] = (k2[i] - f[i]) / h0
    d2 = _rms(err, scale)
    dm = max(d1, d2)
    h1 = max(1e-6, h0 * 1e-3) if dm <= 1e-15 else (0.01 / dm) ** 0.2
    h = direction * min(100.0 * h0, h1, span)

    s = grid[0]
    steps = 0
    nonfinite = False
    for node in range(1, n):
        target = grid[node]
        while (target - s) * direction > 0.0:
            remaining = target - s
            last = abs(h) * 1.0000001 >= abs(remaining)
            ht = remaining if last else h

            for i in range(dim):
                tmp[i] = y[i] + ht * A21 * f[i]
            rhs(model, p, tmp, k2)
            for i in range(dim):
                tmp[i] = y[i] + ht * (A31 * f[i] + A32 * k2[i])
            rhs(model, p, tmp, k3)
            for i in range(dim):
                tmp[i] = y[i] + ht * (A41 * f[i] + A42 * k2[i] + A43 * k3[i])
            rhs(model, p, tmp, k4)
            for i in range(dim):
                tmp[i] = y[i] + ht * (A51 * f[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
            rhs(model, p, tmp, k5)
            for i in range(dim):
                tmp[i] = y[i] + ht * (A61 * f[i] + A62 * k2[i] + A63 * k3[i]
                                      + A64 * k4[i] + A65 * k5[i])
            rhs(model, p, tmp, k6)
            for i in range(dim):
                ynew[i] = y[i] + ht * (B1 * f[i] + B3 * k3[i] + B4 * k4[i]
                                       + B5 * k5[i] + B6 * k6[i])
            rhs(model, p, ynew, k7)
            finite = True
            for i in range(dim):
                err[i] = ht * (E1 * f[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                               + E6 * k6[i] + E7 * k7[i])
                scale[i] = atol + rtol * max(abs(y[i]), abs(ynew[i]))
                if not (np.isfinite(ynew[i]) and np.isfinite(k7[i])):
                    finite = False
            en = _rms(err, scale) if finite else np.inf
            steps += 1

            if en <= 1.0:
                s_new = target if last else s + ht
                if use_floor and (abs(ynew[0]) < floor or y[0] * ynew[0] < 0.0):
                    frac = _locate_floor(y[0], y[1], ynew[0], ynew[1], ht, floor)
                    return out, node, CURVATURE_VANISHED, s + frac * ht, steps
                for i in range(dim):
                    y[i] = ynew[i]
                    f[i] = k7[i]
                s = s_new
                fac = 5.0 if en == 0.0 else min(5.0, max(0.2, 0.9 * en ** -0.2))
                hp = ht * fac
                if not last or abs(hp) > abs(h):
                    h = hp
            else:
                if not finite:
                    nonfinite = True
                    h = ht * 0.2
                else:
                    h = ht * max(0.2, 0.9 * en ** -0.2)

            if abs(h) < 1e-14 * max(1.0, abs(s)):
                return out, node, BLOW_UP if nonfinite else STEP_UNDERFLOW, s, steps
            if steps >= max_steps:
                return out, node, STEP_UNDERFLOW, s, steps
        out[node, :] = y
    return out, n, COMPLETED, s_stop, steps


def rhs_batch(model, p, Y):
    """Vectorized right-hand side over rows of ``Y`` (numpy, no JIT)."""
    Y = np.asarray(Y, dtype=float)
    F = np.empty_like(Y)
    k, kp = Y[:, 0], Y[:, 1]
    F[:, 0] = kp
    if model == PLANAR:
        F[:, 1] = 0.5 * (p[0] * k - k**3)
    elif model == SPACE:
        F[:, 1] = 0.5 * (p[0] * k - k**3 + 2.0 * p[1] ** 2 / k**3)
    else:
        tau, u, up = Y[:, 2], Y[:, 3], Y[:, 4]
        F[:, 1] = k * (p[0] - 0.5 * (k * k + tau * tau)) - 2.0 * tau * up - k * u * u
        F[:, 2] = k * u
        F[:, 3] = up
        F[:, 4] = tau * kp + tau * tau * u
    return F
