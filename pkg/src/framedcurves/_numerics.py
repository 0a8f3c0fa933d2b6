"""Small quadrature and finite-difference helpers shared across modules."""

import numpy as np


def simpson(y, h):
    """Composite Simpson rule on a uniform grid.

    With an odd number of intervals the last interval is closed with the
    trapezoid rule.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0] - 1
    if n < 1:
        return 0.0
    if n % 2 == 0:
        return h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())
    return simpson(y[:-1], h) + 0.5 * h * (y[-2] + y[-1])


def trapezoid(y, h):
    y = np.asarray(y, dtype=float)
    if y.shape[0] < 2:
        return 0.0
    return h * (0.5 * (y[0] + y[-1]) + y[1:-1].sum())


def derivative(y, h):
    """Fourth-order finite-difference derivative of samples on a uniform grid.

    Five-point central stencil in the interior, five-point one-sided stencils
    at the two nodes next to each end. Falls back to second order for fewer
    than five samples.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    if n < 5:
        return np.gradient(y, h, edge_order=2 if n >= 3 else 1, axis=0)
    d = np.empty_like(y)
    d[2:-2] = (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * h)
    d[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) / (12.0 * h)
    d[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) / (12.0 * h)
    d[-2] = (3.0 * y[-1] + 10.0 * y[-2] - 18.0 * y[-3] + 6.0 * y[-4] - y[-5]) / (12.0 * h)
    d[-1] = (25.0 * y[-1] - 48.0 * y[-2] + 36.0 * y[-3] - 16.0 * y[-4] + 3.0 * y[-5]) / (12.0 * h)
    return d
