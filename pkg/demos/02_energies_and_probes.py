"""Energy densities and their growth hypotheses.

The catalog holds the Euler bending density kappa^2, the quadratic
(kappa^2 + tau^2)/2, the corrected Sadowsky density for narrow strips and
Langer-Singer type densities. The existence theory needs coercivity and
growth bounds; ``probe_density`` samples them on a grid and compares the
closed-form partials with finite differences.
"""

import numpy as np

from framedcurves import CurvatureTorsionProfile, EnergyDensity, evaluate_energy, probe_density

sad = EnergyDensity.sadowsky()
print("Sadowsky f(2, 1) =", sad.value(0, 2.0, 1.0)[0], " f(1, 1) =", sad.value(0, 1.0, 1.0)[0])

rep = probe_density(sad)
print("Sadowsky on [-5,5]^2, 101x101: coercivity violations %d, convexity violations %d, "
      "partials vs FD %.1e" % (rep.coercivity.count, rep.convexity.count,
                               rep.partial_fd_deviation))

# Euler ignores torsion, so no bound of the form f >= c |tau|^2 can hold
claimed = EnergyDensity.euler().with_constants(coercivity=(1.0, 1.0, 0.0))
rep = probe_density(claimed)
print("Euler with a claimed torsion bound: %d violations, worst at (a, b) = %s"
      % (rep.coercivity.count, rep.coercivity.worst))

for L in (np.pi, 2 * np.pi, 4 * np.pi):
    circ = CurvatureTorsionProfile.constant(2 * np.pi / L, 0.0, L, 1000)
    print("closed circle of length %.4f: Euler energy %.10f, 4 pi^2 / L = %.10f"
          % (L, evaluate_energy(EnergyDensity.euler(), circ), 4 * np.pi**2 / L))
