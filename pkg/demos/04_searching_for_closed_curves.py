"""Shooting for closed elasticae.

The ODE constants and initial curvature are unknowns; the score is the
closure defect d = |r(L)| + |t(L) - e1|. A seeded random search scans a
box, then Nelder-Mead refines the best candidates below 1e-6. Trial i
draws from its own generator seeded by (seed, i), so thread count never
changes the result.
"""

import os
import time

import numpy as np

from framedcurves import (RefineOptions, SearchSpace, SolveOptions, closure_objective,
                          random_search, refine)
from framedcurves.shooting import make_params
from framedcurves.tables import TABLE1

space = SearchSpace("planar", {"c1": (0.9, 1.1), "kappa0": (0.9, 1.1), "kappa1": (-0.01, 0.01)},
                    (2 * np.pi,), budget=2000, seed=0, options=SolveOptions(n=1024))
t0 = time.perf_counter()
records = random_search(space, threads=os.cpu_count())
print("%d trials in %.1f s; best d = %.2e at %s"
      % (len(records), time.perf_counter() - t0, records[0].d, records[0].params))

best = make_params("planar", records[0].params, records[0].length)
res = refine(best)
print("refined: d = %.2e after %d iterations, params c1=%.6f kappa0=%.6f kappa1=%.2e"
      % (res.d, res.iterations, res.params.c1, res.params.kappa0, res.params.kappa1))

for label, p in TABLE1:
    d0, _ = closure_objective(p)
    res = refine(p, RefineOptions())
    print("%s row: printed d = %.3e, refined d = %.2e" % (label, d0, res.d))
