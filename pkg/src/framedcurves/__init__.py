"""Elastic energies on framed curves.

Reconstruct curves from curvature and torsion, evaluate bending energies,
solve the critical-point ODE systems of elasticae and of the quadratic
curvature-torsion model, search for closed solutions and minimize
discretized energies under a closure penalty.
"""

__version__ = "0.1.0"

from .critical import (ElasticaParams, FirstIntegral, MultiplierWitness, ODESolution,
                       QuadraticModelParams, Reg1Residual, SolveOptions,
                       elastica_first_integral, integrate_model, multiplier_witness,
                       quadratic_conservation, reg1_residual, solve, solve_planar_elastica,
                       solve_quadratic_model, solve_space_elastica)
from .energy import (DensityProbeReport, EnergyDensity, Violations, density_from_name,
                     evaluate_density, evaluate_energy, probe_density)
from .errors import DomainError
from .frames import (ClosureReport, CurvatureTorsionProfile, Frame, FramedCurve,
                     closure_defect, extract_curvature_torsion, integrate_endpoints,
                     integrate_frame, planar_closure_integrals)
from .io import export_curve, read_curve_csv, write_curve_csv, write_curve_svg
from .minimize import (DiscreteProblem, MinimizationResult, initial_profile,
                       minimize_energy, objective, objective_gradient)
from .shooting import (RefineOptions, RefineResult, SearchRecord, SearchSpace,
                       TableReport, TableRow, closure_objective, random_search, refine,
                       reproduce_table)
