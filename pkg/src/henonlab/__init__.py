"""Numerical laboratory for three-dimensional quadratic (Henon-family) maps.

Core capabilities: exact map evaluation with analytic Jacobians and 2-jets,
Newton location of periodic orbits and of degenerate orbit/parameter pairs
with multipliers (-1, -1, +1), reduction of return maps to the resonant
quadratic normal form classifying discrete Lorenz attractors vs. repellers,
Lyapunov spectra and attractor sampling, and parameter-space searches.
"""

from .maps import (
    MapParams, InvParams, SMParams, BelyakovBlock, Jet2,
    henon3d_step, henon3d_inv_step, henon3d_inverse, limit_map_step, map_step,
    jacobian, jet2, compose_jet2, param_correspondence,
    inverse_conjugacy_defect, sm_field, sm_jacobian, sm_equilibria,
    belyakov_power,
)
from .orbits import (
    PeriodicOrbit, DegenerateSolution, ConvergenceError, SingularSystemError,
    find_periodic_orbit, monodromy, multipliers_of, solve_degenerate,
    hunt_degenerate,
)
from .normal_form import (
    NormalFormChart, NormalFormCoeffs, ChartError,
    iterate_jet2, build_chart, quadratic_reduce, classify, reduce_solution,
    LORENZ_ATTRACTOR, LORENZ_REPELLER, DEGENERATE,
)
from .dynamics import (
    LyapunovResult, AttractorSample, EscapeError, is_escaped,
    lyapunov_spectrum, sample_attractor, pseudo_hyperbolicity_indicator,
    sm_integrate, sm_lyapunov,
)
from .sweep import SweepSpec, CellClass, run_sweep, ball_probe

__version__ = "0.1.0"
