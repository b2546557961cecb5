"""carnotlab: numerical laboratory for coercive inequalities on Carnot groups."""

__version__ = "0.1.0"

from .groups import AbelianGroup, CarnotGroup, Heisenberg1, StratifiedPoint, get_group
from .grid import GridFunction, grid_from_callable, horizontal_gradient, sub_laplacian
from .metric import (
    DistanceField,
    cc_distance,
    cc_distance_origin,
    eikonal_distance_field,
    koranyi_gauge,
    shooting_distance_field,
)
from .potentials import PotentialSpec, check_growth_conditions, make_potential
from .hopflax import HopfLaxOperator, hopf_lax_apply, semigroup_defect
from .measures import RadialMeasure, SampleCloud, build_measure, expectation, mcmc_sample
from .families import TestFunctionFamily
from .inequalities import (
    entropy,
    estimate_lsi_constant,
    dual_talagrand_check,
    hypercontractivity_trace,
    phi_trace,
    poincare_check,
    q_energy,
    ubound_check,
)
from .transport import primal_talagrand_check, wasserstein_p
