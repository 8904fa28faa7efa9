"""Real-domain Dirac field toolkit for hydrogen-like bound states.

Solves the Dirac-Coulomb radial problem, encodes stationary states as real
8-component fields, computes self-potentials and checks that the
first-order perturbation source vanishes for stationary states.
"""
from .algebra import (
    EtaSet,
    SMap,
    build_eta_set,
    build_s_map,
    clifford_residual,
    s_decode,
    s_encode,
)
from .estimators import DiracCoulombSolver, SelfPotential
from .exceptions import *  # noqa: F401,F403
from .perturbation import (
    CouplingOperator,
    PerturbationReport,
    coupling_from_potential,
    first_order_source,
    quadratic_identity_residual,
    radiation_coupling,
    symmetric_product,
)
from .potentials import (
    FourPotential,
    RadialDensity,
    charge_density,
    coulomb_external,
    helmholtz_potential,
    laplacian_residual,
    radial_poisson,
    ret_adv_difference,
)
from .radial import (
    PhysParams,
    RadialGrid,
    RadialSolution,
    StateLabel,
    build_phi_state,
    dirac_residual,
    sommerfeld_energy,
    solve_radial,
)

__version__ = "0.1.0"
