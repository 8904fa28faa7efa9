"""Coupling operators and the first-order source for stationary states.

A coupling built from a pure time-component potential is
``a(r) = (e / K) A0(r) eta^0`` with ``K = m c^2 = 1``, so all products of
couplings stay in the two-dimensional algebra spanned by ``I`` and
``eta^0``.  The functions here nevertheless form the 8x8 matrices and
check the algebra numerically.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import build_eta_set
from .exceptions import ExpansionDomain, GridMismatch, NotStationary
from .potentials import (
    RadialDensity,
    _same_grid,
    charge_density,
    coulomb_external,
    helmholtz_potential,
    radial_poisson,
    ret_adv_difference,
)

__all__ = [
    "CouplingOperator",
    "PerturbationReport",
    "coupling_from_potential",
    "quadratic_remainder",
    "quadratic_identity_residual",
    "anticommutator_residue",
    "symmetric_product",
    "radiation_coupling",
    "scalar_density",
    "first_order_source",
]

A_RAD_THRESHOLD = 1e-14
RET_ADV_THRESHOLD = 1e-12
SOURCE_THRESHOLD = 1e-10


@dataclass(frozen=True)
class CouplingOperator:
    """``value(r) = scalar(r) * eta^0`` over a grid (``grid`` may be ``None``)."""

    scalar: np.ndarray
    eta: object
    grid: object = None

    def __post_init__(self):
        s = np.array(np.atleast_1d(self.scalar), dtype=float)
        s.setflags(write=False)
        object.__setattr__(self, "scalar", s)

    @classmethod
    def constant(cls, value, eta=None):
        return cls(np.array([value], dtype=float), build_eta_set() if eta is None else eta)

    @property
    def matrices(self):
        """All values as an array of shape ``(N, 8, 8)``."""
        return self.scalar[:, None, None] * self.eta.eta[0]

    def value(self, i):
        return self.scalar[i] * self.eta.eta[0]

    def norm(self):
        """``sqrt(int scalar^2 dr)`` on the grid, or the max for gridless operators."""
        if self.grid is None:
            return float(np.max(np.abs(self.scalar)))
        return math.sqrt(self.grid.integrate(self.scalar ** 2))


def coupling_from_potential(pot, eta_set, params):
    """``a = (e / K) A0 eta^0`` for a static potential."""
    if pot.kind != "static":
        raise ValueError("couplings are built from static potentials")
    return CouplingOperator(params.charge * pot.a0, eta_set, pot.grid)


def quadratic_remainder(a):
    """``(1 - a + a^2)(1 - a^2) - (1 - a)`` as matrices, shape ``(N, 8, 8)``."""
    m = a.matrices
    eye = np.eye(m.shape[-1])
    m2 = m @ m
    return (eye - m + m2) @ (eye - m2) - (eye - m)


def quadratic_identity_residual(a, r_range=None):
    """Largest remainder of the truncated identity on the ``eta^0 = +1`` subspace.

    The remainder is ``a^3 - a^4``; on the large-component subspace it acts
    as the scalar ``s^3 - s^4``.  ``r_range=(lo, hi)`` restricts the
    sampled radii of a gridded operator.

    Raises
    ------
    ExpansionDomain
        If ``|scalar| >= 1`` at a sampled point.
    """
    scalar = a.scalar
    keep = np.ones(scalar.shape, dtype=bool)
    if r_range is not None:
        if a.grid is None:
            raise ValueError("r_range needs a gridded operator")
        lo, hi = r_range
        keep = (a.grid.r >= lo) & (a.grid.r <= hi)
    if not np.any(keep):
        return 0.0
    worst = float(np.max(np.abs(scalar[keep])))
    if worst >= 1.0:
        raise ExpansionDomain(f"|a| reaches {worst:.3g} >= 1 in the sampled range")
    sub = CouplingOperator(scalar[keep], a.eta)
    p_plus = 0.5 * (np.eye(8) + a.eta.eta[0])
    return float(np.max(np.abs(quadratic_remainder(sub) @ p_plus)))


def anticommutator_residue(a, b):
    """Largest entry of ``ab + ba`` off its scalar part ``2 s_a s_b I``."""
    ma, mb = a.matrices, b.matrices
    anti = ma @ mb + mb @ ma
    s = 2.0 * a.scalar * b.scalar
    return float(np.max(np.abs(anti - s[:, None, None] * np.eye(8))))


def symmetric_product(a, b):
    """Scalar field ``s(r)`` with ``ab + ba = s(r) I``."""
    if a.grid is not None and b.grid is not None and not _same_grid(a.grid, b.grid):
        raise GridMismatch("couplings live on different grids")
    residue = anticommutator_residue(a, b)
    s = 2.0 * a.scalar * b.scalar
    if residue > 1e-14 * max(1.0, float(np.max(np.abs(s)))):
        raise ArithmeticError(f"ab + ba is not scalar (residue {residue:.3e})")
    return s


def radiation_coupling(total, self_pot, ext, eta_set, params):
    """``a_rad = (e / K)(A - A_self - A_ext)_beta eta^beta``."""
    for other in (self_pot, ext):
        if not _same_grid(total.grid, other.grid):
            raise GridMismatch("potentials live on different grids")
    residual = total.a0 - (self_pot.a0 + ext.a0)
    return CouplingOperator(params.charge * residual, eta_set, total.grid)


def scalar_density(sol, coupling=None, kappa=1.0):
    """Angular average of ``Psibar Psi`` with ``Psi = kappa (1 + a) Phi``.

    ``Psibar Psi`` splits over the ``eta^0 = +-1`` subspaces into
    ``g^2 - f^2`` plus the cross term ``2 s (g^2 + f^2)``; the ``s^2``
    term is dropped to stay at the order kept in the expansion.
    """
    g2, f2 = sol.g ** 2, sol.f ** 2
    out = g2 - f2
    if coupling is not None:
        out = out + 2.0 * coupling.scalar * (g2 + f2)
    return kappa ** 2 * out / (4 * np.pi)


@dataclass(frozen=True)
class PerturbationReport:
    a_rad_norm: float
    ret_adv_norm: float
    source_norm: float
    omega: float = 0.0
    thresholds: dict = field(default_factory=lambda: {
        "a_rad_norm": A_RAD_THRESHOLD,
        "ret_adv_norm": RET_ADV_THRESHOLD,
        "source_norm": SOURCE_THRESHOLD,
    })

    @property
    def phi1_zero(self):
        return all(getattr(self, k) <= v for k, v in self.thresholds.items())


def first_order_source(sol, params=None, eta_set=None, omega=0.0, strict=True, kappa=1.0):
    """Both bracket terms of the first-order equation for a stationary state.

    The radiation coupling is taken on the particular solution
    ``A = A_self + A_ext``.  The ret-adv integral is evaluated through
    :func:`helmholtz_potential` on the weighted density
    ``e A_ext Psibar Psi`` at frequency ``omega``.

    Parameters
    ----------
    omega : float
        Modulation frequency of the weighted density; zero for a
        stationary state.
    strict : bool
        Reject ``omega != 0`` with :class:`NotStationary`.  Pass ``False``
        to run the modulated case as a negative control.
    """
    if strict and omega != 0:
        raise NotStationary(f"density modulated at omega = {omega}")
    params = sol.params if params is None else params
    eta_set = build_eta_set() if eta_set is None else eta_set
    grid = sol.grid
    e = params.charge

    ext = coulomb_external(params, grid)
    a_ext = coupling_from_potential(ext, eta_set, params)
    self_pot = radial_poisson(charge_density(sol))
    a_rad = radiation_coupling(self_pot + ext, self_pot, ext, eta_set, params)

    weighted = RadialDensity(grid, e * ext.a0 * scalar_density(sol, a_ext, kappa), omega)
    ret = helmholtz_potential(weighted, omega, "retarded").a0
    adv = helmholtz_potential(weighted, omega, "advanced").a0
    bracket = 2.0 * e ** 2 * (ret - adv)

    # upper/lower components see eta^0 = +1 / -1
    s, rad = a_ext.scalar, a_rad.scalar
    g2, f2 = sol.g ** 2, sol.f ** 2
    psi_up, psi_dn = kappa ** 2 * (1 + s) ** 2 * g2, kappa ** 2 * (1 - s) ** 2 * f2
    src = (np.abs(-rad + bracket) ** 2 * psi_up + np.abs(-rad - bracket) ** 2 * psi_dn
           + kappa ** 4 * (np.abs(rad - bracket) ** 2 * g2 + np.abs(rad + bracket) ** 2 * f2))
    ref = psi_up + psi_dn + kappa ** 4 * (g2 + f2)
    r2 = grid.r ** 2
    denom = grid.integrate(ref * r2)
    source_norm = math.sqrt(grid.integrate(src * r2) / denom) if denom > 0 else 0.0

    return PerturbationReport(
        a_rad_norm=a_rad.norm(),
        ret_adv_norm=ret_adv_difference(weighted, omega),
        source_norm=source_norm,
        omega=float(omega),
    )
