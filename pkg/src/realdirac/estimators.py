"""scikit-learn style front ends for the solver and the self-potential.

``DiracCoulombSolver.fit`` solves one bound state; ``transform`` maps
sample points ``(r, theta, phi, x0)`` to real 8-component field values and
``predict`` returns the radial amplitudes ``(g, f)`` at given radii.
``SelfPotential`` fits to a solved state and transforms radii into the
potential its charge cloud produces.
"""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .algebra import build_s_map
from .potentials import charge_density, helmholtz_potential, radial_poisson
from .radial import (
    FINE_STRUCTURE,
    PhysParams,
    RadialGrid,
    StateLabel,
    build_phi_state,
    sommerfeld_energy,
    solve_radial,
)

__all__ = ["DiracCoulombSolver", "SelfPotential", "check_points"]


def check_points(X):
    """Validate an ``(n_samples, 4)`` array of ``(r, theta, phi, x0)`` rows."""
    X = check_array(X, dtype=float, ensure_2d=True)
    if X.shape[1] != 4:
        raise ValueError(f"expected 4 columns (r, theta, phi, x0), got {X.shape[1]}")
    if np.any(X[:, 0] <= 0):
        raise ValueError("radii must be positive")
    return X


class DiracCoulombSolver(TransformerMixin, BaseEstimator):
    """Bound state of the hydrogen-like Dirac equation.

    Parameters
    ----------
    alpha : float
    Z : int
    n, kappa : int
        Principal and Dirac angular quantum numbers.
    mj : float
    r_min, r_max : float or None
        Grid bounds in Compton units; ``None`` uses ``1e-4/(Z alpha)`` and
        ``40 n/(Z alpha)``.
    points : int
    tol : float

    Attributes
    ----------
    solution_ : RadialSolution
    energy_ : float
    reference_energy_ : float
        Closed-form energy for the same state.
    """

    def __init__(self, alpha=FINE_STRUCTURE, Z=1, n=1, kappa=-1, mj=0.5,
                 r_min=None, r_max=None, points=4000, tol=1e-8):
        self.alpha = alpha
        self.Z = Z
        self.n = n
        self.kappa = kappa
        self.mj = mj
        self.r_min = r_min
        self.r_max = r_max
        self.points = points
        self.tol = tol

    def _grid(self, params):
        za = params.za
        r_min = 1e-4 / za if self.r_min is None else self.r_min
        r_max = 40.0 * self.n / za if self.r_max is None else self.r_max
        return RadialGrid.logarithmic(r_min, r_max, self.points)

    def fit(self, X=None, y=None):
        params = PhysParams(alpha=self.alpha, Z=self.Z)
        label = StateLabel(self.n, self.kappa, self.mj)
        self.solution_ = solve_radial(label, params, self._grid(params), tol=self.tol)
        self.energy_ = self.solution_.energy
        self.reference_energy_ = sommerfeld_energy(label, params)
        self.s_map_ = build_s_map()
        return self

    def transform(self, X):
        """Real field values, shape ``(n_samples, 8)``."""
        check_is_fitted(self, "solution_")
        return build_phi_state(self.solution_, self.s_map_, check_points(X))

    def predict(self, r):
        """``(g, f)`` columns at the radii ``r``."""
        check_is_fitted(self, "solution_")
        r = check_array(np.reshape(r, (-1, 1)), dtype=float).ravel()
        g, f = self.solution_.interpolate(r)
        return np.column_stack([g, f])


class SelfPotential(TransformerMixin, BaseEstimator):
    """Potential of the electron's own charge cloud.

    ``fit`` takes a :class:`RadialSolution`; ``transform`` takes radii.
    With ``omega > 0`` the potential is the retarded or advanced
    time-harmonic one and comes back complex.
    """

    def __init__(self, omega=0.0, kind="retarded"):
        self.omega = omega
        self.kind = kind

    def fit(self, X, y=None):
        self.density_ = charge_density(X)
        if self.omega == 0:
            self.potential_ = radial_poisson(self.density_)
        else:
            self.potential_ = helmholtz_potential(self.density_, self.omega, self.kind)
        self.total_charge_ = self.density_.total_charge
        return self

    def transform(self, X):
        check_is_fitted(self, "potential_")
        r = check_array(np.reshape(X, (-1, 1)), dtype=float).ravel()
        grid = self.potential_.grid
        t = np.log(r)
        a0 = self.potential_.a0
        out = np.interp(t, grid.t, a0.real)
        if np.iscomplexobj(a0):
            out = out + 1j * np.interp(t, grid.t, a0.imag)
        # Gauss-law tail beyond the grid
        beyond = r > grid.r[-1]
        out = np.where(beyond, self.total_charge_ / r, out) if self.omega == 0 else out
        return out
