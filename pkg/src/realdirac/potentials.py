"""Charge densities and the time component of electromagnetic potentials.

Everything is spherically symmetric and lives on a :class:`RadialGrid`.
Gaussian natural units: ``e**2 = alpha``, so the electron sees the nucleus
through ``e A0 = -Z alpha / r``.  Radial integrals are cumulative
trapezoids in ``ln r``; the piece below the first grid point is closed
with a local power law.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .exceptions import GridMismatch

__all__ = [
    "RadialDensity",
    "FourPotential",
    "coulomb_external",
    "charge_density",
    "point_spinor_density",
    "real_domain_density",
    "radial_poisson",
    "helmholtz_potential",
    "ret_adv_difference",
    "laplacian_residual",
]

KINDS = ("static", "retarded", "advanced")


def _same_grid(a, b):
    return a is b or (a.r.shape == b.r.shape and np.array_equal(a.r, b.r))


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class RadialDensity:
    """Charge density on a grid, optionally carrying a harmonic modulation ``omega``."""

    grid: object
    rho: np.ndarray
    omega: float = 0.0

    def __post_init__(self):
        rho = _frozen(self.rho)
        if rho.shape != self.grid.r.shape:
            raise GridMismatch("density does not match its grid")
        if not np.all(np.isfinite(rho)):
            raise ValueError("density must be finite")
        object.__setattr__(self, "rho", rho)

    @property
    def total_charge(self):
        return float(_enclosed(self.grid, self.rho)[-1])


@dataclass(frozen=True)
class FourPotential:
    """Time component ``A0(r)``; spatial components are identically zero here."""

    grid: object
    a0: np.ndarray
    omega: float = 0.0
    kind: str = "static"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "static" and self.omega != 0:
            raise ValueError("a static potential has omega = 0")
        dtype = float if self.kind == "static" else complex
        a0 = _frozen(self.a0, dtype)
        if a0.shape != self.grid.r.shape:
            raise GridMismatch("potential does not match its grid")
        object.__setattr__(self, "a0", a0)

    def _check(self, other):
        if not _same_grid(self.grid, other.grid):
            raise GridMismatch("potentials live on different grids")
        if (self.kind, self.omega) != (other.kind, other.omega):
            raise ValueError("cannot combine potentials of different kind or frequency")

    def __add__(self, other):
        self._check(other)
        return FourPotential(self.grid, self.a0 + other.a0, self.omega, self.kind)

    def __sub__(self, other):
        self._check(other)
        return FourPotential(self.grid, self.a0 - other.a0, self.omega, self.kind)

    def scaled(self, factor):
        return FourPotential(self.grid, factor * self.a0, self.omega, self.kind)

    @property
    def components(self):
        """``(N, 4)`` contravariant components ``(A0, 0, 0, 0)``."""
        out = np.zeros(self.a0.shape + (4,), dtype=self.a0.dtype)
        out[:, 0] = self.a0
        return out


def _origin_cap(r, y, power):
    """``int_0^r0 y(r) r^power dr`` with ``y`` extrapolated as a power law."""
    if y[0] == 0:
        return 0.0
    p = 0.0
    if y[1] != 0 and np.sign(y[1]) == np.sign(y[0]):
        p = math.log(y[1] / y[0]) / math.log(r[1] / r[0])
    expo = p + power + 1
    if expo <= 0:
        return 0.0
    return y[0] * r[0] ** (power + 1) / expo


def _enclosed(grid, rho):
    """``4 pi int_0^r rho r'^2 dr'`` at every grid point."""
    r, t = grid.r, grid.t
    rho = np.asarray(rho, dtype=float)
    cap = 4 * np.pi * _origin_cap(r, rho, 2)
    return cap + cumulative_trapezoid(4 * np.pi * rho * r ** 3, t, initial=0.0)


def _exterior(grid, integrand):
    """``int_r^rmax integrand dr'`` at every grid point."""
    body = cumulative_trapezoid(integrand * grid.r, grid.t, initial=0.0)
    return body[-1] - body


def coulomb_external(params, grid):
    """Potential of a point nucleus of charge ``Z |e|``: ``A0 = Z sqrt(alpha) / r``."""
    return FourPotential(grid, params.Z * math.sqrt(params.alpha) / grid.r)


def charge_density(sol):
    """``rho = e (g^2 + f^2) / 4 pi``, the angular average of ``e |psi|^2``."""
    e = sol.params.charge
    return RadialDensity(sol.grid, e * (sol.g ** 2 + sol.f ** 2) / (4 * np.pi))


def point_spinor_density(psi):
    """``|phi_a|^2`` for complex spinors of shape ``(..., 4)``."""
    psi = np.asarray(psi)
    return np.sum(np.abs(psi) ** 2, axis=-1)


def real_domain_density(phi, eta_set, kappa=1.0):
    """``kappa^2 Phibar eta0 Phi + Psibar eta0 Psi`` with ``Psi = kappa Phi``.

    The bar is ``Phi^T eta0``; ``Psi`` is taken at lowest order in the
    coupling.  Shape ``(..., 8)`` in, ``(...)`` out.
    """
    phi = np.asarray(phi, dtype=float)
    e0 = eta_set.eta[0]
    psi = kappa * phi
    form = e0 @ e0
    return kappa ** 2 * np.einsum("...i,ij,...j->...", phi, form, phi) + np.einsum(
        "...i,ij,...j->...", psi, form, psi)


def radial_poisson(rho):
    """Static potential of a spherical density.

    ``A0(r) = Q(<r) / r + 4 pi int_r^inf rho r' dr'``.
    """
    grid = rho.grid
    r = grid.r
    inner = _enclosed(grid, rho.rho)
    outer = _exterior(grid, 4 * np.pi * rho.rho * r)
    return FourPotential(grid, inner / r + outer)


def helmholtz_potential(rho, omega, kind="retarded"):
    """Time-harmonic potential with kernel ``exp(+-i omega |r - r'|) / |r - r'|``.

    Angular integration reduces the kernel to
    ``4 pi exp(+-i k r>) sin(k r<) / (k r r')``.  At ``omega == 0`` this is
    :func:`radial_poisson` itself, for either kind.
    """
    if omega < 0:
        raise ValueError("omega must be non-negative")
    if kind not in ("retarded", "advanced"):
        raise ValueError(f"kind must be 'retarded' or 'advanced', got {kind!r}")
    if omega == 0:
        return FourPotential(rho.grid, radial_poisson(rho).a0, 0.0, kind)
    grid = rho.grid
    r = grid.r
    k = float(omega)
    sgn = 1.0 if kind == "retarded" else -1.0
    sinc_r = np.sinc(k * r / np.pi)
    inner = _enclosed(grid, rho.rho * sinc_r)
    outer = 4 * np.pi * _exterior(grid, rho.rho * r * np.exp(1j * sgn * k * r))
    a0 = np.exp(1j * sgn * k * r) * inner / r + sinc_r * outer
    return FourPotential(grid, a0, k, kind)


def ret_adv_difference(rho, omega):
    """``sqrt(int |A_ret - A_adv|^2 dr)``; exactly zero for a static source."""
    if omega == 0:
        return 0.0
    diff = helmholtz_potential(rho, omega, "retarded").a0 - helmholtz_potential(rho, omega, "advanced").a0
    return math.sqrt(rho.grid.integrate(np.abs(diff) ** 2))


def _derivatives(y, t):
    """Three-point first and second derivatives at interior points of a mesh."""
    h0, h1 = t[1:-1] - t[:-2], t[2:] - t[1:-1]
    ym, y0, yp = y[:-2], y[1:-1], y[2:]
    d1 = (-h1 / (h0 * (h0 + h1))) * ym + ((h1 - h0) / (h0 * h1)) * y0 + (h0 / (h1 * (h0 + h1))) * yp
    d2 = 2 * (h1 * ym - (h0 + h1) * y0 + h0 * yp) / (h0 * h1 * (h0 + h1))
    return d1, d2


def laplacian_residual(pot, rho):
    """Relative L2 mismatch of ``lap A0 = -4 pi rho`` at interior grid points.

    The Laplacian is the second-order difference ``(A_tt + A_t) / r^2`` in
    ``t = ln r``.  The norm uses the volume weight ``r^2 dr``; it is scaled
    by ``|4 pi rho|``, or by the Laplacian's own terms where the density
    vanishes.
    """
    if pot.kind != "static":
        raise ValueError("laplacian_residual checks static potentials")
    if not _same_grid(pot.grid, rho.grid):
        raise GridMismatch("potential and density live on different grids")
    grid = pot.grid
    r, t = grid.r, grid.t
    a_t, a_tt = _derivatives(pot.a0, t)
    ri = r[1:-1]
    lap_t, lap_tt = a_t / ri ** 2, a_tt / ri ** 2
    src = 4 * np.pi * rho.rho[1:-1]
    w = ri ** 3 * np.gradient(t)[1:-1]

    def norm(v):
        return math.sqrt(float(np.sum(v ** 2 * w)))

    scale = norm(src)
    if scale == 0.0:
        scale = norm(lap_t) + norm(lap_tt)
    if scale == 0.0:
        return 0.0
    return norm(lap_t + lap_tt + src) / scale
