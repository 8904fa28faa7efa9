"""Bound states of the Dirac equation in a point Coulomb field.

Units are natural (hbar = c = m = 1): lengths in Compton wavelengths,
energies in units of the rest energy.  The upper and lower radial
amplitudes ``g`` and ``f`` enter the stationary spinor as::

    psi = (g(r) Omega_{kappa,m}, i f(r) Omega_{-kappa,m}) exp(-i E x0)

Internally the solver works with ``G = r g`` and ``F = r f`` in the
variable ``t = ln r``, where the radial system is linear and traceless::

    dG/dt = -kappa G + (r (2 - W) + Z alpha) F
    dF/dt =  kappa F + (r W - Z alpha) G,        W = 1 - E.

Both shots are propagated with a fourth-order Magnus integrator on the
radial grid refined ``substeps`` times, so the grid sets the resolution.
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq
from scipy.special import sph_harm_y

from .algebra import s_encode
from .exceptions import (
    GridTooCoarse,
    InvalidState,
    NoConvergence,
    OutOfGrid,
    SupercriticalCoupling,
    ZeroStateWarning,
)

__all__ = [
    "PhysParams",
    "StateLabel",
    "RadialGrid",
    "RadialSolution",
    "sommerfeld_energy",
    "solve_radial",
    "spinor_harmonic",
    "stationary_spinor",
    "build_phi_state",
    "dirac_residual",
    "radial_overlap",
    "count_nodes",
    "real_field_pattern",
    "pattern_deviation",
]

FINE_STRUCTURE = 0.0072973525693
MIN_POINTS = 100
_SERIES_TERMS = 30


@dataclass(frozen=True)
class PhysParams:
    """Coupling constants.  ``e**2 = alpha``; the electron charge is ``-sqrt(alpha)``."""

    alpha: float = FINE_STRUCTURE
    Z: int = 1

    def __post_init__(self):
        if not (isinstance(self.Z, (int, np.integer)) and self.Z >= 1):
            raise ValueError(f"Z must be an integer >= 1, got {self.Z!r}")
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError(f"alpha must be finite and non-negative, got {self.alpha!r}")
        if self.za >= 1.0:
            raise SupercriticalCoupling(f"Z*alpha = {self.za:g} >= 1")

    @property
    def za(self):
        return self.Z * self.alpha

    @property
    def charge(self):
        """Electron charge ``e = -sqrt(alpha)``."""
        return -math.sqrt(self.alpha)


@dataclass(frozen=True)
class StateLabel:
    n: int
    kappa: int
    mj: float = 0.5

    def __post_init__(self):
        n, k = self.n, self.kappa
        if n < 1 or k == 0 or abs(k) > n or k == n:
            raise InvalidState(f"no bound state with n={n}, kappa={k}")
        twice = 2 * self.mj
        if abs(twice - round(twice)) > 1e-12 or round(twice) % 2 == 0:
            raise InvalidState(f"m_j must be half-integer, got {self.mj}")
        if abs(self.mj) > abs(k) - 0.5:
            raise InvalidState(f"|m_j| = {abs(self.mj)} exceeds j = {abs(k) - 0.5}")

    @property
    def l(self):
        """Orbital angular momentum of the upper component."""
        return self.kappa if self.kappa > 0 else -self.kappa - 1

    @property
    def j(self):
        return abs(self.kappa) - 0.5

    @property
    def radial_nodes(self):
        """Interior nodes of the lower amplitude ``f``."""
        return self.n - abs(self.kappa)

    @property
    def upper_nodes(self):
        """Interior nodes of ``g``; one fewer than ``f`` when ``kappa > 0``."""
        return self.radial_nodes - (1 if self.kappa > 0 else 0)

    def __str__(self):
        letters = "spdfghik"
        return f"{self.n}{letters[self.l]}{int(2 * self.j)}/2"


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing positive radii (Compton units), at least 100 points."""

    r: np.ndarray

    def __post_init__(self):
        r = np.array(self.r, dtype=float)
        if r.ndim != 1:
            raise ValueError("radial grid must be one-dimensional")
        if r.size < MIN_POINTS:
            raise GridTooCoarse(f"radial grid has {r.size} points, need >= {MIN_POINTS}")
        if not np.all(np.isfinite(r)) or r[0] <= 0 or np.any(np.diff(r) <= 0):
            raise ValueError("radial grid must be finite, positive and strictly increasing")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @classmethod
    def logarithmic(cls, r_min, r_max, points):
        return cls(np.geomspace(r_min, r_max, int(points)))

    @classmethod
    def default(cls, params, n=1, points=4000):
        """``[1e-4, 40 n] / (Z alpha)`` with logarithmic spacing."""
        za = params.za
        if za <= 0:
            raise ValueError("default grid needs Z*alpha > 0")
        return cls.logarithmic(1e-4 / za, 40.0 * max(n, 1) / za, points)

    def __len__(self):
        return self.r.size

    @property
    def t(self):
        return np.log(self.r)

    @property
    def log_step(self):
        """Uniform step in ``ln r``, or ``None`` when the grid is not log-uniform."""
        dt = np.diff(self.t)
        if np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
            return float(dt.mean())
        return None

    def integrate(self, values):
        """Trapezoid ``int values dr`` over the grid, taken in ``ln r``."""
        values = np.asarray(values, dtype=float)
        return float(np.trapezoid(values * self.r, self.t))


@dataclass(frozen=True)
class RadialSolution:
    """A normalized bound state: ``int (g^2 + f^2) r^2 dr = 1``."""

    label: StateLabel
    params: PhysParams
    energy: float
    grid: RadialGrid
    g: np.ndarray
    f: np.ndarray
    _interp: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        for name in ("g", "f"):
            a = np.array(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if self.g.shape != self.grid.r.shape or self.f.shape != self.grid.r.shape:
            raise ValueError("radial amplitudes must match the grid")

    @property
    def G(self):
        return self.grid.r * self.g

    @property
    def F(self):
        return self.grid.r * self.f

    @property
    def k0(self):
        """Angular frequency of the time factor ``exp(-i k0 x0)``."""
        return self.energy

    @property
    def norm(self):
        return normalization_integral(self.grid, self.G, self.F, self.gamma)

    @property
    def gamma(self):
        return math.sqrt(self.label.kappa ** 2 - self.params.za ** 2)

    def interpolate(self, r):
        """``(g(r), f(r))`` by monotone cubic interpolation in ``ln r``."""
        r = np.asarray(r, dtype=float)
        lo, hi = self.grid.r[0], self.grid.r[-1]
        if np.any(r < lo * (1 - 1e-12)) or np.any(r > hi * (1 + 1e-12)):
            raise OutOfGrid(f"radius outside grid [{lo:.6g}, {hi:.6g}]")
        if self._interp is None:
            interp = PchipInterpolator(self.grid.t, np.stack([self.g, self.f], axis=-1))
            object.__setattr__(self, "_interp", interp)
        out = self._interp(np.log(np.clip(r, lo, hi)))
        return out[..., 0], out[..., 1]


def normalization_integral(grid, G, F, gamma):
    """``int_0^rmax (G^2 + F^2) dr``; the part below ``r[0]`` assumes ``r^gamma``."""
    dens = G ** 2 + F ** 2
    cap = dens[0] * grid.r[0] / (2 * gamma + 1)
    return grid.integrate(dens) + cap


def sommerfeld_energy(label, params):
    """Closed-form Dirac-Coulomb energy in units of ``m c^2``."""
    za, k = params.za, label.kappa
    if za ** 2 >= k ** 2:
        raise SupercriticalCoupling(f"(Z alpha)^2 = {za ** 2:g} >= kappa^2 = {k ** 2}")
    denom = label.n - abs(k) + math.sqrt(k * k - za * za)
    return 1.0 / math.sqrt(1.0 + (za / denom) ** 2)


def count_nodes(values, rel_floor=1e-8):
    """Interior sign changes, ignoring samples below ``rel_floor * max|values|``."""
    v = np.asarray(values, dtype=float)
    big = np.abs(v) > rel_floor * np.max(np.abs(v))
    s = np.sign(v[big])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _mesh(grid, substeps):
    t = grid.t
    frac = np.arange(substeps) / substeps
    inner = (t[:-1, None] + np.diff(t)[:, None] * frac).ravel()
    return np.append(inner, t[-1])


def _generators(t, za, kappa, w):
    """Coefficient matrices ``A(t)`` of the radial system, shape ``(..., 2, 2)``."""
    r = np.exp(t)
    a = np.empty(t.shape + (2, 2))
    a[..., 0, 0] = -kappa
    a[..., 0, 1] = r * (2.0 - w) + za
    a[..., 1, 0] = r * w - za
    a[..., 1, 1] = kappa
    return a


def _expm_traceless(om):
    """Exact exponential of traceless 2x2 matrices."""
    mu2 = om[..., 0, 0] ** 2 + om[..., 0, 1] * om[..., 1, 0]
    x = np.sqrt(np.abs(mu2))
    pos = mu2 >= 0
    with np.errstate(over="ignore", invalid="ignore"):
        c = np.where(pos, np.cosh(x), np.cos(x))
        s = np.where(pos, np.sinh(x), np.sin(x))
        s_over = np.where(x > 1e-8, s / np.where(x > 0, x, 1.0), 1.0 + np.where(pos, 1, -1) * mu2 / 6.0)
    out = om * s_over[..., None, None]
    out[..., 0, 0] += c
    out[..., 1, 1] += c
    return out


_GAUSS = math.sqrt(3.0) / 6.0


def _propagators(tm, za, kappa, w):
    """Fourth-order Magnus steps mapping y(tm[j]) to y(tm[j+1])."""
    h = np.diff(tm)
    a1 = _generators(tm[:-1] + h * (0.5 - _GAUSS), za, kappa, w)
    a2 = _generators(tm[:-1] + h * (0.5 + _GAUSS), za, kappa, w)
    comm = a2 @ a1 - a1 @ a2
    om = (0.5 * h)[:, None, None] * (a1 + a2) + (math.sqrt(3.0) / 12.0 * h ** 2)[:, None, None] * comm
    return _expm_traceless(om)


def _inverse_2x2(m):
    """Inverse of unimodular 2x2 matrices (the adjugate)."""
    inv = np.empty_like(m)
    inv[..., 0, 0] = m[..., 1, 1]
    inv[..., 1, 1] = m[..., 0, 0]
    inv[..., 0, 1] = -m[..., 0, 1]
    inv[..., 1, 0] = -m[..., 1, 0]
    return inv


def _ordered_product(mats):
    """``mats[-1] @ ... @ mats[0]`` by pairwise reduction."""
    p = mats
    while p.shape[0] > 1:
        if p.shape[0] % 2:
            p = np.concatenate([p, np.eye(2)[None]], axis=0)
        p = p[1::2] @ p[0::2]
    return p[0] if p.shape[0] else np.eye(2)


def _prefix_products(mats):
    """Running products ``P[j] = mats[j] @ ... @ mats[0]`` (Hillis-Steele scan)."""
    p = mats.copy()
    shift = 1
    while shift < p.shape[0]:
        p[shift:] = p[shift:] @ p[:-shift]
        shift *= 2
    return p


def _origin_series(r0, za, kappa, w, gamma):
    """Regular solution ``(G, F)`` at ``r0`` from the power series about the origin."""
    a, b = 1.0, (gamma + kappa) / za if za > 0 else 0.0
    G, F = a, b
    x = 1.0
    for k in range(1, _SERIES_TERMS):
        s = gamma + k
        rhs_a, rhs_b = (2.0 - w) * b * r0, w * a * r0
        det = k * (2 * gamma + k)
        a_new = ((s - kappa) * rhs_a + za * rhs_b) / det
        b_new = ((s + kappa) * rhs_b - za * rhs_a) / det
        a, b = a_new, b_new
        G += a
        F += b
        x = max(abs(a), abs(b))
        if x < 1e-18 * max(abs(G), abs(F)):
            break
    return np.array([G, F])


class _Shooter:
    """Two-sided shooting for one (kappa, Z alpha) on a fixed mesh."""

    def __init__(self, grid, za, kappa, w_seed, substeps):
        self.grid = grid
        self.za = za
        self.kappa = kappa
        self.gamma = math.sqrt(kappa * kappa - za * za)
        self.substeps = substeps
        self.tm = _mesh(grid, substeps)
        r_turn = za / w_seed
        i = int(np.searchsorted(grid.r, r_turn))
        lo, hi = len(grid) // 10, (9 * len(grid)) // 10
        self.i_match = min(max(i, lo), hi)
        self.m_match = self.i_match * substeps
        # cap the inward start so exp(lambda * span) stays finite
        lam = math.sqrt(w_seed * (2.0 - w_seed))
        r_cap = grid.r[self.i_match] + 500.0 / lam
        self.i_end = int(min(len(grid) - 1, max(self.i_match + 1, np.searchsorted(grid.r, r_cap))))
        self.m_end = self.i_end * substeps

    def _start_in(self, w):
        lam = math.sqrt(w * (2.0 - w))
        return np.array([1.0, -lam / (2.0 - w)])

    def mismatch(self, w):
        steps = _propagators(self.tm[: self.m_end + 1], self.za, self.kappa, w)
        y_out = _ordered_product(steps[: self.m_match]) @ _origin_series(
            self.grid.r[0], self.za, self.kappa, w, self.gamma)
        back = _inverse_2x2(steps[self.m_match:][::-1])
        y_in = _ordered_product(back) @ self._start_in(w)
        cross = y_out[0] * y_in[1] - y_out[1] * y_in[0]
        return cross / (np.linalg.norm(y_out) * np.linalg.norm(y_in))

    def profile(self, w):
        """``(G, F)`` on the grid, continuous at the matching point."""
        steps = _propagators(self.tm[: self.m_end + 1], self.za, self.kappa, w)
        y0 = _origin_series(self.grid.r[0], self.za, self.kappa, w, self.gamma)
        out = _prefix_products(steps[: self.m_match]) @ y0
        out = np.vstack([y0, out])[:: self.substeps]
        back = _inverse_2x2(steps[self.m_match:][::-1])
        inn = _prefix_products(back) @ self._start_in(w)
        inn = np.vstack([self._start_in(w), inn])[:: self.substeps][::-1]
        scale = out[-1] @ inn[0] / (inn[0] @ inn[0])
        y = np.zeros((len(self.grid), 2))
        y[: self.i_match + 1] = out
        y[self.i_match: self.i_end + 1] = scale * inn
        return y[:, 0], y[:, 1]


def solve_radial(label, params, grid=None, tol=1e-8, substeps=4):
    """Solve for the bound state ``label`` by two-sided shooting.

    Parameters
    ----------
    label : StateLabel
    params : PhysParams
        Needs ``Z alpha > 0``.
    grid : RadialGrid, optional
        Defaults to :meth:`RadialGrid.default` for ``label.n``.
    tol : float
        Relative energy tolerance; the root finder is run well below it.
    substeps : int
        Integration steps per grid interval.

    Returns
    -------
    RadialSolution

    Raises
    ------
    NoConvergence
        No sign change of the matching function could be bracketed.
    GridTooCoarse
        The converged state has the wrong number of nodes.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    za = params.za
    if za <= 0:
        raise ValueError("the radial solver needs Z*alpha > 0")
    e_seed = sommerfeld_energy(label, params)
    if grid is None:
        grid = RadialGrid.default(params, label.n)
    w_seed = 1.0 - e_seed
    shooter = _Shooter(grid, za, label.kappa, w_seed, substeps)

    lo, hi = 0.95 * w_seed, min(1.05 * w_seed, 1.0 - 1e-15)
    f_lo, f_hi = shooter.mismatch(lo), shooter.mismatch(hi)
    widen = 0
    while f_lo * f_hi > 0:
        widen += 1
        if widen > 6:
            raise NoConvergence(f"{label}: no eigenvalue bracketed near E = {e_seed:.12g}")
        span = 0.05 * w_seed * 1.5 ** widen
        lo, hi = max(w_seed - span, 1e-300), min(w_seed + span, 1.0 - 1e-15)
        f_lo, f_hi = shooter.mismatch(lo), shooter.mismatch(hi)
    w = brentq(shooter.mismatch, lo, hi, xtol=1e-18, rtol=4 * np.finfo(float).eps, maxiter=200)
    energy = 1.0 - w

    G, F = shooter.profile(w)
    norm = normalization_integral(grid, G, F, shooter.gamma)
    if not np.isfinite(norm) or norm <= 0:
        raise NoConvergence(f"{label}: degenerate radial profile")
    G, F = G / math.sqrt(norm), F / math.sqrt(norm)
    g, f = G / grid.r, F / grid.r

    nodes = (count_nodes(g), count_nodes(f))
    if nodes != (label.upper_nodes, label.radial_nodes):
        raise GridTooCoarse(
            f"{label}: (g, f) have {nodes} nodes, expected "
            f"{(label.upper_nodes, label.radial_nodes)}; refine the grid")
    amp = np.max(np.abs(g))
    if abs(g[-1]) > 1e-8 * amp:
        warnings.warn(f"{label}: |g(r_max)| = {abs(g[-1]) / amp:.2e} of its maximum; "
                      "extend r_max", RuntimeWarning, stacklevel=2)
    return RadialSolution(label=label, params=params, energy=energy, grid=grid, g=g, f=f)


def radial_overlap(a, b):
    """``int (g_a g_b + f_a f_b) r^2 dr`` for two solutions on the same grid."""
    if a.grid.r.shape != b.grid.r.shape or not np.array_equal(a.grid.r, b.grid.r):
        raise ValueError("overlap needs a common grid")
    return a.grid.integrate((a.g * b.g + a.f * b.f) * a.grid.r ** 2)


def spinor_harmonic(kappa, mj, theta, phi):
    """Two-component spherical spinor ``Omega_{kappa, m}`` (Condon-Shortley phases)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    l = kappa if kappa > 0 else -kappa - 1
    m_lo, m_hi = int(round(mj - 0.5)), int(round(mj + 0.5))
    norm = 2 * l + 1

    def ylm(m):
        if abs(m) > l:
            return np.zeros(np.broadcast(theta, phi).shape, dtype=complex)
        return sph_harm_y(l, m, theta, phi)

    if kappa < 0:
        c_up = math.sqrt((l + mj + 0.5) / norm)
        c_dn = math.sqrt((l - mj + 0.5) / norm)
    else:
        c_up = -math.sqrt((l - mj + 0.5) / norm)
        c_dn = math.sqrt((l + mj + 0.5) / norm)
    return np.stack([c_up * ylm(m_lo), c_dn * ylm(m_hi)], axis=-1)


def _as_points(points):
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[-1] != 4:
        raise ValueError("evaluation points are rows (r, theta, phi, x0)")
    return pts, single


def stationary_spinor(sol, points):
    """Complex four-spinor of the stationary state at rows ``(r, theta, phi, x0)``."""
    pts, single = _as_points(points)
    r, theta, phi, x0 = pts.T
    g, f = sol.interpolate(r)
    kap, mj = sol.label.kappa, sol.label.mj
    upper = g[:, None] * spinor_harmonic(kap, mj, theta, phi)
    lower = 1j * f[:, None] * spinor_harmonic(-kap, mj, theta, phi)
    psi = np.concatenate([upper, lower], axis=-1) * np.exp(-1j * sol.k0 * x0)[:, None]
    return psi[0] if single else psi


def build_phi_state(sol, smap, points):
    """Real 8-component field of the stationary state at ``(r, theta, phi, x0)`` rows."""
    return s_encode(stationary_spinor(sol, points), smap)


def _d_dt(y, h):
    """Fourth-order central derivative on a uniform mesh (interior points only)."""
    return (y[:-4] - 8 * y[1:-3] + 8 * y[3:-1] - y[4:]) / (12 * h)


def dirac_residual(sol, params=None, energy=None):
    """Relative L2 residual of the radial Dirac equations on interior grid points.

    ``energy`` overrides the solution's eigenvalue (for perturbation tests).
    """
    params = sol.params if params is None else params
    E = sol.energy if energy is None else energy
    grid = sol.grid
    G, F = sol.G, sol.F
    r, za, k = grid.r, params.za, sol.label.kappa
    h = grid.log_step
    if h is not None:
        dG, dF, sl = _d_dt(G, h), _d_dt(F, h), slice(2, -2)
    else:
        dG, dF, sl = np.gradient(G, grid.t, edge_order=2), np.gradient(F, grid.t, edge_order=2), slice(None)
    rs = r[sl]
    res_g = dG - (-k * G[sl] + (rs * (E + 1.0) + za) * F[sl])
    res_f = dF - (k * F[sl] - (rs * (E - 1.0) + za) * G[sl])
    w = rs * np.gradient(grid.t)[sl]
    denom = float(np.sum((G[sl] ** 2 + F[sl] ** 2) * w))
    if denom == 0.0:
        warnings.warn("residual of an identically zero state", ZeroStateWarning, stacklevel=2)
        return 0.0
    return math.sqrt(float(np.sum((res_g ** 2 + res_f ** 2) * w)) / denom)


def real_field_pattern(g, f, theta, phi, phase):
    """Row layout of the real 2s1/2 (m_j = 1/2) field, without normalization.

    ``phase`` is ``k0 x0``.  Rows 3-4 vanish; rows 7-8 carry the
    azimuthal shift ``phase - phi``.
    """
    g, f, theta, phi, phase = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (g, f, theta, phi, phase)))
    c, s = np.cos(phase), np.sin(phase)
    zero = np.zeros_like(g)
    return np.stack([
        -g * c,
        -g * s,
        zero,
        zero,
        f * np.cos(theta) * c,
        f * np.cos(theta) * s,
        -f * np.sin(theta) * np.cos(phase - phi),
        f * np.sin(theta) * np.sin(phase - phi),
    ], axis=-1)


def pattern_deviation(sol, smap, points):
    """Fit ``Phi = c * pattern`` over ``points`` and report the misfit.

    Returns ``(c, deviation)`` where ``deviation`` is the largest entry of
    ``Phi - c * pattern`` relative to ``max |Phi|``.
    """
    pts, _ = _as_points(points)
    phi_vals = build_phi_state(sol, smap, pts)
    g, f = sol.interpolate(pts[:, 0])
    pat = real_field_pattern(g, f, pts[:, 1], pts[:, 2], sol.k0 * pts[:, 3])
    c = float(np.sum(phi_vals * pat) / np.sum(pat * pat))
    dev = float(np.max(np.abs(phi_vals - c * pat)) / np.max(np.abs(phi_vals)))
    return c, dev
