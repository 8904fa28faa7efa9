"""Real 8-dimensional Dirac algebra and the map to complex spinors.

The real representation is the realification of the standard (Dirac)
representation: every complex amplitude becomes an ordered pair of reals
and multiplication by ``i`` becomes the matrix ``J``.  Each pair carries a
fixed signed permutation, chosen so that encoded stationary states come out
in the row layout used for the 2s1/2 real field (zero rows 3-4, cos/sin
quadratures, the ``k0 x0 - phi`` shift in rows 7-8).

Real spinors are arrays whose last axis has length 8, complex spinors have
last axis 4; leading axes broadcast.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import ConjugacyViolation, NonRealResult

__all__ = [
    "METRIC",
    "EtaSet",
    "SMap",
    "dirac_gammas",
    "realify",
    "build_eta_set",
    "build_s_map",
    "clifford_residual",
    "s_encode",
    "s_decode",
]

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

_SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
_JBLOCK = np.array([[0.0, -1.0], [1.0, 0.0]])

# (row pair of Phi) = block @ (Re c_k, Im c_k), one block per complex component
_PAIR_BLOCKS = (
    np.array([[-1.0, 0.0], [0.0, 1.0]]),
    np.array([[-1.0, 0.0], [0.0, 1.0]]),
    np.array([[0.0, -1.0], [-1.0, 0.0]]),
    np.array([[0.0, 1.0], [-1.0, 0.0]]),
)

NONREAL_TOL = 1e-10
CONJUGACY_TOL = 1e-10


def _frozen(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


def dirac_gammas():
    """Standard-representation gamma matrices, shape ``(4, 4, 4)``."""
    g = np.zeros((4, 4, 4), dtype=complex)
    g[0] = np.diag([1, 1, -1, -1])
    for i, s in enumerate(_SIGMA, start=1):
        g[i, :2, 2:] = s
        g[i, 2:, :2] = -s
    return g


def realify(m):
    """Real ``2n x 2n`` matrix acting on interleaved (Re, Im) pairs like ``m``."""
    m = np.asarray(m, dtype=complex)
    return np.kron(m.real, np.eye(2)) + np.kron(m.imag, _JBLOCK)


def _pair_matrix():
    q = np.zeros((8, 8))
    for k, blk in enumerate(_PAIR_BLOCKS):
        q[2 * k:2 * k + 2, 2 * k:2 * k + 2] = blk
    return q


@dataclass(frozen=True)
class EtaSet:
    """The four real matrices ``eta^alpha`` and the complex structure ``J``.

    Attributes
    ----------
    eta : ndarray, shape (4, 8, 8)
    J : ndarray, shape (8, 8)
    """

    eta: np.ndarray
    J: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eta", _frozen(np.asarray(self.eta, dtype=float)))
        object.__setattr__(self, "J", _frozen(np.asarray(self.J, dtype=float)))
        if self.eta.shape != (4, 8, 8) or self.J.shape != (8, 8):
            raise ValueError("EtaSet needs eta of shape (4, 8, 8) and J of shape (8, 8)")

    def __getitem__(self, alpha):
        return self.eta[alpha]

    def contract(self, lower_components):
        """Return ``A_beta eta^beta`` for covariant components of shape ``(..., 4)``."""
        a = np.asarray(lower_components, dtype=float)
        return np.einsum("...b,bij->...ij", a, self.eta)


@dataclass(frozen=True)
class SMap:
    """Linear map between real 8-spinors and complex pairs ``(phi_a, phi_b)``.

    ``matrix`` takes a real spinor to the interleaved real form of
    ``phi_a``; ``n_b`` fixes the second half through
    ``phi_b = n_b @ conj(phi_a)``.
    """

    matrix: np.ndarray
    n_b: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        n_b = np.asarray(self.n_b, dtype=complex)
        if m.shape != (8, 8) or n_b.shape != (4, 4):
            raise ValueError("SMap needs an (8, 8) real matrix and a (4, 4) n_b")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "n_b", _frozen(n_b))
        complexify = np.zeros((4, 8), dtype=complex)
        complexify[np.arange(4), 2 * np.arange(4)] = 1.0
        complexify[np.arange(4), 2 * np.arange(4) + 1] = 1j
        upper = complexify @ m
        s = np.vstack([upper, n_b @ upper.conj()])
        object.__setattr__(self, "_s", _frozen(s))
        object.__setattr__(self, "_s_inv", _frozen(np.linalg.inv(s)))

    @property
    def complex_matrix(self):
        """The complex ``8 x 8`` S matrix: ``S @ Phi = (phi_a, phi_b)``."""
        return self._s

    @property
    def inverse(self):
        return self._s_inv


def build_eta_set():
    """Deterministic real representation of the Dirac algebra."""
    q = _pair_matrix()
    gam = dirac_gammas()
    eta = np.stack([q @ realify(g) @ q.T for g in gam])
    J = q @ np.kron(np.eye(4), _JBLOCK) @ q.T
    return EtaSet(eta=eta, J=J)


def build_s_map():
    """S-map matching :func:`build_eta_set`, with ``N_b = i gamma^2``."""
    return SMap(matrix=_pair_matrix().T, n_b=1j * dirac_gammas()[2])


def clifford_residual(eta_set):
    """Max-entry deviation of ``{eta^a, eta^b}`` from ``2 g^{ab} I``.

    Accepts an :class:`EtaSet` or anything shaped ``(4, n, n)``.
    """
    eta = eta_set.eta if isinstance(eta_set, EtaSet) else np.asarray(eta_set, dtype=float)
    n = eta.shape[-1]
    worst = 0.0
    for a in range(4):
        for b in range(a, 4):
            anti = eta[a] @ eta[b] + eta[b] @ eta[a]
            worst = max(worst, float(np.max(np.abs(anti - 2.0 * METRIC[a, b] * np.eye(n)))))
    return worst


def s_encode(phi_a, smap):
    """Real 8-spinor(s) for complex spinor(s) ``phi_a`` of shape ``(..., 4)``.

    Raises
    ------
    NonRealResult
        If the inverse S matrix leaves an imaginary part above ``1e-10``.
    """
    phi_a = np.asarray(phi_a, dtype=complex)
    if phi_a.shape[-1] != 4:
        raise ValueError(f"complex spinor needs last axis 4, got shape {phi_a.shape}")
    phi_b = phi_a.conj() @ smap.n_b.T
    stacked = np.concatenate([phi_a, phi_b], axis=-1)
    out = stacked @ smap.inverse.T
    residue = float(np.max(np.abs(out.imag), initial=0.0))
    if residue > NONREAL_TOL:
        raise NonRealResult(f"encoded spinor has imaginary residue {residue:.3e}")
    return np.ascontiguousarray(out.real)


def s_decode(phi, smap):
    """Complex spinor(s) ``phi_a`` for real 8-spinor(s) ``phi``.

    Complex-valued input is accepted so that vectors outside the physical
    (real) subspace can be diagnosed: the decoded pair must still satisfy
    ``phi_b = N_b conj(phi_a)``.
    """
    phi = np.asarray(phi)
    if phi.shape[-1] != 8:
        raise ValueError(f"real spinor needs last axis 8, got shape {phi.shape}")
    pair = phi.astype(complex) @ smap.complex_matrix.T
    phi_a, phi_b = pair[..., :4], pair[..., 4:]
    mismatch = float(np.max(np.abs(phi_b - phi_a.conj() @ smap.n_b.T), initial=0.0))
    if mismatch > CONJUGACY_TOL:
        raise ConjugacyViolation(f"phi_b deviates from N_b conj(phi_a) by {mismatch:.3e}")
    return phi_a
