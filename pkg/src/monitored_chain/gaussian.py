"""Pure fermionic Gaussian states of an L-site chain and parity-check Kraus maps.

A state is stored as a (2L, L) complex mode matrix in the Majorana
single-particle basis: column n holds the Majorana components of an operator
d_n = sum_m modes[m, n] eta_m / sqrt(2) that annihilates the state.  The
columns are orthonormal (modes^dag modes = 1) and isotropic
(modes^T modes = 0); both properties are preserved by every operation here.

Site conventions (0-based site i):

    eta_{2i}   = -i (c_i - c_i^dag)
    eta_{2i+1} =     c_i + c_i^dag

so c_i = (eta_{2i+1} + i eta_{2i})/2.  The BdG (U, V) blocks of the familiar
Slater form prod_n (sum_i U_in c_i^dag + V_in c_i)|0> are recovered by

    U = (modes[1::2] + i modes[0::2]) / sqrt(2)
    V = (modes[1::2] - i modes[0::2]) / sqrt(2)

Measured operators are two-Majorana parity checks M = i eta_a eta_b with
M^2 = 1: density-type pairs the two Majoranas of one site, Kitaev-type pairs
neighbouring sites across a bond.  exp(theta M) acts on single-particle space
as the hyperbolic rotation

    eta_a -> cosh(2 theta) eta_a - i sinh(2 theta) eta_b
    eta_b -> i sinh(2 theta) eta_a + cosh(2 theta) eta_b

i.e. a 2-row update of the mode matrix, followed by re-orthonormalization.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConfigError, NumericsError

# tanh(2*20) == 1 to double precision: beyond this the map is exactly
# projective, and cosh factors would eventually overflow.
THETA_MAX = 20.0

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class ParityOp:
    """Two-Majorana parity check M = i eta_a eta_b (M^2 = 1)."""

    kind: str  # "D" (on-site density) or "K" (bond)
    site: int  # 0-based
    a: int
    b: int

    @classmethod
    def density(cls, site, L):
        if not 0 <= site < L:
            raise ConfigError(f"density site {site} outside 0..{L - 1}")
        return cls("D", site, 2 * site + 1, 2 * site)

    @classmethod
    def kitaev(cls, site, L, periodic=False):
        if not 0 <= site < L:
            raise ConfigError(f"kitaev site {site} outside 0..{L - 1}")
        if site == L - 1 and not periodic:
            raise ConfigError("kitaev bond at the open end does not exist")
        return cls("K", site, 2 * site + 1, (2 * site + 2) % (2 * L))

    def validate(self, L):
        if not (0 <= self.a < 2 * L and 0 <= self.b < 2 * L and self.a != self.b):
            raise ConfigError(f"majorana indices {(self.a, self.b)} invalid for L={L}")


@dataclass
class GaussianState:
    """Mode matrix wrapper; use the module functions to act on it."""

    L: int
    modes: np.ndarray  # (2L, L) complex128, C-contiguous

    def copy(self):
        return GaussianState(self.L, self.modes.copy())

    def uv(self):
        """BdG blocks (U, V), each (L, L), of the Slater representation."""
        u = (self.modes[1::2, :] + 1j * self.modes[0::2, :]) / _SQRT2
        v = (self.modes[1::2, :] - 1j * self.modes[0::2, :]) / _SQRT2
        return u, v

    def orthonormality_defect(self):
        g = self.modes.conj().T @ self.modes
        return float(np.abs(g - np.eye(self.L)).max())

    def isotropy_defect(self):
        return float(np.abs(self.modes.T @ self.modes).max())


def _check_L(L):
    if L < 4 or L % 4 != 0:
        raise ConfigError(f"L must be a positive multiple of 4, got {L}")


def product_state(L, occupied):
    """Gaussian product state with the given per-site occupations."""
    _check_L(L)
    occupied = np.asarray(occupied, dtype=bool)
    if occupied.shape != (L,):
        raise ConfigError(f"occupation pattern must have length {L}")
    modes = np.zeros((2 * L, L), dtype=np.complex128)
    inv = 1.0 / _SQRT2
    for n in range(L):
        # occupied site: mode c^dag (u = e_n); empty: mode c (v = e_n)
        modes[2 * n, n] = -1j * inv if occupied[n] else 1j * inv
        modes[2 * n + 1, n] = inv
    return GaussianState(L, modes)


def init_product_state(L):
    """Fully occupied chain: +1 eigenstate of every density check."""
    return product_state(L, np.ones(L, dtype=bool))


def checkerboard_state(L):
    """Alternating occupied/empty sites (used for initial-state checks)."""
    return product_state(L, np.arange(L) % 2 == 0)


def from_uv(u, v):
    """Build a state from BdG blocks (inverse of GaussianState.uv)."""
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    L = u.shape[0]
    modes = np.empty((2 * L, L), dtype=np.complex128)
    modes[0::2, :] = 1j * (v - u) / _SQRT2
    modes[1::2, :] = (u + v) / _SQRT2
    return GaussianState(L, modes)


def parity_expectation(state, op):
    """<psi| i eta_a eta_b |psi>, real, clamped to [-1, 1]."""
    op.validate(state.L)
    mr, mi = _kernels.parity_m(state.modes, op.a, op.b)
    if not np.isfinite(mr) or abs(mi) > 1e-9:
        raise NumericsError(f"parity expectation not real: {mr} + {mi}j")
    return float(min(1.0, max(-1.0, mr)))


def apply_kraus(state, op, theta, theta_max=THETA_MAX):
    """Normalized action of exp(theta M) on the state (new state returned).

    |theta| is clamped at theta_max; at the clamp the map is already exactly
    projective in double precision.
    """
    op.validate(state.L)
    if not np.isfinite(theta):
        raise ConfigError(f"theta must be finite, got {theta}")
    theta = float(min(theta_max, max(-theta_max, theta)))
    out = state.copy()
    status = _kernels.apply_kraus_inplace(out.modes, op.a, op.b, theta)
    if status != _kernels.OK:
        raise NumericsError("mode matrix lost rank during Kraus update")
    return out


def orthonormalize(state):
    """QR re-orthonormalization of the mode matrix (column space preserved)."""
    q, r = np.linalg.qr(state.modes)
    d = np.abs(np.diag(r))
    if d.size and (not np.isfinite(d).all() or d.min() < 1e-13 * d.max()):
        raise NumericsError("rank-deficient mode matrix")
    return GaussianState(state.L, np.ascontiguousarray(q))


def clamp_theta(theta, theta_max=THETA_MAX):
    """Clamp theta to [-theta_max, theta_max]; returns (theta, saturated)."""
    if theta > theta_max:
        return theta_max, True
    if theta < -theta_max:
        return -theta_max, True
    return theta, False
