"""Correlation matrices and von Neumann entropies of Gaussian states.

The 2L x 2L correlation matrix is assembled from the BdG blocks as

    C = [[U U^dag, U V^dag],
         [V U^dag, V V^dag]]  =  W W^dag,   W = [[U], [V]]

(entry conventions: (U U^dag)_{ij} = <c_j^dag c_i>, (U V^dag)_{ij} = <c_j c_i>,
(V U^dag)_{ij} = <c_j^dag c_i^dag>, (V V^dag)_{ij} = <c_j c_i^dag>).  For a
pure state C is a rank-L projector.  The entropy of a site subset P uses the
eigenvalues of C restricted to P's particle and hole rows:

    S = (1/2) sum_i [ -lam_i log lam_i - (1 - lam_i) log(1 - lam_i) ]

with the 1/2 compensating the particle-hole doubling.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

EIG_CLIP = 1e-12
LOG2 = float(np.log(2.0))


@dataclass(frozen=True)
class Partition:
    """Disjoint union of contiguous site ranges, 0-based half-open."""

    segments: tuple

    def __post_init__(self):
        segs = tuple((int(a), int(b)) for a, b in self.segments)
        object.__setattr__(self, "segments", segs)
        last = -1
        for a, b in segs:
            if a < 0 or b <= a or a < last:
                raise ConfigError(f"bad partition segments {segs}")
            last = b

    def sites(self):
        return np.concatenate([np.arange(a, b) for a, b in self.segments]) if self.segments else np.empty(0, dtype=int)

    def validate(self, L):
        s = self.sites()
        if s.size and s.max() >= L:
            raise ConfigError(f"partition exceeds chain length {L}")


def correlation_matrix(state):
    """Full 2L x 2L correlation matrix of a Gaussian state."""
    u, v = state.uv()
    w = np.vstack([u, v])
    return w @ w.conj().T


def _entropy_from_eigs(lam):
    lam = np.clip(lam, EIG_CLIP, 1.0 - EIG_CLIP)
    return float(-0.5 * np.sum(lam * np.log(lam) + (1.0 - lam) * np.log1p(-lam)))


def subsystem_entropy(corr, part):
    """Von Neumann entropy of a site subset from the reduced correlation matrix.

    `part` may be a Partition or any iterable of site indices.
    """
    L = corr.shape[0] // 2
    if isinstance(part, Partition):
        part.validate(L)
        sites = part.sites()
    else:
        sites = np.asarray(list(part), dtype=int)
    if sites.size == 0:
        return 0.0
    if sites.min() < 0 or sites.max() >= L:
        raise ConfigError(f"sites outside 0..{L - 1}")
    idx = np.concatenate([sites, sites + L])
    sub = corr[np.ix_(idx, idx)]
    lam = np.linalg.eigvalsh(0.5 * (sub + sub.conj().T))
    return _entropy_from_eigs(lam)


def bipartite_entropy(corr):
    """Entropy of the left half-chain (sites 0 .. L/2-1)."""
    L = corr.shape[0] // 2
    if L % 2:
        raise ConfigError("bipartite entropy needs even L")
    return subsystem_entropy(corr, np.arange(L // 2))


def topological_ee(corr, boundaries=None):
    """Topological entanglement entropy S_A + S_B - S_{AuB} - S_{AnB}.

    With quarter boundaries (q1, q2, q3) the two overlapping blocks are
    A = [0, q3) and B = [q1, L), so AnB = [q1, q3) and AuB is the full chain.
    This combination vanishes in the on-site (density) dimer phase and gives
    log 2 in the bond (Kitaev) dimer phase, where a single fermionic mode is
    shared between the two chain ends.
    """
    L = corr.shape[0] // 2
    if boundaries is None:
        if L % 4:
            raise ConfigError("default quarters need L divisible by 4")
        q1, q2, q3 = L // 4, L // 2, 3 * L // 4
    else:
        q1, q2, q3 = (int(q) for q in boundaries)
        if not 0 < q1 < q2 < q3 < L:
            raise ConfigError(f"boundaries {boundaries} must satisfy 0<q1<q2<q3<L")
    s_a = subsystem_entropy(corr, np.arange(0, q3))
    s_b = subsystem_entropy(corr, np.arange(q1, L))
    s_union = subsystem_entropy(corr, np.arange(0, L))
    s_inter = subsystem_entropy(corr, np.arange(q1, q3))
    return s_a + s_b - s_union - s_inter
