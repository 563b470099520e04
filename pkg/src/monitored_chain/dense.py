"""Exact 2^L Hilbert-space reference path (L <= 10).

Fermionic operators are built directly in the occupation-number basis with
explicit sign bookkeeping (basis state n = prod_{i ascending, n_i=1} c_i^dag
|0>), so periodic-boundary parity checks need no string corrections.  This
module is the independent oracle for the Gaussian path: same conventions,
completely different algorithms.
"""

import numpy as np

from .errors import ConfigError
from .gaussian import ParityOp  # noqa: F401  (re-exported for convenience)

MAX_L = 10


def _check_dense_L(L):
    if L > MAX_L:
        raise ConfigError(f"dense path supports L <= {MAX_L}, got {L}")


def _parity_below(L, site):
    """(-1)^(number of occupied sites < site) for every basis index."""
    n = np.arange(1 << L, dtype=np.uint32)
    mask = np.uint32((1 << site) - 1)
    below = n & mask
    cnt = np.zeros(1 << L, dtype=np.int64)
    for i in range(site):
        cnt += (below >> np.uint32(i)) & 1
    return 1.0 - 2.0 * (cnt % 2)


def apply_annihilation(psi, L, site):
    """c_site |psi> in the occupation basis."""
    bit = 1 << site
    n = np.arange(1 << L)
    out = np.zeros_like(psi)
    src = (n & bit) != 0
    sign = _parity_below(L, site)
    out[n[src] ^ bit] = sign[src] * psi[src]
    return out


def apply_creation(psi, L, site):
    """c_site^dag |psi>."""
    bit = 1 << site
    n = np.arange(1 << L)
    out = np.zeros_like(psi)
    src = (n & bit) == 0
    sign = _parity_below(L, site)
    out[n[src] | bit] = sign[src] * psi[src]
    return out


def apply_majorana(psi, L, m):
    """eta_m |psi> with eta_{2i} = -i(c_i - c_i^dag), eta_{2i+1} = c_i + c_i^dag."""
    site = m // 2
    a = apply_annihilation(psi, L, site)
    c = apply_creation(psi, L, site)
    if m % 2:
        return a + c
    return -1j * (a - c)


def apply_parity(psi, L, op):
    """(i eta_a eta_b) |psi>."""
    return 1j * apply_majorana(apply_majorana(psi, L, op.b), L, op.a)


def dense_parity_op(op, L):
    """Full 2^L x 2^L matrix of M = i eta_a eta_b."""
    _check_dense_L(L)
    dim = 1 << L
    m = np.empty((dim, dim), dtype=np.complex128)
    e = np.zeros(dim, dtype=np.complex128)
    for k in range(dim):
        e[k] = 1.0
        m[:, k] = apply_parity(e, L, op)
        e[k] = 0.0
    return m


def dense_product_state(L, occupied):
    """|n> for the given occupation pattern (amplitude +1 by construction)."""
    _check_dense_L(L)
    occupied = np.asarray(occupied, dtype=bool)
    idx = 0
    for i in range(L):
        if occupied[i]:
            idx |= 1 << i
    psi = np.zeros(1 << L, dtype=np.complex128)
    psi[idx] = 1.0
    return psi


def dense_parity_expectation(psi, L, op):
    val = np.vdot(psi, apply_parity(psi, L, op))
    return float(val.real)


def gaussian_pdf(x, delta):
    return np.exp(-x * x / (2.0 * delta * delta)) / (np.sqrt(2.0 * np.pi) * delta)


def dense_kraus_update(psi, L, op, x, lam, delta):
    """Normalized Kraus update K(x)|psi>/|K(x)|psi>| with

    K(x) = sqrt(G(x - lam)) P_+ + sqrt(G(x + lam)) P_-.
    """
    gp = np.sqrt(gaussian_pdf(x - lam, delta))
    gm = np.sqrt(gaussian_pdf(x + lam, delta))
    mpsi = apply_parity(psi, L, op)
    out = 0.5 * ((gp + gm) * psi + (gp - gm) * mpsi)
    nrm = np.linalg.norm(out)
    if nrm == 0.0:
        raise ConfigError("Kraus update annihilated the state")
    return out / nrm


def dense_exp_update(psi, L, op, theta):
    """Normalized exp(theta M)|psi> via M^2 = 1."""
    mpsi = apply_parity(psi, L, op)
    out = np.cosh(theta) * psi + np.sinh(theta) * mpsi
    return out / np.linalg.norm(out)


def _reorder_sign_and_index(L, sites):
    """Fermionic mode reordering that brings `sites` to the low bit positions.

    Returns (new_index, sign) arrays over all basis states: the amplitude of
    basis state n moves to new_index[n] with the permutation sign of its
    occupied modes.
    """
    sites = list(sites)
    rest = [i for i in range(L) if i not in sites]
    perm = sites + rest  # new position k holds old site perm[k]
    rank = {p: k for k, p in enumerate(perm)}
    dim = 1 << L
    new_index = np.empty(dim, dtype=np.int64)
    sign = np.empty(dim, dtype=np.float64)
    for n in range(dim):
        occ = [i for i in range(L) if (n >> i) & 1]
        ranks = [rank[i] for i in occ]
        inv = 0
        for i in range(len(ranks)):
            for j in range(i + 1, len(ranks)):
                if ranks[i] > ranks[j]:
                    inv += 1
        m = 0
        for r in ranks:
            m |= 1 << r
        new_index[n] = m
        sign[n] = -1.0 if inv % 2 else 1.0
    return new_index, sign


def dense_subsystem_entropy(psi, L, sites):
    """Von Neumann entropy of a site subset via Schmidt decomposition."""
    _check_dense_L(L)
    sites = sorted(int(s) for s in sites)
    if not sites:
        return 0.0
    if sites[0] < 0 or sites[-1] >= L:
        raise ConfigError(f"sites outside 0..{L - 1}")
    k = len(sites)
    new_index, sign = _reorder_sign_and_index(L, sites)
    phi = np.zeros_like(psi)
    phi[new_index] = sign * psi
    mat = phi.reshape(1 << (L - k), 1 << k)
    s = np.linalg.svd(mat, compute_uv=False)
    p = s * s
    p = p[p > 1e-14]
    return float(-np.sum(p * np.log(p)))


def dense_entropies(psi, L, part):
    """Entropy of a Partition or site list (dense path)."""
    try:
        sites = part.sites()
    except AttributeError:
        sites = part
    return dense_subsystem_entropy(psi, L, sites)


def dense_topological_ee(psi, L, boundaries=None):
    """Same region convention as entanglement.topological_ee."""
    if boundaries is None:
        q1, q2, q3 = L // 4, L // 2, 3 * L // 4
    else:
        q1, q2, q3 = boundaries
    s_a = dense_subsystem_entropy(psi, L, range(0, q3))
    s_b = dense_subsystem_entropy(psi, L, range(q1, L))
    s_union = dense_subsystem_entropy(psi, L, range(0, L))
    s_inter = dense_subsystem_entropy(psi, L, range(q1, q3))
    return s_a + s_b - s_union - s_inter


def dense_correlation_matrix(psi, L):
    """2L x 2L correlation matrix with the same block/index conventions as
    entanglement.correlation_matrix."""
    a = np.empty((L, 1 << L), dtype=np.complex128)  # a[i] = c_i |psi>
    b = np.empty((L, 1 << L), dtype=np.complex128)  # b[i] = c_i^dag |psi>
    for i in range(L):
        a[i] = apply_annihilation(psi, L, i)
        b[i] = apply_creation(psi, L, i)
    corr = np.empty((2 * L, 2 * L), dtype=np.complex128)
    # block entries: (UU^dag)_{ij} = <c_j^dag c_i>, (UV^dag)_{ij} = <c_j c_i>,
    # (VU^dag)_{ij} = <c_j^dag c_i^dag>, (VV^dag)_{ij} = <c_j c_i^dag>
    corr[:L, :L] = a @ a.conj().T
    corr[:L, L:] = a @ b.conj().T
    corr[L:, :L] = b @ a.conj().T
    corr[L:, L:] = b @ b.conj().T
    return corr
