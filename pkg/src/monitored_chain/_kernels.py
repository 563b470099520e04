"""Hot-path kernels for the Majorana-basis mode matrix.

The state is a (2L, L) complex matrix ``modes`` whose columns are the
annihilating modes written in Majorana components (columns orthonormal,
isotropic).  A measurement factor exp(theta * i eta_a eta_b) mixes only rows
(a, b); in the hyperbolic eigenbasis

    u = (row_a + i row_b)/sqrt(2)   -> e^{+2 theta} u
    w = (row_a - i row_b)/sqrt(2)   -> e^{-2 theta} w

so the column Gram matrix picks up an exactly rank-2 correction

    Q'Q' = I + alpha conj(u) u + beta conj(w) w,
    alpha = expm1(4 theta), beta = expm1(-4 theta).

Re-orthonormalization is done with a 2x2 Cholesky in a basis whose first
vector lies along the *growing* direction; the Gram matrix is then graded and
the small pivot is computed without cancellation, which keeps the scheme as
stable as a full QR while costing O(L^2).  Degenerate geometries fall back to
LAPACK QR inside the kernel.

All kernels are sequential and allocation-light; they are deterministic for a
fixed input on a fixed build.
"""

import numpy as np

try:  # pragma: no cover - exercised implicitly by the import switch
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_TINY = 1e-30
_FLOOR = 1e-300

# status codes returned by step_kernel
OK = 0
ERR_RANK = 2
ERR_EXPECTATION = 3


@njit(cache=True)
def parity_m(modes, a, b):
    """<i eta_a eta_b> = 2i sum_n conj(modes[a,n]) modes[b,n]; returns (re, im)."""
    L = modes.shape[1]
    acc = 0.0 + 0.0j
    for n in range(L):
        acc += np.conj(modes[a, n]) * modes[b, n]
    m = 2j * acc
    return m.real, m.imag


@njit(cache=True)
def kraus_update(modes, a, b, theta):
    """Apply exp(theta M), M = i eta_a eta_b, in place, re-orthonormalized.

    The row update lies exactly in the span of the two correction directions
    e1 (along the growing combination) and e2, so the map fuses into

        Q'' = Q + (z1 - y1) e1^dag + (z2 - y2) e2^dag

    with y_k = Q e_k and z_k the renormalized components of Q' e_k.  Large
    hyperbolic factors enter only multiplicatively (no huge intermediates are
    differenced), which keeps the scheme elementwise stable up to the theta
    clamp.  Returns 0 on success, 1 when the caller must fall back to QR.
    """
    n_rows, L = modes.shape
    if theta == 0.0:
        return 0
    gu = np.exp(2.0 * theta)
    gw = np.exp(-2.0 * theta)
    alpha = np.expm1(4.0 * theta)
    beta = np.expm1(-4.0 * theta)

    u = np.empty(L, np.complex128)
    w = np.empty(L, np.complex128)
    for n in range(L):
        ra = modes[a, n]
        rb = modes[b, n]
        u[n] = (ra + 1j * rb) * _INV_SQRT2
        w[n] = (ra - 1j * rb) * _INV_SQRT2

    sigma = 1.0
    if theta < 0.0:
        u, w = w, u
        gu, gw = gw, gu
        alpha, beta = beta, alpha
        sigma = -1.0
    # u now spans the growing combination (coefficient gu = e^{2|theta|});
    # the b-row increment keeps its original orientation via sigma.

    nb = 0.0
    ns = 0.0
    duw = 0.0 + 0.0j  # sum u_n conj(w_n)
    for n in range(L):
        nb += u[n].real * u[n].real + u[n].imag * u[n].imag
        ns += w[n].real * w[n].real + w[n].imag * w[n].imag
        duw += u[n] * np.conj(w[n])

    if nb <= _TINY and ns <= _TINY:
        return 0  # no mode weight in the (a, b) plane

    e1c = np.empty(L, np.complex128)  # conj(e1)
    if nb <= _TINY:
        # essentially no weight along the growing combination: rank-1 in w,
        # valid only while the amplified residual stays negligible
        if (gu - 1.0) * np.sqrt(nb) > 1e-12:
            return 1
        r = np.sqrt(ns)
        for n in range(L):
            e1c[n] = w[n] / r
        ue1 = duw / r
        we1 = r + 0.0j
        a11 = (1.0 + beta * ns
               + alpha * (ue1.real * ue1.real + ue1.imag * ue1.imag))
        if not (a11 > _FLOOR):
            return 1
        return _rank1_apply(modes, e1c, ue1, we1, gu, gw, sigma, a11, a, b)

    r = np.sqrt(nb)
    d = duw / r  # e1^dag conj(w)
    dabs2 = d.real * d.real + d.imag * d.imag
    h2 = ns - dabs2
    for n in range(L):
        e1c[n] = u[n] / r

    if h2 <= 1e-26 * (ns if ns > 1.0 else 1.0):
        # w (if any) is parallel to u: single correction direction
        ue1 = r + 0.0j
        we1 = np.conj(d)
        a11 = 1.0 + alpha * nb + beta * dabs2
        if not (a11 > _FLOOR):
            return 1
        return _rank1_apply(modes, e1c, ue1, we1, gu, gw, sigma, a11, a, b)

    h = np.sqrt(h2)
    e2c = np.empty(L, np.complex128)  # conj(e2)
    cd = np.conj(d)
    for n in range(L):
        e2c[n] = (w[n] - u[n] * cd / r) / h

    # graded Cholesky of I + M in the (e1, e2) basis
    a11 = 1.0 + alpha * nb + beta * dabs2
    a21 = beta * cd * h
    a22 = 1.0 + beta * h2
    if not (a11 > _FLOOR):
        return 1
    l11 = np.sqrt(a11)
    l21 = a21 / l11
    t22sq = a22 - (l21.real * l21.real + l21.imag * l21.imag)
    if not (t22sq > _FLOOR):
        return 1
    l22 = np.sqrt(t22sq)
    t11 = 1.0 / l11
    t12 = -np.conj(l21) / (l11 * l22)
    t22 = 1.0 / l22

    # y_k = Q e_k: note (e1)_n = conj(e1c[n])
    y1 = np.empty(n_rows, np.complex128)
    y2 = np.empty(n_rows, np.complex128)
    for p in range(n_rows):
        acc1 = 0.0 + 0.0j
        acc2 = 0.0 + 0.0j
        for n in range(L):
            acc1 += modes[p, n] * np.conj(e1c[n])
            acc2 += modes[p, n] * np.conj(e2c[n])
        y1[p] = acc1
        y2[p] = acc2

    # rows a, b of Q' e_k directly from the exact identities
    # u.e1 = r, w.e1 = conj(d), u.e2 = 0, w.e2 = h  (products, no increments,
    # so the e^{-2|theta|}-sized remainders survive in floating point)
    q1 = y1.copy()
    q2 = y2.copy()
    q1[a] = (gu * r + gw * cd) * _INV_SQRT2
    q1[b] = sigma * 1j * (gw * cd - gu * r) * _INV_SQRT2
    q2[a] = gw * h * _INV_SQRT2
    q2[b] = sigma * 1j * gw * h * _INV_SQRT2

    for p in range(n_rows):
        z1 = t11 * q1[p]
        z2 = t12 * q1[p] + t22 * q2[p]
        c1 = z1 - y1[p]
        c2 = z2 - y2[p]
        for n in range(L):
            modes[p, n] += c1 * e1c[n] + c2 * e2c[n]
    return 0


@njit(cache=True)
def _rank1_apply(modes, e1c, ue1, we1, gu, gw, sigma, a11, a, b):
    """Single-direction version of the fused update (see kraus_update)."""
    n_rows, L = modes.shape
    t11 = 1.0 / np.sqrt(a11)
    qa = (gu * ue1 + gw * we1) * _INV_SQRT2
    qb = sigma * 1j * (gw * we1 - gu * ue1) * _INV_SQRT2
    for p in range(n_rows):
        y1 = 0.0 + 0.0j
        for n in range(L):
            y1 += modes[p, n] * np.conj(e1c[n])
        q1 = y1
        if p == a:
            q1 = qa
        elif p == b:
            q1 = qb
        c1 = t11 * q1 - y1
        for n in range(L):
            modes[p, n] += c1 * e1c[n]
    return 0


@njit(cache=True)
def _plain_row_update(modes, a, b, theta):
    """Unnormalized 2-row hyperbolic update (used before a QR fallback)."""
    L = modes.shape[1]
    ch = np.cosh(2.0 * theta)
    sh = np.sinh(2.0 * theta)
    for n in range(L):
        ra = modes[a, n]
        rb = modes[b, n]
        modes[a, n] = ch * ra + 1j * sh * rb
        modes[b, n] = -1j * sh * ra + ch * rb


@njit(cache=True)
def qr_orthonormalize(modes):
    """Full QR re-orthonormalization in place; returns 0, or ERR_RANK."""
    q, r = np.linalg.qr(modes)
    L = r.shape[0]
    rmax = 0.0
    rmin = np.inf
    for i in range(L):
        v = abs(r[i, i])
        if v > rmax:
            rmax = v
        if v < rmin:
            rmin = v
    if not (rmax > 0.0) or rmin < 1e-13 * rmax or not np.isfinite(rmax):
        return ERR_RANK
    modes[:, :] = q
    return OK


@njit(cache=True)
def apply_kraus_inplace(modes, a, b, theta):
    """kraus_update with QR fallback; returns OK or ERR_RANK."""
    status = kraus_update(modes, a, b, theta)
    if status != 0:
        _plain_row_update(modes, a, b, theta)
        return qr_orthonormalize(modes)
    return OK


@njit(cache=True)
def step_kernel(
    modes,
    a_idx,
    b_idx,
    sched,
    lam_arr,
    u_branch,
    z_block,
    delta,
    theta_max,
    branch_out,
    x_out,
    theta_out,
    m_out,
):
    """Run one pre-scheduled measurement sweep over the event slots.

    Slot arrays are laid out in iteration order.  ``u_branch``/``z_block``
    hold one uniform and one normal draw per *scheduled* slot, consumed in
    slot order.  Outputs are written per slot (unscheduled slots get zeros
    and m_out = 2, an out-of-range marker).  Returns a status code.
    """
    n_slots = sched.shape[0]
    k = 0
    for s in range(n_slots):
        if sched[s] == 0:
            branch_out[s] = 0
            x_out[s] = 0.0
            theta_out[s] = 0.0
            m_out[s] = 2.0
            continue
        a = a_idx[s]
        b = b_idx[s]
        mr, mi = parity_m(modes, a, b)
        if not np.isfinite(mr) or abs(mi) > 1e-9 or abs(mr) > 1.0 + 1e-9:
            return ERR_EXPECTATION
        m = mr
        if m > 1.0:
            m = 1.0
        elif m < -1.0:
            m = -1.0
        p_plus = 0.5 * (1.0 + m)
        br = 1 if u_branch[k] < p_plus else 0
        lam = lam_arr[s]
        x = (lam if br == 1 else -lam) + delta * z_block[k]
        theta = lam * x / (2.0 * delta * delta)
        if theta > theta_max:
            theta = theta_max
        elif theta < -theta_max:
            theta = -theta_max
        status = kraus_update(modes, a, b, theta)
        if status != 0:
            status = qr_orthonormalize(modes)
            if status != 0:
                return status
        branch_out[s] = br
        x_out[s] = x
        theta_out[s] = theta
        m_out[s] = m
        k += 1
    return OK
