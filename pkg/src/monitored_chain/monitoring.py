"""Stochastic measurement sweeps: pointer sampling, events, and trajectories.

Random-stream contract (fixed; trajectories are replayable from it):

* event slots are visited site by site in ``sweep_order``; at each site the
  density slot comes first, then the Kitaev slot (absent at the last site
  under open boundaries);
* every visited slot consumes exactly one scheduling uniform;
* a scheduled measurement consumes one branch uniform, then one standard
  normal; unscheduled slots consume nothing further.

The pointer readout for a measurement of M with <M> = m is distributed as

    P(x) = p_+ G_delta(x - lam) + p_- G_delta(x + lam),  p_± = (1 ± m)/2,

sampled by choosing the + branch with probability p_+ (uniform < p_+) and
then drawing x = ±lam + delta*z.  The back-action is exp(theta M) with
theta = lam*x/(2 delta^2).
"""

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .entanglement import bipartite_entropy, correlation_matrix, topological_ee
from .errors import ConfigError, NumericsError, TapeError
from .gaussian import (
    ParityOp,
    checkerboard_state,
    clamp_theta,
    init_product_state,
    parity_expectation,
)


@dataclass(frozen=True)
class ProtocolParams:
    """All knobs of one monitored-chain protocol point."""

    L: int
    dt: float = 1.0
    delta: float = 1.0
    gamma_d: float = 0.0
    gamma_k: float = 0.0
    p_d: float = 0.0
    p_k: float = 0.0
    boundary: str = "open"
    burn_steps: int | None = None
    meas_steps: int | None = None
    sample_stride: int = 2
    n_traj: int = 1
    master_seed: int = 0
    sweep_order: str = "ascending"
    init_state: str = "occupied"
    theta_max: float = 20.0

    def __post_init__(self):
        if self.L < 4 or self.L % 4:
            raise ConfigError(f"L must be a positive multiple of 4, got {self.L}")
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not (self.delta > 0 and np.isfinite(self.delta)):
            raise ConfigError(f"delta must be positive, got {self.delta}")
        for name in ("gamma_d", "gamma_k"):
            v = getattr(self, name)
            if v < 0 or not np.isfinite(v):
                raise ConfigError(f"{name} must be >= 0, got {v}")
        for name in ("p_d", "p_k"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if self.boundary not in ("open", "periodic"):
            raise ConfigError(f"boundary must be open|periodic, got {self.boundary}")
        if self.sweep_order not in ("ascending", "descending"):
            raise ConfigError(f"sweep_order must be ascending|descending")
        if self.init_state not in ("occupied", "checkerboard"):
            raise ConfigError(f"init_state must be occupied|checkerboard")
        if self.sample_stride < 1:
            raise ConfigError("sample_stride must be >= 1")
        if self.theta_max <= 0:
            raise ConfigError("theta_max must be positive")

    @property
    def lambda_d(self):
        return float(np.sqrt(self.gamma_d * self.dt))

    @property
    def lambda_k(self):
        return float(np.sqrt(self.gamma_k * self.dt))

    def auto_steps(self):
        """Area-law phases saturate after O(L) physical time; keep at least
        4L sweeps even for large dt."""
        return int(max(4 * self.L, round(4 * self.L / self.dt)))

    @property
    def resolved_burn_steps(self):
        return self.auto_steps() if self.burn_steps is None else int(self.burn_steps)

    @property
    def resolved_meas_steps(self):
        return self.auto_steps() if self.meas_steps is None else int(self.meas_steps)

    def with_updates(self, **kw):
        return replace(self, **kw)


@dataclass
class MeasurementEvent:
    op: ParityOp
    scheduled: bool
    x: float = 0.0
    theta: float = 0.0
    branch: int = 0
    z: float = 0.0
    m_before: float | None = None
    saturated: bool = False


@dataclass
class TrajectoryRecord:
    params: ProtocolParams
    index: int
    seed: tuple
    sample_steps: np.ndarray
    st: np.ndarray      # topological EE per sample, nats
    shalf: np.ndarray   # half-chain EE per sample, nats
    st_mean: float
    shalf_mean: float
    n_saturated: int = 0


def initial_state(params):
    if params.init_state == "checkerboard":
        return checkerboard_state(params.L)
    return init_product_state(params.L)


def event_slots(params):
    """Ordered (kind, site) slots of one sweep."""
    sites = range(params.L) if params.sweep_order == "ascending" else range(params.L - 1, -1, -1)
    slots = []
    for j in sites:
        slots.append(("D", j))
        if j < params.L - 1 or params.boundary == "periodic":
            slots.append(("K", j))
    return slots


def slot_ops(params):
    """ParityOp per slot, same order as event_slots."""
    periodic = params.boundary == "periodic"
    ops = []
    for kind, j in event_slots(params):
        if kind == "D":
            ops.append(ParityOp.density(j, params.L))
        else:
            ops.append(ParityOp.kitaev(j, params.L, periodic=periodic))
    return ops


def sample_pointer(state, op, lam, delta, rng):
    """Draw a pointer readout x ~ p_+ G(x-lam) + p_- G(x+lam)."""
    if lam < 0 or delta <= 0:
        raise ConfigError("sample_pointer needs lam >= 0, delta > 0")
    m = parity_expectation(state, op)
    branch = rng.random() < 0.5 * (1.0 + m)
    z = rng.standard_normal()
    return (lam if branch else -lam) + delta * z


def measurement_event(state, op, scheduled, lam, delta, rng, theta_max=20.0):
    """One generalized measurement; returns (new_state, MeasurementEvent).

    scheduled = 0 leaves the state untouched and consumes no randomness.
    """
    if not scheduled:
        return state, MeasurementEvent(op=op, scheduled=False)
    new = state.copy()
    m, branch, z, x, theta, sat = _event_inplace(new.modes, op, lam, delta, rng, theta_max)
    ev = MeasurementEvent(op=op, scheduled=True, x=x, theta=theta, branch=branch,
                          z=z, m_before=m, saturated=sat)
    return new, ev


def _event_inplace(modes, op, lam, delta, rng, theta_max):
    mr, mi = _kernels.parity_m(modes, op.a, op.b)
    if not np.isfinite(mr) or abs(mi) > 1e-9 or abs(mr) > 1.0 + 1e-9:
        raise NumericsError(f"parity expectation out of range: {mr}+{mi}j")
    m = min(1.0, max(-1.0, mr))
    branch = 1 if rng.random() < 0.5 * (1.0 + m) else 0
    z = rng.standard_normal()
    x = (lam if branch else -lam) + delta * z
    theta, sat = clamp_theta(lam * x / (2.0 * delta * delta), theta_max)
    status = _kernels.apply_kraus_inplace(modes, op.a, op.b, theta)
    if status != _kernels.OK:
        raise NumericsError("mode matrix lost rank during Kraus update")
    return m, branch, z, x, theta, sat


def time_step(state, params, rng, tape=None, step_index=0, inplace=False,
              build_events=True, stats=None):
    """One full sweep of scheduled density and Kitaev measurements.

    Returns (state, events); events has one entry per slot (2L-1 under open
    boundaries, 2L under periodic).
    """
    if not inplace:
        state = state.copy()
    modes = state.modes
    lam_d, lam_k = params.lambda_d, params.lambda_k
    events = [] if build_events else None
    for op in slot_ops(params):
        p = params.p_d if op.kind == "D" else params.p_k
        lam = lam_d if op.kind == "D" else lam_k
        scheduled = rng.random() < p
        if scheduled:
            m, branch, z, x, theta, sat = _event_inplace(modes, op, lam, params.delta, rng, params.theta_max)
            if sat and stats is not None:
                stats["saturated"] = stats.get("saturated", 0) + 1
        else:
            m = branch = 0
            z = x = theta = 0.0
            sat = False
        if tape is not None:
            tape.append(step_index, op.site, op.kind, int(scheduled), branch, z)
        if build_events:
            events.append(MeasurementEvent(op=op, scheduled=bool(scheduled), x=x, theta=theta,
                                           branch=branch, z=z,
                                           m_before=(m if scheduled else None), saturated=sat))
    return state, events


def trajectory_rng(params, trajectory_index):
    return np.random.default_rng([int(params.master_seed), int(trajectory_index)])


def run_trajectory(params, trajectory_index, tape=None):
    """Burn in, then sample S_T and S_{L/2} every sample_stride sweeps.

    Deterministic for fixed (params, trajectory_index) on a fixed build.
    """
    rng = trajectory_rng(params, trajectory_index)
    state = initial_state(params)
    modes = state.modes
    burn = params.resolved_burn_steps
    meas = params.resolved_meas_steps
    stride = params.sample_stride
    stats = {"saturated": 0}

    step = 0
    for _ in range(burn):
        time_step(state, params, rng, tape=tape, step_index=step,
                  inplace=True, build_events=False, stats=stats)
        step += 1

    sample_steps = []
    st_vals = []
    sh_vals = []
    for k in range(meas):
        time_step(state, params, rng, tape=tape, step_index=step, inplace=True,
                  build_events=False, stats=stats)
        step += 1
        if (k + 1) % stride == 0:
            status = _kernels.qr_orthonormalize(modes)
            if status != _kernels.OK:
                raise NumericsError(f"trajectory {trajectory_index}: rank loss at step {step}")
            corr = correlation_matrix(state)
            st_vals.append(topological_ee(corr))
            sh_vals.append(bipartite_entropy(corr))
            sample_steps.append(step)
    st = np.asarray(st_vals)
    sh = np.asarray(sh_vals)
    if st.size == 0:
        raise ConfigError("measurement window produced no samples")
    return TrajectoryRecord(
        params=params,
        index=trajectory_index,
        seed=(params.master_seed, trajectory_index),
        sample_steps=np.asarray(sample_steps),
        st=st,
        shalf=sh,
        st_mean=float(st.mean()),
        shalf_mean=float(sh.mean()),
        n_saturated=stats["saturated"],
    )


# ---------------------------------------------------------------------------
# tape replay helpers (shared by the Gaussian and dense oracle paths)


def op_for_record(params, rec):
    if rec.kind == "D":
        return ParityOp.density(rec.site, params.L)
    return ParityOp.kitaev(rec.site, params.L, periodic=params.boundary == "periodic")


def theta_for_record(params, rec):
    """Readout and clamped theta encoded by a tape record (None if skipped)."""
    if not rec.scheduled:
        return None, None
    lam = params.lambda_d if rec.kind == "D" else params.lambda_k
    x = (lam if rec.branch else -lam) + params.delta * rec.z
    theta, _ = clamp_theta(lam * x / (2.0 * params.delta**2), params.theta_max)
    return x, theta


def replay_tape_gaussian(state, params, tape, observer=None):
    """Drive a Gaussian state through a recorded tape.

    observer(step_index, rec, op, m_before) is called for every scheduled
    record before the update is applied.
    """
    state = state.copy()
    for rec in tape:
        op = op_for_record(params, rec)
        if not rec.scheduled:
            continue
        if observer is not None:
            mr, _ = _kernels.parity_m(state.modes, op.a, op.b)
            observer(rec.step, rec, op, float(mr))
        _, theta = theta_for_record(params, rec)
        status = _kernels.apply_kraus_inplace(state.modes, op.a, op.b, theta)
        if status != _kernels.OK:
            raise NumericsError(f"rank loss replaying step {rec.step}")
    return state


def validate_tape_meta(params, tape):
    """Raise TapeError if a tape's header disagrees with params."""
    meta = tape.meta
    checks = {
        "L": str(params.L),
        "boundary": params.boundary,
        "sweep_order": params.sweep_order,
    }
    for key, expect in checks.items():
        if key in meta and meta[key] != expect:
            raise TapeError(f"tape header {key}={meta[key]} != run value {expect}")


def tape_meta(params):
    return {
        "L": str(params.L),
        "dt": repr(params.dt),
        "delta": repr(params.delta),
        "gamma_d": repr(params.gamma_d),
        "gamma_k": repr(params.gamma_k),
        "p_d": repr(params.p_d),
        "p_k": repr(params.p_k),
        "boundary": params.boundary,
        "sweep_order": params.sweep_order,
        "theta_max": repr(params.theta_max),
    }
