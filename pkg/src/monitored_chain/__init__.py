"""Measurement-only dynamics of a Majorana chain under tunable-strength
parity checks, with topological-entanglement scaling analysis."""

__version__ = "0.1.0"

from .entanglement import (  # noqa: F401
    LOG2,
    Partition,
    bipartite_entropy,
    correlation_matrix,
    subsystem_entropy,
    topological_ee,
)
from .errors import ConfigError, NumericsError, TapeError  # noqa: F401
from .gaussian import (  # noqa: F401
    GaussianState,
    ParityOp,
    THETA_MAX,
    apply_kraus,
    checkerboard_state,
    from_uv,
    init_product_state,
    orthonormalize,
    parity_expectation,
    product_state,
)
from .monitoring import (  # noqa: F401
    MeasurementEvent,
    ProtocolParams,
    TrajectoryRecord,
    measurement_event,
    run_trajectory,
    sample_pointer,
    time_step,
)
from .tape import RandomnessTape, TapeRecord  # noqa: F401
