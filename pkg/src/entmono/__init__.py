"""Entanglement monogamy diagnostics for small multiqubit and 2 x d states."""

__version__ = "0.1.0"

from .exceptions import EntmonoError, InvalidStateError, NumericError, ShapeError, SizeError
from .measures import (
    ClampedPairQuantities,
    FefResult,
    clamp_pair_quantities,
    concurrence_pure,
    concurrence_two_qubit,
    fef,
    fef_2xd,
    fef_pure,
    fef_two_qubit,
    fidelity_from_fef,
)
from .monogamy import (
    CounterexampleRow,
    MonogamyReport,
    ckw_residual,
    counterexample_row,
    fef_monogamy_residual,
    fidelity_monogamy_residual,
    gamma_sweep,
)
from .states import (
    DensityOperator,
    PureState,
    SigmaGammaParams,
    TwoParamClassParams,
    bell_state,
    embed_qubit_op,
    haar_pure,
    random_density,
    schmidt,
    sigma_gamma_pair,
    sigma_gamma_state,
    tilde_bell_state,
    two_param_state,
)
from .telesim import TeleportChannel, TeleportEstimate, build_channel, exact_average_fidelity, mc_average_fidelity
