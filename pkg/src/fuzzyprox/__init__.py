"""Leibniz bridge seminorms between fuzzy spheres and certified proximity bounds."""

__version__ = "0.1.0"

from .berezin import (
    BerezinChannel,
    berezin_channel,
    berezin_transform,
    delta_estimate,
    lower_operator,
    symbol_sup_norm,
    upper_symbol,
)
from .bridge import (
    AmalgamSpec,
    BridgeReport,
    amalgamate,
    bridge_norm_AB,
    bridge_norm_BB,
    combined_seminorm,
    gamma_estimates,
    rank_one_defect,
    verify_bridge,
)
from .distance import ProxReport, compress, gambit_bound, hausdorff_estimate, prox_upper_bound, pushforward_state
from .errors import (
    DegenerateAmalgamError,
    DimensionMismatchError,
    FuzzyProxError,
    InvalidParameterError,
    InvalidStateError,
    MissingConstantsError,
    UnsupportedDegreeError,
)
from .group import CosetPoint, Irrep, coherent_state, highest_weight_embedding, make_irrep
from .metric import (
    DirectSumSeminorm,
    State,
    function_lipschitz,
    matrix_lipschitz,
    random_state,
    state_metric,
)
from .sphere import FunctionSamples, QuadratureGrid, sphere_grid
from .sweep import SweepConfig, emit_report, run_sweep

__all__ = [
    "__version__",
    "AmalgamSpec",
    "BerezinChannel",
    "BridgeReport",
    "CosetPoint",
    "DegenerateAmalgamError",
    "DimensionMismatchError",
    "DirectSumSeminorm",
    "FunctionSamples",
    "FuzzyProxError",
    "InvalidParameterError",
    "InvalidStateError",
    "Irrep",
    "MissingConstantsError",
    "ProxReport",
    "QuadratureGrid",
    "State",
    "SweepConfig",
    "UnsupportedDegreeError",
    "amalgamate",
    "berezin_channel",
    "berezin_transform",
    "bridge_norm_AB",
    "bridge_norm_BB",
    "coherent_state",
    "combined_seminorm",
    "compress",
    "delta_estimate",
    "emit_report",
    "function_lipschitz",
    "gambit_bound",
    "gamma_estimates",
    "hausdorff_estimate",
    "highest_weight_embedding",
    "lower_operator",
    "make_irrep",
    "matrix_lipschitz",
    "prox_upper_bound",
    "pushforward_state",
    "random_state",
    "rank_one_defect",
    "run_sweep",
    "sphere_grid",
    "state_metric",
    "symbol_sup_norm",
    "upper_symbol",
    "verify_bridge",
]
