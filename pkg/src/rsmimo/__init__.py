"""Multi-cell massive MIMO downlink: pilot-contamination interference
decoding schemes, their achievable regions and max-min rate optimization."""

from .bounds import (
    GainTable,
    LayeredGainTable,
    PrecoderSpec,
    bound_value,
    gain_table_closed_zf,
    gain_table_mc,
    layered_bound_value,
    power_norm_mc,
    rzf_precoder,
    zf_power_norm_closed,
    zf_precoder,
)
from .channel import (
    CorrelationSpec,
    EstimationStats,
    cross_estimate_ratio,
    draw_channels,
    estimate_stats_correlated,
    exp_correlation_matrix,
    mmse_filter_apply,
    uncorrelated_alpha,
)
from .geometry import (
    FadingTensor,
    HexLayout,
    ShadowingSpec,
    UserDrop,
    build_hex_layout,
    large_scale_fading,
    path_loss_db,
    place_users,
    wrap_distance_3d,
)
from .harness import ExperimentConfig, ResultRow, figure_preset, rho_from_power, run_sweep
from .regions import (
    ModifiedMacPolytope,
    assemble_network_polytope,
    build_mac_polytope,
    build_modified_mac_polytope,
    dump_constraints,
    enumerate_rs_sets,
    enumerate_rs_sub_sets,
    enumerate_snd_sets,
)
from .simplex import SimplexError, solve_max_lp, solve_max_min_rate
from .symrate import (
    SymRateReport,
    average_split,
    max_sym_rs,
    max_sym_rs_fixed_split,
    max_sym_sd,
    max_sym_snd,
    max_sym_tin,
    max_sym_over_family,
    snd_product_oracle,
    split_family,
    split_grid,
)

__all__ = [name for name in dir() if not name.startswith("_")]
