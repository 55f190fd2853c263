"""System-level Monte Carlo simulator of D2D pairs underlaying an OFDMA uplink.

The package models the coexistence of asynchronous device-to-device links
(OFDM or FBMC/OQAM) with synchronized cellular uplink users: spectral leakage
tables, clustered topologies, pathloss channels, SINR bookkeeping, Hungarian
RB assignment, water-filling power control and campaign/sweep drivers.
"""

from .waveform import (
    WaveformType, WaveformKind, OFDM, FBMC, parse_waveform,
    PrototypeFilter, build_phydyas_filter,
    InterferenceTable, BandKernels, TIME_SIM, PSD,
    table_from_time_sim, table_from_psd, build_all_tables,
    save_table, load_table,
    UnsupportedParameterError, TableFormatError, TableValidationError,
)
from .geometry import (
    ScenarioConfig, NodePlacement, Layout, ConfigurationError,
    sample_placement, sample_placement_at_distance,
    load_config, save_config, with_updates, placement_to_csv,
)
from .channel import (
    ChannelGains, los_probability, pathloss_db, gains_from_placement,
    gains_to_csv,
)
from .interference import (
    SpectrumMap, PowerAllocation, random_cu_map, uniform_cu_powers,
    cu_sinr, cu_sinr_all, omega_d2d_to_cu, d2d_to_cu_load_matrix,
    i_cu_at_d2d, i_cu_matrix, i_d2d_at, i_d2d_matrix,
    d2d_sinr_actual, d2d_sinr_predicted, d2d_sinr_matrices,
    cu_to_d2d_cost_matrix,
)
from .allocation import (
    Assignment, PowerLoadingResult, SolverStatus, InfeasibleAssignmentError,
    hungarian, cu_constraint_coefficients, power_loading, loading_objective,
    result_to_json, result_from_json, KKT_TOLERANCE,
)
from .simulation import (
    Case, SweepParameter, IterationResult, RateReport, EmptyReportError,
    rate_from_sinr, run_iteration, run_campaign, sweep, build_report,
    write_samples_csv, write_cdf_csv, write_sweep_csv,
    write_gnuplot_cdf, write_gnuplot_sweep,
)

__version__ = "0.1.0"
