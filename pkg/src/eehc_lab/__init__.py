"""Energy model, analysis, sweeps and simulation for head-set clustered sensor networks."""

__version__ = "0.1.0"

from .analysis import (  # noqa: E402
    PAPER_DB_COMPAT,
    PHYSICAL,
    ClusterConfig,
    EnergyReport,
    analyze,
    election_energies,
    frame_energies,
    frames_supported,
    iterations_per_round,
    optimal_clusters_closed,
    optimal_clusters_numeric,
    optimal_clusters_raw,
    stage_energies,
    stage_fractions,
    start_energy,
)
from .errors import EEHCError, ElectionFailure, ValidationError  # noqa: E402
from .radio import (  # noqa: E402
    RadioParams,
    db_to_linear,
    pa_power,
    per_bit_energy,
    receiver_sensitivity,
    rx_energy,
    tx_energy,
    tx_power,
)
from .simulator import (  # noqa: E402
    SimMetrics,
    SimState,
    analytic_comparison,
    data_transfer_phase,
    election_phase,
    init_network,
    run_lifetime,
    run_round,
)
from .sweep import SweepSpec, SweepTable, figure_preset, run_sweep  # noqa: E402

__all__ = [
    "# noqa: E402",
    "ClusterConfig",
    "EEHCError",
    "ElectionFailure",
    "EnergyReport",
    "PAPER_DB_COMPAT",
    "PHYSICAL",
    "RadioParams",
    "SimMetrics",
    "SimState",
    "SweepSpec",
    "SweepTable",
    "ValidationError",
    "analytic_comparison",
    "analyze",
    "data_transfer_phase",
    "db_to_linear",
    "election_energies",
    "election_phase",
    "figure_preset",
    "frame_energies",
    "frames_supported",
    "init_network",
    "iterations_per_round",
    "optimal_clusters_closed",
    "optimal_clusters_numeric",
    "optimal_clusters_raw",
    "pa_power",
    "per_bit_energy",
    "receiver_sensitivity",
    "run_lifetime",
    "run_round",
    "run_sweep",
    "rx_energy",
    "stage_energies",
    "stage_fractions",
    "start_energy",
    "tx_energy",
    "tx_power",
]
