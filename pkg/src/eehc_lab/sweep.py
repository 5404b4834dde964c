"""Grid sweeps over the analytical model, plus the per-figure presets."""
from __future__ import annotations

import dataclasses
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .analysis import (
    PAPER_DB_COMPAT, PHYSICAL, SNR_MODES, ClusterConfig, EnergyReport, analyze, closed_form_scale,
    optimal_clusters_closed, optimal_clusters_numeric, optimal_clusters_raw,
)
from .errors import ValidationError
from .radio import RadioParams, per_bit_energy

MAX_ROWS = 1_000_000
THREADS_ENV = "EEHC_LAB_THREADS"

RADIO_FIELDS = tuple(f.name for f in dataclasses.fields(RadioParams) if f.init)
CLUSTER_FIELDS = tuple(f.name for f in dataclasses.fields(ClusterConfig))
METRICS = EnergyReport.HEADER + (
    "k_opt_closed",      # closed form, scaled, unrounded
    "k_opt_closed_int",  # closed form, scaled, rounded and clamped to [1, n]
    "k_opt_numeric",
    "e_start_min",
    "per_bit_energy",    # short-range amplifier energy per bit at d_intra
    "feasible",
)

# Scenario constants used wherever a figure leaves them unstated.
DEFAULT_SCENARIO = ClusterConfig(n=1000, k=14, m=6, l=2000, n_frames=10000, d_bs=150,
                                 d_intra=25, field_side=100)


@dataclass
class SweepSpec:
    """A cross-product grid over radio/cluster fields and the metrics to tabulate.

    Axes are expanded row-major: the first axis varies slowest. ``feasible`` is
    always the last output column. ``k_scale`` multiplies the closed-form
    cluster count (see :func:`calibrated_scale`).
    """

    axes: list[tuple[str, list]]
    outputs: list[str]
    base_radio: RadioParams = field(default_factory=RadioParams)
    base_cluster: ClusterConfig = DEFAULT_SCENARIO
    snr_mode: str = PHYSICAL
    k_scale: float = 1.0
    name: str | None = None
    notes: str = ""

    def __post_init__(self):
        self.axes = [(str(name), list(values)) for name, values in self.axes]
        for name, values in self.axes:
            if name not in RADIO_FIELDS and name not in CLUSTER_FIELDS:
                raise ValidationError(f"axes.{name}", "a RadioParams or ClusterConfig field")
            if not values:
                raise ValidationError(f"axes.{name}", "non-empty value list")
        if len({name for name, _ in self.axes}) != len(self.axes):
            raise ValidationError("axes", "distinct parameter names")
        outputs = [o for o in self.outputs if o != "feasible"]
        for o in outputs:
            if o not in METRICS:
                raise ValidationError(f"outputs.{o}", f"one of {METRICS}")
        self.outputs = outputs + ["feasible"]
        if self.snr_mode not in SNR_MODES:
            raise ValidationError("snr_mode", f"one of {SNR_MODES}", self.snr_mode)
        if self.n_rows > MAX_ROWS:
            raise ValidationError("axes", f"grid size <= {MAX_ROWS}", self.n_rows)

    @property
    def n_rows(self) -> int:
        return math.prod(len(v) for _, v in self.axes)

    @property
    def header(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.axes) + tuple(self.outputs)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "axes": [[name, list(values)] for name, values in self.axes],
            "outputs": list(self.outputs),
            "base_radio": self.base_radio.to_dict(),
            "base_cluster": self.base_cluster.to_dict(),
            "snr_mode": self.snr_mode,
            "k_scale": self.k_scale,
            "notes": self.notes,
        }


@dataclass
class SweepTable:
    header: tuple[str, ...]
    rows: list[tuple]

    def column(self, name: str) -> np.ndarray:
        i = self.header.index(name)
        return np.array([row[i] for row in self.rows], dtype=float)


def _point_params(spec: SweepSpec, assignment: dict) -> tuple[RadioParams, ClusterConfig]:
    radio = {k: v for k, v in assignment.items() if k in RADIO_FIELDS}
    cluster = {k: v for k, v in assignment.items() if k in CLUSTER_FIELDS}
    p = spec.base_radio.replace(**radio) if radio else spec.base_radio
    cfg = spec.base_cluster.replace(**cluster) if cluster else spec.base_cluster
    return p, cfg


def evaluate_point(spec: SweepSpec, values: Sequence) -> tuple:
    """Output columns for one grid point (axis values in axis order)."""
    assignment = dict(zip((name for name, _ in spec.axes), values))
    try:
        p, cfg = _point_params(spec, assignment)
    except ValidationError:
        return (math.nan,) * (len(spec.outputs) - 1) + (0,)

    report = None
    numeric = None
    out = []
    for name in spec.outputs[:-1]:
        if name in EnergyReport.HEADER:
            report = report or analyze(cfg, p)
            out.append(getattr(report, name))
        elif name == "k_opt_closed":
            out.append(spec.k_scale * optimal_clusters_raw(cfg.n, p, cfg.d_bs, cfg.field_side,
                                                           spec.snr_mode))
        elif name == "k_opt_closed_int":
            out.append(optimal_clusters_closed(cfg.n, p, cfg.d_bs, cfg.field_side, spec.snr_mode,
                                               spec.k_scale))
        elif name in ("k_opt_numeric", "e_start_min"):
            numeric = numeric or optimal_clusters_numeric(cfg, p)
            out.append(numeric[0] if name == "k_opt_numeric" else numeric[1])
        elif name == "per_bit_energy":
            out.append(per_bit_energy(p, cfg.d_intra))
    return tuple(out) + (1,)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def run_sweep(spec: SweepSpec, threads: int | None = None) -> SweepTable:
    """Evaluate every grid point.

    Infeasible points (e.g. ``m > n/k``) keep their row with NaN outputs and
    ``feasible = 0``. Row order is row-major regardless of ``threads``.
    """
    grid = list(itertools.product(*(values for _, values in spec.axes)))
    threads = _threads() if threads is None else max(1, threads)
    if threads == 1 or len(grid) < 2:
        results = [evaluate_point(spec, values) for values in grid]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda v: evaluate_point(spec, v), grid))
    rows = [tuple(values) + res for values, res in zip(grid, results)]
    return SweepTable(header=spec.header, rows=rows)


def calibrated_scale(p: RadioParams, cfg: ClusterConfig, target_k: float,
                     snr_mode: str = PHYSICAL) -> float:
    """Closed-form multiplier anchoring the scenario ``(p, cfg)`` at ``target_k`` clusters."""
    return closed_form_scale(target_k, cfg.n, p, cfg.d_bs, cfg.field_side, snr_mode)


# -- figure presets ---------------------------------------------------------

K_AXIS = list(range(1, 51))
M_AXIS = list(range(1, 21))
K_OPT_OUTPUTS = ["k_opt_closed", "k_opt_closed_int", "k_opt_numeric", "e_start_min"]
ROLE_OUTPUTS = ["e_ch_elec", "e_nonch_elec", "e_ch_frame", "e_nonch_frame", "e_ch_data",
                "e_nonch_data", "e_start"]


def _fig3a():
    base = RadioParams()
    return SweepSpec(
        axes=[("m", M_AXIS), ("n", [1000, 1500, 2000])], outputs=K_OPT_OUTPUTS,
        k_scale=calibrated_scale(base, DEFAULT_SCENARIO, 14),
        notes="closed form anchored at k=14 for n=1000; m spans 1..20",
    )


def _fig3b():
    base = RadioParams()
    return SweepSpec(
        axes=[("m", [100, 200, 300]), ("n", [1000, 1500, 2000])], outputs=K_OPT_OUTPUTS,
        k_scale=calibrated_scale(base, DEFAULT_SCENARIO, 14),
        notes="generating procedure of the published curve is unknown; grid only",
    )


def _fig5():
    return SweepSpec(
        axes=[("m", M_AXIS), ("d_bs", [100, 150, 200])],
        outputs=["e_ch_data", "e_nonch_data"],
        notes="network diameter mapped to d_bs; k left at the default 14",
    )


def _fig6():
    base = RadioParams()
    return SweepSpec(
        axes=[("m", M_AXIS), ("snr_min_db", [10.0, 20.0, 30.0])], outputs=K_OPT_OUTPUTS,
        snr_mode=PAPER_DB_COMPAT,
        k_scale=calibrated_scale(base, DEFAULT_SCENARIO, 11, PAPER_DB_COMPAT),
        notes="SNR enters as its dB number; anchored at k=11 for 10 dB",
    )


def _fig7():
    base = RadioParams(pa_efficiency=0.6)
    return SweepSpec(
        axes=[("m", M_AXIS), ("pa_efficiency", [0.6, 0.4, 0.2])], outputs=K_OPT_OUTPUTS,
        k_scale=calibrated_scale(base, DEFAULT_SCENARIO, 9),
        notes="closed form anchored at k=9 for pa_efficiency=0.6",
    )


def _fig8():
    return SweepSpec(axes=[("k", K_AXIS), ("d_bs", [150.0, 400.0])], outputs=ROLE_OUTPUTS,
                     base_cluster=DEFAULT_SCENARIO.replace(m=1))


def _fig9(m):
    def build():
        return SweepSpec(axes=[("k", K_AXIS), ("n_frames", [10000.0, 25000.0, 50000.0])],
                         outputs=["e_start", "e_ch_data", "e_nonch_data"],
                         base_cluster=DEFAULT_SCENARIO.replace(m=m))
    return build


def _fig10(m):
    def build():
        return SweepSpec(axes=[("k", K_AXIS)], outputs=ROLE_OUTPUTS,
                         base_cluster=DEFAULT_SCENARIO.replace(m=m, n_frames=10000))
    return build


def _fig11():
    return SweepSpec(axes=[("k", K_AXIS), ("d_bs", [100.0, 150.0, 200.0, 250.0, 300.0])],
                     outputs=["e_start"], base_cluster=DEFAULT_SCENARIO.replace(m=1),
                     notes="network diameter mapped to d_bs")


def _fig12():
    return SweepSpec(
        axes=[("k", K_AXIS), ("d_bs", [100.0, 200.0, 300.0]),
              ("n_frames", [10000.0, 25000.0, 50000.0])],
        outputs=["e_start"], base_cluster=DEFAULT_SCENARIO.replace(m=1),
        notes="network diameter mapped to d_bs",
    )


def _fig13():
    return SweepSpec(axes=[("k", K_AXIS), ("d_bs", [100.0, 200.0, 300.0])],
                     outputs=["e_start", "e_ch_data", "e_nonch_data"],
                     base_cluster=DEFAULT_SCENARIO.replace(m=3),
                     notes="network diameter mapped to d_bs")


def _fig14():
    return SweepSpec(axes=[("k", K_AXIS)], outputs=["e_ch_data", "e_nonch_data", "e_start"],
                     base_cluster=DEFAULT_SCENARIO.replace(m=3))


_PRESETS = {
    "fig3a": _fig3a, "fig3b": _fig3b, "fig5": _fig5, "fig6": _fig6, "fig7": _fig7,
    "fig8": _fig8, "fig9a": _fig9(1), "fig9b": _fig9(3), "fig10a": _fig10(1),
    "fig10b": _fig10(3), "fig11": _fig11, "fig12": _fig12, "fig13": _fig13, "fig14": _fig14,
}
PRESET_NAMES = tuple(_PRESETS)


def figure_preset(name: str) -> SweepSpec:
    """Sweep spec reproducing the axes of one published figure."""
    try:
        build = _PRESETS[name]
    except KeyError:
        raise ValidationError("preset", f"one of {', '.join(PRESET_NAMES)}", name) from None
    spec = build()
    spec.name = name
    return spec


def crossover_k(table: SweepTable, a: str = "e_ch_data", b: str = "e_nonch_data") -> float | None:
    """First k at which ``a - b`` changes sign, interpolated linearly; None if it never does."""
    k = table.column("k")
    diff = table.column(a) - table.column(b)
    ok = np.isfinite(diff)
    k, diff = k[ok], diff[ok]
    for i in range(1, len(diff)):
        if diff[i - 1] == 0:
            return float(k[i - 1])
        if np.sign(diff[i - 1]) != np.sign(diff[i]):
            return float(k[i - 1] + (k[i] - k[i - 1]) * diff[i - 1] / (diff[i - 1] - diff[i]))
    return None
