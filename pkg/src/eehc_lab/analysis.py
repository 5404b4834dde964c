"""Closed-form energy accounting for head-set clustering.

One iteration is an election phase followed by ``n_frames`` data frames.
A round is enough iterations for every node to sit in a head-set once.
Every per-role energy here is in joules.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Any, Mapping, NamedTuple

import numpy as np

from .errors import ValidationError
from .radio import LONG, SHORT, RadioParams, _amplifier_gain, rx_energy, tx_energy

PHYSICAL = "physical"
PAPER_DB_COMPAT = "paper_db_compat"
SNR_MODES = (PHYSICAL, PAPER_DB_COMPAT)


def _as_count(name: str, value) -> int:
    if isinstance(value, bool) or not float(value).is_integer():
        raise ValidationError(name, f"{name} is an integer", value)
    return int(value)


@dataclass(frozen=True)
class ClusterConfig:
    """Network-level scenario: sizes, message length and distances."""

    n: int = 1000
    k: int = 14
    m: int = 6
    l: float = 2000.0
    n_frames: float = 10000.0
    d_bs: float = 150.0
    d_intra: float = 25.0
    field_side: float = 100.0

    def __post_init__(self):
        for name in ("n", "k", "m"):
            object.__setattr__(self, name, _as_count(name, getattr(self, name)))
        for name in ("l", "n_frames", "d_bs", "d_intra", "field_side"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(name, "finite", value)
            object.__setattr__(self, name, value)
        if self.n < 1:
            raise ValidationError("n", "n >= 1", self.n)
        if not 1 <= self.k <= self.n:
            raise ValidationError("k", "1 <= k <= n", self.k)
        if self.m < 1:
            raise ValidationError("m", "m >= 1", self.m)
        if self.n < self.k * self.m:
            raise ValidationError("m", "m <= n/k", self.m)
        if not self.l > 0:
            raise ValidationError("l", "l > 0", self.l)
        if self.n_frames < 0:
            raise ValidationError("n_frames", "n_frames >= 0", self.n_frames)
        for name in ("d_bs", "d_intra", "field_side"):
            if getattr(self, name) < 0:
                raise ValidationError(name, f"{name} >= 0", getattr(self, name))

    @property
    def cluster_size(self) -> float:
        return self.n / self.k

    def replace(self, **changes: Any) -> ClusterConfig:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, float]:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> ClusterConfig:
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(doc) - names)
        if unknown:
            raise ValidationError(unknown[0], "a known cluster field")
        return cls(**doc)


class _Terms(NamedTuple):
    ch_elec: Any
    nonch_elec: Any
    ch_frame: Any
    nonch_frame: Any
    f1: Any
    f2: Any
    ch_data: Any
    nonch_data: Any
    start: Any


def _terms(p: RadioParams, n, k, m, l, n_frames, d_bs, d_intra) -> _Terms:
    # Plain arithmetic so k (or anything else) may be a numpy array.
    member_tx = tx_energy(p, l, d_intra, SHORT)
    bs_tx = tx_energy(p, l, d_bs, LONG)
    rx = rx_energy(p, l)
    size = n / k
    ch_elec = member_tx + (size - 1) * rx
    nonch_elec = member_tx + k * rx
    ch_frame = bs_tx + (size - m) * rx
    nonch_frame = member_tx
    senders = size - m
    f1 = (1 / (senders + 1)) * (1 / k)
    f2 = (senders / (senders + 1)) * (1 / k)
    ch_data = f1 * n_frames * ch_frame
    nonch_data = f2 * n_frames * nonch_frame
    start = (ch_elec + nonch_elec) / m + (n_frames / m) * (f1 * ch_frame + f2 * nonch_frame)
    return _Terms(ch_elec, nonch_elec, ch_frame, nonch_frame, f1, f2, ch_data, nonch_data, start)


def _cfg_terms(cfg: ClusterConfig, p: RadioParams) -> _Terms:
    return _terms(p, cfg.n, cfg.k, cfg.m, cfg.l, cfg.n_frames, cfg.d_bs, cfg.d_intra)


def election_energies(cfg: ClusterConfig, p: RadioParams) -> tuple[float, float]:
    """Election-phase energy of a cluster head and of an ordinary node.

    The head broadcasts once and hears every other member of its cluster;
    an ordinary node hears all k head broadcasts and sends one join message.
    """
    t = _cfg_terms(cfg, p)
    return t.ch_elec, t.nonch_elec


def frame_energies(cfg: ClusterConfig, p: RadioParams) -> tuple[float, float]:
    """Per-frame energy of the active head and of a sending member."""
    t = _cfg_terms(cfg, p)
    return t.ch_frame, t.nonch_frame


def stage_fractions(cfg: ClusterConfig) -> tuple[float, float]:
    """Head-set and member shares (f1, f2) of one data-transfer stage; f1 + f2 = 1/k."""
    senders = cfg.n / cfg.k - cfg.m
    if not senders + 1 >= 1:
        raise ValidationError("m", "n/k - m + 1 >= 1", cfg.m)
    f1 = (1 / (senders + 1)) * (1 / cfg.k)
    f2 = (senders / (senders + 1)) * (1 / cfg.k)
    return f1, f2


def stage_energies(cfg: ClusterConfig, p: RadioParams) -> tuple[float, float]:
    stage_fractions(cfg)
    t = _cfg_terms(cfg, p)
    return t.ch_data, t.nonch_data


def start_energy(cfg: ClusterConfig, p: RadioParams) -> float:
    """Initial per-node battery meant to last one round."""
    return _cfg_terms(cfg, p).start


class FramesSupported(NamedTuple):
    frames: float
    insufficient: bool


def frames_supported(e_start: float, cfg: ClusterConfig, p: RadioParams) -> FramesSupported:
    """Invert :func:`start_energy` for the frame count a battery of ``e_start`` pays for.

    The count is real-valued; floor it before scheduling whole frames. A
    battery that cannot cover the election phase gives ``frames=0`` with
    ``insufficient=True``.
    """
    t = _cfg_terms(cfg, p)
    per_frame = t.f1 * t.ch_frame + t.f2 * t.nonch_frame
    if not per_frame > 0:
        raise ValidationError("cfg", "f1*E_CH/frame + f2*E_nonCH/frame > 0")
    frames = (cfg.m * e_start - t.ch_elec - t.nonch_elec) / per_frame
    if frames < 0:
        return FramesSupported(0.0, True)
    return FramesSupported(frames, False)


def iterations_per_round(cfg: ClusterConfig) -> int:
    """Iterations needed for every node to join a head-set once: ceil(n / (k m))."""
    per_iteration = cfg.k * cfg.m
    if per_iteration == 0:
        raise ValidationError("k*m", "k*m > 0")
    return -(-cfg.n // per_iteration)


def divides_evenly(cfg: ClusterConfig) -> bool:
    """False when ``iterations_per_round`` had to round up."""
    return cfg.n % (cfg.k * cfg.m) == 0


@dataclass(frozen=True)
class EnergyReport:
    e_ch_elec: float
    e_nonch_elec: float
    e_ch_frame: float
    e_nonch_frame: float
    e_ch_data: float
    e_nonch_data: float
    e_start: float
    f1: float
    f2: float
    iterations_per_round: int

    HEADER = ("e_ch_elec", "e_nonch_elec", "e_ch_frame", "e_nonch_frame", "e_ch_data",
              "e_nonch_data", "e_start", "f1", "f2", "iterations_per_round")

    def as_row(self) -> tuple:
        return tuple(getattr(self, name) for name in self.HEADER)


def analyze(cfg: ClusterConfig, p: RadioParams) -> EnergyReport:
    """All per-role energies for one scenario."""
    t = _cfg_terms(cfg, p)
    return EnergyReport(
        e_ch_elec=t.ch_elec, e_nonch_elec=t.nonch_elec,
        e_ch_frame=t.ch_frame, e_nonch_frame=t.nonch_frame,
        e_ch_data=t.ch_data, e_nonch_data=t.nonch_data,
        e_start=t.start, f1=t.f1, f2=t.f2,
        iterations_per_round=iterations_per_round(cfg),
    )


def optimal_clusters_raw(n: float, p: RadioParams, d: float, field_side: float,
                         snr_mode: str = PHYSICAL) -> float:
    """Unrounded closed-form cluster count.

    ``k = sqrt(n / 2pi) * sqrt(eps_s(d)) * field_side`` where ``eps_s(d)`` is
    the short-range amplifier energy per bit at distance ``d``. In
    ``paper_db_compat`` mode the SNR enters as its decibel number instead of
    the linear ratio; at 10 dB the two coincide.
    """
    if not n >= 1:
        raise ValidationError("n", "n >= 1", n)
    if d < 0:
        raise ValidationError("d", "d >= 0", d)
    if snr_mode == PHYSICAL:
        snr = p.snr_min
    elif snr_mode == PAPER_DB_COMPAT:
        snr = p.snr_min_db
        if not snr > 0:
            raise ValidationError("snr_min_db", "snr_min_db > 0 in paper_db_compat mode", snr)
    else:
        raise ValidationError("snr_mode", f"one of {SNR_MODES}", snr_mode)
    eps = _amplifier_gain(p, snr) * d ** p.path_loss_exponent / p.bit_rate
    return math.sqrt(n / (2 * math.pi)) * math.sqrt(eps) * field_side


def closed_form_scale(target_k: float, n: float, p: RadioParams, d: float, field_side: float,
                      snr_mode: str = PHYSICAL) -> float:
    """Multiplier that makes the closed form return ``target_k`` for this anchor scenario."""
    raw = optimal_clusters_raw(n, p, d, field_side, snr_mode)
    if raw <= 0:
        raise ValidationError("d", "d > 0 for calibration", d)
    return target_k / raw


def optimal_clusters_closed(n: int, p: RadioParams, d: float, field_side: float,
                            snr_mode: str = PHYSICAL, scale: float = 1.0) -> int:
    """Closed-form cluster count, rounded half-up and clamped to [1, n]."""
    raw = scale * optimal_clusters_raw(n, p, d, field_side, snr_mode)
    return int(min(max(math.floor(raw + 0.5), 1), n))


def optimal_clusters_numeric(cfg: ClusterConfig, p: RadioParams,
                             k_range: tuple[int, int] | None = None) -> tuple[int, float]:
    """Cluster count minimising the start energy, by exhaustive scan.

    Every integer k in ``k_range`` (inclusive, default ``1..n``) with
    ``n/k >= m`` is evaluated; ties go to the smaller k.

    Returns
    -------
    (k, e_start) at the minimum.
    """
    lo, hi = (1, cfg.n) if k_range is None else (int(k_range[0]), int(k_range[1]))
    if lo < 1 or hi > cfg.n or lo > hi:
        raise ValidationError("k_range", "1 <= k_lo <= k_hi <= n", (lo, hi))
    ks = np.arange(lo, hi + 1)
    ks = ks[ks * cfg.m <= cfg.n]
    if ks.size == 0:
        raise ValidationError("k_range", "contains a k with n/k >= m", (lo, hi))
    kf = ks.astype(float)
    energy = _terms(p, float(cfg.n), kf, float(cfg.m), cfg.l, cfg.n_frames, cfg.d_bs,
                    cfg.d_intra).start
    i = int(np.argmin(energy))
    return int(ks[i]), float(energy[i])
