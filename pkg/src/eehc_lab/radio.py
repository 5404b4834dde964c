"""Transceiver power chain and per-message radio energies.

All quantities are SI. Decibel inputs are kept as given (``*_db`` fields) and
converted to linear ratios once, when the parameter set is built.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .errors import ValidationError

SHORT = "short"
LONG = "long"


def db_to_linear(x: float) -> float:
    """Convert a decibel value to a linear power ratio."""
    x = float(x)
    if not math.isfinite(x):
        raise ValidationError("x", "finite", x)
    return 10.0 ** (x / 10.0)


@dataclass(frozen=True)
class RadioParams:
    """Radio constants; the defaults are the 915 MHz reference transceiver.

    ``bandwidth_hz=None`` means one hertz per bit of ``bit_rate``.
    """

    snr_min_db: float = 10.0
    noise_factor_db: float = 11.0
    thermal_noise_floor: float = 4.17e-21
    bandwidth_hz: float | None = None
    wavelength_m: float = 0.328
    antenna_gain_product: float = 0.01
    pa_efficiency: float = 0.2
    path_loss_exponent: float = 2.0
    bit_rate: float = 1e6
    electronics_power_w: float = 3.63e-3
    elec_energy_per_bit: float = 50e-9
    beamform_energy_per_bit: float = 5e-9
    long_range_amp: float = 0.0013e-12
    reference_distance_m: float = 0.1

    snr_min: float = field(init=False, repr=False, compare=False)
    noise_factor: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("snr_min_db", "noise_factor_db"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(name, "finite", getattr(self, name))
        if not 0.0 < self.pa_efficiency <= 1.0:
            raise ValidationError("pa_efficiency", "0 < pa_efficiency <= 1", self.pa_efficiency)
        positive = ("bit_rate", "wavelength_m", "antenna_gain_product", "reference_distance_m",
                    "thermal_noise_floor")
        for name in positive:
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(name, f"{name} > 0", value)
        if self.bandwidth_hz is not None and not (math.isfinite(self.bandwidth_hz) and self.bandwidth_hz > 0):
            raise ValidationError("bandwidth_hz", "bandwidth_hz > 0", self.bandwidth_hz)
        if not self.path_loss_exponent >= 2:
            raise ValidationError("path_loss_exponent", "path_loss_exponent >= 2", self.path_loss_exponent)
        for name in ("electronics_power_w", "elec_energy_per_bit", "beamform_energy_per_bit",
                     "long_range_amp"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValidationError(name, f"{name} >= 0", value)
        object.__setattr__(self, "snr_min", db_to_linear(self.snr_min_db))
        object.__setattr__(self, "noise_factor", db_to_linear(self.noise_factor_db))

    @property
    def bandwidth(self) -> float:
        """Effective channel noise bandwidth in Hz."""
        return self.bit_rate if self.bandwidth_hz is None else self.bandwidth_hz

    @property
    def rx_energy_per_bit(self) -> float:
        return self.elec_energy_per_bit + self.beamform_energy_per_bit

    def replace(self, **changes: Any) -> RadioParams:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, float]:
        """Flat document; ``bandwidth_hz`` is written resolved."""
        out = {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.init}
        out["bandwidth_hz"] = self.bandwidth
        return out

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> RadioParams:
        names = {f.name for f in dataclasses.fields(cls) if f.init}
        unknown = sorted(set(doc) - names)
        if unknown:
            raise ValidationError(unknown[0], "a known radio field")
        return cls(**{k: (None if v is None else float(v)) for k, v in doc.items()})


def receiver_sensitivity(p: RadioParams) -> float:
    """Minimum detectable received power in watts."""
    return p.snr_min * p.noise_factor * p.thermal_noise_floor * p.bandwidth


def _amplifier_gain(p: RadioParams, snr: float | None = None) -> float:
    """Watts radiated per metre**alpha of range, i.e. pa_power / d**alpha."""
    alpha = p.path_loss_exponent
    sensitivity = (p.snr_min if snr is None else snr) * p.noise_factor * p.thermal_noise_floor * p.bandwidth
    near_field_loss = (4.0 * math.pi / p.wavelength_m) ** alpha
    return (sensitivity * near_field_loss * (1.0 / p.reference_distance_m) ** alpha
            / (p.antenna_gain_product * p.pa_efficiency))


def _pow(d, e: float):
    return np.power(d, e) if isinstance(d, np.ndarray) else float(d) ** e


def _check_nonneg(name: str, value):
    arr = np.asarray(value, dtype=float)
    if np.any(~(arr >= 0)):
        raise ValidationError(name, f"{name} >= 0", value)


def pa_power(p: RadioParams, d):
    """Power drawn by the power amplifier to close a link of length ``d`` metres."""
    return per_bit_energy(p, d) * p.bit_rate


def tx_power(p: RadioParams, d):
    """Total transmit-path power: amplifier plus the fixed electronics draw."""
    return pa_power(p, d) + p.electronics_power_w


def per_bit_energy(p: RadioParams, d):
    """Short-range amplifier energy per bit at distance ``d`` (already includes d**alpha)."""
    _check_nonneg("d", d)
    return _amplifier_gain(p) * _pow(d, p.path_loss_exponent) / p.bit_rate


def tx_energy(p: RadioParams, l, d, range_class: str = SHORT):
    """Energy to transmit an ``l``-bit message over ``d`` metres.

    ``range_class="long"`` uses the fourth-power multipath amplifier constant
    (head to base station); ``"short"`` uses the RF-chain per-bit energy.
    """
    _check_nonneg("l", l)
    _check_nonneg("d", d)
    if range_class == LONG:
        amp = p.long_range_amp * _pow(d, 4.0)
    elif range_class == SHORT:
        amp = per_bit_energy(p, d)
    else:
        raise ValidationError("range_class", "one of 'short', 'long'", range_class)
    return l * p.elec_energy_per_bit + l * amp


def rx_energy(p: RadioParams, l):
    """Energy to receive (and beamform) an ``l``-bit message."""
    _check_nonneg("l", l)
    return l * (p.elec_energy_per_bit + p.beamform_energy_per_bit)
