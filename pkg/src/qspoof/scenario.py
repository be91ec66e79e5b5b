"""Radar link budget: engagement parameters -> effective noise photon numbers.

All quantities are SI. Quantization noise is expressed in photon-number
units, taking one least-significant bit as ``2**-bits`` of the mean photon
number arriving at the digitizer.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from pathlib import Path

HBAR = 1.054571817e-34  # J s
C_LIGHT = 299792458.0  # m / s


class OutOfModelError(ValueError):
    """Parameters fall outside the regime the model describes (e.g. tau >= 1)."""


@dataclass(frozen=True)
class RadarScenario:
    """A single engagement. ``bits_*`` of None means infinite ADC resolution."""

    range_m: float = 1000.0
    area_rx_m2: float = 1.0
    cross_section_m2: float = 0.01
    center_freq_hz: float = 100e9
    n_t_prime: float = 32.0
    pulse_width_s: float = 1e-6
    avg_power_w: float = 10e3
    bits_receiver: int | None = 32
    bits_spoofer: int | None = 32
    prf_hz: float = 500e3

    def __post_init__(self):
        for name in ("range_m", "area_rx_m2", "cross_section_m2", "center_freq_hz",
                     "pulse_width_s", "avg_power_w", "prf_hz"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise TypeError(f"{name} must be a number, got {value!r}")
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not (isinstance(self.n_t_prime, (int, float)) and self.n_t_prime >= 0
                and math.isfinite(self.n_t_prime)):
            raise ValueError(f"n_t_prime must be >= 0, got {self.n_t_prime!r}")
        for name in ("bits_receiver", "bits_spoofer"):
            bits = getattr(self, name)
            if bits is None:
                continue
            if isinstance(bits, bool) or not isinstance(bits, int) or bits < 1:
                raise ValueError(f"{name} must be a positive integer or null, got {bits!r}")

    @property
    def omega(self) -> float:
        return 2 * math.pi * self.center_freq_hz

    def replace(self, **changes) -> RadarScenario:
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> RadarScenario:
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown scenario field(s): {', '.join(unknown)}")
        return cls(**data)


DEFAULT_SCENARIO = RadarScenario()


def load_scenario(path) -> RadarScenario:
    """Read a JSON scenario file; missing fields take the W-band defaults."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ValueError(f"{path}: top level must be an object")
    try:
        return RadarScenario.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{path}: {exc}") from None


def transmissivity(sc: RadarScenario) -> float:
    """Round-trip power transfer ``(G_T / 4 pi R^2)(sigma A_R / 4 pi R^2)``."""
    wavelength = 2 * math.pi * C_LIGHT / sc.omega
    gain = sc.area_rx_m2 / wavelength**2
    spread = 4 * math.pi * sc.range_m**2
    tau = (gain / spread) * (sc.cross_section_m2 * sc.area_rx_m2 / spread)
    if tau >= 1.0:
        raise OutOfModelError(f"transmissivity {tau:.3g} >= 1 at range {sc.range_m} m")
    return tau


def mean_pulse_photons(sc: RadarScenario) -> float:
    """Average transmitted photon number, pulse energy over ``hbar omega``."""
    return sc.pulse_width_s * sc.avg_power_w / (HBAR * sc.omega)


def quantization_variance(path_tau: float, bits: int | None, sc: RadarScenario) -> float:
    """Variance of the digitization noise after a path of transmissivity ``path_tau``."""
    if bits is None:
        return 0.0
    if not (0.0 < path_tau < 1.0):
        raise ValueError(f"path transmissivity must lie in (0, 1), got {path_tau}")
    if bits < 1:
        raise ValueError(f"bits must be >= 1, got {bits}")
    return path_tau * math.ldexp(mean_pulse_photons(sc), -bits) / 12.0


def amplitude_prior_lambda(sc: RadarScenario) -> float:
    """Rate ``lambda`` of the transmit-amplitude prior ``(lambda/pi) exp(-lambda |a|^2)``.

    Calibrated so that ``1 / (2 lambda)`` is the mean pulse photon number.
    """
    return 1.0 / (2.0 * mean_pulse_photons(sc))


@dataclass(frozen=True)
class HypothesisPair:
    """Everything the decision problem depends on.

    ``n0``/``n1`` are the effective thermal numbers seen by the friendly
    receiver for a true echo and for a measure-and-prepare spoof. The channel
    fields are kept so the spoofing chain can be simulated explicitly.
    """

    n0: float
    n1: float
    tau: float
    xi: float
    xi_prime: float
    n_t_prime: float

    @property
    def sqrt_tau_alpha_scale(self) -> float:
        return math.sqrt(self.tau)

    @property
    def separation(self) -> float:
        """``n1 - n0`` computed without cancellation."""
        return math.sqrt(self.tau) * (1.0 + self.xi_prime / 2)

    @classmethod
    def from_channel(cls, tau: float, n_t_prime: float = 0.0, xi: float = 0.0,
                     xi_prime: float = 0.0) -> HypothesisPair:
        if not (0.0 < tau < 1.0):
            raise OutOfModelError(f"transmissivity must lie in (0, 1), got {tau}")
        if n_t_prime < 0 or xi < 0 or xi_prime < 0:
            raise ValueError("noise parameters must be >= 0")
        n0 = n_t_prime + xi / 2
        n1 = n0 + math.sqrt(tau) * (1.0 + xi_prime / 2)
        return cls(n0, n1, tau, xi, xi_prime, n_t_prime)


def hypothesis_noise_numbers(sc: RadarScenario) -> HypothesisPair:
    tau = transmissivity(sc)
    xi = quantization_variance(tau, sc.bits_receiver, sc)
    xi_prime = quantization_variance(math.sqrt(tau), sc.bits_spoofer, sc)
    return HypothesisPair.from_channel(tau, sc.n_t_prime, xi, xi_prime)
