"""Ground-to-satellite link budget for the classical and Rydberg receive chains.

Both chains reduce to an input-referred RF field noise density s in
(V/m)/sqrt(Hz); the per-sensor SNR is then (E_peak / (s sqrt(B)))^2. For the
classical antenna s^2 = 2 Z0 k T NF / A_eff, which reproduces
P_rx / (k T B NF) with P_rx = S A_eff.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np

from .constants import (
    BOLTZMANN,
    FREE_SPACE_IMPEDANCE,
    SPEED_OF_LIGHT,
    db_to_lin,
    lin_to_db,
    wavelength,
)

__all__ = [
    "OrbitClass",
    "LinkScenario",
    "ClassicalRxChain",
    "ReceiverModel",
    "orbit_class",
    "path_gain_db",
    "incident_field_amplitude",
    "power_flux_density",
    "classical_rx_snr",
    "raqr_rx_snr",
    "calibrate_eirp",
    "link_sweep_rows",
]

LEO_MIN = 160e3
LEO_MAX = 2000e3
GEO = 35786e3


class OrbitClass(enum.Enum):
    LEO = "LEO"
    MEO = "MEO"
    GEO = "GEO"


def orbit_class(distance):
    """LEO up to 2000 km, GEO at 35786 km and beyond, MEO in between."""
    if distance <= LEO_MAX:
        return OrbitClass.LEO
    if distance < GEO:
        return OrbitClass.MEO
    return OrbitClass.GEO


@dataclass(frozen=True)
class LinkScenario:
    distance: float  # m
    carrier_frequency: float  # Hz
    bandwidth: float  # Hz
    eirp: float  # dBW

    def __post_init__(self):
        if not self.distance > 0:
            raise ValueError("distance must be positive")
        if not self.carrier_frequency > 0:
            raise ValueError("carrier_frequency must be positive")
        if not self.bandwidth > 0:
            raise ValueError("bandwidth must be positive")

    @property
    def orbit_class(self):
        return orbit_class(self.distance)

    def at(self, distance=None, eirp=None):
        kw = {}
        if distance is not None:
            kw["distance"] = distance
        if eirp is not None:
            kw["eirp"] = eirp
        return replace(self, **kw)


@dataclass(frozen=True)
class ClassicalRxChain:
    antenna_gain: float = 5.5  # dBi
    antenna_efficiency: float = 0.7
    noise_figure: float = 6.0  # dB
    lna_gain: float = 60.0  # dB
    lna_noise_temperature: float = 100.0  # K
    ambient_temperature: float = 290.0  # K

    def __post_init__(self):
        if not 0 < self.antenna_efficiency <= 1:
            raise ValueError("antenna_efficiency must be in (0, 1]")
        if self.lna_noise_temperature <= 0 or self.ambient_temperature <= 0:
            raise ValueError("temperatures must be positive")

    def effective_aperture(self, carrier_frequency):
        lam = wavelength(carrier_frequency)
        return self.antenna_efficiency * db_to_lin(self.antenna_gain) * lam**2 / (4 * np.pi)

    def noise_psd(self):
        """Input-referred noise PSD k*T_room*NF in W/Hz."""
        return BOLTZMANN * self.ambient_temperature * db_to_lin(self.noise_figure)


def path_gain_db(distance, carrier):
    """Free-space path gain in dB (negative).

    20 log10(c / 4 pi) + 20 log10(1 / d) + 20 log10(1 / f_c).
    """
    distance = np.asarray(distance, dtype=float)
    carrier = np.asarray(carrier, dtype=float)
    if np.any(distance <= 0) or np.any(carrier <= 0):
        raise ValueError("distance and carrier must be positive")
    out = 20 * np.log10(SPEED_OF_LIGHT / (4 * np.pi)) + 20 * np.log10(1 / distance) + 20 * np.log10(1 / carrier)
    return float(out) if out.ndim == 0 else out


def power_flux_density(scenario):
    """Power density EIRP / (4 pi d^2) in W/m^2."""
    return db_to_lin(scenario.eirp) / (4 * np.pi * scenario.distance**2)


def incident_field_amplitude(scenario):
    """Peak incident field sqrt(2 S Z0) in V/m."""
    return float(np.sqrt(2 * power_flux_density(scenario) * FREE_SPACE_IMPEDANCE))


def classical_rx_snr(scenario, chain):
    """Per-antenna SNR in dB of the classical chain.

    Received power S * A_eff against k T_room B NF. The LNA gain scales
    signal and noise alike and drops out.
    """
    p_rx = power_flux_density(scenario) * chain.effective_aperture(scenario.carrier_frequency)
    noise = chain.noise_psd() * scenario.bandwidth
    return float(lin_to_db(p_rx / noise))


def raqr_rx_snr(scenario, sensitivity):
    """Per-sensor SNR in dB of a field sensor with the given sensitivity.

    ``sensitivity`` is the minimum detectable field in (V/m)/sqrt(Hz).
    """
    if not sensitivity > 0:
        raise ValueError("sensitivity must be positive")
    e = incident_field_amplitude(scenario)
    return float(lin_to_db((e / (sensitivity * np.sqrt(scenario.bandwidth))) ** 2))


@dataclass(frozen=True)
class ReceiverModel:
    """A receive chain reduced to its input-referred field noise density."""

    name: str
    field_sensitivity: float  # (V/m)/sqrt(Hz)

    def __post_init__(self):
        if not self.field_sensitivity > 0:
            raise ValueError("field_sensitivity must be positive")

    @classmethod
    def classical(cls, chain, carrier_frequency, name="classical"):
        s2 = 2 * FREE_SPACE_IMPEDANCE * chain.noise_psd() / chain.effective_aperture(carrier_frequency)
        return cls(name, float(np.sqrt(s2)))

    @classmethod
    def raqr(cls, sensitivity, name="raqr"):
        return cls(name, float(sensitivity))

    def snr_db(self, scenario):
        return raqr_rx_snr(scenario, self.field_sensitivity)

    def snr_linear(self, scenario):
        return float(db_to_lin(self.snr_db(scenario)))

    def advantage_db(self, other):
        """SNR advantage of this chain over ``other`` in dB, at any distance."""
        return float(20 * np.log10(other.field_sensitivity / self.field_sensitivity))


def calibrate_eirp(chain, distance, carrier_frequency, bandwidth, target_snr_db):
    """EIRP (dBW) that puts the classical chain at ``target_snr_db``."""
    probe = LinkScenario(distance, carrier_frequency, bandwidth, 0.0)
    return target_snr_db - classical_rx_snr(probe, chain)


def link_sweep_rows(distances, carrier_frequency, bandwidth, eirp, chain, raqr_sensitivity):
    """Rows for the link sweep CSV.

    Columns: distance_km, orbit_class, path_gain_db, snr_classical_db,
    snr_raqr_db.
    """
    rows = []
    for d in distances:
        sc = LinkScenario(float(d), carrier_frequency, bandwidth, eirp)
        rows.append(
            (
                d / 1e3,
                sc.orbit_class.value,
                path_gain_db(d, carrier_frequency),
                classical_rx_snr(sc, chain),
                raqr_rx_snr(sc, raqr_sensitivity),
            )
        )
    return rows
