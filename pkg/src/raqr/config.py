"""Strict INI configuration.

Keys carry their unit as a suffix (``_hz``, ``_mw``, ``_km``...) and are
converted to SI on load; cyclic frequencies given in Hz become rad/s where
the physics needs angular rates. Unknown sections or keys are errors, so a
typo can never silently fall back to a default.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .atomic import AtomicSystem, Detection, OpticalDrive, PhotoReceiver, RfDrive
from .channel import UlaGeometry
from .constants import ATOMIC_DIPOLE_UNIT, TWO_PI
from .detection import Detector, PilotConfig, StoppingRule
from .link import ClassicalRxChain
from .metrics import SensingConfig
from .network import ConstellationConfig

__all__ = ["ConfigError", "Config", "load_config", "default_config_path", "SCHEMA"]


class ConfigError(ValueError):
    """Invalid, incomplete or unreadable configuration."""


def _float_list(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


def _int_list(text):
    return tuple(int(v) for v in text.replace(",", " ").split())


def _str_list(text):
    return tuple(v for v in text.replace(",", " ").split())


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _scaled(factor):
    return lambda text: float(text) * factor


_F = float
_I = int
_HZ_TO_RAD = _scaled(TWO_PI)
_OPT_F = lambda text: None if text.strip().lower() in ("", "auto", "none") else float(text)  # noqa: E731

# section -> key -> (parser, default text)
SCHEMA = {
    "atomic": {
        "dipole_12_qa0": (_scaled(ATOMIC_DIPOLE_UNIT), "2.2327"),
        "dipole_23_qa0": (_scaled(ATOMIC_DIPOLE_UNIT), "0.0226"),
        "dipole_34_qa0": (_scaled(ATOMIC_DIPOLE_UNIT), "1443.45"),
        "decay_2_hz": (_HZ_TO_RAD, "5.2e6"),
        "decay_3_hz": (_HZ_TO_RAD, "3.9e3"),
        "decay_4_hz": (_HZ_TO_RAD, "1.7e3"),
        "coherence_time_us": (_scaled(1e-6), "0.2"),
        "dephasing_rad_per_s": (_OPT_F, "auto"),
        "density_per_cm3": (_scaled(1e6), "4.89e10"),
        "population_fraction": (_F, "0.01"),
        "cell_length_cm": (_scaled(1e-2), "10"),
    },
    "optical": {
        "probe_wavelength_nm": (_scaled(1e-9), "852"),
        "coupling_wavelength_nm": (_scaled(1e-9), "510"),
        "probe_power_uw": (_scaled(1e-6), "20.7"),
        "coupling_power_mw": (_scaled(1e-3), "17"),
        "local_optical_power_mw": (_scaled(1e-3), "30"),
        "beam_radius_mm": (_scaled(1e-3), "1.7"),
        "probe_detuning_hz": (_HZ_TO_RAD, "0"),
        "coupling_detuning_hz": (_HZ_TO_RAD, "0"),
        "spectrum_span_hz": (_HZ_TO_RAD, "8e6"),
        "spectrum_points": (_I, "801"),
    },
    "rf": {
        "carrier_frequency_ghz": (_scaled(1e9), "6.9458"),
        "lo_amplitude_v_per_m": (_F, "0.0661"),
        "signal_amplitude_v_per_m": (_F, "0"),
        "lo_signal_offset_khz": (_scaled(1e3), "150"),
        "max_lo_signal_offset_khz": (_scaled(1e3), "1000"),
        "rf_detuning_hz": (_HZ_TO_RAD, "0"),
        "bandwidth_khz": (_scaled(1e3), "100"),
        "lo_sweep_min_v_per_m": (_F, "0.002"),
        "lo_sweep_max_v_per_m": (_F, "0.3"),
        "lo_sweep_points": (_I, "25"),
        "ats_lo_v_per_m": (_float_list, "0.0661 0.0992 0.1322 0.1653 0.1983"),
    },
    "photodetector": {
        "quantum_efficiency": (_F, "0.8"),
        "lna_gain_db": (_F, "30"),
        "lna_noise_temperature_k": (_F, "100"),
        "load_resistance_ohm": (_F, "1"),
        "scheme": (lambda t: Detection(t.strip().upper()), "BCOD"),
    },
    "link": {
        "antenna_gain_dbi": (_F, "5.5"),
        "antenna_efficiency": (_F, "0.7"),
        "noise_figure_db": (_F, "6"),
        "lna_gain_db": (_F, "60"),
        "lna_noise_temperature_k": (_F, "100"),
        "ambient_temperature_k": (_F, "290"),
        "eirp_dbw": (_OPT_F, "auto"),
        "calibration_distance_km": (_scaled(1e3), "100"),
        "calibration_snr_db": (_F, "10"),
        "distance_min_km": (_scaled(1e3), "160"),
        "distance_max_km": (_scaled(1e3), "35786"),
        "num_distances": (_I, "60"),
        "rate_distance_km": (_scaled(1e3), "1000"),
        "coverage_threshold_db": (_F, "10"),
    },
    "array": {
        "num_sensors": (_I, "100"),
        "element_spacing_wavelengths": (_F, "0.5"),
        "boresight_deg": (lambda t: float(np.deg2rad(float(t))), "0"),
        "max_angle_deg": (lambda t: float(np.deg2rad(float(t))), "60"),
        "min_angle_separation_deg": (lambda t: float(np.deg2rad(float(t))), "2"),
    },
    "pilots": {
        "num_pilot_symbols": (_I, "16"),
        "pilot_subcarrier_spacing": (_I, "4"),
        "pilot_power": (_F, "1"),
    },
    "detection": {
        "distance_km": (_scaled(1e3), "500"),
        "num_users": (_I, "1"),
        "num_subcarriers": (_I, "16"),
        "subcarrier_spacing_khz": (_scaled(1e3), "6.25"),
        "max_delay_us": (_scaled(1e-6), "1"),
        "symbols_per_frame": (_I, "64"),
        "detectors": (lambda t: tuple(Detector(v.upper()) for v in _str_list(t)), "MRC ZF MMSE"),
        "csi_modes": (_str_list, "perfect estimated"),
        "sweep_var": (str.strip, "eirp_dbw"),
        "sweep_start": (_F, "-20"),
        "sweep_stop": (_F, "6"),
        "sweep_step": (_F, "1"),
        "target_ber": (_F, "1e-3"),
        "min_errors": (_I, "100"),
        "max_frames": (_I, "500"),
        "batch_frames": (_I, "8"),
        "hybrid_csi": (_bool, "false"),
    },
    "constellation": {
        "l_values": (_int_list, "1 2 4 8"),
        "users_per_satellite": (_I, "1"),
        "altitude_km": (_scaled(1e3), "500"),
        "ground_span_km": (_scaled(1e3), "2000"),
        "snr_at_nadir_db": (_F, "-14"),
        "symbols_per_frame": (_I, "64"),
        "local_detector": (lambda t: Detector(t.strip().upper()), "MRC"),
        "quantizer_bits": (_I, "8"),
        "coherence_symbols": (_I, "64"),
        "min_errors": (_I, "200"),
        "max_frames": (_I, "400"),
        "batch_frames": (_I, "8"),
    },
    "sensing": {
        "rcs_dbsm": (_F, "15"),
        "num_symbols": (_I, "64"),
        "eirp_dbw": (_F, "60"),
        "bandwidth_khz": (_scaled(1e3), "100"),
        "symbol_duration_us": (lambda t: None if _OPT_F(t) is None else float(t) * 1e-6, "auto"),
        "distance_min_km": (_scaled(1e3), "160"),
        "distance_max_km": (_scaled(1e3), "2000"),
        "num_distances": (_I, "10"),
    },
}


def default_config_path():
    return str(resources.files("raqr").joinpath("default.ini"))


@dataclass(frozen=True)
class Config:
    """Parsed configuration: ``raw`` keeps the text, ``values`` the SI values."""

    raw: dict
    values: dict
    path: str | None = None

    def __getitem__(self, section):
        return self.values[section]

    def snapshot(self):
        return {s: dict(kv) for s, kv in self.raw.items()}

    # builders -------------------------------------------------------------

    def atomic_system(self):
        a = self["atomic"]
        deph = a["dephasing_rad_per_s"]
        if deph is None:
            deph = 1.0 / a["coherence_time_us"]
        return AtomicSystem(
            a["dipole_12_qa0"],
            a["dipole_23_qa0"],
            a["dipole_34_qa0"],
            a["decay_2_hz"],
            a["decay_3_hz"],
            a["decay_4_hz"],
            deph,
            a["density_per_cm3"],
            a["population_fraction"],
            a["cell_length_cm"],
            coherence_time=a["coherence_time_us"],
        )

    def optical_drive(self):
        o = self["optical"]
        return OpticalDrive(
            o["probe_wavelength_nm"],
            o["coupling_wavelength_nm"],
            o["probe_power_uw"],
            o["coupling_power_mw"],
            o["local_optical_power_mw"],
            o["beam_radius_mm"],
            o["probe_detuning_hz"],
            o["coupling_detuning_hz"],
        )

    def rf_drive(self):
        r = self["rf"]
        if r["lo_signal_offset_khz"] >= r["max_lo_signal_offset_khz"]:
            raise ConfigError("[rf] lo_signal_offset_khz exceeds max_lo_signal_offset_khz")
        return RfDrive(
            r["carrier_frequency_ghz"],
            r["lo_amplitude_v_per_m"],
            r["signal_amplitude_v_per_m"],
            r["lo_signal_offset_khz"],
            r["rf_detuning_hz"],
            r["bandwidth_khz"],
        )

    def photoreceiver(self):
        p = self["photodetector"]
        return PhotoReceiver(
            p["quantum_efficiency"],
            p["lna_gain_db"],
            p["lna_noise_temperature_k"],
            p["load_resistance_ohm"],
            p["scheme"],
        )

    def classical_chain(self):
        k = self["link"]
        return ClassicalRxChain(
            k["antenna_gain_dbi"],
            k["antenna_efficiency"],
            k["noise_figure_db"],
            k["lna_gain_db"],
            k["lna_noise_temperature_k"],
            k["ambient_temperature_k"],
        )

    def ula(self):
        a = self["array"]
        return UlaGeometry(a["num_sensors"], a["element_spacing_wavelengths"], float(a["boresight_deg"]))

    def pilot_config(self):
        p = self["pilots"]
        d = self["detection"]
        return PilotConfig.comb(d["num_subcarriers"], p["pilot_subcarrier_spacing"], p["num_pilot_symbols"], p["pilot_power"])

    def detection_stopping(self):
        d = self["detection"]
        return StoppingRule(d["min_errors"], d["max_frames"], d["batch_frames"])

    def constellation_config(self):
        c = self["constellation"]
        a = self["array"]
        return ConstellationConfig(
            geometry=self.ula(),
            altitude=c["altitude_km"],
            ground_span=c["ground_span_km"],
            carrier_frequency=self["rf"]["carrier_frequency_ghz"],
            snr_at_nadir_db=c["snr_at_nadir_db"],
            symbols_per_frame=c["symbols_per_frame"],
            max_angle=a["max_angle_deg"],
            min_angle_separation=a["min_angle_separation_deg"],
            local_detector=c["local_detector"],
            quantizer_bits=c["quantizer_bits"],
            coherence_symbols=c["coherence_symbols"],
            users_per_satellite=c["users_per_satellite"],
        )

    def constellation_stopping(self):
        c = self["constellation"]
        return StoppingRule(c["min_errors"], c["max_frames"], c["batch_frames"])

    def sensing_config(self):
        s = self["sensing"]
        return SensingConfig(
            rcs=s["rcs_dbsm"],
            num_symbols=s["num_symbols"],
            bandwidth=s["bandwidth_khz"],
            carrier=self["rf"]["carrier_frequency_ghz"],
            eirp=s["eirp_dbw"],
            num_sensors=self["array"]["num_sensors"],
            symbol_duration=s["symbol_duration_us"],
        )


def _parse(parser, path):
    unknown_sections = [s for s in parser.sections() if s not in SCHEMA]
    unknown_keys = [
        f"[{s}] {k}" for s in parser.sections() if s in SCHEMA for k in parser[s] if k not in SCHEMA[s]
    ]
    problems = [f"unknown section [{s}]" for s in unknown_sections] + [f"unknown key {k}" for k in unknown_keys]
    if problems:
        raise ConfigError(f"{path}: " + "; ".join(problems))
    raw, values = {}, {}
    for section, keys in SCHEMA.items():
        raw[section], values[section] = {}, {}
        for key, (conv, default) in keys.items():
            text = parser.get(section, key, fallback=default) if parser.has_section(section) else default
            try:
                values[section][key] = conv(text)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"{path}: [{section}] {key} = {text!r}: {exc}") from None
            raw[section][key] = text.strip()
    return raw, values


def load_config(path=None):
    """Read and validate a configuration file (the shipped default if None)."""
    path = default_config_path() if path is None else os.fspath(path)
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None, strict=True, default_section="__none__")
    parser.optionxform = str.lower
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except (configparser.Error, OSError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    raw, values = _parse(parser, path)
    cfg = Config(raw, values, path)
    try:
        cfg.atomic_system()
        cfg.optical_drive()
        cfg.rf_drive()
        cfg.photoreceiver()
        cfg.classical_chain()
        cfg.ula()
        cfg.pilot_config()
        cfg.detection_stopping()
        cfg.constellation_config()
        cfg.constellation_stopping()
        cfg.sensing_config()
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return cfg
