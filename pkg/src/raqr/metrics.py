"""Achievable rate, coverage distance and range / speed Cramer-Rao bounds.

All three are driven by the same per-sensor SNR model (``ReceiverModel``),
so a sensitivity ratio between two chains shows up as the same dB gap in
each of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .constants import SPEED_OF_LIGHT, db_to_lin, wavelength
from .link import LEO_MIN, GEO, LinkScenario

__all__ = [
    "SensingConfig",
    "CoverageResult",
    "CrbResult",
    "ExperimentReport",
    "achievable_rate",
    "achievable_rate_curve",
    "coverage_distance",
    "coverage_distance_bisect",
    "echo_snr",
    "crb_range_speed",
    "fisher_crb_oracle",
]

LOG2_DB = 10 * np.log10(2.0)  # dB per bit/s/Hz at high SNR


def achievable_rate(snr_linear):
    """Shannon rate log2(1 + SNR) in bit/s/Hz."""
    snr_linear = np.asarray(snr_linear, dtype=float)
    if np.any(snr_linear < 0):
        raise ValueError("SNR must be non-negative")
    return np.log2(1.0 + snr_linear)


def achievable_rate_curve(distances, receivers, scenario, num_sensors=100):
    """Rate per distance per receiver with M-fold array gain.

    Parameters
    ----------
    distances : array of m, inside the LEO-to-GEO range
    receivers : sequence of ReceiverModel
    scenario : LinkScenario
        Carrier, bandwidth and EIRP; its distance is overridden.

    Returns
    -------
    dict name -> (rate array, array SNR in dB)
    """
    d = np.asarray(distances, dtype=float)
    if np.any(d < LEO_MIN * (1 - 1e-12)) or np.any(d > GEO * (1 + 1e-12)):
        raise ValueError("distances must lie within [160, 35786] km")
    out = {}
    for rx in receivers:
        snr_db = np.array([rx.snr_db(scenario.at(distance=float(x))) for x in d]) + 10 * np.log10(num_sensors)
        out[rx.name] = (achievable_rate(db_to_lin(snr_db)), snr_db)
    return out


@dataclass(frozen=True)
class CoverageResult:
    distance: float  # m, NaN if unreachable
    reachable: bool
    reference_distance: float
    snr_at_reference: float  # dB


def coverage_distance(receiver, scenario, snr_threshold_db, reference_distance=None):
    """Largest distance at which the per-sensor SNR still meets the threshold.

    Closed form from the 1/d^2 law, d_max = d_ref 10^((SNR(d_ref) - thr)/20).
    ``reference_distance`` defaults to the minimum LEO distance.
    """
    d_ref = LEO_MIN if reference_distance is None else float(reference_distance)
    snr_ref = receiver.snr_db(scenario.at(distance=d_ref))
    # allow round-off when the reference sits exactly at the threshold
    if snr_ref < snr_threshold_db - 1e-9:
        return CoverageResult(float("nan"), False, d_ref, snr_ref)
    return CoverageResult(d_ref * 10 ** (max(snr_ref - snr_threshold_db, 0.0) / 20), True, d_ref, snr_ref)


def coverage_distance_bisect(receiver, scenario, snr_threshold_db, lo=1.0, hi=1e12):
    """Root of SNR(d) = threshold by bracketing, as a cross-check of the closed form.

    Returns NaN when the threshold is not met even at ``lo``.
    """
    f = lambda logd: receiver.snr_db(scenario.at(distance=10**logd)) - snr_threshold_db  # noqa: E731
    if f(np.log10(lo)) < 0:
        return float("nan")
    return 10 ** brentq(f, np.log10(lo), np.log10(hi), xtol=1e-12, rtol=1e-14)


@dataclass(frozen=True)
class SensingConfig:
    """Monostatic sensing with the communication waveform.

    ``rcs`` is in dBsm. ``symbol_duration`` and ``rms_bandwidth`` default to
    1/B and B/sqrt(12) for the configured bandwidth when left as None.
    """

    rcs: float = 15.0  # dBsm
    num_symbols: int = 64
    bandwidth: float = 100e3  # Hz
    carrier: float = 6.9458e9  # Hz
    eirp: float = 60.0  # dBW, transmitted by the sensing satellite
    num_sensors: int = 100
    symbol_duration: float | None = None  # s
    rms_bandwidth: float | None = None  # Hz

    def __post_init__(self):
        if self.num_symbols < 1 or self.num_sensors < 1:
            raise ValueError("num_symbols and num_sensors must be >= 1")
        if not self.bandwidth > 0 or not self.carrier > 0:
            raise ValueError("bandwidth and carrier must be positive")
        if self.symbol_duration is None:
            object.__setattr__(self, "symbol_duration", 1.0 / self.bandwidth)
        if self.rms_bandwidth is None:
            object.__setattr__(self, "rms_bandwidth", self.bandwidth / np.sqrt(12.0))
        if not self.symbol_duration > 0 or not self.rms_bandwidth > 0:
            raise ValueError("symbol_duration and rms_bandwidth must be positive")

    @property
    def observation_time(self):
        return self.num_symbols * self.symbol_duration

    @property
    def rms_time(self):
        """RMS time extent of a flat observation window, T_obs / sqrt(12)."""
        return self.observation_time / np.sqrt(12.0)

    @property
    def samples_per_symbol(self):
        return self.bandwidth * self.symbol_duration


def echo_snr(sensing, receiver, distance):
    """Per-sensor, per-sample SNR (linear) of the two-way echo.

    The echo power density EIRP sigma / ((4 pi)^2 d^4) is converted to an
    equivalent one-way scenario so the receiver's field-noise model applies
    unchanged.
    """
    d = float(distance)
    sigma = db_to_lin(sensing.rcs)
    s_echo = db_to_lin(sensing.eirp) * sigma / ((4 * np.pi) ** 2 * d**4)
    # one-way scenario with the same flux density at the receiver
    eirp_eq = 10 * np.log10(s_echo * 4 * np.pi * d**2)
    sc = LinkScenario(d, sensing.carrier, sensing.bandwidth, eirp_eq)
    return receiver.snr_linear(sc)


@dataclass(frozen=True)
class CrbResult:
    distances: np.ndarray
    snr_total: np.ndarray  # linear, integrated over sensors and samples
    crb_delay: np.ndarray  # s^2
    crb_doppler: np.ndarray  # Hz^2
    crb_range: np.ndarray  # m^2
    crb_speed: np.ndarray  # (m/s)^2


def crb_range_speed(sensing, receiver, distances):
    """Closed-form delay / Doppler CRBs mapped to range and radial speed.

    SNR_total = M * N * (B T_sym) * SNR_sample;
    CRB_tau = 1 / (8 pi^2 beta^2 SNR_total), CRB_range = (c/2)^2 CRB_tau;
    CRB_fd = 1 / (8 pi^2 T_rms^2 SNR_total), CRB_speed = (lambda/2)^2 CRB_fd.
    """
    d = np.atleast_1d(np.asarray(distances, dtype=float))
    snr = np.array([echo_snr(sensing, receiver, x) for x in d])
    total = sensing.num_sensors * sensing.num_symbols * sensing.samples_per_symbol * snr
    if np.any(~(total > 0)):
        raise ValueError("integrated sensing SNR must be positive")
    crb_tau = 1.0 / (8 * np.pi**2 * sensing.rms_bandwidth**2 * total)
    crb_fd = 1.0 / (8 * np.pi**2 * sensing.rms_time**2 * total)
    lam = wavelength(sensing.carrier)
    return CrbResult(d, total, crb_tau, crb_fd, (SPEED_OF_LIGHT / 2) ** 2 * crb_tau, (lam / 2) ** 2 * crb_fd)


def _zadoff_chu(length, root=1):
    n = np.arange(length)
    if length % 2:
        return np.exp(-1j * np.pi * root * n * (n + 1) / length)
    return np.exp(-1j * np.pi * root * n * n / length)


def fisher_crb_oracle(sensing, snr_total, rel_step=1e-4):
    """Numerical delay and Doppler CRBs from the sampled echo model.

    A unit-modulus Zadoff-Chu sequence sampled at the bandwidth plays the
    role of the flat-spectrum communication waveform. The echo is delayed
    (cyclically, through the DFT) and Doppler shifted; derivatives come
    from central differences, and the Fisher information is
    (2 / sigma^2) sum |ds/dtheta|^2 with sigma^2 set by ``snr_total``.

    Returns (crb_delay s^2, crb_doppler Hz^2).
    """
    fs = sensing.bandwidth
    n = int(round(sensing.num_symbols * sensing.samples_per_symbol))
    if n < 2:
        raise ValueError("need at least two samples")
    s0 = _zadoff_chu(n)
    t = (np.arange(n) - (n - 1) / 2) / fs  # centred time axis
    freqs = np.fft.fftfreq(n, d=1 / fs)
    spec = np.fft.fft(s0)

    def echo(tau, fd):
        delayed = np.fft.ifft(spec * np.exp(-2j * np.pi * freqs * tau))
        return delayed * np.exp(2j * np.pi * fd * t)

    # unit per-sample signal power; noise variance sets the integrated SNR
    sigma2 = n / snr_total
    h_tau = rel_step / fs
    h_fd = rel_step * fs / n
    d_tau = (echo(h_tau, 0) - echo(-h_tau, 0)) / (2 * h_tau)
    d_fd = (echo(0, h_fd) - echo(0, -h_fd)) / (2 * h_fd)
    j_tau = 2 / sigma2 * np.sum(np.abs(d_tau) ** 2)
    j_fd = 2 / sigma2 * np.sum(np.abs(d_fd) ** 2)
    return 1 / j_tau, 1 / j_fd


@dataclass(frozen=True)
class ExperimentReport:
    """Immutable record of one experiment run.

    ``rows`` are (sweep value, metric, value, uncertainty) tuples.
    """

    experiment: str
    config: dict
    seed: int
    version: str
    rows: tuple = ()
    files: tuple = ()
    checks: tuple = field(default=())  # (criterion, passed, detail)

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        object.__setattr__(self, "files", tuple(self.files))
        object.__setattr__(self, "checks", tuple(tuple(c) for c in self.checks))

    @property
    def passed(self):
        return all(c[1] for c in self.checks)

    def to_dict(self):
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "version": self.version,
            "config": self.config,
            "rows": [list(r) for r in self.rows],
            "files": list(self.files),
            "checks": [{"criterion": c[0], "passed": bool(c[1]), "detail": c[2]} for c in self.checks],
        }
