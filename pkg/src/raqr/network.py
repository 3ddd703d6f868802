"""Multi-satellite uplink: local detection with decision forwarding versus
centralised detection on the stacked channel, with fronthaul accounting.

Geometry is flat-earth. Satellites fly at a common altitude, evenly spaced
along a ground span, each carrying a ULA oriented along track. User k is
served by satellite k mod L and dropped uniformly inside that satellite's
cell. Every satellite hears every user.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ChannelMatrix, UlaGeometry, complex_awgn, steering_vector
from .constants import db_to_lin, wavelength
from .detection import (
    Detector,
    DetectionReport,
    StoppingRule,
    _frame_rng,
    detect_symbols,
    qpsk_modulate,
    run_batches,
    wilson_interval,
)

__all__ = [
    "ConstellationConfig",
    "GeometryError",
    "Constellation",
    "FronthaulLedger",
    "NetworkResult",
    "ConstellationPoint",
    "fronthaul_ledger",
    "build_scenario",
    "local_detect_fuse",
    "global_detect",
    "constellation_sweep",
    "constellation_rows",
]


class GeometryError(ValueError):
    """The requested users cannot be placed under the geometric constraints."""


@dataclass(frozen=True)
class ConstellationConfig:
    """Declared operating point for constellation runs.

    ``snr_at_nadir_db`` is the per-sensor SNR of a user directly below a
    satellite; other links scale with the free-space law relative to that.
    """

    geometry: UlaGeometry = UlaGeometry()
    altitude: float = 500e3  # m
    ground_span: float = 2000e3  # m
    carrier_frequency: float = 6.9458e9  # Hz
    snr_at_nadir_db: float = -12.0
    symbols_per_frame: int = 64
    max_angle: float = np.deg2rad(60.0)
    min_angle_separation: float = np.deg2rad(2.0)
    local_detector: Detector = Detector.MRC
    quantizer_bits: int = 8
    coherence_symbols: int = 64
    users_per_satellite: int = 1

    def __post_init__(self):
        if self.altitude <= 0 or self.ground_span <= 0:
            raise ValueError("altitude and ground_span must be positive")
        if self.quantizer_bits < 1 or self.coherence_symbols < 1 or self.symbols_per_frame < 1:
            raise ValueError("quantizer_bits, coherence_symbols and symbols_per_frame must be >= 1")
        object.__setattr__(self, "local_detector", Detector(self.local_detector))
        if self.local_detector is Detector.MMSE:
            raise ValueError("local detection uses MRC or ZF")


@dataclass(frozen=True)
class Constellation:
    num_satellites: int
    geometry: UlaGeometry
    positions: np.ndarray  # along-track ground coordinate of each satellite, m
    altitude: float
    central_node_index: int = 0

    def __post_init__(self):
        if self.num_satellites < 1:
            raise ValueError("need at least one satellite")
        if not 0 <= self.central_node_index < self.num_satellites:
            raise ValueError("central_node_index out of range")
        pos = np.array(self.positions, dtype=float)
        if pos.shape != (self.num_satellites,):
            raise ValueError("one position per satellite")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def cell_width(self):
        if self.num_satellites == 1:
            return float("nan")
        return float(self.positions[1] - self.positions[0])

    def row_block(self, sat):
        m = self.geometry.num_sensors
        return slice(sat * m, (sat + 1) * m)


@dataclass(frozen=True)
class FronthaulLedger:
    bits_local: int
    bits_global: int
    quantizer_bits: int
    coherence_symbols: int
    num_symbols: int

    def __post_init__(self):
        if self.bits_local < 0 or self.bits_global < 0:
            raise ValueError("bit counts must be non-negative")

    @property
    def local_per_symbol(self):
        return self.bits_local / self.num_symbols

    @property
    def global_per_symbol(self):
        return self.bits_global / self.num_symbols


def fronthaul_ledger(num_satellites, num_users, num_sensors, num_symbols, quantizer_bits=8, coherence_symbols=64):
    """Fronthaul load for both modes, a pure function of its arguments.

    Local mode forwards 2 bits per QPSK symbol per user. Global mode
    forwards every sensor sample (2 b_q bits per complex sample) plus the
    CSI, 2 b_q M K bits per satellite per coherence block. Quantisation is
    accounted for, not simulated.
    """
    if min(num_satellites, num_users, num_sensors, num_symbols, quantizer_bits, coherence_symbols) < 1:
        raise ValueError("all ledger inputs must be >= 1")
    blocks = -(-num_symbols // coherence_symbols)
    local = 2 * num_users * num_symbols
    samples = 2 * quantizer_bits * num_satellites * num_sensors * num_symbols
    csi = 2 * quantizer_bits * num_sensors * num_users * num_satellites * blocks
    return FronthaulLedger(int(local), int(samples + csi), quantizer_bits, coherence_symbols, num_symbols)


def _satellite_positions(num_satellites, span):
    cell = span / num_satellites
    return (np.arange(num_satellites) + 0.5) * cell - span / 2


def _drop_users(rng, con, num_users, config, max_tries=1000):
    """User ground positions; separation enforced among users each satellite can steer to."""
    cell = config.ground_span / con.num_satellites
    serving = np.arange(num_users) % con.num_satellites
    for _ in range(max_tries):
        u = con.positions[serving] + rng.uniform(-cell / 2, cell / 2, size=num_users)
        theta = np.arctan2(u[None, :] - con.positions[:, None], con.altitude)
        ok = True
        for row in theta:
            vis = np.sort(row[np.abs(row) <= config.max_angle])
            if vis.size > 1 and np.min(np.diff(vis)) < config.min_angle_separation:
                ok = False
                break
        if ok:
            return u, serving
    raise GeometryError("could not place users with the requested angular separation")


def _stacked_channel(con, users, config, jitter):
    """L*M x K channel normalised to the nadir path gain."""
    lam = wavelength(config.carrier_frequency)
    dx = users[None, :] - con.positions[:, None]
    d = np.hypot(dx, con.altitude) + jitter
    theta = np.arctan2(dx, con.altitude)
    amp = con.altitude / d  # sqrt of path gain relative to nadir
    phase = -2 * np.pi * np.fmod(d / lam, 1.0)
    blocks = []
    for l in range(con.num_satellites):
        cols = [amp[l, k] * np.exp(1j * phase[l, k]) * steering_vector(con.geometry, theta[l, k]) for k in range(users.size)]
        blocks.append(np.column_stack(cols))
    return np.vstack(blocks), d, theta


def build_scenario(num_satellites, num_users, config=ConstellationConfig(), seed=0, frame=0):
    """Deterministic constellation and stacked channel for one user drop.

    Returns (Constellation, ChannelMatrix, assignment) where assignment[k]
    is the serving satellite of user k. Rows l*M .. (l+1)*M - 1 of the
    channel belong to satellite l.
    """
    m = config.geometry.num_sensors
    if num_users < 1 or num_users > num_satellites * m:
        raise GeometryError("need 1 <= K <= L*M")
    con = Constellation(
        num_satellites, config.geometry, _satellite_positions(num_satellites, config.ground_span), config.altitude
    )
    rng = _frame_rng(seed, 1000 + num_satellites, frame)
    users, serving = _drop_users(rng, con, num_users, config)
    jitter = rng.uniform(0.0, wavelength(config.carrier_frequency), size=(num_satellites, num_users))
    h, d, theta = _stacked_channel(con, users, config, jitter)
    return con, ChannelMatrix(h, distances=d, angles=theta), serving


@dataclass(frozen=True)
class NetworkResult:
    bits: np.ndarray  # (K, 2N)
    sinr: np.ndarray  # (K,)
    ledger: FronthaulLedger


def local_detect_fuse(constellation, channel, received, assignment, noise_variance, detector=Detector.MRC, quantizer_bits=8, coherence_symbols=64):
    """Serving-satellite detection with interference treated as noise.

    Each satellite filters its own M sensors with the CSI of the users it
    serves (MRC), or of every user it hears (ZF), and forwards hard
    decisions. Fusion keeps, per user, the serving satellite's decision.
    """
    h = channel.gains if isinstance(channel, ChannelMatrix) else np.asarray(channel)
    y = np.asarray(received)
    k = h.shape[1]
    assignment = np.asarray(assignment)
    if assignment.shape != (k,) or np.any(assignment < 0) or np.any(assignment >= constellation.num_satellites):
        missing = [i for i in range(k) if i >= assignment.size or not 0 <= assignment[i] < constellation.num_satellites]
        raise ValueError(f"users without a serving satellite: {missing}")
    detector = Detector(detector)
    n = y.shape[-1]
    bits = np.zeros((k, 2 * n), dtype=np.int8)
    sinr = np.zeros(k)
    for sat in np.unique(assignment):
        users = np.flatnonzero(assignment == sat)
        rows = constellation.row_block(sat)
        hl, yl = h[rows], y[rows]
        if detector is Detector.MRC:
            hu = hl[:, users]
            res = detect_symbols(yl, hu, noise_variance, Detector.MRC)
            # MRC SINR against every other user heard by this satellite
            g = np.abs(hu.conj().T @ hl) ** 2
            norms = np.sum(np.abs(hu) ** 2, axis=0)
            sig = g[np.arange(users.size), users]
            sinr[users] = sig / (g.sum(axis=1) - sig + noise_variance * norms)
            bits[users] = res.bits
        else:
            res = detect_symbols(yl, hl, noise_variance, Detector.ZF)
            bits[users] = res.bits[users]
            sinr[users] = res.sinr[users]
    ledger = fronthaul_ledger(
        constellation.num_satellites, k, constellation.geometry.num_sensors, n, quantizer_bits, coherence_symbols
    )
    return NetworkResult(bits, sinr, ledger)


def global_detect(constellation, channel, received, noise_variance, quantizer_bits=8, coherence_symbols=64):
    """Centralised MMSE over the stacked L*M x K system."""
    h = channel.gains if isinstance(channel, ChannelMatrix) else np.asarray(channel)
    y = np.asarray(received)
    if h.shape[0] != constellation.num_satellites * constellation.geometry.num_sensors:
        raise ValueError("stacked channel does not match the constellation")
    res = detect_symbols(y, h, noise_variance, Detector.MMSE)
    ledger = fronthaul_ledger(
        constellation.num_satellites, h.shape[1], constellation.geometry.num_sensors, y.shape[-1], quantizer_bits, coherence_symbols
    )
    return NetworkResult(res.bits, res.sinr, ledger)


def _constellation_frames(num_satellites, num_users, config, seed, frames):
    s2 = float(1.0 / db_to_lin(config.snr_at_nadir_db))
    counts = {"local": 0, "global": 0}
    nbits = 0
    for f in frames:
        con, ch, serving = build_scenario(num_satellites, num_users, config, seed, f)
        rng = _frame_rng(seed, 2000 + num_satellites, f)
        b = rng.integers(0, 2, size=(num_users, 2 * config.symbols_per_frame), dtype=np.int8)
        noise = complex_awgn(rng, (ch.gains.shape[0], config.symbols_per_frame), s2)
        y = ch.gains @ qpsk_modulate(b) + noise
        loc = local_detect_fuse(con, ch, y, serving, s2, config.local_detector, config.quantizer_bits, config.coherence_symbols)
        glo = global_detect(con, ch, y, s2, config.quantizer_bits, config.coherence_symbols)
        counts["local"] += int(np.count_nonzero(loc.bits != b))
        counts["global"] += int(np.count_nonzero(glo.bits != b))
        nbits += b.size
    return counts, nbits


@dataclass(frozen=True)
class ConstellationPoint:
    num_satellites: int
    num_users: int
    mode: str
    report: DetectionReport
    fronthaul_bits_per_symbol: float


def constellation_sweep(L_values, config=ConstellationConfig(), stopping=StoppingRule(), seed=0, workers=1):
    """Paired local / global BER for each constellation size.

    K = users_per_satellite * L. Both modes see the same user drops, bits
    and noise in every frame.
    """
    L_values = [int(v) for v in L_values]
    if any(b <= a for a, b in zip(L_values, L_values[1:])):
        raise ValueError("L_values must be increasing")
    out = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for num_sat in L_values:
            k = config.users_per_satellite * num_sat
            counts, bits, frames = run_batches(_constellation_frames, (num_sat, k, config, seed), stopping, workers, pool)
            ledger = fronthaul_ledger(num_sat, k, config.geometry.num_sensors, 1, config.quantizer_bits, 1)
            per_symbol = {
                "local": ledger.bits_local,
                "global": 2 * config.quantizer_bits * num_sat * config.geometry.num_sensors
                + 2 * config.quantizer_bits * config.geometry.num_sensors * k * num_sat / config.coherence_symbols,
            }
            for mode in ("local", "global"):
                e = counts[mode]
                lo, hi = wilson_interval(e, bits)
                rep = DetectionReport(
                    ber=e / bits,
                    bit_errors=e,
                    bits_simulated=bits,
                    snr_point=config.snr_at_nadir_db,
                    detector=config.local_detector if mode == "local" else Detector.MMSE,
                    confidence_halfwidth=0.5 * (hi - lo),
                    csi_mode="perfect",
                    sweep_var="L",
                    sweep_value=float(num_sat),
                    receiver=mode,
                    frames=frames,
                    upper_bound_only=(e == 0),
                )
                out.append(ConstellationPoint(num_sat, k, mode, rep, float(per_symbol[mode])))
    finally:
        if pool:
            pool.shutdown()
    return out


def constellation_rows(points):
    """Rows for the constellation CSV: L, K, mode, ber, ci_halfwidth, fronthaul_bits_per_symbol."""
    return [
        (p.num_satellites, p.num_users, p.mode, p.report.reported_ber, p.report.confidence_halfwidth, p.fronthaul_bits_per_symbol)
        for p in points
    ]
