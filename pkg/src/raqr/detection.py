"""Pilot-based channel estimation, CSI interpolation, QPSK detection and
Monte-Carlo bit-error measurement.

QPSK uses Gray mapping: bit pair (b0, b1) maps to ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2),
so 00 sits in the first quadrant at (1 + j)/sqrt(2), and neighbouring
quadrants differ in exactly one bit.
"""

from __future__ import annotations

import enum
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import UlaGeometry, complex_awgn, draw_separated_angles, steering_vector
from .constants import db_to_lin, wavelength
from .link import LinkScenario, ReceiverModel

__all__ = [
    "Detector",
    "PilotConfig",
    "ChannelEstimate",
    "DetectionResult",
    "DetectionReport",
    "StoppingRule",
    "BerSetup",
    "RankDeficientError",
    "qpsk_modulate",
    "qpsk_demodulate",
    "orthogonal_pilots",
    "mmse_channel_estimate",
    "ls_channel_estimate",
    "interpolate_csi",
    "detect_symbols",
    "wilson_interval",
    "ber_monte_carlo",
    "run_batches",
    "sweep_value_at_ber",
    "ber_rows",
]


class Detector(enum.Enum):
    MRC = "MRC"
    ZF = "ZF"
    MMSE = "MMSE"


class RankDeficientError(np.linalg.LinAlgError):
    """Zero-forcing on a channel whose columns are linearly dependent."""

    def __init__(self, users):
        self.users = tuple(int(u) for u in users)
        super().__init__(f"channel is rank deficient; zero-forcing cannot separate users {list(self.users)}")


# --------------------------------------------------------------------------
# QPSK
# --------------------------------------------------------------------------

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def qpsk_modulate(bits):
    """Map bits (..., 2N) of 0/1 to Gray-coded unit-energy QPSK symbols (..., N)."""
    bits = np.asarray(bits)
    if bits.shape[-1] % 2:
        raise ValueError("need an even number of bits")
    b = bits.reshape(*bits.shape[:-1], -1, 2).astype(float)
    return ((1 - 2 * b[..., 0]) + 1j * (1 - 2 * b[..., 1])) * _INV_SQRT2


def qpsk_demodulate(symbols):
    """Hard decisions: (..., N) symbols to (..., 2N) bits."""
    symbols = np.asarray(symbols)
    bits = np.stack([symbols.real < 0, symbols.imag < 0], axis=-1).astype(np.int8)
    return bits.reshape(*symbols.shape[:-1], -1)


# --------------------------------------------------------------------------
# Channel estimation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PilotConfig:
    num_pilot_symbols: int
    pilot_subcarrier_indices: tuple = (0,)
    pilot_power: float = 1.0

    def __post_init__(self):
        if self.num_pilot_symbols < 1:
            raise ValueError("num_pilot_symbols must be >= 1")
        idx = tuple(int(i) for i in self.pilot_subcarrier_indices)
        if not idx:
            raise ValueError("need at least one pilot subcarrier")
        if any(i < 0 for i in idx) or len(set(idx)) != len(idx):
            raise ValueError("pilot subcarrier indices must be distinct and non-negative")
        object.__setattr__(self, "pilot_subcarrier_indices", tuple(sorted(idx)))
        if not self.pilot_power > 0:
            raise ValueError("pilot_power must be positive")

    @classmethod
    def comb(cls, num_subcarriers, spacing, num_pilot_symbols, pilot_power=1.0):
        """Comb pattern every ``spacing`` subcarriers, always including the last one."""
        idx = list(range(0, num_subcarriers, spacing))
        if idx[-1] != num_subcarriers - 1:
            idx.append(num_subcarriers - 1)
        return cls(num_pilot_symbols, tuple(idx), pilot_power)

    def validate_grid(self, num_subcarriers):
        if max(self.pilot_subcarrier_indices) >= num_subcarriers:
            raise ValueError("pilot subcarrier index outside the subcarrier grid")


def orthogonal_pilots(num_users, num_symbols=None, power=1.0):
    """K x Np pilot matrix with orthogonal rows.

    With Np = K it is sqrt(power) * I; longer pilots use unit-modulus DFT rows.
    """
    np_ = num_users if num_symbols is None else num_symbols
    if np_ < num_users:
        raise ValueError("need at least as many pilot symbols as users")
    if np_ == num_users:
        return np.sqrt(power) * np.eye(num_users, dtype=complex)
    n = np.arange(np_)
    k = np.arange(num_users)
    return np.sqrt(power) * np.exp(-2j * np.pi * np.outer(k, n) / np_)


@dataclass(frozen=True)
class ChannelEstimate:
    estimate: np.ndarray  # (..., M, K)
    posterior_covariance: np.ndarray  # K x K, shared by every row
    mse: float  # expected sum squared error over one M x K matrix


def mmse_channel_estimate(received_pilots, pilot_matrix, noise_variance, channel_prior_covariance, prior_mean=None):
    """Linear MMSE estimate of H from Y = H X + N.

    Rows of H are independent with mean ``prior_mean`` (default zero) and
    covariance ``channel_prior_covariance`` (K x K). ``received_pilots`` may
    carry leading batch axes (..., M, Np).

    Returns
    -------
    ChannelEstimate
        The estimate, the per-row posterior covariance and the analytic MSE
        M * trace(posterior covariance).
    """
    y = np.asarray(received_pilots)
    x = np.asarray(pilot_matrix)
    r = np.asarray(channel_prior_covariance)
    if not noise_variance > 0:
        raise ValueError("noise_variance must be positive")
    if x.ndim != 2 or y.ndim < 2:
        raise ValueError("pilot_matrix must be K x Np and received_pilots (..., M, Np)")
    k, n_p = x.shape
    if y.shape[-1] != n_p:
        raise ValueError(f"received pilots have {y.shape[-1]} symbols, pilot matrix has {n_p}")
    if r.shape != (k, k):
        raise ValueError(f"prior covariance must be {k} x {k}")
    if np.min(np.linalg.eigvalsh(0.5 * (r + r.conj().T))) < -1e-12 * max(1.0, np.abs(r).max()):
        raise ValueError("prior covariance must be positive semidefinite")
    m = y.shape[-2]
    mean = np.zeros((m, k), dtype=complex) if prior_mean is None else np.asarray(prior_mean)
    # W = R X* (X^T R X* + s2 I)^-1, evaluated in the K x K push-through form
    # (R X* X^T + s2 I)^-1 R X*, which stays well conditioned when Np > K
    w = np.linalg.solve(r @ x.conj() @ x.T + noise_variance * np.eye(k), r @ x.conj())
    est = mean + (y - mean @ x) @ w.T
    post = r - w @ x.T @ r
    return ChannelEstimate(est, post, float(m * np.real(np.trace(post))))


def ls_channel_estimate(received_pilots, pilot_matrix, noise_variance=None):
    """Least-squares estimate Y X^H (X X^H)^-1, with its MSE when the noise variance is given."""
    y = np.asarray(received_pilots)
    x = np.asarray(pilot_matrix)
    g = np.linalg.inv(x @ x.conj().T)
    est = y @ x.conj().T @ g
    mse = None if noise_variance is None else float(y.shape[-2] * noise_variance * np.real(np.trace(g)))
    return est, mse


def interpolate_csi(pilot_indices, pilot_estimates, full_grid):
    """Complex-linear interpolation of per-subcarrier CSI.

    Parameters
    ----------
    pilot_indices : sequence of int
        Increasing subcarrier indices where estimates exist.
    pilot_estimates : array (P, M, K)
    full_grid : int or sequence
        Number of subcarriers, or the subcarrier indices to fill.

    Values beyond the outermost pilots are held constant.
    """
    p = np.asarray(pilot_indices, dtype=float)
    est = np.asarray(pilot_estimates)
    grid = np.arange(full_grid) if np.ndim(full_grid) == 0 else np.asarray(full_grid)
    if est.shape[0] != p.size:
        raise ValueError("one estimate per pilot subcarrier is required")
    if p.size == 1:
        warnings.warn("single pilot subcarrier: CSI extended as a constant", stacklevel=2)
        return np.broadcast_to(est, (grid.size,) + est.shape[1:]).copy()
    if np.any(np.diff(p) <= 0):
        raise ValueError("pilot indices must be strictly increasing")
    j = np.clip(np.searchsorted(p, grid, side="right") - 1, 0, p.size - 2)
    w = np.clip((grid - p[j]) / (p[j + 1] - p[j]), 0.0, 1.0)
    w = w.reshape((-1,) + (1,) * (est.ndim - 1))
    return (1 - w) * est[j] + w * est[j + 1]


# --------------------------------------------------------------------------
# Linear detection
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DetectionResult:
    symbols: np.ndarray  # (..., K, N) hard decisions
    bits: np.ndarray  # (..., K, 2N)
    sinr: np.ndarray  # (..., K) post-equalisation SINR, linear
    equalized: np.ndarray  # (..., K, N)


def _rank_deficient_users(h, tol=1e-9):
    users = []
    k = h.shape[1]
    for i in range(k):
        hi = h[:, i]
        others = np.delete(h, i, axis=1)
        if others.shape[1] == 0:
            if np.linalg.norm(hi) == 0:
                users.append(i)
            continue
        coef, *_ = np.linalg.lstsq(others, hi, rcond=None)
        if np.linalg.norm(hi - others @ coef) <= tol * max(np.linalg.norm(hi), 1e-300):
            users.append(i)
    return users


def _check_rank(h):
    s = np.linalg.svd(h, compute_uv=False)
    bad = s[..., -1] <= 1e-9 * s[..., 0]
    if np.any(bad):
        flat = h.reshape(-1, *h.shape[-2:])
        first = flat[np.flatnonzero(bad.ravel())[0]]
        raise RankDeficientError(_rank_deficient_users(first))


def detect_symbols(received, csi, noise_variance, detector):
    """Linear multi-user detection with QPSK slicing.

    Parameters
    ----------
    received : array (..., M, N)
    csi : array (..., M, K)
        Channel used to build the filter (true or estimated).
    noise_variance : float
        Per-sensor noise variance (unit-power symbols).
    detector : Detector or str
        MRC uses w_k = h_k, ZF the pseudo-inverse rows and MMSE the rows of
        (H^H H + s2 I)^-1 H^H.
    """
    detector = Detector(detector)
    y = np.asarray(received)
    h = np.asarray(csi)
    if h.shape[-2] != y.shape[-2]:
        raise ValueError(f"csi has {h.shape[-2]} sensors, received has {y.shape[-2]}")
    hh = np.swapaxes(h.conj(), -1, -2)
    gram = hh @ h
    k = h.shape[-1]
    eye = np.eye(k)
    if detector is Detector.MRC:
        z = hh @ y
        diag = np.real(np.diagonal(gram, axis1=-2, axis2=-1))
        z = z / diag[..., :, None]
        power = np.abs(gram) ** 2
        sig = np.real(np.diagonal(power, axis1=-2, axis2=-1))
        interf = power.sum(axis=-1) - sig
        sinr = sig / (interf + noise_variance * diag)
    elif detector is Detector.ZF:
        _check_rank(h)
        inv = np.linalg.inv(gram)
        z = inv @ hh @ y
        sinr = 1.0 / (noise_variance * np.real(np.diagonal(inv, axis1=-2, axis2=-1)))
    else:
        inv = np.linalg.inv(gram + noise_variance * eye)
        z = inv @ hh @ y
        sinr = 1.0 / (noise_variance * np.real(np.diagonal(inv, axis1=-2, axis2=-1))) - 1.0
    bits = qpsk_demodulate(z)
    symbols = qpsk_modulate(bits)
    return DetectionResult(symbols=symbols, bits=bits, sinr=sinr, equalized=z)


# --------------------------------------------------------------------------
# Monte-Carlo BER
# --------------------------------------------------------------------------


def wilson_interval(errors, trials, z=1.96):
    """Wilson score interval (low, high) for a binomial proportion."""
    if trials <= 0:
        return 0.0, 1.0
    p = errors / trials
    denom = 1 + z**2 / trials
    centre = (p + z**2 / (2 * trials)) / denom
    half = z / denom * np.sqrt(p * (1 - p) / trials + z**2 / (4 * trials**2))
    lo = 0.0 if errors == 0 else max(0.0, centre - half)
    hi = 1.0 if errors == trials else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class DetectionReport:
    """BER at one sweep point for one detector / CSI mode.

    ``ber`` is always bit_errors / bits_simulated. When no error occurred the
    report is flagged ``upper_bound_only`` and ``reported_ber`` gives the
    Wilson upper bound instead of zero.
    """

    ber: float
    bit_errors: int
    bits_simulated: int
    snr_point: float
    detector: Detector
    confidence_halfwidth: float
    csi_mode: str = "perfect"
    sweep_var: str = "snr_db"
    sweep_value: float = float("nan")
    receiver: str = ""
    frames: int = 0
    upper_bound_only: bool = False

    def interval(self, z=1.96):
        return wilson_interval(self.bit_errors, self.bits_simulated, z)

    def sigma(self):
        """Binomial standard deviation of the BER estimate (floored at one error)."""
        p = max(self.bit_errors, 1) / self.bits_simulated
        return float(np.sqrt(p * (1 - p) / self.bits_simulated))

    @property
    def reported_ber(self):
        return self.interval()[1] if self.upper_bound_only else self.ber


@dataclass(frozen=True)
class StoppingRule:
    min_errors: int = 100
    max_frames: int = 1000
    batch_frames: int = 8

    def __post_init__(self):
        if self.min_errors < 1 or self.max_frames < 1 or self.batch_frames < 1:
            raise ValueError("stopping rule parameters must be >= 1")


@dataclass(frozen=True)
class BerSetup:
    """Link-level configuration for BER simulation.

    The channel is normalised to unit per-entry power; the path loss enters
    through the per-sensor SNR. ``sweep_var`` is ``"eirp_dbw"`` (SNR from
    the receiver model and ``scenario``) or ``"snr_db"`` (per-sensor SNR
    directly). ``csi_receiver`` optionally estimates the channel with a
    different chain's noise (hybrid operation).
    """

    geometry: UlaGeometry
    scenario: LinkScenario
    receiver: ReceiverModel | None = None
    num_users: int = 1
    pilots: PilotConfig | None = None
    num_subcarriers: int = 1
    subcarrier_spacing: float = 0.0
    max_delay: float = 0.0
    symbols_per_frame: int = 64
    max_angle: float = np.deg2rad(60.0)
    min_angle_separation: float = np.deg2rad(2.0)
    sweep_var: str = "eirp_dbw"
    csi_receiver: ReceiverModel | None = None
    stream: int = 0

    def __post_init__(self):
        if self.sweep_var not in ("eirp_dbw", "snr_db"):
            raise ValueError("sweep_var must be 'eirp_dbw' or 'snr_db'")
        if self.sweep_var == "eirp_dbw" and self.receiver is None:
            raise ValueError("an EIRP sweep needs a receiver model")
        if self.num_users < 1 or self.num_users > self.geometry.num_sensors:
            raise ValueError("need 1 <= num_users <= num_sensors")
        if self.pilots is not None:
            self.pilots.validate_grid(self.num_subcarriers)

    def snr_db(self, value):
        if self.sweep_var == "snr_db":
            return float(value)
        return self.receiver.snr_db(self.scenario.at(eirp=value))

    def csi_snr_db(self, value):
        if self.csi_receiver is None:
            return self.snr_db(value)
        if self.sweep_var == "snr_db":
            if self.receiver is None:
                raise ValueError("hybrid CSI on an SNR sweep needs the data receiver model")
            return float(value) - self.receiver.advantage_db(self.csi_receiver)
        return self.csi_receiver.snr_db(self.scenario.at(eirp=value))


def _frame_rng(seed, stream, frame):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, frame)))


def _draw_frame(setup, rng):
    """Normalised channel (Nsc, M, K), bits, and unit-variance noises."""
    m, k, nsc, ns = setup.geometry.num_sensors, setup.num_users, setup.num_subcarriers, setup.symbols_per_frame
    angles = draw_separated_angles(rng, k, setup.max_angle, setup.min_angle_separation if k > 1 else 0.0)
    lam = wavelength(setup.scenario.carrier_frequency)
    # sub-wavelength range jitter randomises the propagation phase per frame
    jitter = rng.uniform(0.0, lam, size=k)
    phase = -2 * np.pi * np.fmod((setup.scenario.distance + jitter) / lam, 1.0)
    h = np.column_stack([np.exp(1j * ph) * steering_vector(setup.geometry, th) for ph, th in zip(phase, angles)])
    delays = rng.uniform(0.0, setup.max_delay, size=k) if setup.max_delay > 0 else np.zeros(k)
    n = np.arange(nsc)
    ramp = np.exp(-2j * np.pi * setup.subcarrier_spacing * n[:, None] * delays[None, :])
    hs = h[None, :, :] * ramp[:, None, :]
    bits = rng.integers(0, 2, size=(nsc, k, 2 * ns), dtype=np.int8)
    noise = complex_awgn(rng, (nsc, m, ns), 1.0)
    if setup.pilots is not None:
        n_pil = len(setup.pilots.pilot_subcarrier_indices)
        pnoise = complex_awgn(rng, (n_pil, m, setup.pilots.num_pilot_symbols), 1.0)
    else:
        pnoise = None
    return hs, bits, noise, pnoise


def _simulate_frames(setup, snr_db, csi_snr_db, detectors, csi_modes, seed, frames):
    """Error counts per (detector, csi_mode) over the given frame indices."""
    s2 = float(1.0 / db_to_lin(snr_db))
    s2_csi = float(1.0 / db_to_lin(csi_snr_db))
    counts = {(d, c): 0 for d in detectors for c in csi_modes}
    bits_total = 0
    if setup.pilots is not None:
        xp = orthogonal_pilots(setup.num_users, setup.pilots.num_pilot_symbols, setup.pilots.pilot_power)
        prior = np.eye(setup.num_users)
    for f in frames:
        rng = _frame_rng(seed, setup.stream, f)
        hs, bits, noise, pnoise = _draw_frame(setup, rng)
        x = qpsk_modulate(bits)  # (Nsc, K, Ns)
        y = hs @ x + np.sqrt(s2) * noise
        bits_total += bits.size
        for c in csi_modes:
            if c == "perfect":
                csi = hs
            else:
                idx = list(setup.pilots.pilot_subcarrier_indices)
                yp = hs[idx] @ xp + np.sqrt(s2_csi) * pnoise
                est = mmse_channel_estimate(yp, xp, s2_csi, prior).estimate
                csi = interpolate_csi(idx, est, setup.num_subcarriers) if len(idx) > 1 else np.broadcast_to(
                    est, hs.shape
                )
            for d in detectors:
                res = detect_symbols(y, csi, s2, d)
                counts[(d, c)] += int(np.count_nonzero(res.bits != bits))
    return counts, bits_total


def _star(job):
    fn, args = job
    return fn(*args)


def run_batches(fn, args, stopping, workers=1, pool=None):
    """Accumulate ``fn(*args, frames)`` error counts batch by batch.

    ``fn`` returns (dict of error counts, bits per count). Batches are merged
    strictly in frame order and the stopping rule is checked after each one,
    so the totals do not depend on how many workers ran ahead.

    Returns (counts, bits, frames).
    """
    counts = None
    bits = 0
    frames = 0
    next_frame = 0
    while True:
        batches = []
        for _ in range(max(1, workers)):
            if next_frame >= stopping.max_frames:
                break
            stop = min(next_frame + stopping.batch_frames, stopping.max_frames)
            batches.append(range(next_frame, stop))
            next_frame = stop
        if not batches:
            break
        jobs = [(fn, tuple(args) + (b,)) for b in batches]
        results = pool.map(_star, jobs) if pool is not None else map(_star, jobs)
        done = False
        for b, (cnt, nb) in zip(batches, results):
            if counts is None:
                counts = dict.fromkeys(cnt, 0)
            for key in cnt:
                counts[key] += cnt[key]
            bits += nb
            frames = b.stop
            if min(counts.values()) >= stopping.min_errors or frames >= stopping.max_frames:
                done = True
                break
        if done:
            break
    return counts, bits, frames


def ber_monte_carlo(
    setup,
    sweep_values,
    detectors=(Detector.MMSE,),
    csi_modes=("perfect",),
    stopping=StoppingRule(),
    seed=0,
    workers=1,
):
    """Seeded Monte-Carlo BER over a sweep.

    Every frame draws its randomness from ``SeedSequence(seed, spawn_key=
    (stream, frame))``, so all sweep points, detectors and CSI modes see the
    same realisations, and results do not depend on ``workers``. Frames are
    run in batches; a point stops after the first batch at which every
    detector / CSI combination has ``min_errors`` errors, or at
    ``max_frames``.

    Returns a list of DetectionReport, ordered by sweep value, then CSI mode,
    then detector.
    """
    detectors = [Detector(d) for d in detectors]
    csi_modes = list(csi_modes)
    for c in csi_modes:
        if c not in ("perfect", "estimated"):
            raise ValueError(f"unknown csi mode {c!r}")
        if c == "estimated" and setup.pilots is None:
            raise ValueError("estimated CSI needs a pilot configuration")
    reports = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for value in sweep_values:
            snr = setup.snr_db(value)
            csi_snr = setup.csi_snr_db(value)
            counts, bits, frames = run_batches(
                _simulate_frames, (setup, snr, csi_snr, detectors, csi_modes, seed), stopping, workers, pool
            )
            for c in csi_modes:
                for d in detectors:
                    e = counts[(d, c)]
                    lo, hi = wilson_interval(e, bits)
                    reports.append(
                        DetectionReport(
                            ber=e / bits,
                            bit_errors=e,
                            bits_simulated=bits,
                            snr_point=snr,
                            detector=d,
                            confidence_halfwidth=0.5 * (hi - lo),
                            csi_mode=c,
                            sweep_var=setup.sweep_var,
                            sweep_value=float(value),
                            receiver=setup.receiver.name if setup.receiver else "",
                            frames=frames,
                            upper_bound_only=(e == 0),
                        )
                    )
    finally:
        if pool:
            pool.shutdown()
    return reports


def sweep_value_at_ber(sweep_values, bers, target):
    """Sweep value where log10(BER) first falls through ``target``.

    Linear interpolation in log10(BER) between adjacent points; returns NaN
    if the curve never crosses.
    """
    x = np.asarray(sweep_values, dtype=float)
    b = np.asarray(bers, dtype=float)
    lt = np.log10(target)
    for i in range(len(x) - 1):
        if b[i] >= target > b[i + 1]:
            if b[i + 1] <= 0:
                return float(x[i + 1]) if b[i] == target else float(x[i])
            l0, l1 = np.log10(b[i]), np.log10(b[i + 1])
            return float(x[i] + (lt - l0) * (x[i + 1] - x[i]) / (l1 - l0))
    return float("nan")


def ber_rows(reports):
    """Rows for the BER CSV: sweep_var, sweep_value, detector, csi_mode, ber, ci_halfwidth, bits."""
    return [
        (r.sweep_var, r.sweep_value, r.detector.value, r.csi_mode, r.reported_ber, r.confidence_halfwidth, r.bits_simulated)
        for r in reports
    ]
