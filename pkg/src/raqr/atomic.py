"""Atomic front end of a Rydberg atomic quantum receiver.

A four-level ladder |1> -> |2> -> |3> -> |4> is driven by a probe laser
(1-2), a coupling laser (2-3) and the RF field (3-4). The steady state of the
Lindblad master equation gives the probe coherence rho_21, which sets the
vapor susceptibility and therefore the probe transmission through the cell.
From the transmission slope around an RF local oscillator we get the
superheterodyne transduction gain, and together with the photodetector noise
the equivalent RF field sensitivity.

Internally every rate, detuning and Rabi frequency is angular (rad/s).
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar
from scipy.signal import find_peaks

from .constants import (
    BOLTZMANN,
    ELEMENTARY_CHARGE,
    EPSILON_0,
    HBAR,
    NV_PER_CM,
    PLANCK,
    SPEED_OF_LIGHT,
    TWO_PI,
    db_to_lin,
)

__all__ = [
    "AtomicSystem",
    "OpticalDrive",
    "RfDrive",
    "EitSpectrum",
    "PhotoReceiver",
    "Detection",
    "SteadyState",
    "TransductionGain",
    "NoiseBudget",
    "FieldSensitivity",
    "SteadyStateError",
    "TransductionError",
    "ModelValidityWarning",
    "rabi_from_beam",
    "rabi_from_field",
    "beam_field_amplitude",
    "liouvillian",
    "steady_state_coherence",
    "eit_spectrum",
    "probe_transmission",
    "transmission_peaks",
    "eit_linewidth",
    "superhet_transduction_gain",
    "photodetection_noise",
    "equivalent_field_sensitivity",
    "write_spectrum_csv",
]

N_LEVELS = 4


class SteadyStateError(RuntimeError):
    """The Liouvillian has no unique steady state."""


class TransductionError(RuntimeError):
    """The superheterodyne gain could not be determined."""


class ModelValidityWarning(UserWarning):
    """Raised when a computed quantity leaves the physically valid region."""


def _require_positive(**kwargs):
    for name, value in kwargs.items():
        if not np.isfinite(value) or value <= 0:
            raise ValueError(f"{name} must be positive and finite, got {value!r}")


def _require_non_negative(**kwargs):
    for name, value in kwargs.items():
        if not np.isfinite(value) or value < 0:
            raise ValueError(f"{name} must be non-negative and finite, got {value!r}")


@dataclass(frozen=True)
class AtomicSystem:
    """Four-level ladder parameters.

    Dipole moments in C*m, decay and dephasing rates in rad/s, density in
    atoms/m^3, cell length in m. ``coherence_time`` is carried as metadata
    only.
    """

    dipole_12: float
    dipole_23: float
    dipole_34: float
    decay_2: float
    decay_3: float
    decay_4: float
    dephasing_total: float
    density: float
    population_fraction: float
    cell_length: float
    coherence_time: float | None = None

    def __post_init__(self):
        _require_positive(
            dipole_12=self.dipole_12,
            dipole_23=self.dipole_23,
            dipole_34=self.dipole_34,
            decay_2=self.decay_2,
            decay_3=self.decay_3,
            decay_4=self.decay_4,
            dephasing_total=self.dephasing_total,
            density=self.density,
            population_fraction=self.population_fraction,
            cell_length=self.cell_length,
        )
        if self.population_fraction > 1:
            raise ValueError("population_fraction must be <= 1")

    @property
    def active_density(self):
        """Density of atoms taking part in the ladder (atoms/m^3)."""
        return self.density * self.population_fraction

    def coherence_decay_rates(self):
        """Decay rates (gamma_21, gamma_31, gamma_41) of the ground coherences.

        Each is half the sum of the total population decay of the two levels;
        the extra dephasing acts on every coherence involving level 2.
        """
        g21 = 0.5 * self.decay_2 + self.dephasing_total
        g31 = 0.5 * self.decay_3
        g41 = 0.5 * self.decay_4
        return g21, g31, g41


@dataclass(frozen=True)
class OpticalDrive:
    probe_wavelength: float
    coupling_wavelength: float
    probe_power: float
    coupling_power: float
    local_optical_power: float
    beam_radius: float
    probe_detuning: float = 0.0
    coupling_detuning: float = 0.0

    def __post_init__(self):
        _require_positive(
            probe_wavelength=self.probe_wavelength,
            coupling_wavelength=self.coupling_wavelength,
            beam_radius=self.beam_radius,
        )
        _require_non_negative(
            probe_power=self.probe_power,
            coupling_power=self.coupling_power,
            local_optical_power=self.local_optical_power,
        )

    def probe_rabi(self, system: AtomicSystem):
        return rabi_from_beam(self.probe_power, self.beam_radius, system.dipole_12, self.probe_wavelength)

    def coupling_rabi(self, system: AtomicSystem):
        return rabi_from_beam(self.coupling_power, self.beam_radius, system.dipole_23, self.coupling_wavelength)

    def probe_field(self):
        return beam_field_amplitude(self.probe_power, self.beam_radius)

    def probe_wavenumber(self):
        return TWO_PI / self.probe_wavelength


@dataclass(frozen=True)
class RfDrive:
    """RF local oscillator and signal. Amplitudes are peak fields in V/m."""

    carrier_frequency: float
    lo_amplitude: float
    signal_amplitude: float = 0.0
    lo_signal_offset: float = 0.0
    rf_detuning: float = 0.0
    bandwidth: float = 100e3

    def __post_init__(self):
        _require_positive(carrier_frequency=self.carrier_frequency, bandwidth=self.bandwidth)
        _require_non_negative(
            lo_amplitude=self.lo_amplitude,
            signal_amplitude=self.signal_amplitude,
            lo_signal_offset=self.lo_signal_offset,
        )

    @property
    def field_amplitude(self):
        """Peak envelope of LO plus signal (in phase)."""
        return self.lo_amplitude + self.signal_amplitude

    def with_lo(self, lo_amplitude):
        return RfDrive(
            self.carrier_frequency,
            lo_amplitude,
            self.signal_amplitude,
            self.lo_signal_offset,
            self.rf_detuning,
            self.bandwidth,
        )


@dataclass(frozen=True)
class EitSpectrum:
    detuning_grid: np.ndarray
    transmission: np.ndarray
    susceptibility: np.ndarray

    def __post_init__(self):
        n = len(self.detuning_grid)
        if len(self.transmission) != n or len(self.susceptibility) != n:
            raise ValueError("spectrum arrays must have equal length")


class Detection(enum.Enum):
    DIOD = "DIOD"
    BCOD = "BCOD"


@dataclass(frozen=True)
class PhotoReceiver:
    quantum_efficiency: float
    lna_gain: float
    lna_noise_temperature: float
    load_resistance: float
    scheme: Detection = Detection.BCOD

    def __post_init__(self):
        _require_positive(quantum_efficiency=self.quantum_efficiency, load_resistance=self.load_resistance)
        _require_non_negative(lna_noise_temperature=self.lna_noise_temperature)
        if self.quantum_efficiency > 1:
            raise ValueError("quantum_efficiency must be <= 1")
        if not isinstance(self.scheme, Detection):
            object.__setattr__(self, "scheme", Detection(self.scheme))

    def with_scheme(self, scheme):
        return PhotoReceiver(
            self.quantum_efficiency,
            self.lna_gain,
            self.lna_noise_temperature,
            self.load_resistance,
            Detection(scheme),
        )


# --------------------------------------------------------------------------
# Rabi frequencies
# --------------------------------------------------------------------------


def beam_field_amplitude(power, radius):
    """Peak electric field (V/m) at the centre of a Gaussian beam.

    Uses the peak intensity I = 2P/(pi r^2) and E = sqrt(2I/(c eps0)).
    """
    _require_non_negative(power=power)
    _require_positive(radius=radius)
    intensity = 2.0 * power / (np.pi * radius**2)
    return np.sqrt(2.0 * intensity / (SPEED_OF_LIGHT * EPSILON_0))


def rabi_from_beam(power, radius, dipole, wavelength):
    """Angular Rabi frequency (rad/s) of a Gaussian laser beam.

    Parameters
    ----------
    power : float
        Beam power in W. Zero is allowed and gives zero.
    radius : float
        Beam radius in m.
    dipole : float
        Transition dipole moment in C*m.
    wavelength : float
        Beam wavelength in m; validated but the peak field does not depend
        on it.
    """
    _require_positive(radius=radius, dipole=dipole, wavelength=wavelength)
    _require_non_negative(power=power)
    return dipole * beam_field_amplitude(power, radius) / HBAR


def rabi_from_field(amplitude, dipole):
    """Angular Rabi frequency mu*E/hbar for a field amplitude in V/m."""
    _require_non_negative(amplitude=amplitude)
    _require_positive(dipole=dipole)
    return dipole * amplitude / HBAR


# --------------------------------------------------------------------------
# Master equation
# --------------------------------------------------------------------------
#
# Row-major vectorisation: vec(A X B) = kron(A, B.T) vec(X), vec = X.ravel().

_EYE = np.eye(N_LEVELS)


def _ket_bra(i, j):
    m = np.zeros((N_LEVELS, N_LEVELS), dtype=complex)
    m[i, j] = 1.0
    return m


def _commutator_super(h):
    return -1j * (np.kron(h, _EYE) - np.kron(_EYE, h.T))


def _dissipator_super(c):
    cdc = c.conj().T @ c
    return np.kron(c, c.conj()) - 0.5 * np.kron(cdc, _EYE) - 0.5 * np.kron(_EYE, cdc.T)


def _collapse_operators(system):
    return [
        np.sqrt(system.decay_2) * _ket_bra(0, 1),
        np.sqrt(system.decay_3) * _ket_bra(1, 2),
        np.sqrt(system.decay_4) * _ket_bra(2, 3),
        # pure dephasing of level 2; adds dephasing_total to every rho_2j
        np.sqrt(2.0 * system.dephasing_total) * _ket_bra(1, 1),
    ]


def _hamiltonian(rabi_p, rabi_c, rabi_rf, detunings):
    dp, dc, drf = detunings
    h = -np.diag([0.0, dp, dp + dc, dp + dc + drf]).astype(complex)
    h -= 0.5 * rabi_p * (_ket_bra(0, 1) + _ket_bra(1, 0))
    h -= 0.5 * rabi_c * (_ket_bra(1, 2) + _ket_bra(2, 1))
    h -= 0.5 * rabi_rf * (_ket_bra(2, 3) + _ket_bra(3, 2))
    return h


def _dissipator_total(system):
    return sum(_dissipator_super(c) for c in _collapse_operators(system))


def liouvillian(system, rabi_p, rabi_c, rabi_rf, detunings=(0.0, 0.0, 0.0)):
    """16x16 Liouvillian acting on the row-major vectorised density matrix.

    The rotating-frame Hamiltonian is
    ``H/hbar = -diag(0, dp, dp+dc, dp+dc+drf) - (1/2) sum Omega (|i><j| + h.c.)``
    with level-cascade spontaneous decay and pure dephasing of level 2.
    """
    h = _hamiltonian(rabi_p, rabi_c, rabi_rf, detunings)
    return _commutator_super(h) + _dissipator_total(system)


_TRACE_ROW = _EYE.ravel().astype(complex)


@dataclass(frozen=True)
class SteadyState:
    rho: np.ndarray
    residual: float

    @property
    def rho21(self):
        return self.rho[1, 0]

    @property
    def populations(self):
        return np.real(np.diag(self.rho))


def _solve_steady(lv):
    """Replace the first (redundant) population equation by the trace."""
    scale = np.max(np.abs(lv))
    if scale == 0:
        raise SteadyStateError("Liouvillian is identically zero; steady state is not unique")
    a = lv / scale
    a[..., 0, :] = _TRACE_ROW
    b = np.zeros(a.shape[:-1], dtype=complex)
    b[..., 0] = 1.0
    cond = np.linalg.cond(a)
    if np.any(~np.isfinite(cond)) or np.any(cond > 1e14):
        raise SteadyStateError(f"steady-state system is singular (condition number {np.max(cond):.3g})")
    try:
        x = np.linalg.solve(a, b[..., None])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise SteadyStateError(f"steady-state solve failed: {exc}") from exc
    return x


def _relative_residual(lv, x):
    r = np.linalg.norm(np.einsum("...ij,...j->...i", lv, x), axis=-1)
    return r / (np.linalg.norm(lv, axis=(-2, -1)) * np.linalg.norm(x, axis=-1))


def steady_state_coherence(system, rabi_p, rabi_c, rabi_rf, detunings=(0.0, 0.0, 0.0)):
    """Steady-state density matrix of the four-level ladder.

    Parameters
    ----------
    system : AtomicSystem
    rabi_p, rabi_c, rabi_rf : float
        Angular Rabi frequencies (rad/s), non-negative.
    detunings : tuple of float
        Probe, coupling and RF detunings (rad/s).

    Returns
    -------
    SteadyState
        ``rho`` (4x4, rows/cols in ladder order) and the relative Lindblad
        residual ``||L rho|| / (||L|| ||rho||)``. ``rho21`` is ``rho[1, 0]``.

    Raises
    ------
    SteadyStateError
        If the linear system has no unique solution.
    """
    _require_non_negative(rabi_p=rabi_p, rabi_c=rabi_c, rabi_rf=rabi_rf)
    lv = liouvillian(system, rabi_p, rabi_c, rabi_rf, detunings)
    x = _solve_steady(lv)
    rho = x.reshape(N_LEVELS, N_LEVELS)
    return SteadyState(rho=rho, residual=float(_relative_residual(lv, x)))


def _steady_state_grid(system, rabi_p, rabi_c, rabi_rf, probe_detunings, dc, drf):
    """Batched steady states over a probe-detuning grid; returns (rho, residual)."""
    dps = np.atleast_1d(np.asarray(probe_detunings, dtype=float))
    base = liouvillian(system, rabi_p, rabi_c, rabi_rf, (0.0, dc, drf))
    # the probe detuning enters H linearly as -dp * diag(0, 1, 1, 1)
    slope = _commutator_super(-np.diag([0.0, 1.0, 1.0, 1.0]).astype(complex))
    lv = base[None, :, :] + dps[:, None, None] * slope[None, :, :]
    x = _solve_steady(lv)
    return x.reshape(-1, N_LEVELS, N_LEVELS), _relative_residual(lv, x)


# --------------------------------------------------------------------------
# Susceptibility and spectra
# --------------------------------------------------------------------------


def _susceptibility(system, drive, rho21):
    # chi = 2 N mu12 rho21 / (eps0 E_p)
    return 2.0 * system.active_density * system.dipole_12 * rho21 / (EPSILON_0 * drive.probe_field())


def _transmission(system, drive, chi):
    return np.exp(-drive.probe_wavenumber() * system.cell_length * np.imag(chi))


def _drive_rabis(system, drive, rf_field):
    if drive.probe_power <= 0:
        raise ValueError("probe_power must be positive to define the susceptibility")
    return (
        drive.probe_rabi(system),
        drive.coupling_rabi(system),
        rabi_from_field(rf_field, system.dipole_34),
    )


def eit_spectrum(system, drive, rf, grid):
    """Probe transmission and susceptibility over a probe-detuning grid.

    ``grid`` holds probe detunings in rad/s and must be strictly increasing.
    The RF Rabi frequency uses the in-phase envelope of LO plus signal.
    A :class:`ModelValidityWarning` is emitted if Im(chi) turns negative.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-D array")
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    wp, wc, wrf = _drive_rabis(system, drive, rf.field_amplitude)
    rho, _ = _steady_state_grid(system, wp, wc, wrf, grid, drive.coupling_detuning, rf.rf_detuning)
    chi = _susceptibility(system, drive, rho[:, 1, 0])
    if np.any(np.imag(chi) < 0):
        warnings.warn(
            "Im(chi) < 0 on part of the grid: probe gain without inversion, results outside model validity",
            ModelValidityWarning,
            stacklevel=2,
        )
    return EitSpectrum(grid.copy(), _transmission(system, drive, chi), chi)


def probe_transmission(system, drive, rf_field, probe_detuning=None):
    """Scalar probe transmission for a given RF field amplitude (V/m)."""
    dp = drive.probe_detuning if probe_detuning is None else probe_detuning
    wp, wc, wrf = _drive_rabis(system, drive, rf_field)
    ss = steady_state_coherence(system, wp, wc, wrf, (dp, drive.coupling_detuning, 0.0))
    return float(_transmission(system, drive, _susceptibility(system, drive, ss.rho21)))


def transmission_peaks(system, drive, rf, grid, n_peaks=2):
    """Locate the ``n_peaks`` most prominent transmission maxima.

    Peaks are found on the sampled spectrum and refined with a bounded
    scalar search on the exact steady state. Returns sorted detunings (rad/s).
    """
    spec = eit_spectrum(system, drive, rf, grid)
    idx, props = find_peaks(spec.transmission, prominence=0)
    if idx.size < n_peaks:
        raise ValueError(f"found {idx.size} transmission peaks, expected {n_peaks}")
    best = idx[np.argsort(props["prominences"])[::-1][:n_peaks]]
    step = grid[1] - grid[0] if len(grid) > 1 else 1.0
    refined = []
    for i in best:
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, len(grid) - 1)]
        if hi - lo < step:
            refined.append(grid[i])
            continue
        res = minimize_scalar(
            lambda d: -probe_transmission(system, drive, rf.field_amplitude, d),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-6 * step},
        )
        refined.append(res.x)
    return np.sort(np.asarray(refined))


def eit_linewidth(system, drive):
    """FWHM (rad/s) of the EIT-induced transparency with the RF off.

    The transparency is the difference between the probe transmission with
    and without the coupling beam, on two-photon resonance.
    """
    no_coupling = OpticalDrive(
        drive.probe_wavelength,
        drive.coupling_wavelength,
        drive.probe_power,
        0.0,
        drive.local_optical_power,
        drive.beam_radius,
        drive.probe_detuning,
        drive.coupling_detuning,
    )
    centre = -drive.coupling_detuning

    def excess(delta):
        return probe_transmission(system, drive, 0.0, centre + delta) - probe_transmission(
            system, no_coupling, 0.0, centre + delta
        )

    half = 0.5 * excess(0.0)
    if half <= 0:
        raise ValueError("no EIT transparency at two-photon resonance")
    hi = 1e3
    while excess(hi) > half:
        hi *= 2.0
        if hi > 1e12:
            raise ValueError("EIT half-maximum not bracketed")
    return 2.0 * brentq(lambda d: excess(d) - half, hi / 2.0 if hi > 1e3 else 0.0, hi, xtol=1e-6 * hi)


# --------------------------------------------------------------------------
# Superheterodyne gain and detection noise
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TransductionGain:
    """Probe-power response to the RF field around the LO operating point.

    ``slope`` is dP_out/dE_RF (W per V/m) with its sign; ``kappa`` is its
    magnitude, the beat-note conversion gain. ``step`` is the finite
    difference step (V/m) at which the estimate converged.
    """

    kappa: float
    slope: float
    step: float
    detector_power: float
    transmission: float


def superhet_transduction_gain(system, drive, rf, rel_step=0.05, rtol=0.05, max_halvings=30):
    """Superheterodyne conversion gain by central finite differences.

    The step starts at ``rel_step * lo_amplitude`` and is halved until two
    successive estimates agree within ``rtol``. The signal amplitude does
    not enter: the gain is a property of the LO operating point.

    Raises
    ------
    TransductionError
        If the estimate does not converge or the slope vanishes.
    """
    if rf.lo_amplitude <= 0:
        raise ValueError("superheterodyne gain needs lo_amplitude > 0")
    e0 = rf.lo_amplitude

    def power_out(e):
        return drive.probe_power * probe_transmission(system, drive, e)

    def derivative(h):
        return (power_out(e0 + h) - power_out(e0 - h)) / (2.0 * h)

    h = rel_step * e0
    prev = derivative(h)
    history = [(h, prev)]
    for _ in range(max_halvings):
        h *= 0.5
        cur = derivative(h)
        history.append((h, cur))
        if np.isfinite(cur) and abs(cur - prev) <= rtol * abs(cur) and cur != 0:
            t0 = probe_transmission(system, drive, e0)
            return TransductionGain(
                kappa=abs(cur),
                slope=cur,
                step=h,
                detector_power=drive.probe_power * t0,
                transmission=t0,
            )
        prev = cur
    diag = ", ".join(f"h={hh:.3g}:{dd:.4g}" for hh, dd in history[-4:])
    raise TransductionError(f"finite-difference gain did not converge or is zero ({diag})")


@dataclass(frozen=True)
class NoiseBudget:
    """Photodetection noise at the LNA output.

    ``shot_psd`` and ``thermal_psd`` are current PSDs (A^2/Hz) at the output.
    ``signal_power_gain`` is the power gain applied to the probe-beat
    photocurrent (LNA gain, times the LO boost for balanced detection), so
    ``input_referred_psd`` is the noise referred back to the bare DIOD
    photocurrent.
    """

    responsivity: float
    shot_psd: float
    thermal_psd: float
    signal_power_gain: float
    scheme: Detection

    @property
    def total_psd(self):
        return self.shot_psd + self.thermal_psd

    @property
    def input_referred_psd(self):
        return self.total_psd / self.signal_power_gain

    @property
    def shot_to_thermal(self):
        return self.shot_psd / self.thermal_psd


def photodetection_noise(rx, optical_power_at_detector, probe_wavelength, local_optical_power=0.0):
    """Shot and thermal noise of the photodetection stage.

    Responsivity is eta*q/(h*nu). Shot noise 2*q*i_ph is amplified by the
    photodetector LNA; the load thermal noise 4*k*T/R is added after it.
    For BCOD the strong local beam lifts the beat current by
    g^2 = (P_probe + P_local)/P_probe and the shot noise comes from the total
    optical power, so the thermal share falls to zero as P_local grows.
    """
    _require_non_negative(
        optical_power_at_detector=optical_power_at_detector,
        local_optical_power=local_optical_power,
    )
    _require_positive(probe_wavelength=probe_wavelength)
    responsivity = rx.quantum_efficiency * ELEMENTARY_CHARGE * probe_wavelength / (PLANCK * SPEED_OF_LIGHT)
    lna = float(db_to_lin(rx.lna_gain))
    thermal = 4.0 * BOLTZMANN * rx.lna_noise_temperature / rx.load_resistance
    p_probe = optical_power_at_detector
    if rx.scheme is Detection.BCOD:
        p_total = p_probe + local_optical_power
        boost = p_total / p_probe if p_probe > 0 else 1.0
    else:
        p_total = p_probe
        boost = 1.0
    shot = lna * 2.0 * ELEMENTARY_CHARGE * responsivity * p_total
    return NoiseBudget(
        responsivity=responsivity,
        shot_psd=shot,
        thermal_psd=thermal,
        signal_power_gain=lna * boost,
        scheme=rx.scheme,
    )


@dataclass(frozen=True)
class FieldSensitivity:
    value: float  # (V/m)/sqrt(Hz)
    gain: TransductionGain
    noise: NoiseBudget

    @property
    def nv_per_cm(self):
        """Sensitivity in nV cm^-1 Hz^-1/2."""
        return self.value / NV_PER_CM


def equivalent_field_sensitivity(system, drive, rf, rx, gain=None):
    """Minimum detectable RF field in a 1 Hz bandwidth.

    E_min = sqrt(S_in) / (R * kappa) with S_in the input-referred current
    noise PSD, R the responsivity and kappa the superheterodyne gain.
    """
    if gain is None:
        gain = superhet_transduction_gain(system, drive, rf)
    if not np.isfinite(gain.kappa) or gain.kappa <= 0:
        raise TransductionError("operating point gives no transduction (kappa <= 0)")
    noise = photodetection_noise(rx, gain.detector_power, drive.probe_wavelength, drive.local_optical_power)
    value = np.sqrt(noise.input_referred_psd) / (noise.responsivity * gain.kappa)
    return FieldSensitivity(value=float(value), gain=gain, noise=noise)


def write_spectrum_csv(path, spectrum):
    """Write a spectrum as ``detuning_hz, transmission, chi_re, chi_im``."""
    from ._io import write_csv

    rows = zip(
        spectrum.detuning_grid / TWO_PI,
        spectrum.transmission,
        np.real(spectrum.susceptibility),
        np.imag(spectrum.susceptibility),
    )
    write_csv(path, ["detuning_hz", "transmission", "chi_re", "chi_im"], rows)
