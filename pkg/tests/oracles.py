"""Independent reference implementations used by the tests.

Nothing here imports the package; constants are typed in (CODATA 2018; the package follows scipy, so expect 1e-9 level differences) and
the master equation uses column-major vectorisation with an SVD null space,
unlike the package solver.
"""

import math

import numpy as np

HBAR = 1.054571817e-34
Q = 1.602176634e-19
A0 = 5.29177210903e-11
C = 299792458.0
EPS0 = 8.8541878128e-12
H = 6.62607015e-34
KB = 1.380649e-23
Z0 = 376.730313668
TWO_PI = 2 * math.pi


def beam_rabi(power, radius, dipole_qa0):
    intensity = 2 * power / (math.pi * radius**2)
    field = math.sqrt(2 * intensity / (C * EPS0))
    return dipole_qa0 * Q * A0 * field / HBAR


def weak_probe_rho21(g21, g31, g41, wp, wc, wrf, dp, dc=0.0, drf=0.0):
    dp = np.asarray(dp, dtype=float)
    inner = (wrf**2 / 4) / (g41 - 1j * (dp + dc + drf))
    mid = (wc**2 / 4) / (g31 - 1j * (dp + dc) + inner)
    return (1j * wp / 2) / (g21 - 1j * dp + mid)


def ladder_steady_state(decays, dephasing, wp, wc, wrf, dp, dc=0.0, drf=0.0):
    """Column-major Liouvillian, steady state from the SVD null space."""
    g2, g3, g4 = decays
    h = np.zeros((4, 4), complex)
    h[1, 1] = -dp
    h[2, 2] = -(dp + dc)
    h[3, 3] = -(dp + dc + drf)
    for i, j, w in ((0, 1, wp), (1, 2, wc), (2, 3, wrf)):
        h[i, j] = h[j, i] = -w / 2
    eye = np.eye(4)
    lv = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    ops = []
    for lo, hi, g in ((0, 1, g2), (1, 2, g3), (2, 3, g4)):
        c = np.zeros((4, 4))
        c[lo, hi] = math.sqrt(g)
        ops.append(c)
    c = np.zeros((4, 4))
    c[1, 1] = math.sqrt(2 * dephasing)
    ops.append(c)
    for c in ops:
        cdc = c.T @ c
        lv = lv + np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye)
    _, _, vh = np.linalg.svd(lv)
    rho = vh[-1].conj().reshape(4, 4, order="F")
    return rho / np.trace(rho)


def fspl_db(distance, carrier):
    return -20 * math.log10(4 * math.pi * distance * carrier / C)


def qpsk_ber(ebn0_db):
    return 0.5 * math.erfc(math.sqrt(10 ** (ebn0_db / 10)))


def wilson(errors, n, z):
    p = errors / n
    d = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / d
    half = z / d * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return centre - half, centre + half


def delay_fisher_dft(sequence, fs, snr_total):
    """Delay Fisher information from the DFT of a sequence, analytically."""
    n = len(sequence)
    spec = np.fft.fft(sequence)
    f = np.fft.fftfreq(n, d=1 / fs)
    energy_deriv = np.sum(np.abs(2 * np.pi * f * spec) ** 2) / n
    sigma2 = np.sum(np.abs(sequence) ** 2) / snr_total
    return 2 * energy_deriv / sigma2


def doppler_fisher(sequence, fs, snr_total):
    """Doppler Fisher information: the derivative of s(t) exp(j 2 pi f t) is j 2 pi t s(t)."""
    n = len(sequence)
    t = (np.arange(n) - (n - 1) / 2) / fs
    sigma2 = np.sum(np.abs(sequence) ** 2) / snr_total
    return 2 * np.sum((2 * np.pi * t) ** 2 * np.abs(sequence) ** 2) / sigma2


def field_rabi(amplitude, dipole_qa0):
    return dipole_qa0 * Q * A0 * amplitude / HBAR
