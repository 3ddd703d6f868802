"""Physical constants and unit helpers shared across the toolkit."""

import numpy as np
from scipy import constants as _sc

HBAR = _sc.hbar
PLANCK = _sc.h
ELEMENTARY_CHARGE = _sc.e
BOLTZMANN = _sc.k
EPSILON_0 = _sc.epsilon_0
SPEED_OF_LIGHT = _sc.c
BOHR_RADIUS = _sc.physical_constants["Bohr radius"][0]
FREE_SPACE_IMPEDANCE = _sc.physical_constants["characteristic impedance of vacuum"][0]

# dipole moments are tabulated in units of q*a0
ATOMIC_DIPOLE_UNIT = ELEMENTARY_CHARGE * BOHR_RADIUS

TWO_PI = 2.0 * np.pi

# 1 nV/cm expressed in V/m
NV_PER_CM = 1e-9 / 1e-2


def hz_to_rad(f):
    """Ordinary frequency (Hz) to angular frequency (rad/s)."""
    return TWO_PI * np.asarray(f, dtype=float) if np.ndim(f) else TWO_PI * float(f)


def rad_to_hz(w):
    """Angular frequency (rad/s) to ordinary frequency (Hz)."""
    return np.asarray(w, dtype=float) / TWO_PI if np.ndim(w) else float(w) / TWO_PI


def db_to_lin(x_db):
    """Power ratio in dB to linear."""
    return np.power(10.0, np.asarray(x_db, dtype=float) / 10.0)


def lin_to_db(x):
    """Linear power ratio to dB."""
    return 10.0 * np.log10(np.asarray(x, dtype=float))


def dbw_to_w(x_dbw):
    return db_to_lin(x_dbw)


def wavelength(frequency):
    """Free-space wavelength in m for a frequency in Hz."""
    return SPEED_OF_LIGHT / frequency
