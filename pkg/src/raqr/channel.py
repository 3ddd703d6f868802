"""Line-of-sight uplink channel to uniform linear arrays of sensors."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .constants import db_to_lin, wavelength
from .link import path_gain_db

__all__ = [
    "UlaGeometry",
    "ChannelMatrix",
    "steering_vector",
    "los_channel",
    "wideband_extension",
    "complex_awgn",
    "draw_separated_angles",
    "write_channel_csv",
]


@dataclass(frozen=True)
class UlaGeometry:
    """Uniform linear array.

    ``element_spacing`` is in wavelengths of the carrier (0.5 is the usual
    half-wavelength array). ``boresight`` is in radians.
    """

    num_sensors: int = 100
    element_spacing: float = 0.5
    boresight: float = 0.0

    def __post_init__(self):
        if int(self.num_sensors) != self.num_sensors or self.num_sensors < 1:
            raise ValueError("num_sensors must be a positive integer")
        if not self.element_spacing > 0:
            raise ValueError("element_spacing must be positive")


def _frozen(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ChannelMatrix:
    """Narrowband M x K channel, optionally with per-subcarrier copies.

    ``per_subcarrier`` has shape (Nsc, M, K). All arrays are read-only.
    """

    gains: np.ndarray
    per_subcarrier: np.ndarray | None = None
    distances: np.ndarray | None = None
    angles: np.ndarray | None = None
    delays: np.ndarray | None = None

    def __post_init__(self):
        g = np.asarray(self.gains)
        if g.ndim != 2:
            raise ValueError("gains must be an M x K matrix")
        if not np.all(np.isfinite(g)):
            raise ValueError("channel gains must be finite")
        object.__setattr__(self, "gains", _frozen(g.astype(complex)))
        for name in ("per_subcarrier", "distances", "angles", "delays"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, _frozen(v))

    @property
    def num_sensors(self):
        return self.gains.shape[0]

    @property
    def num_users(self):
        return self.gains.shape[1]

    def column_norms_sq(self):
        return np.sum(np.abs(self.gains) ** 2, axis=0)


def steering_vector(geometry, angle_of_arrival, carrier=None):
    """Array response exp(-j 2 pi m (spacing/lambda) sin(theta)).

    Spacing is expressed in carrier wavelengths, so ``carrier`` only serves
    as a sanity check and may be omitted.
    """
    theta = float(angle_of_arrival) - geometry.boresight
    if not abs(theta) < np.pi / 2:
        raise ValueError("angle of arrival must lie strictly inside (-pi/2, pi/2) of boresight")
    if carrier is not None and not carrier > 0:
        raise ValueError("carrier must be positive")
    m = np.arange(geometry.num_sensors)
    return np.exp(-2j * np.pi * m * geometry.element_spacing * np.sin(theta))


def _propagation_phase(distance, carrier):
    # reduce the cycle count before scaling to keep precision at 1e7 cycles
    cycles = np.fmod(distance / wavelength(carrier), 1.0)
    return -2 * np.pi * cycles


def los_channel(geometry, scenarios, angles):
    """LoS channel, one column per user.

    Column k is sqrt(g_k) exp(j phi_k) a(theta_k), with g_k the linear
    free-space path gain and phi_k the propagation phase -2 pi d_k / lambda.

    Parameters
    ----------
    geometry : UlaGeometry
    scenarios : sequence of LinkScenario
        One per user; distance and carrier are used.
    angles : sequence of float
        Angle of arrival per user in radians.
    """
    scenarios = list(scenarios)
    angles = np.asarray(angles, dtype=float)
    if len(scenarios) != angles.size:
        raise ValueError("need one scenario and one angle per user")
    if len(np.unique(angles)) < angles.size:
        warnings.warn("users share an angle of arrival; channel is rank deficient", stacklevel=2)
    cols = []
    for sc, th in zip(scenarios, angles):
        g = db_to_lin(path_gain_db(sc.distance, sc.carrier_frequency))
        phase = _propagation_phase(sc.distance, sc.carrier_frequency)
        cols.append(np.sqrt(g) * np.exp(1j * phase) * steering_vector(geometry, th, sc.carrier_frequency))
    distances = np.array([sc.distance for sc in scenarios])
    return ChannelMatrix(np.column_stack(cols), distances=distances, angles=angles)


def wideband_extension(channel, num_subcarriers, subcarrier_spacing, delays):
    """Per-subcarrier copies H[n] = H * exp(-j 2 pi n df tau_k) per column."""
    if num_subcarriers < 2:
        raise ValueError("num_subcarriers must be >= 2")
    delays = np.asarray(delays, dtype=float)
    if delays.shape != (channel.num_users,):
        raise ValueError("need one delay per user")
    n = np.arange(num_subcarriers)
    ramp = np.exp(-2j * np.pi * subcarrier_spacing * n[:, None] * delays[None, :])
    per = channel.gains[None, :, :] * ramp[:, None, :]
    return ChannelMatrix(
        channel.gains,
        per_subcarrier=per,
        distances=channel.distances,
        angles=channel.angles,
        delays=delays,
    )


def complex_awgn(rng, shape, variance):
    """Circular complex Gaussian noise with the given total variance."""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def draw_separated_angles(rng, num_users, max_angle, min_separation, max_tries=1000):
    """Uniform angles in [-max_angle, max_angle] with pairwise separation."""
    if num_users * min_separation > 2 * max_angle:
        raise ValueError("cannot fit the users with the requested angular separation")
    for _ in range(max_tries):
        th = rng.uniform(-max_angle, max_angle, size=num_users)
        if num_users < 2 or np.min(np.diff(np.sort(th))) >= min_separation:
            return th
    raise RuntimeError("could not draw angles with the requested separation")


def write_channel_csv(path, channel):
    """Debug dump with columns subcarrier, sensor, user, re, im."""
    from ._io import write_csv

    h = channel.per_subcarrier if channel.per_subcarrier is not None else channel.gains[None]
    rows = (
        (n, m, k, h[n, m, k].real, h[n, m, k].imag)
        for n in range(h.shape[0])
        for m in range(h.shape[1])
        for k in range(h.shape[2])
    )
    write_csv(path, ["subcarrier", "sensor", "user", "re", "im"], rows)
