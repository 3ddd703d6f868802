import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from raqr._io import read_csv
from raqr.channel import (
    ChannelMatrix,
    UlaGeometry,
    complex_awgn,
    draw_separated_angles,
    los_channel,
    steering_vector,
    wideband_extension,
    write_channel_csv,
)
from raqr.link import LinkScenario, path_gain_db

FC = 6.9458e9
angles = st.floats(-1.5, 1.5)


@given(st.integers(1, 64), angles)
def test_steering_unit_modulus(m, th):
    a = steering_vector(UlaGeometry(m), th)
    assert np.allclose(np.abs(a), 1.0)
    assert np.linalg.norm(a) ** 2 == pytest.approx(m)
    assert a[0] == 1


@given(st.integers(2, 64), angles)
def test_steering_is_geometric(m, th):
    a = steering_vector(UlaGeometry(m), th)
    ratio = a[1:] / a[:-1]
    assert np.allclose(ratio, np.exp(-1j * np.pi * np.sin(th)))


@given(angles)
def test_steering_mirror_is_conjugate(th):
    g = UlaGeometry(16)
    assert np.allclose(steering_vector(g, -th), np.conj(steering_vector(g, th)))


def test_steering_respects_boresight_and_range():
    g = UlaGeometry(8, boresight=0.3)
    assert np.allclose(steering_vector(g, 0.3), 1.0)
    with pytest.raises(ValueError):
        steering_vector(UlaGeometry(8), np.pi / 2)
    with pytest.raises(ValueError):
        steering_vector(UlaGeometry(8), 0.0, carrier=0.0)


def test_geometry_validation():
    for kw in ({"num_sensors": 0}, {"num_sensors": 2.5}, {"element_spacing": 0.0}):
        with pytest.raises(ValueError):
            UlaGeometry(**kw)


def _scen(d):
    return LinkScenario(d, FC, 1e5, 0.0)


@settings(max_examples=30)
@given(st.integers(1, 32), st.lists(st.floats(160e3, 3e7), min_size=1, max_size=4))
def test_column_norm_is_m_times_path_gain(m, ds):
    th = np.linspace(-0.8, 0.8, len(ds)) if len(ds) > 1 else [0.1]
    h = los_channel(UlaGeometry(m), [_scen(d) for d in ds], th)
    expect = m * 10 ** (path_gain_db(np.array(ds), FC) / 10)
    assert np.allclose(h.column_norms_sq(), expect, rtol=1e-12)


def test_path_gain_consistency_at_500km():
    h = los_channel(UlaGeometry(100), [_scen(500e3)], [0.2])
    per_sensor_db = 10 * np.log10(np.abs(h.gains[:, 0]) ** 2)
    assert np.max(np.abs(per_sensor_db - path_gain_db(500e3, FC))) < 1e-9


def test_propagation_phase_follows_distance():
    lam = 299792458.0 / FC
    d = 500e3
    h1 = los_channel(UlaGeometry(1), [_scen(d)], [0.0]).gains[0, 0]
    h2 = los_channel(UlaGeometry(1), [_scen(d + lam / 4)], [0.0]).gains[0, 0]
    dphi = np.angle(h2 / h1)
    assert dphi == pytest.approx(-np.pi / 2, abs=1e-6)


def test_shared_angle_is_rank_one_and_warns():
    with pytest.warns(UserWarning, match="rank deficient"):
        h = los_channel(UlaGeometry(16), [_scen(500e3), _scen(600e3)], [0.3, 0.3])
    assert np.linalg.matrix_rank(h.gains) == 1


def test_distinct_angles_full_rank():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        h = los_channel(UlaGeometry(16), [_scen(500e3), _scen(600e3), _scen(700e3)], [-0.5, 0.0, 0.4])
    assert np.linalg.matrix_rank(h.gains) == 3


def test_channel_mismatch_and_finite():
    with pytest.raises(ValueError):
        los_channel(UlaGeometry(4), [_scen(1e6)], [0.0, 0.1])
    with pytest.raises(ValueError):
        ChannelMatrix(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        ChannelMatrix(np.ones(3))


def test_arrays_are_read_only():
    h = los_channel(UlaGeometry(4), [_scen(1e6)], [0.1])
    with pytest.raises(ValueError):
        h.gains[0, 0] = 0
    with pytest.raises(ValueError):
        h.distances[0] = 0


@settings(max_examples=30)
@given(st.integers(2, 32), st.lists(st.floats(0, 5e-6), min_size=1, max_size=3), st.floats(1e3, 1e5))
def test_wideband_properties(nsc, delays, df):
    k = len(delays)
    base = los_channel(UlaGeometry(8), [_scen(5e5 + 1e4 * i) for i in range(k)], np.linspace(-0.5, 0.5, k) if k > 1 else [0.0])
    wb = wideband_extension(base, nsc, df, delays)
    assert wb.per_subcarrier.shape == (nsc, 8, k)
    assert np.allclose(wb.per_subcarrier[0], base.gains)
    # a per-user phase ramp leaves magnitudes untouched
    assert np.allclose(np.abs(wb.per_subcarrier), np.abs(base.gains)[None])
    ratio = wb.per_subcarrier[1] / base.gains
    assert np.allclose(ratio, np.exp(-2j * np.pi * df * np.array(delays))[None, :])


def test_wideband_validation():
    base = los_channel(UlaGeometry(4), [_scen(1e6)], [0.0])
    with pytest.raises(ValueError):
        wideband_extension(base, 1, 1e3, [0.0])
    with pytest.raises(ValueError):
        wideband_extension(base, 4, 1e3, [0.0, 1.0])


def test_awgn_variance():
    rng = np.random.default_rng(1)
    n = complex_awgn(rng, 200_000, 0.5)
    assert np.mean(np.abs(n) ** 2) == pytest.approx(0.5, rel=0.01)
    assert abs(np.mean(n.real**2) - np.mean(n.imag**2)) < 0.01


def test_separated_angles():
    rng = np.random.default_rng(3)
    th = draw_separated_angles(rng, 8, np.deg2rad(60), np.deg2rad(2))
    assert np.all(np.abs(th) <= np.deg2rad(60))
    assert np.min(np.diff(np.sort(th))) >= np.deg2rad(2)
    with pytest.raises(ValueError):
        draw_separated_angles(rng, 100, 0.1, 0.1)


def test_channel_csv(tmp_path):
    base = los_channel(UlaGeometry(3), [_scen(1e6), _scen(2e6)], [0.0, 0.2])
    wb = wideband_extension(base, 2, 1e3, [0.0, 1e-6])
    path = tmp_path / "h.csv"
    write_channel_csv(path, wb)
    rows = read_csv(path)
    assert len(rows) == 2 * 3 * 2
    r = rows[-1]
    assert (int(r["subcarrier"]), int(r["sensor"]), int(r["user"])) == (1, 2, 1)
    assert complex(float(r["re"]), float(r["im"])) == wb.per_subcarrier[1, 2, 1]
