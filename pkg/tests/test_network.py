import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from raqr.channel import UlaGeometry
from raqr.detection import Detector, StoppingRule, detect_symbols
from raqr.network import (
    ConstellationConfig,
    GeometryError,
    build_scenario,
    constellation_rows,
    constellation_sweep,
    fronthaul_ledger,
    global_detect,
    local_detect_fuse,
)

SMALL = ConstellationConfig(geometry=UlaGeometry(8), symbols_per_frame=32, snr_at_nadir_db=-6.0)


def _rx(ch, s2, rng, n=32):
    k = ch.gains.shape[1]
    bits = rng.integers(0, 2, (k, 2 * n))
    x = ((1 - 2 * bits[:, 0::2]) + 1j * (1 - 2 * bits[:, 1::2])) / np.sqrt(2)
    noise = np.sqrt(s2 / 2) * (rng.standard_normal((ch.gains.shape[0], n)) + 1j * rng.standard_normal((ch.gains.shape[0], n)))
    return ch.gains @ x + noise, bits


def test_scenario_is_deterministic():
    a = build_scenario(4, 4, SMALL, seed=3, frame=2)
    b = build_scenario(4, 4, SMALL, seed=3, frame=2)
    assert np.array_equal(a[1].gains, b[1].gains)
    assert not np.array_equal(a[1].gains, build_scenario(4, 4, SMALL, seed=3, frame=3)[1].gains)


def test_assignment_and_blocks():
    con, ch, serving = build_scenario(4, 6, SMALL, seed=0)
    assert list(serving) == [0, 1, 2, 3, 0, 1]
    assert ch.gains.shape == (32, 6)
    # each block norm is M times the path gain relative to nadir (h / d)^2
    for sat in range(4):
        block = ch.gains[con.row_block(sat)]
        expect = 8 * (con.altitude / ch.distances[sat]) ** 2
        assert np.allclose(np.sum(np.abs(block) ** 2, axis=0), expect)
    assert np.allclose(np.diff(con.positions), 500e3)


def test_geometry_errors():
    with pytest.raises(GeometryError):
        build_scenario(1, 9, SMALL)
    # no two of eight users may share the 120 degree field of view
    tight = ConstellationConfig(geometry=UlaGeometry(8), min_angle_separation=np.deg2rad(130.0))
    with pytest.raises(GeometryError):
        build_scenario(1, 8, tight)
    with pytest.raises(ValueError):
        ConstellationConfig(local_detector="MMSE")


def test_single_satellite_reduces_to_array_detection():
    con, ch, serving = build_scenario(1, 1, SMALL, seed=1)
    rng = np.random.default_rng(0)
    y, bits = _rx(ch, 0.5, rng)
    loc = local_detect_fuse(con, ch, y, serving, 0.5)
    glo = global_detect(con, ch, y, 0.5)
    ref = detect_symbols(y, ch.gains, 0.5, Detector.MRC)
    assert np.array_equal(loc.bits, ref.bits)
    assert np.array_equal(glo.bits, ref.bits)
    assert loc.sinr[0] == pytest.approx(glo.sinr[0])


def test_local_zf_option():
    con, ch, serving = build_scenario(2, 4, SMALL, seed=2)
    y, bits = _rx(ch, 1e-6, np.random.default_rng(1))
    res = local_detect_fuse(con, ch, y, serving, 1e-6, Detector.ZF)
    assert np.array_equal(res.bits, bits)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([1, 2, 4]), st.integers(1, 2), st.integers(0, 1000))
def test_global_sinr_dominates_local(num_sat, per, seed):
    cfg = ConstellationConfig(geometry=UlaGeometry(8), snr_at_nadir_db=-6.0)
    con, ch, serving = build_scenario(num_sat, num_sat * per, cfg, seed=seed)
    y = np.zeros((ch.gains.shape[0], 1))
    loc = local_detect_fuse(con, ch, y, serving, 4.0)
    glo = global_detect(con, ch, y, 4.0)
    assert np.all(glo.sinr >= loc.sinr * (1 - 1e-9))


def test_unassigned_user_is_rejected():
    con, ch, serving = build_scenario(2, 3, SMALL)
    y = np.zeros((16, 4))
    with pytest.raises(ValueError, match=r"\[2\]"):
        local_detect_fuse(con, ch, y, [0, 1, 5], 1.0)
    with pytest.raises(ValueError):
        global_detect(con, ch.gains[:8], y[:8], 1.0)


@given(st.integers(1, 16), st.integers(1, 32), st.integers(1, 128), st.integers(1, 512), st.integers(1, 16), st.integers(1, 128))
def test_ledger_is_pure_and_global_costs_more(num_sat, k, m, n, bq, coh):
    a = fronthaul_ledger(num_sat, k, m, n, bq, coh)
    assert a == fronthaul_ledger(num_sat, k, m, n, bq, coh)
    assert a.bits_local == 2 * k * n
    blocks = -(-n // coh)
    assert a.bits_global == 2 * bq * num_sat * m * n + 2 * bq * m * k * num_sat * blocks
    if m * num_sat >= k:
        assert a.bits_global > a.bits_local


def test_ledger_validation():
    with pytest.raises(ValueError):
        fronthaul_ledger(0, 1, 1, 1)


def test_sweep_determinism_and_rows():
    stop = StoppingRule(10, 8, 2)
    a = constellation_sweep([1, 2], SMALL, stop, seed=4, workers=1)
    b = constellation_sweep([1, 2], SMALL, stop, seed=4, workers=2)
    assert a == b
    rows = constellation_rows(a)
    assert [(r[0], r[2]) for r in rows] == [(1, "local"), (1, "global"), (2, "local"), (2, "global")]
    # one satellite, one user: both modes detect identically
    assert a[0].report.bit_errors == a[1].report.bit_errors
    assert all(r[5] > 0 for r in rows)
    assert rows[3][5] > rows[2][5]
    with pytest.raises(ValueError):
        constellation_sweep([2, 1], SMALL, stop)
