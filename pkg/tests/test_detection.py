import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import qpsk_ber, wilson
from raqr.channel import UlaGeometry
from raqr.detection import (
    BerSetup,
    Detector,
    PilotConfig,
    RankDeficientError,
    StoppingRule,
    ber_monte_carlo,
    ber_rows,
    detect_symbols,
    interpolate_csi,
    ls_channel_estimate,
    mmse_channel_estimate,
    orthogonal_pilots,
    qpsk_demodulate,
    qpsk_modulate,
    sweep_value_at_ber,
    wilson_interval,
)
from raqr.link import LinkScenario, ReceiverModel

SCEN = LinkScenario(500e3, 6.9458e9, 1e5, 0.0)


def _cn(rng, shape, var=1.0):
    return np.sqrt(var / 2) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


# ---------------------------------------------------------------- QPSK


@given(st.lists(st.integers(0, 1), min_size=2, max_size=64).filter(lambda b: len(b) % 2 == 0))
def test_qpsk_round_trip(bits):
    s = qpsk_modulate(bits)
    assert np.allclose(np.abs(s), 1.0)
    assert np.array_equal(qpsk_demodulate(s), bits)


def test_qpsk_gray_map():
    s = qpsk_modulate([0, 0, 0, 1, 1, 1, 1, 0])
    r = 1 / np.sqrt(2)
    assert np.allclose(s, [r + 1j * r, r - 1j * r, -r - 1j * r, -r + 1j * r])
    # quadrant neighbours differ in one bit
    bits = qpsk_demodulate(s).reshape(4, 2)
    for a, b in zip(bits, np.roll(bits, -1, axis=0)):
        assert np.sum(a != b) == 1
    with pytest.raises(ValueError):
        qpsk_modulate([0, 1, 1])


# ---------------------------------------------------------------- estimation


def test_pilots_are_orthogonal():
    for k, n in ((3, 3), (3, 8), (1, 16)):
        x = orthogonal_pilots(k, n, 2.0)
        # no entry exceeds the per-symbol pilot power
        assert np.all(np.abs(x) ** 2 <= 2.0 + 1e-12)
        energy = 2.0 * np.count_nonzero(np.abs(x) > 0, axis=1)
        assert np.allclose(x @ x.conj().T, np.diag(energy))
    with pytest.raises(ValueError):
        orthogonal_pilots(4, 2)


def test_mmse_noiseless_limit_recovers_channel():
    rng = np.random.default_rng(0)
    h = _cn(rng, (6, 3))
    x = orthogonal_pilots(3, 4)
    est = mmse_channel_estimate(h @ x, x, 1e-12, np.eye(3))
    assert np.allclose(est.estimate, h, atol=1e-9)
    assert est.mse < 1e-9


def test_mmse_uninformative_limit_returns_prior():
    rng = np.random.default_rng(1)
    x = orthogonal_pilots(2, 2)
    mean = _cn(rng, (5, 2))
    y = _cn(rng, (5, 2))
    est = mmse_channel_estimate(y, x, 1e12, np.eye(2), prior_mean=mean)
    assert np.allclose(est.estimate, mean, atol=1e-9)
    assert est.mse == pytest.approx(5 * 2, rel=1e-9)


def test_mmse_matches_monte_carlo():
    rng = np.random.default_rng(2)
    m, k, s2 = 4, 1, 0.5
    x = np.eye(1, dtype=complex)
    h = _cn(rng, (5000, m, k))
    y = h @ x + _cn(rng, (5000, m, 1), s2)
    est = mmse_channel_estimate(y, x, s2, np.eye(k))
    err = np.sum(np.abs(est.estimate - h) ** 2, axis=(1, 2))
    # closed form for a scalar pilot: M s2 / (1 + s2)
    assert est.mse == pytest.approx(m * s2 / (1 + s2))
    assert abs(err.mean() - est.mse) <= 3 * err.std(ddof=1) / np.sqrt(err.size)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 4), st.floats(1e-3, 10.0))
def test_mmse_never_worse_than_ls(k, extra, s2):
    x = orthogonal_pilots(k, k + extra)
    est = mmse_channel_estimate(np.zeros((3, k + extra)), x, s2, np.eye(k))
    _, ls_mse = ls_channel_estimate(np.zeros((3, k + extra)), x, s2)
    assert est.mse <= ls_mse * (1 + 1e-12)
    post = est.posterior_covariance
    assert np.allclose(post, post.conj().T)
    assert np.min(np.linalg.eigvalsh(post)) >= -1e-12


def test_mmse_input_validation():
    x = orthogonal_pilots(2, 2)
    with pytest.raises(ValueError):
        mmse_channel_estimate(np.zeros((3, 2)), x, 0.0, np.eye(2))
    with pytest.raises(ValueError):
        mmse_channel_estimate(np.zeros((3, 5)), x, 1.0, np.eye(2))
    with pytest.raises(ValueError):
        mmse_channel_estimate(np.zeros((3, 2)), x, 1.0, np.eye(3))
    with pytest.raises(ValueError):
        mmse_channel_estimate(np.zeros((3, 2)), x, 1.0, -np.eye(2))


def test_ls_is_exact_without_noise():
    rng = np.random.default_rng(4)
    h = _cn(rng, (4, 2))
    x = orthogonal_pilots(2, 5)
    est, mse = ls_channel_estimate(h @ x, x)
    assert np.allclose(est, h)
    assert mse is None


# ---------------------------------------------------------------- interpolation


def test_interpolation_identity_at_pilots():
    rng = np.random.default_rng(5)
    est = _cn(rng, (4, 3, 2))
    idx = [0, 5, 10, 15]
    out = interpolate_csi(idx, est, 16)
    assert np.allclose(out[idx], est)


def test_interpolation_exact_on_linear_channels():
    rng = np.random.default_rng(6)
    a, b = _cn(rng, (3, 2)), _cn(rng, (3, 2))
    n = np.arange(16)
    truth = a[None] + n[:, None, None] * b[None]
    idx = [0, 4, 8, 12, 15]
    assert np.allclose(interpolate_csi(idx, truth[idx], 16), truth)


def test_interpolation_on_slow_phase_ramp():
    # 1 us delay on 6.25 kHz spacing: 0.04 rad per subcarrier
    n = np.arange(16)
    truth = np.exp(-2j * np.pi * 6.25e3 * 1e-6 * n)[:, None, None]
    idx = [0, 4, 8, 12, 15]
    out = interpolate_csi(idx, truth[idx], 16)
    assert np.max(np.abs(out - truth) / np.abs(truth)) < 0.01


def test_interpolation_holds_edges_and_validates():
    est = np.array([1.0, 3.0])[:, None, None]
    out = interpolate_csi([2, 4], est, 6)
    assert np.allclose(out[:, 0, 0], [1, 1, 1, 2, 3, 3])
    with pytest.raises(ValueError):
        interpolate_csi([4, 2], est, 6)
    with pytest.raises(ValueError):
        interpolate_csi([0, 1, 2], est, 6)


def test_single_pilot_warns():
    with pytest.warns(UserWarning, match="single pilot"):
        out = interpolate_csi([3], np.ones((1, 2, 1)), 5)
    assert out.shape == (5, 2, 1)


def test_pilot_config():
    p = PilotConfig.comb(16, 4, 16)
    assert p.pilot_subcarrier_indices == (0, 4, 8, 12, 15)
    with pytest.raises(ValueError):
        p.validate_grid(8)
    with pytest.raises(ValueError):
        PilotConfig(0)
    with pytest.raises(ValueError):
        PilotConfig(4, (1, 1))
    with pytest.raises(ValueError):
        PilotConfig(4, (0,), 0.0)


# ---------------------------------------------------------------- detectors


def test_zf_noiseless_is_exact():
    rng = np.random.default_rng(7)
    h = _cn(rng, (8, 3))
    bits = rng.integers(0, 2, (3, 40))
    x = qpsk_modulate(bits)
    res = detect_symbols(h @ x, h, 1e-3, Detector.ZF)
    assert np.allclose(res.equalized, x)
    assert np.array_equal(res.bits, bits)


def test_single_user_detectors_agree():
    rng = np.random.default_rng(8)
    h = _cn(rng, (6, 1))
    y = h @ qpsk_modulate(rng.integers(0, 2, (1, 200))) + _cn(rng, (6, 100), 2.0)
    out = [detect_symbols(y, h, 2.0, d) for d in Detector]
    for r in out[1:]:
        assert np.array_equal(r.bits, out[0].bits)
    # single user: MRC and ZF SINR equal ||h||^2 / s2, MMSE agrees
    ref = np.sum(np.abs(h) ** 2) / 2.0
    for r in out:
        assert r.sinr[0] == pytest.approx(ref)


def test_orthogonal_columns_make_mrc_equal_zf():
    h = np.linalg.qr(_cn(np.random.default_rng(9), (8, 3)))[0] * 2.0
    rng = np.random.default_rng(10)
    y = h @ qpsk_modulate(rng.integers(0, 2, (3, 64))) + _cn(rng, (8, 32), 0.3)
    a = detect_symbols(y, h, 0.3, Detector.MRC)
    b = detect_symbols(y, h, 0.3, Detector.ZF)
    assert np.allclose(a.equalized, b.equalized)
    assert np.allclose(a.sinr, b.sinr)


def test_zf_rank_deficiency_names_users():
    rng = np.random.default_rng(11)
    h = _cn(rng, (6, 3))
    h[:, 2] = 2j * h[:, 0]
    with pytest.raises(RankDeficientError) as info:
        detect_symbols(np.zeros((6, 4)), h, 1.0, Detector.ZF)
    assert info.value.users == (0, 2)
    assert "[0, 2]" in str(info.value)
    # MMSE stays defined on the same channel
    detect_symbols(np.zeros((6, 4)), h, 1.0, Detector.MMSE)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.floats(0.01, 10.0), st.integers(0, 2**31))
def test_mmse_sinr_dominates(k, s2, seed):
    rng = np.random.default_rng(seed)
    h = _cn(rng, (8, k))
    y = np.zeros((8, 1))
    sinr = {d: detect_symbols(y, h, s2, d).sinr for d in Detector}
    assert np.all(sinr[Detector.MMSE] >= sinr[Detector.ZF] * (1 - 1e-9))
    assert np.all(sinr[Detector.MMSE] >= sinr[Detector.MRC] * (1 - 1e-9))


def test_sensor_mismatch():
    with pytest.raises(ValueError):
        detect_symbols(np.zeros((4, 2)), np.zeros((5, 1)), 1.0, "MRC")


# ---------------------------------------------------------------- statistics


@given(st.integers(0, 1000), st.integers(1, 1000), st.sampled_from([1.0, 1.96, 3.0]))
def test_wilson_matches_oracle(e, n, z):
    e = min(e, n)
    lo, hi = wilson_interval(e, n, z)
    rlo, rhi = wilson(e, n, z)
    assert lo == pytest.approx(max(rlo, 0.0), abs=1e-12)
    assert hi == pytest.approx(min(rhi, 1.0), abs=1e-12)
    assert lo <= e / n <= hi


def test_stopping_rule_validation():
    with pytest.raises(ValueError):
        StoppingRule(0, 10, 1)


def test_sweep_crossing():
    assert sweep_value_at_ber([0, 1, 2], [1e-1, 1e-2, 1e-4], 1e-3) == pytest.approx(1.5)
    assert np.isnan(sweep_value_at_ber([0, 1], [1e-1, 1e-2], 1e-3))


# ---------------------------------------------------------------- Monte Carlo


def _awgn_setup(**kw):
    return BerSetup(UlaGeometry(1), SCEN, symbols_per_frame=512, sweep_var="snr_db", **kw)


def test_awgn_ber_matches_theory():
    ebn0 = np.array([2.0, 6.0])
    reps = ber_monte_carlo(_awgn_setup(), ebn0 + 10 * np.log10(2), [Detector.MRC], stopping=StoppingRule(300, 2000, 8), seed=11)
    for e, r in zip(ebn0, reps):
        lo, hi = r.interval(z=3.0)
        assert lo <= qpsk_ber(e) <= hi


def test_ber_determinism_across_workers():
    setup = BerSetup(
        UlaGeometry(4),
        SCEN,
        num_users=2,
        pilots=PilotConfig.comb(4, 2, 4),
        num_subcarriers=4,
        subcarrier_spacing=6.25e3,
        max_delay=1e-6,
        symbols_per_frame=16,
        sweep_var="snr_db",
    )
    args = dict(detectors=list(Detector), csi_modes=["perfect", "estimated"], stopping=StoppingRule(20, 24, 4), seed=5)
    a = ber_monte_carlo(setup, [-4.0, 0.0], workers=1, **args)
    b = ber_monte_carlo(setup, [-4.0, 0.0], workers=3, **args)
    assert a == b
    assert ber_monte_carlo(setup, [-4.0, 0.0], workers=1, **{**args, "seed": 6}) != a


def test_perfect_csi_beats_estimated_and_mmse_beats_zf():
    setup = BerSetup(
        UlaGeometry(8),
        SCEN,
        num_users=3,
        pilots=PilotConfig(3, (0,)),
        symbols_per_frame=64,
        sweep_var="snr_db",
        min_angle_separation=np.deg2rad(5.0),
    )
    reps = ber_monte_carlo(setup, [-6.0], list(Detector), ["perfect", "estimated"], StoppingRule(200, 400, 8), seed=2)
    by = {(r.detector, r.csi_mode): r for r in reps}
    for d in Detector:
        p, e = by[(d, "perfect")], by[(d, "estimated")]
        assert p.ber <= e.ber + 3 * np.hypot(p.sigma(), e.sigma())
    m, z = by[(Detector.MMSE, "perfect")], by[(Detector.ZF, "perfect")]
    assert m.ber <= z.ber + 3 * np.hypot(m.sigma(), z.sigma())


def test_ber_monotone_in_eirp():
    rx = ReceiverModel("rx", 1e-7)
    setup = BerSetup(UlaGeometry(4), SCEN, receiver=rx, symbols_per_frame=128)
    # per-sensor SNR spans roughly -12 to +4 dB over this EIRP range
    snr0 = rx.snr_db(SCEN)
    values = np.array([-12.0, -8.0, -4.0, 0.0]) - snr0
    reps = ber_monte_carlo(setup, values, stopping=StoppingRule(100, 200, 8), seed=3)
    b = [r.ber for r in reps]
    assert all(x >= y for x, y in zip(b, b[1:]))
    assert reps[0].sweep_var == "eirp_dbw" and reps[0].receiver == "rx"


def test_zero_errors_reports_upper_bound():
    reps = ber_monte_carlo(_awgn_setup(), [30.0], stopping=StoppingRule(1, 4, 2), seed=0)
    r = reps[0]
    assert r.bit_errors == 0 and r.ber == 0.0 and r.upper_bound_only
    assert r.reported_ber == pytest.approx(r.interval()[1])
    assert 0 < r.reported_ber < 1e-2


def test_ber_rows_columns():
    reps = ber_monte_carlo(_awgn_setup(), [0.0], [Detector.MRC, Detector.ZF], stopping=StoppingRule(10, 2, 1), seed=0)
    rows = ber_rows(reps)
    assert len(rows) == 2
    assert rows[0][:4] == ("snr_db", 0.0, "MRC", "perfect")
    assert rows[0][6] == reps[0].bits_simulated == reps[0].frames * 2 * 512


def test_setup_validation():
    with pytest.raises(ValueError):
        BerSetup(UlaGeometry(2), SCEN)  # EIRP sweep without receiver
    with pytest.raises(ValueError):
        BerSetup(UlaGeometry(2), SCEN, sweep_var="snr_db", num_users=3)
    with pytest.raises(ValueError):
        ber_monte_carlo(_awgn_setup(), [0.0], csi_modes=["estimated"])
    with pytest.raises(ValueError):
        ber_monte_carlo(_awgn_setup(), [0.0], csi_modes=["guess"])


def test_hybrid_csi_snr():
    a, b = ReceiverModel("a", 1e-8), ReceiverModel("b", 1e-7)
    s = BerSetup(UlaGeometry(2), SCEN, receiver=a, csi_receiver=b)
    assert s.snr_db(0.0) - s.csi_snr_db(0.0) == pytest.approx(20.0)
    s2 = BerSetup(UlaGeometry(2), SCEN, receiver=a, csi_receiver=b, sweep_var="snr_db")
    assert s2.csi_snr_db(5.0) == pytest.approx(-15.0)
