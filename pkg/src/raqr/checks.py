"""Acceptance gates evaluated by ``--check`` runs.

Each gate returns ``(criterion, passed, detail)``. Gates that need an
independent reference carry their own closed-form oracle here rather than
reusing the code path under test.
"""

from __future__ import annotations

import numpy as np
from scipy.special import erfc

from .atomic import (
    _steady_state_grid,
    eit_linewidth,
    rabi_from_field,
    transmission_peaks,
)
from .channel import UlaGeometry
from .constants import TWO_PI
from .detection import BerSetup, Detector, StoppingRule, ber_monte_carlo, mmse_channel_estimate, sweep_value_at_ber
from .link import GEO, LinkScenario, path_gain_db
from .metrics import LOG2_DB, coverage_distance, coverage_distance_bisect, crb_range_speed, fisher_crb_oracle

__all__ = [
    "weak_probe_rho21",
    "gate_steady_state",
    "gate_ats",
    "gate_sensitivity",
    "gate_fspl",
    "gate_awgn",
    "gate_mmse",
    "gate_ber_gap",
    "gate_constellation",
    "gate_rate",
    "gate_coverage",
    "gate_crb",
]


def weak_probe_rho21(system, rabi_p, rabi_c, rabi_rf, dp, dc=0.0, drf=0.0):
    """Continued-fraction probe coherence for a weak probe."""
    g21, g31, g41 = system.coherence_decay_rates()
    inner = (rabi_rf**2 / 4) / (g41 - 1j * (dp + dc + drf))
    mid = (rabi_c**2 / 4) / (g31 - 1j * (dp + dc) + inner)
    return (1j * rabi_p / 2) / (g21 - 1j * dp + mid)


def gate_steady_state(system, drive, rf, points=100, span=TWO_PI * 10e6):
    """Residual on the full drive; weak-probe closed-form agreement with RF off and on."""
    wp = drive.probe_rabi(system)
    wc = drive.coupling_rabi(system)
    wrf = rabi_from_field(rf.lo_amplitude, system.dipole_34)
    grid = np.linspace(-span / 2, span / 2, points)
    _, res = _steady_state_grid(system, wp, wc, wrf, grid, 0.0, 0.0)
    # the probe must be weak against both the coupling and the decay
    weak = min(system.decay_2, wc) / 100
    worst = 0.0
    for w in (0.0, wrf):
        rho, r2 = _steady_state_grid(system, weak, wc, w, grid, 0.0, 0.0)
        ref = weak_probe_rho21(system, weak, wc, w, grid)
        worst = max(worst, float(np.max(np.abs(rho[:, 1, 0] - ref) / np.abs(ref))))
        res = np.concatenate([res, r2])
    ok = res.max() < 1e-9 and worst < 0.01
    return ("1 steady state", ok, f"max residual {res.max():.2e}, max weak-probe deviation {worst:.2e}")


def gate_ats(system, drive, rf, lo_values, span=TWO_PI * 8e6, points=801):
    grid = np.linspace(-span / 2, span / 2, points)
    lw = eit_linewidth(system, drive)
    rabis, seps = [], []
    for lo in lo_values:
        r = rf.with_lo(lo)
        p = transmission_peaks(system, drive, r, grid)
        rabis.append(rabi_from_field(lo, system.dipole_34))
        seps.append(p[1] - p[0])
    rabis, seps = np.array(rabis), np.array(seps)
    slope = np.polyfit(rabis, seps, 1)[0]
    ref_rabi = rabi_from_field(0.0661, system.dipole_34)
    p = transmission_peaks(system, drive, rf.with_lo(0.0661), grid)
    rel = abs((p[1] - p[0]) - ref_rabi) / ref_rabi
    strong = bool(np.all(rabis >= 5 * lw))
    ok = 0.95 <= slope <= 1.05 and rel < 0.05 and strong
    detail = (
        f"slope {slope:.4f}, separation at 0.0661 V/m {(p[1] - p[0]) / TWO_PI / 1e3:.1f} kHz vs "
        f"{ref_rabi / TWO_PI / 1e3:.1f} kHz ({rel:.2%}), min Omega_RF / EIT width {rabis.min() / lw:.1f}"
    )
    return ("2 ATS law", ok, detail), (rabis, seps, lw)


def gate_sensitivity(bcod, diod):
    ok = 0.1 <= bcod.nv_per_cm <= 1000 and bcod.value <= diod.value
    return ("3 sensitivity", ok, f"BCOD {bcod.nv_per_cm:.3g} nV/cm/rtHz, DIOD {diod.nv_per_cm:.3g}")


def gate_fspl(carrier=6.9458e9):
    a = path_gain_db(1000e3, carrier)
    b = path_gain_db(GEO, carrier)
    # the 150-200 dB envelope is quoted in whole dB
    ok = abs(a + 169.28) <= 0.01 and abs(b + 200.35) <= 0.01 and 150 <= round(-b) <= 200
    return ("4 FSPL", ok, f"{a:.3f} dB at 1000 km, {b:.3f} dB at GEO")


def gate_awgn(seed, workers=1, stopping=StoppingRule(400, 4000, 16)):
    setup = BerSetup(
        UlaGeometry(1), LinkScenario(500e3, 6.9458e9, 1e5, 0.0), symbols_per_frame=1024, sweep_var="snr_db", stream=7
    )
    ebn0 = np.array([4.0, 8.0])
    reps = ber_monte_carlo(setup, ebn0 + 10 * np.log10(2), [Detector.MRC], ["perfect"], stopping, seed, workers)
    ok = True
    parts = []
    for e, r in zip(ebn0, reps):
        theory = 0.5 * erfc(np.sqrt(10 ** (e / 10)))
        lo, hi = r.interval(z=3.0)
        ok &= lo <= theory <= hi and r.bit_errors >= 100
        parts.append(f"{e:g} dB: {r.ber:.3e} vs {theory:.3e} ({r.bit_errors} errors)")
    return ("5 AWGN QPSK", bool(ok), "; ".join(parts))


def gate_mmse(seed, trials=1000, m=4, noise_variance=0.5):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(6,)))
    x = np.eye(1, dtype=complex)
    r = np.eye(1)
    err = np.empty(trials)
    mse = None
    for t in range(trials):
        h = (rng.standard_normal((m, 1)) + 1j * rng.standard_normal((m, 1))) / np.sqrt(2)
        n = np.sqrt(noise_variance / 2) * (rng.standard_normal((m, 1)) + 1j * rng.standard_normal((m, 1)))
        est = mmse_channel_estimate(h @ x + n, x, noise_variance, r)
        err[t] = np.sum(np.abs(est.estimate - h) ** 2)
        mse = est.mse
    sigma = err.std(ddof=1) / np.sqrt(trials)
    ok = abs(err.mean() - mse) <= 3 * sigma
    return ("6 MMSE estimator", bool(ok), f"empirical {err.mean():.4f} vs analytic {mse:.4f} (sigma {sigma:.4f})")


def gate_ber_gap(classical_reports, raqr_reports, target=1e-3, detector=Detector.MMSE, csi_mode="perfect"):
    def curve(reps):
        sel = [r for r in reps if r.detector is detector and r.csi_mode == csi_mode]
        return [r.sweep_value for r in sel], [r.ber for r in sel]

    xc = sweep_value_at_ber(*curve(classical_reports), target)
    xr = sweep_value_at_ber(*curve(raqr_reports), target)
    gap = xc - xr
    ok = bool(np.isfinite(gap) and gap >= 15.0)
    return ("7 BER gap", ok, f"gap {gap:.2f} dB at BER {target:g} ({detector.value}, {csi_mode} CSI); gate >= 15 dB")


def gate_constellation(points):
    by = {(p.num_satellites, p.mode): p.report for p in points}
    ls = sorted({p.num_satellites for p in points})

    def sig(r):
        return r.sigma()

    ok_mono = all(
        by[(b, "global")].ber <= by[(a, "global")].ber + 3 * np.hypot(sig(by[(a, "global")]), sig(by[(b, "global")]))
        for a, b in zip(ls, ls[1:])
    )
    ok_dom = all(
        by[(x, "global")].ber <= by[(x, "local")].ber + 3 * np.hypot(sig(by[(x, "global")]), sig(by[(x, "local")]))
        for x in ls
    )
    detail = f"global monotone {ok_mono}, global <= local {ok_dom}"
    ok_plateau = False
    if all(v in ls for v in (1, 2, 4, 8)):
        b = {x: by[(x, "local")].ber for x in (1, 2, 4, 8)}
        early = (b[1] - b[2]) / b[1] if b[1] > 0 else 0.0
        late = (b[4] - b[8]) / b[4] if b[4] > 0 else 0.0
        ok_plateau = late < 0.5 * early
        detail += f", local improvement 1->2 {early:.3f}, 4->8 {late:.3f}"
    return ("8 constellation", bool(ok_mono and ok_dom and ok_plateau), detail)


def gate_rate(classical, raqr, scenario, num_sensors, distance=1000e3, identity_distance=160e3):
    from .metrics import achievable_rate_curve

    c = achievable_rate_curve([distance, identity_distance], [classical, raqr], scenario, num_sensors)
    rc, sc = c[classical.name]
    rr, sr = c[raqr.name]
    gap = rr[0] - rc[0]
    ident_ok = bool(min(sc[1], sr[1]) > 15 and abs((rr[1] - rc[1]) * LOG2_DB - (sr[1] - sc[1])) <= 0.01 * (sr[1] - sc[1]))
    ok = 3.45 <= gap <= 9.45 and ident_ok
    return (
        "9 rate gap",
        bool(ok),
        f"gap {gap:.3f} bit/s/Hz at {distance / 1e3:g} km; log identity at {identity_distance / 1e3:g} km {ident_ok}",
    )


def gate_coverage(classical, raqr, scenario, threshold_db):
    # reference at the calibration distance, where the classical chain sits at threshold
    cc = coverage_distance(classical, scenario, threshold_db, scenario.distance)
    cr = coverage_distance(raqr, scenario, threshold_db, scenario.distance)
    br = coverage_distance_bisect(raqr, scenario, threshold_db)
    delta = raqr.advantage_db(classical)
    expect = cc.distance * 10 ** (delta / 20)
    if not (cc.reachable and cr.reachable):
        return ("10 coverage", False, f"threshold {threshold_db:g} dB unreachable at {scenario.distance / 1e3:g} km")
    closed_ok = abs(cr.distance - expect) <= 1e-9 * expect and abs(br - cr.distance) <= 1e-3 * cr.distance
    ok = closed_ok and 1000e3 <= cr.distance <= 4000e3
    return (
        "10 coverage",
        bool(ok),
        f"classical {cc.distance / 1e3:.1f} km, RAQR {cr.distance / 1e3:.1f} km (bisection {br / 1e3:.1f} km), advantage {delta:.2f} dB",
    )


def gate_crb(sensing, classical, raqr, distances):
    from .link import ReceiverModel

    cc = crb_range_speed(sensing, classical, distances)
    cr = crb_range_speed(sensing, raqr, distances)
    worst = 0.0
    for tot, ct, cf in zip(cc.snr_total, cc.crb_delay, cc.crb_doppler):
        ot, of = fisher_crb_oracle(sensing, tot)
        worst = max(worst, abs(ct / ot - 1), abs(cf / of - 1))
    noise_ratio = (classical.field_sensitivity / raqr.field_sensitivity) ** 2
    ratio = cc.crb_range / cr.crb_range
    ratio_ok = np.allclose(ratio, noise_ratio, rtol=1e-12, atol=0) and np.allclose(
        cc.crb_speed / cr.crb_speed, noise_ratio, rtol=1e-12, atol=0
    )
    strong = ReceiverModel("20 dB", classical.field_sensitivity / 10)
    cs = crb_range_speed(sensing, strong, distances)
    strong_ratio = float(np.min(cc.crb_range / cs.crb_range))
    ok = worst < 0.05 and ratio_ok and strong_ratio >= 100 * (1 - 1e-12)
    return (
        "11 CRB",
        bool(ok),
        f"oracle deviation {worst:.2e}, ratio {ratio[0]:.4g} vs noise ratio {noise_ratio:.4g}, "
        f"ratio at 20 dB advantage {strong_ratio:.6g}",
    )
