"""Experiment runner: CSV outputs, JSON reports, plot scripts and gates.

Every experiment writes its CSVs, a ``report_<name>.json`` and a
``plot_<name>.py`` script into the output directory. Files are written
atomically and contain no timestamps, so a fixed seed reproduces them
byte for byte.
"""

from __future__ import annotations

import filecmp
import json
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from . import checks
from ._io import atomic_write_text, write_csv
from .atomic import (
    Detection,
    eit_spectrum,
    equivalent_field_sensitivity,
    superhet_transduction_gain,
    write_spectrum_csv,
)
from .constants import NV_PER_CM, TWO_PI
from .detection import BerSetup, ber_monte_carlo, ber_rows
from .link import LinkScenario, ReceiverModel, calibrate_eirp, link_sweep_rows
from .metrics import (
    ExperimentReport,
    achievable_rate_curve,
    coverage_distance,
    coverage_distance_bisect,
    crb_range_speed,
)
from .network import constellation_rows, constellation_sweep

__all__ = ["EXPERIMENTS", "Receivers", "build_receivers", "run_experiment", "toolkit_version"]

EXPERIMENTS = ("eit", "sensitivity", "link", "ber", "constellation", "sense", "reproduce-all")
STOCHASTIC = ("ber", "constellation")


def toolkit_version():
    try:
        from importlib.metadata import version

        return version("artifact")
    except Exception:  # pragma: no cover - running from a source tree
        return "0.1.0"


@dataclass(frozen=True)
class Receivers:
    classical: ReceiverModel
    raqr: ReceiverModel
    bcod: object  # FieldSensitivity
    diod: object
    scenario: LinkScenario  # carrier, bandwidth and EIRP of the uplink


def build_receivers(cfg):
    """Classical and RAQR receiver models from one configuration."""
    system, drive, rf, rx = cfg.atomic_system(), cfg.optical_drive(), cfg.rf_drive(), cfg.photoreceiver()
    gain = superhet_transduction_gain(system, drive, rf)
    bcod = equivalent_field_sensitivity(system, drive, rf, rx.with_scheme(Detection.BCOD), gain)
    diod = equivalent_field_sensitivity(system, drive, rf, rx.with_scheme(Detection.DIOD), gain)
    chosen = bcod if rx.scheme is Detection.BCOD else diod
    chain = cfg.classical_chain()
    link = cfg["link"]
    eirp = link["eirp_dbw"]
    if eirp is None:
        eirp = calibrate_eirp(chain, link["calibration_distance_km"], rf.carrier_frequency, rf.bandwidth, link["calibration_snr_db"])
    scenario = LinkScenario(link["calibration_distance_km"], rf.carrier_frequency, rf.bandwidth, float(eirp))
    classical = ReceiverModel.classical(chain, rf.carrier_frequency, name="classical")
    raqr = ReceiverModel.raqr(chosen.value, name="raqr")
    return Receivers(classical, raqr, bcod, diod, scenario)


# --------------------------------------------------------------------------
# plot scripts (generated text, not executed by the toolkit)
# --------------------------------------------------------------------------

_PLOT_HEADER = '''"""Generated plot script; needs matplotlib. Run from the output directory."""
import csv

import matplotlib.pyplot as plt


def load(name):
    with open(name, newline="") as fh:
        return list(csv.DictReader(fh))


def col(rows, key):
    return [float(r[key]) for r in rows]

'''

_PLOTS = {
    "eit": """
for name, label in (("eit_rf_off.csv", "RF off"), ("eit_rf_on.csv", "RF on")):
    rows = load(name)
    plt.plot([x / 1e6 for x in col(rows, "detuning_hz")], col(rows, "transmission"), label=label)
plt.xlabel("probe detuning (MHz)")
plt.ylabel("probe transmission")
plt.legend()
plt.savefig("eit.png", dpi=150)
""",
    "sensitivity": """
rows = load("sensitivity.csv")
lo = col(rows, "lo_v_per_m")
plt.loglog(lo, col(rows, "sensitivity_bcod_nv_per_cm"), label="BCOD")
plt.loglog(lo, col(rows, "sensitivity_diod_nv_per_cm"), label="DIOD")
plt.xlabel("LO amplitude (V/m)")
plt.ylabel("sensitivity (nV/cm/sqrt(Hz))")
plt.legend()
plt.savefig("sensitivity.png", dpi=150)
""",
    "link": """
rows = load("rate.csv")
d = col(rows, "distance_km")
plt.semilogx(d, col(rows, "rate_classical"), label="classical")
plt.semilogx(d, col(rows, "rate_raqr"), label="RAQR")
plt.xlabel("distance (km)")
plt.ylabel("achievable rate (bit/s/Hz)")
plt.legend()
plt.savefig("rate.png", dpi=150)
""",
    "ber": """
for name in ("ber_classical.csv", "ber_raqr.csv"):
    rows = load(name)
    for det in sorted({r["detector"] for r in rows}):
        for csi in sorted({r["csi_mode"] for r in rows}):
            sel = [r for r in rows if r["detector"] == det and r["csi_mode"] == csi]
            plt.semilogy(col(sel, "sweep_value"), col(sel, "ber"), label=f"{name[4:-4]} {det} {csi}")
plt.xlabel(rows[0]["sweep_var"])
plt.ylabel("BER")
plt.legend(fontsize=6)
plt.savefig("ber.png", dpi=150)
""",
    "constellation": """
rows = load("constellation.csv")
for mode in ("local", "global"):
    sel = [r for r in rows if r["mode"] == mode]
    plt.semilogy(col(sel, "L"), col(sel, "ber"), "o-", label=mode)
plt.xlabel("number of satellites L")
plt.ylabel("BER")
plt.legend()
plt.savefig("constellation.png", dpi=150)
""",
    "sense": """
rows = load("crb.csv")
d = col(rows, "distance_km")
fig, ax = plt.subplots(1, 2, figsize=(9, 4))
for rx in ("classical", "raqr"):
    ax[0].loglog(d, col(rows, f"crb_range_{rx}_m2"), label=rx)
    ax[1].loglog(d, col(rows, f"crb_speed_{rx}_m2_per_s2"), label=rx)
ax[0].set_ylabel("CRB range (m^2)")
ax[1].set_ylabel("CRB speed ((m/s)^2)")
for a in ax:
    a.set_xlabel("distance (km)")
    a.legend()
fig.savefig("crb.png", dpi=150)
""",
}


# --------------------------------------------------------------------------
# experiments
# --------------------------------------------------------------------------


def _exp_eit(cfg, out, seed, workers, check):
    system, drive, rf = cfg.atomic_system(), cfg.optical_drive(), cfg.rf_drive()
    o = cfg["optical"]
    grid = np.linspace(-o["spectrum_span_hz"] / 2, o["spectrum_span_hz"] / 2, o["spectrum_points"])
    off = eit_spectrum(system, drive, rf.with_lo(0.0), grid)
    on = eit_spectrum(system, drive, rf, grid)
    write_spectrum_csv(os.path.join(out, "eit_rf_off.csv"), off)
    write_spectrum_csv(os.path.join(out, "eit_rf_on.csv"), on)
    gate1 = checks.gate_steady_state(system, drive, rf)
    gate2, (rabis, seps, lw) = checks.gate_ats(system, drive, rf, cfg["rf"]["ats_lo_v_per_m"], o["spectrum_span_hz"], o["spectrum_points"])
    write_csv(
        os.path.join(out, "ats.csv"),
        ["lo_v_per_m", "omega_rf_hz", "separation_hz"],
        zip(cfg["rf"]["ats_lo_v_per_m"], rabis / TWO_PI, seps / TWO_PI),
    )
    rows = [(float(r / TWO_PI), "ats_separation_hz", float(s / TWO_PI), 0.0) for r, s in zip(rabis, seps)]
    rows.append((0.0, "eit_linewidth_hz", float(lw / TWO_PI), 0.0))
    return rows, ["eit_rf_off.csv", "eit_rf_on.csv", "ats.csv"], [gate1, gate2]


def _exp_sensitivity(cfg, out, seed, workers, check):
    system, drive, rf, rx = cfg.atomic_system(), cfg.optical_drive(), cfg.rf_drive(), cfg.photoreceiver()
    r = cfg["rf"]
    los = np.geomspace(r["lo_sweep_min_v_per_m"], r["lo_sweep_max_v_per_m"], r["lo_sweep_points"])
    rows_csv = []
    for lo in los:
        rfl = rf.with_lo(float(lo))
        g = superhet_transduction_gain(system, drive, rfl)
        b = equivalent_field_sensitivity(system, drive, rfl, rx.with_scheme(Detection.BCOD), g)
        d = equivalent_field_sensitivity(system, drive, rfl, rx.with_scheme(Detection.DIOD), g)
        rows_csv.append((float(lo), g.slope, g.kappa, g.transmission, b.nv_per_cm, d.nv_per_cm))
    write_csv(
        os.path.join(out, "sensitivity.csv"),
        [
            "lo_v_per_m",
            "slope_w_per_v_per_m",
            "kappa_w_per_v_per_m",
            "transmission",
            "sensitivity_bcod_nv_per_cm",
            "sensitivity_diod_nv_per_cm",
        ],
        rows_csv,
    )
    rec = build_receivers(cfg)
    rows = [
        (rf.lo_amplitude, "kappa_w_per_v_per_m", rec.bcod.gain.kappa, 0.0),
        (rf.lo_amplitude, "sensitivity_bcod_nv_per_cm", rec.bcod.nv_per_cm, 0.0),
        (rf.lo_amplitude, "sensitivity_diod_nv_per_cm", rec.diod.nv_per_cm, 0.0),
        (rf.lo_amplitude, "bcod_shot_to_thermal", rec.bcod.noise.shot_to_thermal, 0.0),
        (rf.lo_amplitude, "classical_equivalent_nv_per_cm", rec.classical.field_sensitivity / NV_PER_CM, 0.0),
        (rf.lo_amplitude, "advantage_db", rec.raqr.advantage_db(rec.classical), 0.0),
    ]
    return rows, ["sensitivity.csv"], [checks.gate_sensitivity(rec.bcod, rec.diod)]


def _exp_link(cfg, out, seed, workers, check):
    rec = build_receivers(cfg)
    k = cfg["link"]
    sc = rec.scenario
    m = cfg["array"]["num_sensors"]
    d = np.geomspace(k["distance_min_km"], k["distance_max_km"], k["num_distances"])
    write_csv(
        os.path.join(out, "link.csv"),
        ["distance_km", "orbit_class", "path_gain_db", "snr_classical_db", "snr_raqr_db"],
        link_sweep_rows(d, sc.carrier_frequency, sc.bandwidth, sc.eirp, cfg.classical_chain(), rec.raqr.field_sensitivity),
    )
    curves = achievable_rate_curve(d, [rec.classical, rec.raqr], sc, m)
    rc, snr_c = curves["classical"]
    rr, snr_r = curves["raqr"]
    write_csv(
        os.path.join(out, "rate.csv"),
        ["distance_km", "snr_classical_db", "snr_raqr_db", "rate_classical", "rate_raqr", "rate_gap"],
        zip(d / 1e3, snr_c, snr_r, rc, rr, rr - rc),
    )
    thr = k["coverage_threshold_db"]
    cov_rows = []
    for rx in (rec.classical, rec.raqr):
        c = coverage_distance(rx, sc, thr, sc.distance)
        b = coverage_distance_bisect(rx, sc, thr) if c.reachable else float("nan")
        cov_rows.append((rx.name, thr, c.distance / 1e3, b / 1e3, int(c.reachable)))
    write_csv(
        os.path.join(out, "coverage.csv"),
        ["receiver", "snr_threshold_db", "coverage_km", "coverage_bisect_km", "reachable"],
        cov_rows,
    )
    at = achievable_rate_curve([k["rate_distance_km"]], [rec.classical, rec.raqr], sc, m)
    gap = float(at["raqr"][0][0] - at["classical"][0][0])
    rows = [
        (k["rate_distance_km"], "rate_gap_bit_per_s_hz", gap, 0.0),
        (thr, "coverage_classical_km", cov_rows[0][2], 0.0),
        (thr, "coverage_raqr_km", cov_rows[1][2], 0.0),
        (0.0, "eirp_dbw", sc.eirp, 0.0),
    ]
    gates = [
        checks.gate_fspl(sc.carrier_frequency),
        checks.gate_rate(rec.classical, rec.raqr, sc, m, k["rate_distance_km"]),
        checks.gate_coverage(rec.classical, rec.raqr, sc, thr),
    ]
    return rows, ["link.csv", "rate.csv", "coverage.csv"], gates


def _exp_ber(cfg, out, seed, workers, check):
    rec = build_receivers(cfg)
    d = cfg["detection"]
    scenario = rec.scenario.at(distance=d["distance_km"])
    values = np.arange(d["sweep_start"], d["sweep_stop"] + 0.5 * d["sweep_step"], d["sweep_step"])
    stopping = cfg.detection_stopping()
    a = cfg["array"]
    reports = {}
    for rx in (rec.classical, rec.raqr):
        setup = BerSetup(
            geometry=cfg.ula(),
            scenario=scenario,
            receiver=rx,
            num_users=d["num_users"],
            pilots=cfg.pilot_config(),
            num_subcarriers=d["num_subcarriers"],
            subcarrier_spacing=d["subcarrier_spacing_khz"],
            max_delay=d["max_delay_us"],
            symbols_per_frame=d["symbols_per_frame"],
            max_angle=a["max_angle_deg"],
            min_angle_separation=a["min_angle_separation_deg"],
            sweep_var=d["sweep_var"],
            csi_receiver=rec.classical if (d["hybrid_csi"] and rx is rec.raqr) else None,
        )
        reports[rx.name] = ber_monte_carlo(setup, values, d["detectors"], d["csi_modes"], stopping, seed, workers)
        header = ["sweep_var", "sweep_value", "detector", "csi_mode", "ber", "ci_halfwidth", "bits"]
        write_csv(os.path.join(out, f"ber_{rx.name}.csv"), header, ber_rows(reports[rx.name]))
    rows = [
        (r.sweep_value, f"ber_{name}_{r.detector.value}_{r.csi_mode}", r.reported_ber, r.confidence_halfwidth)
        for name, reps in reports.items()
        for r in reps
    ]
    gates = []
    if check:
        gates.append(checks.gate_awgn(seed, workers))
        gates.append(checks.gate_mmse(seed))
    target = d["target_ber"]
    gates.append(checks.gate_ber_gap(reports["classical"], reports["raqr"], target))
    return rows, ["ber_classical.csv", "ber_raqr.csv"], gates


def _exp_constellation(cfg, out, seed, workers, check):
    c = cfg["constellation"]
    points = constellation_sweep(c["l_values"], cfg.constellation_config(), cfg.constellation_stopping(), seed, workers)
    write_csv(
        os.path.join(out, "constellation.csv"),
        ["L", "K", "mode", "ber", "ci_halfwidth", "fronthaul_bits_per_symbol"],
        constellation_rows(points),
    )
    rows = [(p.num_satellites, f"ber_{p.mode}", p.report.reported_ber, p.report.confidence_halfwidth) for p in points]
    return rows, ["constellation.csv"], [checks.gate_constellation(points)]


def _exp_sense(cfg, out, seed, workers, check):
    rec = build_receivers(cfg)
    s = cfg["sensing"]
    sensing = cfg.sensing_config()
    d = np.geomspace(s["distance_min_km"], s["distance_max_km"], s["num_distances"])
    cc = crb_range_speed(sensing, rec.classical, d)
    cr = crb_range_speed(sensing, rec.raqr, d)
    write_csv(
        os.path.join(out, "crb.csv"),
        [
            "distance_km",
            "snr_total_classical",
            "snr_total_raqr",
            "crb_range_classical_m2",
            "crb_range_raqr_m2",
            "crb_speed_classical_m2_per_s2",
            "crb_speed_raqr_m2_per_s2",
            "crb_ratio",
        ],
        zip(d / 1e3, cc.snr_total, cr.snr_total, cc.crb_range, cr.crb_range, cc.crb_speed, cr.crb_speed, cc.crb_range / cr.crb_range),
    )
    rows = [(float(x / 1e3), "crb_ratio", float(r), 0.0) for x, r in zip(d, cc.crb_range / cr.crb_range)]
    return rows, ["crb.csv"], [checks.gate_crb(sensing, rec.classical, rec.raqr, d)]


_RUNNERS = {
    "eit": _exp_eit,
    "sensitivity": _exp_sensitivity,
    "link": _exp_link,
    "ber": _exp_ber,
    "constellation": _exp_constellation,
    "sense": _exp_sense,
}


def _write_report(out, report):
    atomic_write_text(os.path.join(out, f"report_{report.experiment}.json"), json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")


def _run_one(name, cfg, out, seed, workers, check):
    rows, files, gates = _RUNNERS[name](cfg, out, seed, workers, check)
    if name in _PLOTS:
        atomic_write_text(os.path.join(out, f"plot_{name}.py"), _PLOT_HEADER + _PLOTS[name])
    report = ExperimentReport(name, cfg.snapshot(), seed, toolkit_version(), rows, files, gates)
    _write_report(out, report)
    return report


def _determinism_gate(cfg, out, seed, workers, files):
    """Re-run the stochastic experiments with another worker count and compare bytes."""
    other = 1 if workers > 1 else 2
    with tempfile.TemporaryDirectory() as tmp:
        for name in STOCHASTIC:
            _RUNNERS[name](cfg, tmp, seed, other, False)
        same = [f for f in files if os.path.exists(os.path.join(tmp, f))]
        diff = [f for f in same if not filecmp.cmp(os.path.join(out, f), os.path.join(tmp, f), shallow=False)]
    ok = bool(same) and not diff
    return ("12 determinism", ok, f"compared {len(same)} CSVs at workers {workers} vs {other}; differing: {diff or 'none'}")


def run_experiment(name, cfg, out_dir, seed=0, workers=1, check=False):
    """Run one experiment (or all of them) and return its ExperimentReport.

    ``reproduce-all`` runs every experiment in turn; with ``check`` it also
    re-runs the stochastic ones under a different worker count to confirm
    byte-identical CSVs.
    """
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    os.makedirs(out_dir, exist_ok=True)
    if name != "reproduce-all":
        return _run_one(name, cfg, out_dir, seed, workers, check)
    reports = [_run_one(n, cfg, out_dir, seed, workers, check) for n in _RUNNERS]
    rows = [r for rep in reports for r in rep.rows]
    files = [f for rep in reports for f in rep.files]
    gates = [g for rep in reports for g in rep.checks]
    if check:
        stochastic_files = [f for rep in reports if rep.experiment in STOCHASTIC for f in rep.files]
        gates.append(_determinism_gate(cfg, out_dir, seed, workers, stochastic_files))
    gates.sort(key=lambda g: int(g[0].split()[0]))
    report = ExperimentReport("reproduce-all", cfg.snapshot(), seed, toolkit_version(), rows, files, gates)
    _write_report(out_dir, report)
    return report
