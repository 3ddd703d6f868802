"""Uplink budget, achievable rate, coverage and sensing bounds, classical vs Rydberg.

The EIRP is calibrated so the classical chain sees 10 dB at 100 km; the
Rydberg chain then keeps a fixed dB lead at every distance.

    python demos/uplink_comparison.py
"""
import numpy as np

from raqr.config import load_config
from raqr.experiments import build_receivers
from raqr.link import path_gain_db
from raqr.metrics import achievable_rate_curve, coverage_distance, crb_range_speed

cfg = load_config()
rec = build_receivers(cfg)
sc = rec.scenario
m = cfg["array"]["num_sensors"]
print(f"calibrated EIRP {sc.eirp:.3f} dBW, Rydberg advantage {rec.raqr.advantage_db(rec.classical):.2f} dB")

d = np.array([160e3, 500e3, 1000e3, 2000e3, 20000e3, 35786e3])
curves = achievable_rate_curve(d, [rec.classical, rec.raqr], sc, m)
print(f"\n{'km':>8} {'FSPL dB':>9} {'SNR cl':>8} {'SNR ry':>8} {'R cl':>6} {'R ry':>6}")
for i, x in enumerate(d):
    (rc, sc_db), (rr, sr_db) = curves["classical"], curves["raqr"]
    print(f"{x / 1e3:8.0f} {path_gain_db(x, sc.carrier_frequency):9.2f} {sc_db[i]:8.2f} {sr_db[i]:8.2f} {rc[i]:6.2f} {rr[i]:6.2f}")

thr = cfg["link"]["coverage_threshold_db"]
for rx in (rec.classical, rec.raqr):
    cov = coverage_distance(rx, sc, thr, sc.distance)
    print(f"{rx.name} coverage at {thr:g} dB: {cov.distance / 1e3:.1f} km")

## monostatic sensing with the same waveform
sensing = cfg.sensing_config()
dist = np.array([300e3, 1000e3])
for rx in (rec.classical, rec.raqr):
    c = crb_range_speed(sensing, rx, dist)
    print(f"{rx.name}: range std {np.sqrt(c.crb_range)} m, speed std {np.sqrt(c.crb_speed)} m/s")
