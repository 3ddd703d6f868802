"""Local decision forwarding against centralised detection as the constellation grows.

Small stopping rule so it runs in seconds; raise max_frames for smoother
curves. Both modes see the same drops, bits and noise.

    python demos/constellation_plateau.py
"""
from raqr.config import load_config
from raqr.detection import StoppingRule
from raqr.network import constellation_sweep

cfg = load_config()
config = cfg.constellation_config()
points = constellation_sweep([1, 2, 4, 8], config, StoppingRule(100, 200, 8), seed=1)

print(f"per-sensor SNR at nadir {config.snr_at_nadir_db:g} dB, M = {config.geometry.num_sensors}")
print(f"{'L':>3} {'mode':>7} {'BER':>10} {'fronthaul bit/sym':>18}")
for p in points:
    print(f"{p.num_satellites:3d} {p.mode:>7} {p.report.reported_ber:10.2e} {p.fronthaul_bits_per_symbol:18.0f}")

# local mode stops improving once interference from the extra users dominates
loc = {p.num_satellites: p.report.ber for p in points if p.mode == "local"}
print(f"local improvement 1->2: {(loc[1] - loc[2]) / loc[1]:.2f}, 4->8: {(loc[4] - loc[8]) / loc[4]:.2f}")
