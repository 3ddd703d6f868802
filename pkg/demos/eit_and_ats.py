"""EIT window and Autler-Townes splitting of the default four-level ladder.

Prints the transparency at line centre with and without the RF local
oscillator, the EIT width, and how the split peaks track Omega_RF.

    python demos/eit_and_ats.py
"""
import numpy as np

from raqr.atomic import eit_linewidth, eit_spectrum, rabi_from_field, transmission_peaks
from raqr.config import load_config
from raqr.constants import TWO_PI

cfg = load_config()
system, drive, rf = cfg.atomic_system(), cfg.optical_drive(), cfg.rf_drive()

grid = TWO_PI * np.linspace(-4e6, 4e6, 801)
off = eit_spectrum(system, drive, rf.with_lo(0.0), grid)
on = eit_spectrum(system, drive, rf, grid)
mid = grid.size // 2
print(f"probe transmission at line centre: RF off {off.transmission[mid]:.4f}, RF on {on.transmission[mid]:.4f}")

lw = eit_linewidth(system, drive)
print(f"EIT width {lw / TWO_PI / 1e3:.1f} kHz")

## peak separation against the RF Rabi frequency
print(f"{'LO (V/m)':>10} {'Omega_RF/2pi (MHz)':>20} {'separation (MHz)':>18} {'ratio':>7}")
for lo in cfg["rf"]["ats_lo_v_per_m"]:
    w = rabi_from_field(lo, system.dipole_34)
    p = transmission_peaks(system, drive, rf.with_lo(lo), grid)
    sep = p[1] - p[0]
    print(f"{lo:10.4f} {w / TWO_PI / 1e6:20.4f} {sep / TWO_PI / 1e6:18.4f} {sep / w:7.4f}")

# the splitting only becomes linear once Omega_RF clears the EIT width
w_min = rabi_from_field(min(cfg["rf"]["ats_lo_v_per_m"]), system.dipole_34)
print(f"smallest Omega_RF is {w_min / lw:.1f}x the EIT width")
