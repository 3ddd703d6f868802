"""Where the Rydberg receiver's noise floor comes from.

Walks from the superheterodyne slope to the photodetection noise and the
equivalent field sensitivity, then compares it with a classical base
station antenna expressed in the same units.

    python demos/sensitivity_budget.py
"""
import numpy as np

from raqr.atomic import Detection, equivalent_field_sensitivity, superhet_transduction_gain
from raqr.config import load_config
from raqr.constants import NV_PER_CM
from raqr.experiments import build_receivers

cfg = load_config()
system, drive, rf, rx = cfg.atomic_system(), cfg.optical_drive(), cfg.rf_drive(), cfg.photoreceiver()

gain = superhet_transduction_gain(system, drive, rf)
print(f"transduction |dP/dE| = {gain.kappa:.3e} W per V/m at LO {rf.lo_amplitude} V/m")

for scheme in (Detection.DIOD, Detection.BCOD):
    s = equivalent_field_sensitivity(system, drive, rf, rx.with_scheme(scheme), gain)
    print(f"{scheme.value}: {s.nv_per_cm:8.3f} nV/cm/rtHz, shot/thermal = {s.noise.shot_to_thermal:.3g}")

rec = build_receivers(cfg)
print(f"classical antenna equivalent: {rec.classical.field_sensitivity / NV_PER_CM:.3f} nV/cm/rtHz")
print(f"advantage of the Rydberg chain: {rec.raqr.advantage_db(rec.classical):.2f} dB")

## the LO amplitude sets the operating point; scan it
los = np.geomspace(0.01, 0.3, 7)
print(f"\n{'LO (V/m)':>9} {'BCOD (nV/cm/rtHz)':>18}")
for lo in los:
    r = rf.with_lo(float(lo))
    g = superhet_transduction_gain(system, drive, r)
    s = equivalent_field_sensitivity(system, drive, r, rx.with_scheme(Detection.BCOD), g)
    print(f"{lo:9.4f} {s.nv_per_cm:18.3f}")
