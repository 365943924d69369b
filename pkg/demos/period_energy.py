"""Period of the deformed oscillator as the amplitude grows, for all sign cases.

    python demos/period_energy.py
"""

import math

from ypl.dynamics import period_energy_scan, trend

rows = period_energy_scan([0.2, 0.4, 0.6], omega=1.0, alpha=0.1, beta=0.1,
                          cases=("pp", "mm", "pm", "mp"))
print(f"undeformed period 2 pi = {2 * math.pi:.6f}")
for case in ("pp", "mm", "pm", "mp"):
    sub = [r for r in rows if r["case"] == case]
    periods = "  ".join(f"E={r['energy']:.3f} T={r['period']:.6f}" for r in sub)
    print(f"{case}: {periods}   trend {trend(sub):+d}")
