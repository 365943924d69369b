"""Build the deformed generators and check their brackets on random points.

    python demos/yang_closure.py
"""

from collections import defaultdict

from ypl.algebra import check_relations, relation_set
from ypl.phasespace import ModelParams, SampleSpec
from ypl.realizations import profile_preset, yang_special

params = ModelParams(alpha=0.1, beta=0.1)
spec = SampleSpec(count=500, seed=1)

for preset in ("phi2_zero", "phi1_zero", "half"):
    gs = yang_special(params, profile_preset(preset))
    reports = check_relations(gs, relation_set("yang", params), spec, tol=1e-7)
    worst = defaultdict(float)
    for r in reports:
        label = r.relation.split(" ")[0].strip("()")
        worst[label] = max(worst[label], r.max_abs)
    print(f"profile {preset}: {sum(r.passed for r in reports)}/{len(reports)} relations hold")
    for label, value in worst.items():
        print(f"    {label:<10} worst residual {value:.1e}")
