"""Follow the rotation generator and watch positions turn into momenta.

At angle pi/2 each deformed position equals (beta/alpha) times the deformed
momentum evaluated at the starting point.

    python demos/rotation_flow.py
"""

import math

import numpy as np

from ypl.brackets import FlowSpec, hamiltonian_flow
from ypl.flows import rotation_generator
from ypl.phasespace import ModelParams, SampleSpec, sample_points

params = ModelParams(alpha=0.1, beta=0.2)
gs, K = rotation_generator(params)
pts = sample_points(SampleSpec(count=5, seed=3), gs.guards)
ratio = params.beta / params.alpha

for angle in (0.0, math.pi / 6, math.pi / 3, math.pi / 2):
    moved = hamiltonian_flow(K, pts, FlowSpec(t=angle, abs_tol=1e-11, rel_tol=1e-11))
    x1 = gs["xhat.1"].values(moved)
    want = math.cos(angle) * gs["xhat.1"].values(pts) + ratio * math.sin(angle) * gs["phat.1"].values(pts)
    print(f"angle {angle:.4f}: xhat_1 = {np.round(x1, 6)}  gap to rotated value {np.max(np.abs(x1 - want)):.1e}")
