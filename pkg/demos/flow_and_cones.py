"""Curvature ODE and cone certificates on the model operators.

    python demos/flow_and_cones.py
"""
import numpy as np

from curvlab.cones import S0, SPrime, certify, radial_k
from curvlab.curvature import CurvatureOperator, model, random_operator
from curvlab.flow import flow

n = 5

# The round sphere blows up at t = 1/(n-1); the cylinder at 1/(n-2).
for name in ("sphere", "cylinder"):
    tr = flow(model(name, n), 1e-4, 1.0, 1e4)
    print(f"{name:9s} blow-up at t = {tr.blow_up_time:.4f}")

# Positivity over the isotropic set S0 and over S'.
for name in ("sphere", "cylinder"):
    R = model(name, n)
    for S in (S0(), SPrime()):
        c = certify(R, S)
        print(f"{name:9s} {S.kind:7s} min {c.min_value:+.6f}  {c.status}")

k, _ = radial_k(S0(), n=n)
print(f"radial split constant of S0: {k:.6f} (1/sqrt 2 = {2 ** -0.5:.6f})")

# A perturbed sphere stays S0-positive along the ODE.
rng = np.random.default_rng(0)
B = random_operator(n, rng)
R0 = CurvatureOperator.identity(n) + (0.4 / B.opnorm()) * B
tr = flow(R0, 2e-3, 1.0, 100.0, record_every=10)
mins = [certify(R, S0(), restarts=6, iterations=200).min_value / R.opnorm()
        for R in tr.operators]
print(f"perturbed sphere: {len(mins)} snapshots, min of q/|R| over S0 = {min(mins):.4f}")
