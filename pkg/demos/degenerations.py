"""Orbit degenerations: nilpotent limits, the minimal orbit, rank-one limits.

    python demos/degenerations.py
"""
import numpy as np

from curvlab import degeneration as dg
from curvlab import lie

rng = np.random.default_rng(3)
X = lie.random_skew(6, rng)
print("generic X in so(6, C): minimal polynomial degree", dg.minpoly_degree(X))

step = dg.nilpotent_limit(X, rng=rng)
print(f"boosted limit T: |T^p| = {step.nilpotency:.1e}, "
      f"schedule residuals {', '.join(f'{r:.0e}' for r in step.residuals)}")

red = dg.reduce_to_minimal(X, rng=rng)
Y = red.result
print("reduction steps:", [s.kind for s in red.steps])
print(f"result: rank {dg.numerical_rank(Y)}, |Y^2| = {np.linalg.norm(Y @ Y):.1e}")

# gl(n, C): every nilpotent class degenerates to rank one
for part in [(3, 2, 1), (2, 2), (4,)]:
    n = sum(part)
    G = np.eye(n) + 0.3 * rng.standard_normal((n, n))
    res = dg.degenerate_to_rank_one(G @ dg.jordan_matrix(part) @ np.linalg.inv(G))
    Z = res.result
    print(f"partition {part}: found {res.jordan.partition}, limit rank "
          f"{dg.numerical_rank(Z)}, |Z^2| = {np.linalg.norm(Z @ Z):.1e}")
