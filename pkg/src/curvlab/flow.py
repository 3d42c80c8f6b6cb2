"""Pointwise curvature ODE ``R' = R^2 + R#`` with fixed-step RK4."""
from dataclasses import dataclass, field
import csv
import io

import numpy as np

from .curvature import CurvatureOperator, ode_rhs


@dataclass
class FlowTrace:
    times: list
    operators: list
    blow_up_time: float = None
    extra: dict = field(default_factory=dict)

    def opnorms(self):
        return np.array([R.opnorm() for R in self.operators])

    def min_eigs(self):
        return np.array([R.min_eig() for R in self.operators])

    def to_csv(self):
        cols = ["t", "opnorm", "min_eig"] + list(self.extra)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        norms, mins = self.opnorms(), self.min_eigs()
        for k, t in enumerate(self.times):
            row = [t, norms[k], mins[k]] + [self.extra[c][k] for c in self.extra]
            w.writerow([f"{x:.12g}" for x in row])
        return buf.getvalue()


def rk4_step(R, dt):
    k1 = ode_rhs(R).matrix
    k2 = ode_rhs(CurvatureOperator(R.n, R.matrix + 0.5 * dt * k1)).matrix
    k3 = ode_rhs(CurvatureOperator(R.n, R.matrix + 0.5 * dt * k2)).matrix
    k4 = ode_rhs(CurvatureOperator(R.n, R.matrix + dt * k3)).matrix
    # the constructor re-symmetrizes
    return CurvatureOperator(R.n, R.matrix + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4))


def flow(R0, dt, t_max, norm_cap, record_every=1):
    """Integrate ``R' = R^2 + R#`` from R0.

    Stops at ``t_max`` or when the operator norm exceeds ``norm_cap``; in the
    latter case ``blow_up_time`` is the last accepted time.  Every
    ``record_every``-th step is stored (the final accepted state always is).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if norm_cap <= R0.opnorm():
        raise ValueError("norm_cap must exceed the initial operator norm")
    nsteps = int(np.ceil(t_max / dt - 1e-9))
    times, ops = [0.0], [R0]
    R, t = R0, 0.0
    blow_up = None
    for k in range(1, nsteps + 1):
        h = min(dt, t_max - t)
        Rn = rk4_step(R, h)
        if not np.all(np.isfinite(Rn.matrix)) or Rn.opnorm() > norm_cap:
            blow_up = t
            break
        R, t = Rn, t + h
        if k % record_every == 0 or k == nsteps:
            times.append(t)
            ops.append(R)
    if times[-1] != t:
        times.append(t)
        ops.append(R)
    return FlowTrace(times, ops, blow_up)
