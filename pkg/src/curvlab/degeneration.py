"""Degenerations of adjoint orbits to nilpotent and minimal orbits.

The workhorse is a grading.  For a ( , )-orthonormal pair f1, f2 put
``z+ = f1 + i f2`` and ``z- = f1 - i f2``.  The boost
``P_t = exp(i t phi(f1, f2))`` scales ``z+`` by ``e^t``, ``z-`` by ``e^-t``
and fixes their ( , )-orthogonal complement W.  In the basis
``B = [z+, z-, W]`` conjugation by ``P_t`` multiplies the ``(a, b)`` entry
by ``e^{(w_a - w_b) t}``, so ``e^-t P_t X P_t^-1`` tends to the grade-one
part of X.  For skew X there is no grade-two part, so the limit is finite.
"""
from dataclasses import dataclass, field

import numpy as np

from . import lie

RANK_TOL = 1e-6
NIL_TOL = 1e-8
# powers of a normalized nilpotent shrink fast along long chains; roundoff
# sits near 1e-15, so the rank cut for Jordan data is much tighter
JORDAN_TOL = 1e-9
SCHEDULE = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)


class NotNilpotent(ValueError):
    pass


class PreconditionError(ValueError):
    pass


def fro(A):
    return float(np.linalg.norm(A))


def numerical_rank(A, rel=RANK_TOL):
    s = np.linalg.svd(np.asarray(A), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rel * s[0]))


def minpoly_degree(Xm, rel=RANK_TOL):
    """Dimension of span{I, X, X^2, ...}, i.e. the minimal-polynomial degree."""
    Xm = np.asarray(Xm, dtype=complex)
    n = Xm.shape[0]
    scale = max(np.linalg.norm(Xm, 2), 1e-300)
    Y = Xm / scale
    Q = np.zeros((n * n, 0), dtype=complex)
    P = np.eye(n, dtype=complex)
    for k in range(n + 1):
        v = P.reshape(-1)
        nv = np.linalg.norm(v)
        if nv <= rel:
            return k
        r = v - Q @ (Q.conj().T @ v)
        r = r - Q @ (Q.conj().T @ r)
        if np.linalg.norm(r) <= rel * nv:
            return k
        Q = np.column_stack([Q, r / np.linalg.norm(r)])
        P = P @ Y
    return n


def is_in_S0(Y, tol=NIL_TOL):
    Y = np.asarray(Y)
    Yn = Y / lie.skew_norm(Y)
    return fro(Yn @ Yn) <= tol and numerical_rank(Yn) == 2


# ------------------------------------------------------------ graded boosts

@dataclass
class GradedBoost:
    f1: np.ndarray
    f2: np.ndarray
    basis: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @classmethod
    def from_pair(cls, f1, f2):
        f1 = np.asarray(f1, dtype=complex)
        f2 = np.asarray(f2, dtype=complex)
        n = f1.shape[0]
        F = lie.complete_frame([f1, f2], n)
        B = np.column_stack([f1 + 1j * f2, f1 - 1j * f2, F[:, 2:]])
        w = np.zeros(n)
        w[0], w[1] = 1.0, -1.0
        return cls(f1, f2, B, w)

    def P(self, t):
        return lie.boost(self.f1, self.f2, t)

    def grades(self, Xm):
        """Components of X by weight, as a dict {k: matrix}."""
        A = np.linalg.solve(self.basis, np.asarray(Xm, dtype=complex) @ self.basis)
        diff = np.subtract.outer(self.weights, self.weights)
        out = {}
        for k in (-2, -1, 0, 1, 2):
            Ak = np.where(diff == k, A, 0)
            out[k] = self.basis @ np.linalg.solve(self.basis.T, Ak.T).T
        return out

    def normalized_conjugate(self, Xm, t, grades=None):
        """``P_t X P_t^-1 / |.|`` assembled from the grades (no overflow)."""
        g = grades or self.grades(Xm)
        tot = sum(fro(a) for a in g.values())
        top = max(k for k in g if fro(g[k]) > 1e-9 * tot)
        Y = _skew(sum(np.exp((k - top) * t) * g[k] for k in g if k <= top))
        return Y / lie.skew_norm(Y)


def _skew(A):
    return 0.5 * (A - A.T)


# ------------------------------------------------------------ norm-growth boost

@dataclass
class BoostFamily:
    X: np.ndarray
    v: np.ndarray
    f1: np.ndarray
    f2: np.ndarray
    schedule: tuple
    norms: list
    growing: bool
    perturbations: int

    def P(self, t):
        return lie.boost(self.f1, self.f2, t)


def unbounded_conjugators(Xm, rng=None, schedule=SCHEDULE, max_perturb=3):
    """Boost family with ``|P_t X P_t^-1| -> infinity`` for X with X^2 != 0.

    Follows the classical argument: a unit real v with ``(Xv, Xv) != 0``,
    ``f1 = Xv / sqrt((Xv, Xv))`` and ``f2`` a completion vector orthogonal
    to v and f1; the family is the boost in the (f1, f2)-plane.
    """
    Xm = np.asarray(Xm, dtype=complex)
    n = Xm.shape[0]
    if fro(Xm @ Xm) <= 1e-10 * max(fro(Xm) ** 2, 1e-300):
        raise PreconditionError("X^2 = 0: orbit is already nilpotent of order two")
    rng = rng or np.random.default_rng(0)
    scale = fro(Xm) ** 2
    candidates = [np.eye(n)[k] for k in range(n)]
    tries = 0
    while True:
        v = candidates.pop(0) if candidates else rng.standard_normal(n)
        v = v / np.linalg.norm(v)
        Xv = Xm @ v
        b = lie.bilinear(Xv, Xv)
        if abs(b) > 1e-6 * scale and lie.hnorm(Xv) > 1e-8 * np.sqrt(scale):
            f1 = Xv / np.sqrt(b)
            F = lie.complete_frame([v.astype(complex), f1], n)
            f2 = F[:, 2]
            fam = GradedBoost.from_pair(f1, f2)
            g = fam.grades(Xm)
            if fro(g[1]) > 1e-8 * fro(Xm):
                break
        if not candidates:
            tries += 1
            if tries > max_perturb:
                raise PreconditionError("persistent isotropy: no admissible v after perturbation")
    norms = []
    for t in (0.0,) + tuple(schedule):
        P = lie.boost(f1, f2, t) if t <= 8 else None
        if P is not None:
            norms.append(fro(P @ Xm @ P.T))
        else:
            # large t: the grade-one part dominates
            norms.append(float(np.exp(t) * fro(g[1])))
    tail = norms[-4:]
    growing = all(b > a for a, b in zip(tail, tail[1:]))
    return BoostFamily(Xm, v, f1, f2, tuple(schedule), norms, growing, tries)


@dataclass
class DegenerationStep:
    input: np.ndarray
    limit: np.ndarray
    f1: np.ndarray = None
    f2: np.ndarray = None
    schedule: tuple = ()
    residuals: list = field(default_factory=list)
    minpoly_degree: int = None
    nilpotency: float = None
    kind: str = "boost"

    def to_json(self):
        c = lambda A: None if A is None else {"re": np.real(A).tolist(), "im": np.imag(A).tolist()}
        return {"kind": self.kind, "input": c(self.input), "limit": c(self.limit),
                "f1": c(self.f1), "f2": c(self.f2), "schedule": list(self.schedule),
                "residuals": self.residuals, "minpoly_degree": self.minpoly_degree,
                "nilpotency": self.nilpotency}


def _graded_step(Xm, fam, kind, schedule=SCHEDULE):
    g = fam.grades(Xm)
    T = _skew(g[1])
    T = T / lie.skew_norm(T)
    res = [fro(fam.normalized_conjugate(Xm, t, g) - T) for t in schedule]
    return DegenerationStep(Xm, T, fam.f1, fam.f2, tuple(schedule), res, kind=kind)


def _finish(step, Xm):
    p = minpoly_degree(Xm)
    step.minpoly_degree = p
    step.nilpotency = fro(np.linalg.matrix_power(step.limit, p))
    return step


def nilpotent_limit(Xm, rng=None, schedule=SCHEDULE):
    """Normalized limit T of boosted conjugates of X; ``T^p = 0`` for the
    minimal-polynomial degree p of X."""
    Xm = np.asarray(Xm, dtype=complex)
    if lie.skew_norm(Xm) == 0:
        raise PreconditionError("X must be nonzero")
    if fro(Xm @ Xm) <= 1e-10 * fro(Xm) ** 2:
        step = DegenerationStep(Xm, Xm / lie.skew_norm(Xm), kind="already-nilpotent")
        return _finish(step, Xm)
    fam = unbounded_conjugators(Xm, rng=rng, schedule=schedule)
    step = _graded_step(Xm, GradedBoost.from_pair(fam.f1, fam.f2), "norm-boost", schedule)
    return _finish(step, Xm)


# ------------------------------------------------------------ minimal orbit

def _isotropic_plane_vector(Y, rng, iters=60):
    """Unit z with ``(z, z) = 0`` and ``(Yz, Yz) = 0`` by Gauss-Newton."""
    n = Y.shape[0]
    M = Y.T @ Y
    for _ in range(20):
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        for _ in range(iters):
            F = np.array([z @ z, z @ M @ z])
            if np.max(np.abs(F)) < 1e-15:
                break
            Jm = np.vstack([2 * z, (M + M.T) @ z])
            z = z - np.linalg.pinv(Jm) @ F
            z = z / lie.hnorm(z)
        F = np.array([z @ z, z @ M @ z])
        if np.max(np.abs(F)) < 1e-13:
            return z
    raise PreconditionError("no isotropic vector with isotropic image found")


def isotropic_boost(Y, rng=None, schedule=SCHEDULE):
    """Boost along an isotropic z- with ``(Y z-, Y z-) = 0``.

    The grade-one part is then ``phi(z+, w)`` with ``(w, w) = 0``, a
    rank-two square-zero element, i.e. a point of S0.
    """
    Y = np.asarray(Y, dtype=complex)
    n = Y.shape[0]
    rng = rng or np.random.default_rng(0)
    for _ in range(10):
        zm = _isotropic_plane_vector(Y, rng)
        y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        a = 2.0 / lie.bilinear(y, zm)
        b = -a * lie.bilinear(y, y) / (2.0 * lie.bilinear(y, zm))
        zp = a * y + b * zm
        f1, f2 = (zp + zm) / 2, (zp - zm) / 2j
        if max(lie.hnorm(f1), lie.hnorm(f2)) > 1e3:
            continue
        fam = GradedBoost.from_pair(f1, f2)
        g = fam.grades(Y)
        if fro(g[1]) > 1e-6 * fro(Y) and fro(g[2]) < 1e-10 * fro(Y):
            return _graded_step(Y, fam, "isotropic-boost", schedule)
    raise PreconditionError("isotropic boost did not produce a nonzero limit")


@dataclass
class Reduction:
    result: np.ndarray
    steps: list

    def to_json(self):
        return {"result": {"re": self.result.real.tolist(), "im": self.result.imag.tolist()},
                "steps": [s.to_json() for s in self.steps]}


def reduce_to_minimal(Xm, rng=None, max_steps=4):
    """Degenerate X to a unit element of S0 (rank two, square zero)."""
    Xm = np.asarray(Xm, dtype=complex)
    n = Xm.shape[0]
    if n < 4:
        raise PreconditionError("S0 is empty for n < 4")
    if lie.skew_norm(Xm) == 0:
        raise PreconditionError("X must be nonzero")
    rng = rng or np.random.default_rng(0)
    Y = Xm / lie.skew_norm(Xm)
    steps = []
    if is_in_S0(Y):
        return Reduction(Y, steps)
    if fro(Y @ Y) > 1e-10:
        st = nilpotent_limit(Y, rng=rng)
        steps.append(st)
        Y = st.limit
    for _ in range(max_steps):
        if is_in_S0(Y):
            return Reduction(Y, steps)
        st = isotropic_boost(Y, rng=rng)
        steps.append(st)
        Y = st.limit
    if is_in_S0(Y):
        return Reduction(Y, steps)
    raise PreconditionError("iteration cap exceeded before reaching S0")


# ------------------------------------------------------------ gl(n, C)

@dataclass
class JordanData:
    partition: tuple
    transform: np.ndarray
    jordan: np.ndarray
    residual: float

    def to_json(self):
        return {"partition": list(self.partition), "residual": self.residual,
                "transform": {"re": self.transform.real.tolist(),
                              "im": self.transform.imag.tolist()}}


def jordan_matrix(partition):
    n = sum(partition)
    J = np.zeros((n, n))
    pos = 0
    for k in partition:
        for i in range(k - 1):
            J[pos + i, pos + i + 1] = 1.0
        pos += k
    return J


def _null_basis(A, rel=RANK_TOL, ref=None):
    n = A.shape[1]
    if n == 0:
        return np.zeros((0, 0))
    U, s, Vh = np.linalg.svd(A)
    ref = ref if ref is not None else (s[0] if s.size else 0.0)
    r = int(np.sum(s > rel * ref)) if ref > 0 else 0
    return Vh[r:].conj().T


def _orth(A, rel=1e-8):
    if A.shape[1] == 0:
        return A
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return A[:, :0]
    return U[:, s > rel * s[0]]


def jordan_partition(Y, rel=JORDAN_TOL):
    """Jordan type and a chain basis Q with ``Q^-1 Y Q`` in Jordan form."""
    Y = np.asarray(Y, dtype=complex)
    n = Y.shape[0]
    s1 = np.linalg.norm(Y, 2)
    if s1 == 0:
        return JordanData(tuple([1] * n), np.eye(n, dtype=complex), np.zeros((n, n)), 0.0)
    Yn = Y / s1
    if fro(np.linalg.matrix_power(Yn, n)) > NIL_TOL:
        raise NotNilpotent("matrix is not nilpotent")
    powers = [np.eye(n, dtype=complex)]
    ranks = [n]
    while ranks[-1] > 0:
        powers.append(powers[-1] @ Yn)
        sv = np.linalg.svd(powers[-1], compute_uv=False)
        ranks.append(int(np.sum(sv > rel)))
        if len(powers) > n + 1:
            raise NotNilpotent("rank sequence did not terminate")
    m = len(ranks) - 1
    ge = [ranks[j - 1] - ranks[j] for j in range(1, m + 1)]  # blocks of size >= j
    count = {j: ge[j - 1] - (ge[j] if j < m else 0) for j in range(1, m + 1)}
    kernels = {j: _null_basis(powers[j], rel, ref=1.0) for j in range(0, m + 1)}
    kernels[0] = np.zeros((n, 0))
    chains = []
    for k in range(m, 0, -1):
        if count[k] == 0:
            continue
        # vectors already forced at level k by longer chains
        forced = [np.linalg.matrix_power(Yn, L - k) @ h for L, h in chains]
        M = np.column_stack([kernels[k - 1]] + [f[:, None] for f in forced]) \
            if forced else kernels[k - 1]
        Mo = _orth(M) if M.shape[1] else M
        K = kernels[k]
        comp = K - Mo @ (Mo.conj().T @ K) if Mo.shape[1] else K
        C = _orth(comp, rel=1e-6)
        for c in range(count[k]):
            chains.append((k, C[:, c]))
    chains.sort(key=lambda kh: -kh[0])
    cols = []
    for k, h in chains:
        cols += [np.linalg.matrix_power(Yn, k - 1 - i) @ h for i in range(k)]
    Q = np.column_stack(cols)
    part = tuple(k for k, _ in chains)
    J = jordan_matrix(part)
    # Q^-1 Y Q is s1 * J in these coordinates; absorb s1 by rescaling chains
    D = []
    for k in part:
        D += [s1 ** (k - 1 - i) for i in range(k)]
    Q = Q * np.array(D)
    res = fro(np.linalg.solve(Q, Y @ Q) - J)
    return JordanData(part, Q, J, res)


@dataclass
class RankOneResult:
    result: np.ndarray
    jordan: JordanData
    schedule: tuple
    residuals: list


def degenerate_to_rank_one(Y, schedule=SCHEDULE):
    """Normalized limit in S1 (rank one, square zero) of conjugates of Y.

    In Jordan coordinates conjugation by ``diag(e^t, 1, ..., 1)`` multiplies
    the leading superdiagonal entry by ``e^t`` and leaves the rest alone.
    """
    Y = np.asarray(Y, dtype=complex)
    if fro(Y) == 0:
        raise PreconditionError("Y must be nonzero")
    jd = jordan_partition(Y)
    Q = jd.transform
    n = Y.shape[0]
    E = np.zeros((n, n))
    E[0, 1] = 1.0
    Z = Q @ E @ np.linalg.inv(Q)
    Z = Z / fro(Z)
    res = []
    for t in schedule:
        d = np.ones(n)
        d[0] = np.exp(-t)
        # G_t = Q diag(1/d) Q^-1, computed as e^-t-scaled to avoid overflow
        Jt = jd.jordan * np.outer(1 / d, d) * np.exp(-t)
        W = Q @ Jt @ np.linalg.inv(Q)
        res.append(fro(W / fro(W) - Z))
    return RankOneResult(Z, jd, tuple(schedule), res)


def partitions(n, largest=None):
    largest = largest or n
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest
