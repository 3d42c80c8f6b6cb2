"""Algebraic curvature operators on so(n).

A curvature operator is a real symmetric d x d matrix (d = n(n-1)/2) acting
on coefficient vectors in the lexicographic ``X_ij`` basis.  Components are
``R_ijkl = <R(X_ij), X_kl>``, so the round sphere (R = Id) has K_ij = +1.
"""
from dataclasses import dataclass
from functools import lru_cache
import json

import numpy as np

from . import lie

BASIS_TAG = "lex-xij-v1"


@dataclass(frozen=True, eq=False)
class CurvatureOperator:
    n: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        d = lie.dim_so(self.n)
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match n={self.n} (d={d})")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def d(self):
        return self.matrix.shape[0]

    def __add__(self, other):
        _same_n(self, other)
        return CurvatureOperator(self.n, self.matrix + other.matrix)

    def __sub__(self, other):
        _same_n(self, other)
        return CurvatureOperator(self.n, self.matrix - other.matrix)

    def __mul__(self, s):
        return CurvatureOperator(self.n, float(s) * self.matrix)

    __rmul__ = __mul__

    def __neg__(self):
        return CurvatureOperator(self.n, -self.matrix)

    def __matmul__(self, other):
        _same_n(self, other)
        return CurvatureOperator(self.n, self.matrix @ other.matrix)

    def apply(self, Xm):
        """R(X) as a skew matrix (complex-linear extension)."""
        return lie.from_coords(self.matrix @ lie.coords(Xm), self.n)

    def opnorm(self):
        return float(np.max(np.abs(np.linalg.eigvalsh(self.matrix))))

    def min_eig(self):
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def component(self, i, j, k, l):
        return components(self).R(i, j, k, l)

    def to_json(self):
        return {"n": self.n, "basis": BASIS_TAG, "matrix": self.matrix.tolist()}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        if obj.get("basis", BASIS_TAG) != BASIS_TAG:
            raise ValueError(f"unsupported basis tag {obj.get('basis')!r}")
        m = np.asarray(obj["matrix"], dtype=float)
        if not np.allclose(m, m.T, atol=1e-12):
            raise ValueError("operator matrix is not symmetric")
        return cls(int(obj["n"]), m)

    @classmethod
    def identity(cls, n):
        return cls(n, np.eye(lie.dim_so(n)))

    @classmethod
    def zero(cls, n):
        return cls(n, np.zeros((lie.dim_so(n),) * 2))


def _same_n(a, b):
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: n={a.n} vs n={b.n}")


def qform(R, Xm):
    """``<R(X), X>_H`` for a (possibly complex) skew X; always real."""
    Xm = np.asarray(Xm)
    if Xm.shape != (R.n, R.n):
        raise ValueError(f"dimension mismatch: X is {Xm.shape}, operator has n={R.n}")
    a = lie.coords(Xm)
    return float(np.real(np.vdot(a, R.matrix @ a)))


def qform_normalized(R, Xm):
    a = lie.coords(np.asarray(Xm))
    return float(np.real(np.vdot(a, R.matrix @ a)) / np.real(np.vdot(a, a)))


class components:
    """Accessor for ``R_ijkl`` and ``K_ij`` of an operator."""

    def __init__(self, R):
        self.op = R
        self.n = R.n

    def _idx(self, i, j):
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError(f"frame index out of range for n={self.n}: ({i}, {j})")
        if i == j:
            return None, 0
        return lie.pair_index(self.n, i, j), (1 if i < j else -1)

    def R(self, i, j, k, l):
        a, sa = self._idx(i, j)
        b, sb = self._idx(k, l)
        if a is None or b is None:
            return 0.0
        return float(sa * sb * self.op.matrix[a, b])

    def K(self, i, j):
        return self.R(i, j, i, j)

    def tensor(self):
        """Full 4-index array ``R[i, j, k, l]``."""
        n = self.n
        idx = lie._pair_index(n)
        sign = np.sign(np.subtract.outer(np.arange(n), np.arange(n))) * -1
        m = self.op.matrix
        safe = np.where(idx < 0, 0, idx)
        T = m[safe[:, :, None, None], safe[None, None, :, :]]
        T = T * sign[:, :, None, None] * sign[None, None, :, :]
        return T


def from_tensor(T):
    """Operator from a 4-index tensor with the pair symmetries."""
    n = T.shape[0]
    pairs = lie.basis_pairs(n)
    m = np.array([[T[i, j, k, l] for (k, l) in pairs] for (i, j) in pairs])
    return CurvatureOperator(n, m)


@lru_cache(maxsize=None)
def _kn_indices(n):
    pairs = np.array(lie.basis_pairs(n))
    I, J = pairs[:, 0], pairs[:, 1]
    return I[:, None], J[:, None], I[None, :], J[None, :]


def kulkarni_nomizu(a, b):
    """Kulkarni-Nomizu product of symmetric 2-tensors as an operator.

    ``(a.b)_ijkl = a_ik b_jl + a_jl b_ik - a_il b_jk - a_jk b_il``; with
    ``g`` the identity, ``g.g / 2`` is the identity operator.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    i, j, k, l = _kn_indices(a.shape[0])
    m = a[i, k] * b[j, l] + a[j, l] * b[i, k] - a[i, l] * b[j, k] - a[j, k] * b[i, l]
    return CurvatureOperator(a.shape[0], m)


def rsharp(R):
    """Hamilton's ``R#``: ``(R#)_ab = 1/2 sum c_gda c_ezb R_ge R_dz``."""
    c = lie.structure_constants(R.n)
    m = R.matrix
    d = m.shape[0]
    # (R C_b R)[g, d] for every b, then contract against C_a
    rc = np.tensordot(m, c, axes=(1, 0))                       # g z b
    rcr = np.tensordot(rc, m, axes=(1, 0))                     # g b d
    rcr = rcr.transpose(0, 2, 1).reshape(d * d, d)
    out = 0.5 * c.reshape(d * d, d).T @ rcr
    return CurvatureOperator(R.n, out)


def ode_rhs(R):
    """``R^2 + R#``."""
    return R @ R + rsharp(R)


def bianchi_project(R):
    """Remove the Lambda^4 part so that the first Bianchi identity holds."""
    T = components(R).tensor()
    b = (T + np.transpose(T, (0, 2, 3, 1)) + np.transpose(T, (0, 3, 1, 2))) / 3.0
    return from_tensor(T - b)


def bianchi_residual(R):
    T = components(R).tensor()
    b = T + np.transpose(T, (0, 2, 3, 1)) + np.transpose(T, (0, 3, 1, 2))
    return float(np.max(np.abs(b)))


def orthogonal_action(P):
    """Matrix of ``X -> P X P^T`` on coefficient vectors (P real orthogonal)."""
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    return np.column_stack([lie.coords(P @ b @ P.T) for b in lie.basis_so_n(n)])


def conjugate(R, P):
    """Induced action of a real rotation on S^2(so(n)).

    ``qform(conjugate(R, P), X) == qform(R, P^T X P)``.
    """
    M = orthogonal_action(P)
    return CurvatureOperator(R.n, M @ R.matrix @ M.T)


# ---------------------------------------------------------------- models

def tangential_projector(n, e0=None):
    """Projection onto span{X_ij : i, j >= 1} (planes orthogonal to e0)."""
    m = np.zeros((lie.dim_so(n),) * 2)
    for a, (i, j) in enumerate(lie.basis_pairs(n)):
        if i >= 1:
            m[a, a] = 1.0
    R = CurvatureOperator(n, m)
    if e0 is not None:
        R = conjugate(R, _rotation_taking_e0_to(np.asarray(e0, dtype=float)))
    return R


def radial_projector(n, e0=None):
    return CurvatureOperator.identity(n) - tangential_projector(n, e0)


def _rotation_taking_e0_to(v):
    """A rotation P with P e_0 = v/|v|."""
    v = v / np.linalg.norm(v)
    n = v.shape[0]
    M = np.eye(n)
    M[:, 0] = v
    Q, _ = np.linalg.qr(M)
    if Q[:, 0] @ v < 0:
        Q[:, 0] *= -1
    if np.linalg.det(Q) < 0:
        Q[:, -1] *= -1
    return Q


def fubini_study(m):
    """Fubini-Study operator on CP^m (n = 2m), holomorphic curvature 4.

    Interleaved real coordinates ``(x1, y1, ..., xm, ym)`` with
    ``J e_{x_k} = e_{y_k}``.  ``R(X,Y,Y,X) = <X,X><Y,Y> - <X,Y>^2 + 3<JX,Y>^2``
    so sectional curvatures lie in [1, 4].
    """
    n = 2 * m
    g = np.eye(n)
    J = complex_structure(m)
    # omega(X, Y) = <JX, Y>
    w = J.T @ g
    T = (np.einsum("ik,jl->ijkl", g, g) - np.einsum("il,jk->ijkl", g, g)
         + np.einsum("ik,jl->ijkl", w, w) - np.einsum("il,jk->ijkl", w, w)
         + 2.0 * np.einsum("ij,kl->ijkl", w, w))
    return from_tensor(T)


def complex_structure(m):
    J = np.zeros((2 * m, 2 * m))
    for k in range(m):
        J[2 * k + 1, 2 * k] = 1.0
        J[2 * k, 2 * k + 1] = -1.0
    return J


def model(name, n, *params):
    """Library of model operators.

    ``sphere`` (Id), ``cylinder`` (S^{n-1} x R, flat in e_0 planes),
    ``sphere_product(p, q)``, ``quarter_pinched(s)`` (n even; s in [0, 1]
    interpolates from the round sphere to CP^{n/2} rescaled to 1/4 <= K <= 1),
    ``diagonal(values)``.
    """
    if name == "sphere":
        return CurvatureOperator.identity(n)
    if name in ("cylinder", "sphere_x_line", "sphere_x_circle"):
        return tangential_projector(n)
    if name == "sphere_product":
        p, q = (int(x) for x in params)
        if p < 1 or q < 1 or p + q != n:
            raise ValueError(f"sphere_product needs p + q = n with p, q >= 1, got ({p}, {q})")
        m = np.zeros((lie.dim_so(n),) * 2)
        for a, (i, j) in enumerate(lie.basis_pairs(n)):
            if j < p or i >= p:
                m[a, a] = 1.0
        return CurvatureOperator(n, m)
    if name == "quarter_pinched":
        (s,) = params
        if n % 2 or n < 4:
            raise ValueError("quarter_pinched needs even n >= 4")
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"pinching parameter {s} outside [0, 1]")
        fs = fubini_study(n // 2) * 0.25
        return (1.0 - s) * CurvatureOperator.identity(n) + s * fs
    if name == "diagonal":
        vals = np.asarray(params[0] if len(params) == 1 else params, dtype=float)
        if vals.shape != (lie.dim_so(n),):
            raise ValueError(f"diagonal needs {lie.dim_so(n)} values")
        return CurvatureOperator(n, np.diag(vals))
    raise ValueError(f"unknown model {name!r}")


def random_operator(n, rng, bianchi=True, scale=1.0):
    d = lie.dim_so(n)
    A = rng.standard_normal((d, d))
    R = CurvatureOperator(n, scale * (A + A.T) / 2)
    return bianchi_project(R) if bianchi else R


def load_operator(path):
    with open(path) as fh:
        return CurvatureOperator.from_json(json.load(fh))
