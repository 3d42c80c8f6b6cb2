"""Lie-algebra substrate for so(n) and so(n, C).

Vectors are 1-d numpy arrays (real or complex), skew elements and group
elements are 2-d arrays.  The complex-bilinear form ``(u, v) = sum u_i v_i``
(no conjugation) is used for orthogonality in C^n; the Hermitian norm is only
used for sizes.

The basis of so(n) is ``X_ij = phi(e_i, e_j)`` for ``0 <= i < j < n`` in
lexicographic order; ``X_ij`` sends ``e_i`` to ``e_j``.
"""
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

STRUCT_TOL = 1e-12
GROUP_TOL = 1e-10


class IsotropicPivot(ValueError):
    """Gram-Schmidt met a vector with (v, v) = 0 (within tolerance)."""


def bilinear(u, v):
    """Complex-bilinear extension of the Euclidean inner product."""
    return np.dot(np.asarray(u), np.asarray(v))


def hnorm(u):
    return float(np.sqrt(np.vdot(u, u).real))


def is_isotropic(u, tol=1e-10):
    u = np.asarray(u)
    return abs(bilinear(u, u)) <= tol * max(hnorm(u) ** 2, np.finfo(float).tiny)


def phi(u, v):
    """Matrix of ``x -> (u, x) v - (v, x) u``."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.ndim != 1 or u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    if u.shape[0] < 2:
        raise ValueError("phi needs n >= 2")
    return np.outer(v, u) - np.outer(u, v)


def X(u, v):
    """Alias for :func:`phi`, the ``X(u, v)`` notation of the gluing section."""
    return phi(u, v)


def dim_so(n):
    return n * (n - 1) // 2


@lru_cache(maxsize=None)
def basis_pairs(n):
    if n < 2:
        raise ValueError("so(n) needs n >= 2")
    return tuple((i, j) for i in range(n) for j in range(i + 1, n))


@lru_cache(maxsize=None)
def _pair_index(n):
    idx = -np.ones((n, n), dtype=int)
    for a, (i, j) in enumerate(basis_pairs(n)):
        idx[i, j] = a
        idx[j, i] = a
    return idx


def pair_index(n, i, j):
    """Position of ``X_ij`` (i < j) in the lexicographic basis."""
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise IndexError(f"bad index pair ({i}, {j}) for n={n}")
    return int(_pair_index(n)[i, j])


def basis_so_n(n):
    """Orthonormal basis ``[X_01, X_02, ..., X_{n-2,n-1}]`` of so(n)."""
    out = []
    eye = np.eye(n)
    for i, j in basis_pairs(n):
        out.append(phi(eye[i], eye[j]))
    return out


@lru_cache(maxsize=None)
def _coord_indices(n):
    pairs = basis_pairs(n)
    rows = np.array([j for i, j in pairs])
    cols = np.array([i for i, j in pairs])
    return rows, cols


def coords(Xm):
    """Coefficients of a skew matrix in the ``X_ij`` basis.

    Since ``<X_ij, X_kl> = delta`` and ``X_ij`` has +1 in row j, column i,
    the coefficient of ``X_ij`` is simply ``Xm[j, i]``.
    """
    Xm = np.asarray(Xm)
    rows, cols = _coord_indices(Xm.shape[0])
    return Xm[..., rows, cols]


def from_coords(a, n):
    """Inverse of :func:`coords`."""
    a = np.asarray(a)
    rows, cols = _coord_indices(n)
    out = np.zeros(a.shape[:-1] + (n, n), dtype=np.result_type(a, float))
    out[..., rows, cols] = a
    out[..., cols, rows] = -a
    return out


def inner(A, B, hermitian=False):
    """``<A, B> = -1/2 tr(AB)``; with ``hermitian=True`` use ``-1/2 tr(A conj(B))``."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    if hermitian:
        B = np.conj(B)
    return -0.5 * np.einsum("ij,ji->", A, B)


def skew_norm(A):
    """Hermitian norm ``sqrt(<A, A>_H)``; equals the 2-norm of :func:`coords`."""
    return float(np.sqrt(max(inner(A, A, hermitian=True).real, 0.0)))


def bracket(A, B):
    return A @ B - B @ A


def is_skew(A, tol=STRUCT_TOL):
    A = np.asarray(A)
    return np.max(np.abs(A + A.T), initial=0.0) <= tol * max(1.0, np.max(np.abs(A), initial=0.0))


@lru_cache(maxsize=None)
def _structure_constants(n):
    basis = basis_so_n(n)
    d = len(basis)
    c = np.zeros((d, d, d))
    for a in range(d):
        for b in range(a + 1, d):
            v = coords(bracket(basis[a], basis[b]))
            c[a, b] = v
            c[b, a] = -v
    c.setflags(write=False)
    return c


def structure_constants(n):
    """Table ``c[a, b, g] = <[b_a, b_b], b_g>`` over the lexicographic basis."""
    return _structure_constants(n)


def gram_schmidt_bilinear(vs, tol=1e-10, perturb=False, max_tries=3):
    """Orthonormalize with respect to the bilinear form ``( , )``.

    Raises :class:`IsotropicPivot` when a pivot has ``(v, v) ~ 0``.  With
    ``perturb=True`` such a pivot is nudged by ``1e-6 |v| e_m`` along the
    smallest coordinate ``m`` not yet tried (up to ``max_tries`` times); the
    span then changes slightly, which is what frame completion wants.
    """
    out = []
    for v in vs:
        w = np.array(v, dtype=complex)
        for q in out:
            w = w - bilinear(q, w) * q
        norm_h = hnorm(w)
        if norm_h <= tol:
            raise ValueError("input vectors are linearly dependent")
        tries = 0
        while abs(bilinear(w, w)) <= tol * norm_h ** 2:
            if not perturb or tries >= max_tries:
                raise IsotropicPivot(f"isotropic pivot (v, v) = {bilinear(w, w):.3g}")
            w = w.copy()
            w[tries % w.shape[0]] += 1e-6 * norm_h
            for q in out:
                w = w - bilinear(q, w) * q
            norm_h = hnorm(w)
            tries += 1
        out.append(w / np.sqrt(bilinear(w, w)))
    return out


def complete_frame(vs, n=None):
    """Extend ( , )-orthonormal vectors to a ( , )-orthonormal basis of C^n.

    Columns of the returned matrix F satisfy ``F.T @ F = I``; the first
    columns are the given vectors (untouched) and ``det F = 1`` whenever a
    completion vector was added.  Candidates are the standard basis vectors,
    then fixed pairwise sums; isotropic residuals are skipped.
    """
    vs = [np.asarray(v, dtype=complex) for v in vs]
    n = n or vs[0].shape[0]
    frame = list(vs)
    eye = np.eye(n)
    candidates = [eye[k] for k in range(n)]
    candidates += [eye[k] + 0.5 * eye[(k + 1) % n] for k in range(n)]
    rng = np.random.default_rng(12345)
    while len(frame) < n:
        w = candidates.pop(0) if candidates else rng.standard_normal(n)
        w = np.asarray(w, dtype=complex)
        for q in frame:
            w = w - bilinear(q, w) * q
        if hnorm(w) < 1e-6:
            continue
        b = bilinear(w, w)
        if abs(b) <= 1e-6 * hnorm(w) ** 2:
            continue
        frame.append(w / np.sqrt(b))
    F = np.column_stack(frame)
    if len(vs) < n and np.real(np.linalg.det(F)) < 0:
        F[:, -1] *= -1
    return F


def is_complex_orthogonal(P, tol=GROUP_TOL):
    P = np.asarray(P)
    n = P.shape[0]
    return (np.linalg.norm(P.T @ P - np.eye(n)) <= tol * max(1.0, np.linalg.norm(P) ** 2)
            and abs(np.linalg.det(P) - 1) <= tol * max(1.0, np.linalg.norm(P) ** n))


def boost(f1, f2, t):
    """One-parameter subgroup ``exp(i t phi(f1, f2))`` of SO(n, C).

    ``f1, f2`` must be ( , )-orthonormal (real orthonormal in the usual
    case).  On their span ``f1 -> cosh t f1 + i sinh t f2`` and
    ``f2 -> -i sinh t f1 + cosh t f2``; vectors ( , )-orthogonal to both are
    fixed.  The Euclidean size of ``P f1`` grows like ``e^t``.
    """
    f1 = np.asarray(f1, dtype=complex)
    f2 = np.asarray(f2, dtype=complex)
    G = np.array([[bilinear(f1, f1), bilinear(f1, f2)],
                  [bilinear(f2, f1), bilinear(f2, f2)]])
    if np.max(np.abs(G - np.eye(2))) > 1e-10 * max(1.0, hnorm(f1) * hnorm(f2)):
        raise ValueError("boost needs ( , )-orthonormal f1, f2")
    n = f1.shape[0]
    ch, sh = np.cosh(t), np.sinh(t)
    return (np.eye(n) + (ch - 1.0) * (np.outer(f1, f1) + np.outer(f2, f2))
            + 1j * sh * phi(f1, f2))


def boost_expm(f1, f2, t):
    """Reference for :func:`boost` via the matrix exponential."""
    return expm(1j * t * phi(np.asarray(f1, dtype=complex), np.asarray(f2, dtype=complex)))


def random_orthogonal(n, rng):
    """Haar-ish real rotation with det +1."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    return Q


def random_skew(n, rng, complex_=True):
    a = rng.standard_normal(dim_so(n))
    if complex_:
        a = a + 1j * rng.standard_normal(dim_so(n))
    return from_coords(a, n)


def random_complex_orthogonal(n, rng, scale=0.5):
    """``exp(Z)`` for a random complex skew ``Z``; an element of SO(n, C)."""
    return expm(scale * random_skew(n, rng))
