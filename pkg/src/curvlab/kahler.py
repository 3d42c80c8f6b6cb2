"""Kaehler support: u(m) inside so(2m) and the rank-one set S_1 in gl(m, C).

Real coordinates are interleaved ``(x1, y1, ..., xm, ym)`` and a complex
entry ``p + iq`` is realized as the 2x2 block ``[[p, -q], [q, p]]``.
"""
import numpy as np
from scipy.optimize import minimize

from . import lie
from .curvature import CurvatureOperator, complex_structure, qform

SUPPORT_TOL = 1e-10


def realify(H):
    H = np.asarray(H, dtype=complex)
    m = H.shape[0]
    out = np.zeros((2 * m, 2 * m))
    out[0::2, 0::2] = H.real
    out[1::2, 1::2] = H.real
    out[0::2, 1::2] = -H.imag
    out[1::2, 0::2] = H.imag
    return out


def to_so_complex(Z):
    """gl(m, C) = u(m) + i u(m)  ->  so(2m, C), complex-linear."""
    Z = np.asarray(Z, dtype=complex)
    H1 = 0.5 * (Z - Z.conj().T)
    H2 = (Z + Z.conj().T) / 2j
    return realify(H1) + 1j * realify(H2)


def u_projector(m):
    """Orthogonal projection of so(2m) onto u(m) (the commutant of J)."""
    n = 2 * m
    J = complex_structure(m)
    cols = []
    for b in lie.basis_so_n(n):
        # average over conjugation by J
        cols.append(lie.coords(0.5 * (b - J @ b @ J)))
    return CurvatureOperator(n, np.column_stack(cols))


def support_residual(R):
    """How far R is from mapping into u(m) and killing its complement."""
    if R.n % 2:
        return np.inf
    P = u_projector(R.n // 2).matrix
    return float(np.max(np.abs(R.matrix - P @ R.matrix @ P)))


def obc_element(z, w):
    """S_1 generator ``z w^H`` for Hermitian-orthogonal unit z, w."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    z = z / np.linalg.norm(z)
    w = w / np.linalg.norm(w)
    if abs(np.vdot(w, z)) > 1e-10:
        raise ValueError("pair is not orthogonal")
    return np.outer(z, w.conj())


def obc_form(R, z, w):
    """Normalized ``<R(Z), Z>`` for ``Z = z w^H`` embedded in so(2m, C).

    For a Kaehler operator this is the orthogonal bisectional curvature
    ``R(x, Jx, Jy, y)`` of the real unit vectors behind z and w.
    """
    res = support_residual(R)
    if res > SUPPORT_TOL:
        raise ValueError(f"operator is not supported on u(m) (residual {res:.2e})")
    Y = to_so_complex(obc_element(z, w))
    return qform(R, Y) / lie.skew_norm(Y) ** 2


def min_obc(R, restarts=8, seed=0):
    """Minimize :func:`obc_form` over orthonormal complex pairs."""
    m = R.n // 2
    rng = np.random.default_rng(seed)

    def pair(p):
        V = (p[: 2 * m] + 1j * p[2 * m:]).reshape(m, 2)
        Q, _ = np.linalg.qr(V)
        return Q[:, 0], Q[:, 1]

    def f(p):
        z, w = pair(p)
        return qform(R, to_so_complex(np.outer(z, w.conj())))

    best = None
    for _ in range(restarts):
        r = minimize(f, rng.standard_normal(4 * m), method="BFGS")
        if best is None or r.fun < best[0]:
            best = (float(r.fun), pair(r.x))
    return best
