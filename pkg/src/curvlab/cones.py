"""Ad-invariant sets in so(n, C) and positivity of ``q_R`` over them.

Every set here is a cone, so we minimize the normalized form
``q_R(X) / |X|^2`` over unit elements.  Three parametrizations are used:

* S0 and S' through orthonormal real frames: S0 is spanned (up to scale and
  conjugation) by ``X(f1 + i f2, f3 + i f4)``, S' by
  ``X(f1 + i f2, f3 + i s f4)`` with ``s`` in [-1, 1].
* Orbits through conjugation ``Y -> e^W Y e^-W`` with a complex skew W.
* S1 (Kaehler) through orthonormal pairs in C^m, see :mod:`curvlab.kahler`.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import os

import numpy as np
from scipy.linalg import expm

from . import lie
from .curvature import (CurvatureOperator, components, qform, radial_projector,
                        tangential_projector)
from . import kahler

POS_TOL = 1e-7
FEAS_TOL = 1e-8

POSITIVE = "PositiveDefiniteOnS"
KERNEL = "NonnegativeWithKernel"
INDEFINITE = "Indefinite"

NON_ISOTROPIC = "NonIsotropicCase"
ISOTROPIC = "IsotropicCase"

KINDS = ("s0", "sprime", "s1", "orbit", "simple")


# ------------------------------------------------------------ descriptors

@dataclass(frozen=True, eq=False)
class InvariantSet:
    """Finite description of an Ad-invariant cone in so(n, C).

    ``n`` may be ``None`` for s0/sprime/s1, meaning "whatever the operator
    uses".  ``element`` is set for orbits, ``e``/``u`` for simple families.
    """
    kind: str
    n: int = None
    element: np.ndarray = None
    e: np.ndarray = None
    u: np.ndarray = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown set kind {self.kind!r}")
        if self.kind == "orbit":
            el = np.array(self.element, dtype=complex)
            if el.ndim != 2 or el.shape[0] != el.shape[1]:
                raise ValueError("orbit element must be a square matrix")
            if not lie.is_skew(el, tol=1e-10):
                raise ValueError("orbit element must be skew")
            if lie.skew_norm(el) == 0:
                raise ValueError("orbit element must be nonzero")
            el.setflags(write=False)
            object.__setattr__(self, "element", el)
            object.__setattr__(self, "n", el.shape[0])
        if self.kind == "simple":
            e = np.array(self.e, dtype=float)
            u = np.array(self.u, dtype=complex)
            if e.shape != u.shape or e.ndim != 1:
                raise ValueError("e and u must be vectors of equal length")
            if np.linalg.norm(e) == 0 or lie.hnorm(u) == 0:
                raise ValueError("e and u must be nonzero")
            if abs(lie.bilinear(e, u)) > 1e-10 * np.linalg.norm(e) * lie.hnorm(u):
                raise ValueError("simple family needs (e, u) = 0")
            object.__setattr__(self, "e", e)
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "n", e.shape[0])

    @property
    def isotropic(self):
        if self.kind != "simple":
            return None
        return classify_simple(self.e, self.u) == ISOTROPIC

    def generator(self):
        """A representative element (for orbits and simple families)."""
        if self.kind == "orbit":
            return self.element
        if self.kind == "simple":
            return lie.phi(self.e.astype(complex), self.u)
        raise ValueError(f"{self.kind} has no single generator")

    def to_json(self):
        out = {"kind": self.kind}
        if self.n is not None and self.kind in ("s0", "sprime", "s1"):
            out["n"] = int(self.n)
        if self.kind == "orbit":
            out["element"] = {"re": self.element.real.tolist(),
                              "im": self.element.imag.tolist()}
        if self.kind == "simple":
            out["e"] = self.e.tolist()
            out["u_re"] = self.u.real.tolist()
            out["u_im"] = self.u.imag.tolist()
        return out

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or obj.get("kind") not in KINDS:
            raise ValueError("set descriptor needs a known 'kind'")
        kind = obj["kind"]
        if kind == "orbit":
            el = obj["element"]
            return cls("orbit", element=np.array(el["re"]) + 1j * np.array(el.get("im", 0.0)))
        if kind == "simple":
            u = np.array(obj["u_re"]) + 1j * np.array(obj.get("u_im", np.zeros(len(obj["u_re"]))))
            return cls("simple", e=obj["e"], u=u)
        return cls(kind, n=obj.get("n"))


def S0(n=None):
    return InvariantSet("s0", n)


def SPrime(n=None):
    return InvariantSet("sprime", n)


def S1Kahler(n=None):
    return InvariantSet("s1", n)


def OrbitOf(Xm):
    return InvariantSet("orbit", element=Xm)


def SimpleFamily(e, u):
    return InvariantSet("simple", e=e, u=u)


def _resolve_n(R, S):
    if S.n is not None and S.n != R.n:
        raise ValueError(f"dimension mismatch: set has n={S.n}, operator n={R.n}")
    return R.n


# ------------------------------------------------------------ closed forms

def _check_frame(frame, k=4):
    F = np.asarray(frame, dtype=float)
    if F.ndim != 2 or F.shape[0] != k:
        raise ValueError(f"frame must be {k} vectors")
    if np.max(np.abs(F @ F.T - np.eye(k))) > 1e-10:
        raise ValueError("frame is not orthonormal")
    return F


def _frame_curvatures(R, F):
    """K_ab and R_1234 of R restricted to the frame rows of F."""
    T = components(R).tensor()
    Tf = np.einsum("ijkl,ai,bj,ck,dl->abcd", T, F, F, F, F, optimize=True)
    return Tf


def isotropic_form(R, frame, lam, mu):
    """``K13 + mu^2 K14 + lam^2 K23 + lam^2 mu^2 K24 - 2 lam mu R1234``.

    Slots are 1-based over the four frame vectors.  For operators
    satisfying the Bianchi identity this equals
    ``qform(R, X(v1 + i lam v2, v3 + i mu v4))``.
    """
    F = _check_frame(frame)
    if F.shape[1] != R.n:
        raise ValueError("frame dimension does not match operator")
    T = _frame_curvatures(R, F)
    K = lambda a, b: T[a, b, a, b]
    return float(K(0, 2) + mu ** 2 * K(0, 3) + lam ** 2 * K(1, 2)
                 + lam ** 2 * mu ** 2 * K(1, 3) - 2 * lam * mu * T[0, 1, 2, 3])


def pic1_form(R, frame, lam):
    """The ``mu = 1`` member of :func:`isotropic_form` (S' nonnegativity)."""
    if not -1.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [-1, 1]")
    F = _check_frame(frame)
    if F.shape[1] != R.n:
        raise ValueError("frame dimension does not match operator")
    T = _frame_curvatures(R, F)
    K = lambda a, b: T[a, b, a, b]
    return float(K(0, 2) + lam ** 2 * K(0, 3) + K(1, 2) + lam ** 2 * K(1, 3)
                 - 2 * lam * T[0, 1, 2, 3])


# ------------------------------------------------------------ certificates

@dataclass
class PositivityCertificate:
    kind: str
    min_value: float
    minimizer: np.ndarray
    status: str
    restarts_used: int
    iterations: int
    seed: int
    converged: bool
    grad_norm: float
    feasibility: float = None
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "kind": self.kind,
            "min_value": self.min_value,
            "minimizer": {"re": self.minimizer.real.tolist(),
                          "im": self.minimizer.imag.tolist()},
            "status": self.status,
            "restarts_used": self.restarts_used,
            "iterations": self.iterations,
            "seed": self.seed,
            "converged": self.converged,
            "grad_norm": self.grad_norm,
            "feasibility": self.feasibility,
            "diagnostics": self.diagnostics,
        }


def status_of(value, pos_tol=POS_TOL):
    if value > pos_tol:
        return POSITIVE
    if value >= -pos_tol:
        return KERNEL
    return INDEFINITE


def restart_rng(seed, k):
    """Counter-based stream for restart ``k`` of a run seeded with ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(k)])))


def _workers():
    try:
        return max(1, int(os.environ.get("CURVLAB_THREADS", "1")))
    except ValueError:
        return 1


def _run_restarts(fn, restarts):
    """Run ``fn(k)`` for each restart, merged in restart order."""
    w = min(_workers(), restarts)
    if w > 1:
        with ThreadPoolExecutor(max_workers=w) as ex:
            results = list(ex.map(fn, range(restarts)))
    else:
        results = [fn(k) for k in range(restarts)]
    best = min(range(restarts), key=lambda k: (results[k]["value"], k))
    return results, results[best]


# ------------------------------------------------------------ frame optimizer

def frame_element(F, s=1.0):
    """``X(f1 + i f2, f3 + i s f4)`` for the columns of F (3 columns: s = 0)."""
    u = F[:, 0] + 1j * F[:, 1]
    v = F[:, 2] + (1j * s * F[:, 3] if F.shape[1] > 3 else 0)
    return lie.phi(u, v)


def _frame_value_grad(Rm, F, s):
    """Normalized form at the frame element and its Euclidean gradients."""
    n, p = F.shape
    Xm = frame_element(F, s)
    a = lie.coords(Xm)
    g = Rm @ a
    N = np.vdot(a, a).real
    f = np.vdot(a, g).real / N
    M = lie.from_coords(np.conj(g - f * a), n).T
    u = F[:, 0] + 1j * F[:, 1]
    v = F[:, 2] + (1j * s * F[:, 3] if p > 3 else 0)
    Mv, Mu = M @ v, M @ u
    G = np.empty_like(F)
    G[:, 0] = 2 * Mv.real
    G[:, 1] = -2 * Mv.imag
    G[:, 2] = -2 * Mu.real
    gs = 0.0
    if p > 3:
        G[:, 3] = 2 * s * Mu.imag
        gs = 2 * float((F[:, 3] @ Mu).imag)
    return f, G / N, gs / N


def _retract(F):
    Q, Rr = np.linalg.qr(F)
    return Q * np.sign(np.diag(Rr))


def _line_search(trial, f, slope, tau):
    """Armijo backtracking with a quadratic-interpolation probe.

    ``trial(t)`` returns ``(value, payload)``.  Along the periodic
    retraction curves a plain doubling step tends to overshoot, so when the
    parabola through ``f``, ``slope`` and the first trial points to a
    shorter step that step is also evaluated and the better one kept.
    """
    while True:
        fn, pay = trial(tau)
        curv = fn - f - slope * tau
        tq = -slope * tau * tau / (2 * curv) if curv > 0 else None
        if fn <= f + 1e-4 * tau * slope:
            if tq is not None and tq < 0.9 * tau:
                fq, payq = trial(tq)
                if fq < fn:
                    return tq, fq, payq
            return tau, fn, pay
        if tau < 1e-14:
            return 0.0, f, None
        tau = min(max(tq if tq is not None else 0.5 * tau, 0.1 * tau), 0.5 * tau)


def _tangent(F, G):
    sym = F.T @ G
    return G - F @ (0.5 * (sym + sym.T))


def _frame_search(Rm, n, p, free_s, rng, iterations, gtol, start=None, s_fixed=1.0):
    """Riemannian conjugate gradient (PR+) on the Stiefel manifold x angle.

    With ``free_s`` the parameter is ``s = sin(theta)``; otherwise s stays
    at ``s_fixed``.
    """
    if start is None:
        F = _retract(rng.standard_normal((n, p)))
        th = rng.uniform(-np.pi / 2, np.pi / 2)
    else:
        F, th = start
    sval = (lambda th: np.sin(th)) if free_s else (lambda th: s_fixed)
    s = sval(th) if p > 3 else 0.0
    f, G, gs = _frame_value_grad(Rm, F, s)
    Gr = _tangent(F, G)
    gth = gs * np.cos(th) if free_s else 0.0
    D, dth = -Gr, -gth
    tau, it, gn = 1.0, 0, np.inf
    for it in range(1, iterations + 1):
        gn2 = float(np.sum(Gr * Gr) + gth * gth)
        gn = np.sqrt(gn2)
        if gn < gtol:
            break
        slope = float(np.sum(Gr * D) + gth * dth)
        if slope >= 0:
            D, dth, slope = -Gr, -gth, -gn2
        def trial(t):
            Fn = _retract(F + t * D)
            thn = th + t * dth
            sn = sval(thn) if p > 3 else 0.0
            fn, Gn, gsn = _frame_value_grad(Rm, Fn, sn)
            return fn, (Fn, thn, sn, Gn, gsn)

        tau, fn, pay = _line_search(trial, f, slope, min(2.0 * tau, 10.0))
        if pay is None:
            break
        Fn, thn, sn, Gn, gsn = pay
        Grn = _tangent(Fn, Gn)
        gthn = gsn * np.cos(thn) if free_s else 0.0
        # transport by projection, Polak-Ribiere+ coefficient
        Dt = _tangent(Fn, D)
        Gt = _tangent(Fn, Gr)
        beta = max(0.0, float(np.sum(Grn * (Grn - Gt)) + gthn * (gthn - gth)) / gn2)
        D, dth = -Grn + beta * Dt, -gthn + beta * dth
        F, th, s, f, Gr, gth = Fn, thn, sn, fn, Grn, gthn
    return {"value": f, "F": F, "theta": th, "s": s, "iterations": it, "grad": gn}


# ------------------------------------------------------------ orbit optimizer

def _orbit_value_dir(Rm, Y):
    n = Y.shape[0]
    y = lie.coords(Y)
    N = np.vdot(y, y).real
    g = Rm @ y
    f = np.vdot(y, g).real / N
    V = lie.from_coords(g - f * y, n)
    h = lie.coords(lie.bracket(np.conj(Y), V))
    # df along W is 2 Re(conj(w) . h) / N; steepest descent is W = -h
    return f, h, N


def _normalize(Y):
    return Y / lie.skew_norm(Y)


def _orbit_search(Rm, Y0, iterations, gtol):
    Y = _normalize(Y0)
    f, h, N = _orbit_value_dir(Rm, Y)
    n = Y.shape[0]
    tau, it, gn = 1.0, 0, np.inf
    for it in range(1, iterations + 1):
        gn2 = 2 * np.vdot(h, h).real / N
        gn = np.sqrt(gn2)
        if gn < gtol:
            break
        W = -lie.from_coords(h, n)
        def trial(t):
            E = expm(t * W)
            Yn = _normalize(E @ Y @ np.linalg.inv(E))
            fn, hn, Nn = _orbit_value_dir(Rm, Yn)
            return fn, (Yn, hn, Nn)

        tau, fn, pay = _line_search(trial, f, -gn2, min(2.0 * tau, 10.0))
        if pay is None:
            break
        Yn, hn, Nn = pay
        Y, f, h, N = Yn, fn, hn, Nn
    return {"value": f, "Y": Y, "iterations": it, "grad": gn}


# ------------------------------------------------------------ certify

def _feasibility(kind, Y):
    Y = _normalize(Y)
    if kind == "s0":
        sv = np.linalg.svd(Y, compute_uv=False)
        return float(max(np.linalg.norm(Y @ Y), sv[2] if len(sv) > 2 else 0.0))
    if kind == "sprime":
        sv = np.linalg.svd(Y, compute_uv=False)
        return float(max(np.linalg.norm(Y @ Y @ Y), sv[2] if len(sv) > 2 else 0.0))
    return None


def certify(R, S, restarts=16, iterations=400, seed=0, pos_tol=POS_TOL, gtol=1e-9,
            orbit_scale=0.7):
    """Minimize ``q_R(X)/|X|^2`` over S and classify the sign of the minimum.

    The answer is an upper bound on the true infimum (a local search);
    ``converged`` reports whether the best run reached ``gtol``.
    """
    n = _resolve_n(R, S)
    Rm = R.matrix
    if S.kind in ("s0", "sprime"):
        if S.kind == "s0" and n < 4:
            raise ValueError("S0 is empty for n < 4")
        if n < 3:
            raise ValueError("S' is empty for n < 3")
        p = 4 if n >= 4 else 3
        free = S.kind == "sprime"

        def run(k):
            return _frame_search(Rm, n, p, free, restart_rng(seed, k), iterations, gtol)

        results, best = _run_restarts(run, restarts)
        Y = frame_element(best["F"], best["s"])
        diag = {"s": float(best["s"])} if free else {}
    elif S.kind in ("orbit", "simple"):
        X0 = S.generator()

        def run(k):
            rng = restart_rng(seed, k)
            Y0 = X0 if k == 0 else (lambda P: P @ X0 @ np.linalg.inv(P))(
                lie.random_complex_orthogonal(n, rng, scale=orbit_scale))
            return _orbit_search(Rm, Y0, iterations, gtol)

        results, best = _run_restarts(run, restarts)
        Y = best["Y"]
        diag = {}
    elif S.kind == "s1":
        if n % 2:
            raise ValueError("S1 needs even n")
        value, (z, w) = kahler.min_obc(R, restarts=restarts, seed=seed)
        Y = kahler.to_so_complex(np.outer(z, w.conj()))
        Yn = _normalize(Y)
        val = qform(R, Yn)
        return PositivityCertificate("s1", val, Yn, status_of(val, pos_tol), restarts,
                                     0, seed, True, float("nan"),
                                     diagnostics={"z": [z.real.tolist(), z.imag.tolist()],
                                                  "w": [w.real.tolist(), w.imag.tolist()]})
    else:
        raise ValueError(f"cannot certify over {S.kind}")
    Y = _normalize(Y)
    val = qform(R, Y)
    return PositivityCertificate(
        S.kind, val, Y, status_of(val, pos_tol), restarts,
        int(sum(r["iterations"] for r in results)), seed,
        bool(best["grad"] < gtol * 10), float(best["grad"]), _feasibility(S.kind, Y), diag)


def frame_minimum(R, s, restarts=16, iterations=400, seed=0, gtol=1e-10):
    """Minimum of the normalized form on ``X(f1 + i f2, f3 + i s f4)`` over
    orthonormal real 4-frames, for a fixed real s."""
    n = R.n
    if n < 4:
        raise ValueError("need n >= 4")

    def run(k):
        return _frame_search(R.matrix, n, 4, False, restart_rng(seed, k), iterations, gtol,
                             s_fixed=float(s))

    _, best = _run_restarts(run, restarts)
    return float(best["value"]), frame_element(best["F"], s)


def max_value(R, S, **kw):
    """Supremum of the normalized form over S (minimum of ``-R``)."""
    c = certify(CurvatureOperator(R.n, -R.matrix), S, **kw)
    return -c.min_value, c.minimizer


# ------------------------------------------------------------ radial split

@dataclass
class RadialSplit:
    e0: np.ndarray
    tangential: np.ndarray
    radial: np.ndarray

    @classmethod
    def of(cls, Xm, e0=None):
        Xm = np.asarray(Xm)
        n = Xm.shape[0]
        e = np.eye(n)[0] if e0 is None else np.asarray(e0, dtype=float) / np.linalg.norm(e0)
        Pe = np.outer(e, e)
        Q = np.eye(n) - Pe
        return cls(e, Q @ Xm @ Q, Xm - Q @ Xm @ Q)


def radial_k(S, n=None, e0=None, **kw):
    """``k(S) = inf |X1|`` over unit X in S, and the certificate behind it."""
    n = S.n or n
    if n is None:
        raise ValueError("radial_k needs n for a dimension-free descriptor")
    c = certify(tangential_projector(n, e0), S, **kw)
    return float(np.sqrt(max(c.min_value, 0.0))), c


def radial_amax(S, n=None, **kw):
    """``1 - min |X2|^2`` over unit X: the largest tangential fraction."""
    n = S.n or n
    c = certify(radial_projector(n), S, **kw)
    return float(1.0 - c.min_value), c


# ------------------------------------------------------------ simple elements

def classify_simple(e, u, iso_tol=1e-8):
    e = np.asarray(e, dtype=float)
    u = np.asarray(u, dtype=complex)
    if np.linalg.norm(e) == 0:
        raise ValueError("e must be nonzero")
    if abs(lie.bilinear(e, u)) > 1e-10 * np.linalg.norm(e) * lie.hnorm(u):
        raise ValueError("(e, u) must vanish")
    return NON_ISOTROPIC if abs(lie.bilinear(u, u)) > iso_tol * lie.hnorm(u) ** 2 else ISOTROPIC


def _target_check(vs):
    V = np.array(vs, dtype=complex)
    if np.max(np.abs(V @ V.T - np.eye(len(vs)))) > 1e-10:
        raise ValueError("target must be ( , )-orthonormal")


def conjugator_to_target(e, u, target):
    """P in SO(n, C) with ``P X(e, u) P^-1 = X(target)``.

    Non-isotropic u: target is ``(v1, v2)`` and X(e, u) is first rescaled to
    ``X(e/|e|, u/sqrt((u, u)))``.  Isotropic u: target is ``(v, f1, f2)``
    meaning ``X(v, f1 + i f2)`` and the rescaling is ``u -> u/|Re u|``.
    The returned map acts on the normalized element; see
    :func:`simple_scale` for the scalar relating the two.
    """
    e = np.asarray(e, dtype=float)
    u = np.asarray(u, dtype=complex)
    case = classify_simple(e, u)
    n = e.shape[0]
    eh = e / np.linalg.norm(e)
    if case == NON_ISOTROPIC:
        if len(target) != 2:
            raise ValueError("non-isotropic case needs a pair target")
        _target_check(target)
        src = [eh.astype(complex), u / np.sqrt(lie.bilinear(u, u))]
    else:
        if len(target) != 3:
            raise ValueError("isotropic case needs a (v, f1, f2) target")
        _target_check(target)
        # any phase of u works: Re and Im of an isotropic vector are
        # orthogonal with equal length
        p, q = u.real, u.imag
        src = [eh.astype(complex), (p / np.linalg.norm(p)).astype(complex),
               (q / np.linalg.norm(q)).astype(complex)]
    E = lie.complete_frame(src, n)
    V = lie.complete_frame([np.asarray(t, dtype=complex) for t in target], n)
    P = V @ E.T
    if abs(np.linalg.det(P) - 1) > 1e-8:
        raise ValueError("no determinant-one conjugator in dimension n = len(frame)")
    return P


def simple_scale(e, u):
    """Scalar c with ``X(e, u) = c * X(e_hat, u_hat)`` for the normalizations above."""
    e = np.asarray(e, dtype=float)
    u = np.asarray(u, dtype=complex)
    ne = np.linalg.norm(e)
    if classify_simple(e, u) == NON_ISOTROPIC:
        return ne * np.sqrt(lie.bilinear(u, u))
    return ne * np.linalg.norm(u.real)


def target_element(target):
    if len(target) == 2:
        return lie.phi(np.asarray(target[0], dtype=complex), np.asarray(target[1], dtype=complex))
    v, f1, f2 = (np.asarray(t, dtype=complex) for t in target)
    return lie.phi(v, f1 + 1j * f2)


# ------------------------------------------------------------ A0 membership

@dataclass
class A0Result:
    member: bool
    witness: np.ndarray
    distance: float
    confidence: str
    detail: str = ""


def radial_simple_distance(Y):
    """Distance (squared, for unit Y) from Y to elements of the form X(e, u)
    with e a real unit vector: ``min_e |tangential part|^2``."""
    Y = _normalize(Y)
    # |Y1(e)|^2 = |Y|^2 - |Y e|^2 for unit e; maximize |Y e|^2 over real e
    w, V = np.linalg.eigh((Y.conj().T @ Y).real)
    return float(max(1.0 - w[-1], 0.0)), V[:, -1]


def in_A0(S, n=None, restarts=16, iterations=400, seed=0, tol=1e-4):
    """Does the closure of S contain a nonzero radial simple element?"""
    n = S.n or n
    if S.kind == "s1":
        raise ValueError("A0 membership is not defined for the Kaehler set")
    if S.kind == "s0":
        k, _ = radial_k(S, n=n, restarts=restarts, iterations=iterations, seed=seed)
        return A0Result(False, None, k, "exact",
                        "a real vector e has (e, e) != 0, so X(e, u) is never square-zero")
    if S.kind == "sprime":
        eye = np.eye(n)
        return A0Result(True, lie.phi(eye[0].astype(complex), eye[1] + 1j * eye[2]), 0.0, "exact")
    if S.kind == "simple":
        return A0Result(True, S.generator(), 0.0, "exact", classify_simple(S.e, S.u))
    k, c = radial_k(S, restarts=restarts, iterations=iterations, seed=seed)
    member = k <= tol
    return A0Result(member, c.minimizer if member else None, k, "heuristic",
                    "orbit optimizer, not a proof")


def dichotomy_report(S, n=None, **kw):
    """Decide between the connected-sum gluing and the flow-rigidity branch."""
    res = in_A0(S, n=n, **kw)
    out = {"set": S.to_json(), "in_A0": res.member, "confidence": res.confidence}
    if res.member:
        out["branch"] = "flow"
        out["clause"] = "closure of S contains a radial simple element; gluing is obstructed"
        out["witness"] = {"re": res.witness.real.tolist(), "im": res.witness.imag.tolist()}
        if S.kind == "simple":
            out["case"] = classify_simple(S.e, S.u)
    else:
        k, _ = radial_k(S, n=n, **kw) if S.kind != "s0" else (res.distance, None)
        out["branch"] = "gluing"
        out["clause"] = "S avoids radial simple elements; connected sums stay in the cone"
        out["k"] = k
    return out
