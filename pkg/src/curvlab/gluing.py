"""Conformal gluing of a rotationally symmetric ball onto a cylinder.

Background metrics are ``dr^2 + w(r)^2 g_{S^{n-1}}``.  The conformal factor
u(r) is radial with ``u'/u = -alpha(r)/r``; alpha is 1 near the centre (so
``u ~ rho/r`` and the centre opens into a cylinder of radius rho) and 0 for
``r >= r0`` (so the metric is untouched there).  In the variable
``t = log(r0/r)`` alpha becomes beta(t), built from a logistic solution.

Curvature of ``u^2 g`` is computed two ways: through the warped-product
formulas in arc length (``f = u w``, ``K_rad = -f''/f``,
``K_sph = (1 - f'^2)/f^2``) and through the conformal-change formula with
a Kulkarni-Nomizu product.
"""
from dataclasses import dataclass, field
import csv
import io

import numpy as np

from . import lie
from .curvature import CurvatureOperator, kulkarni_nomizu, radial_projector, tangential_projector

AGREE_TOL = 1e-6
LOGU_STEP = 0.05


class InequalityViolated(ValueError):
    def __init__(self, msg, where=None):
        super().__init__(msg)
        self.where = where


# ------------------------------------------------------------ backgrounds

@dataclass(frozen=True)
class Background:
    """Warping function w with derivatives, scaled as ``c w(r/c)``."""
    name: str
    n: int
    r_max: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if self.name not in ("sphere", "flat"):
            raise ValueError(f"unknown background {self.name!r}")
        if self.n < 3:
            raise ValueError("need n >= 3")
        if self.name == "sphere" and self.r_max / self.scale >= np.pi:
            raise ValueError("sphere background needs r_max < pi * scale")

    def w(self, r, d=0):
        c = self.scale
        x = np.asarray(r, dtype=float) / c
        if self.name == "sphere":
            base = [np.sin, np.cos, lambda y: -np.sin(y)][d](x)
        else:
            base = [x, np.ones_like(x), np.zeros_like(x)][d]
        return c ** (1 - d) * base

    def K_rad(self, r):
        # closed forms; the generic quotients lose digits as r -> 0
        return np.full_like(np.asarray(r, dtype=float), self._K())

    def K_sph(self, r):
        return np.full_like(np.asarray(r, dtype=float), self._K())

    def _K(self):
        return 1.0 / self.scale ** 2 if self.name == "sphere" else 0.0

    def scaled(self, c):
        return Background(self.name, self.n, self.r_max * c, self.scale * c)

    def C_constant(self, r):
        """``2 sup |w'/w - 1/r| / r``: the slack between the spheres S_r and
        Euclidean ones, which controls the lower bounds for the new
        sectional curvatures."""
        r = np.asarray(r, dtype=float)
        return float(2 * np.max(np.abs(self.w(r, 1) / self.w(r) - 1 / r) / r))


def log_grid(r_min, r_max, points):
    return np.exp(np.linspace(np.log(r_min), np.log(r_max), points))


# ------------------------------------------------------------ profile pieces

def _psi(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1 / x[pos])
    return out


def _dpsi(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1 / x[pos]) / x[pos] ** 2
    return out


def smoothstep(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    a, b = _psi(x), _psi(1 - np.asarray(x, dtype=float))
    return a / (a + b)


def dsmoothstep(x):
    x = np.asarray(x, dtype=float)
    a, b = _psi(x), _psi(1 - x)
    da, db = _dpsi(x), -_dpsi(1 - x)
    return (da * b - a * db) / (a + b) ** 2


_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _clamp(x, xa, delta):
    """Phi with Phi(x) = x below xa, Phi' = 1 - S((x - xa)/delta), Phi = 1 after."""
    x = np.asarray(x, dtype=float)
    out = x.copy()
    top = xa + delta

    def integral(lo, hi):
        half = 0.5 * (hi - lo)
        nodes = lo[:, None] + half[:, None] * (_GL_X[None, :] + 1)
        return half * ((1 - smoothstep((nodes - xa) / delta)) @ _GL_W)

    # integrate from the nearer end; the whole ramp contributes exactly
    # delta/2 = 1 - xa, so both branches meet the constant pieces smoothly
    low = (x > xa) & (x <= xa + 0.5 * delta)
    high = (x > xa + 0.5 * delta) & (x < top)
    if np.any(low):
        out[low] = xa + integral(np.full(low.sum(), xa), x[low])
    if np.any(high):
        out[high] = 1.0 - integral(x[high], np.full(high.sum(), top))
    out[x >= top] = 1.0
    return out


def _dclamp(x, xa, delta):
    x = np.asarray(x, dtype=float)
    return np.where(x <= xa, 1.0, 1 - smoothstep((x - xa) / delta))


@dataclass
class Profile:
    eps: float
    kappa: float
    k: float
    k0: float
    C: float
    D: float
    r0: float
    A: float
    a_max: float
    rate_eps: float
    clamp_gap: float
    cutoff: tuple
    t_saturate: float
    t_grid: np.ndarray = field(repr=False)
    margin: float = None

    # beta = Phi(chi(t) L(t))
    def _logistic(self, t):
        g = (1 + self.rate_eps) * self.kappa
        e = self.A * np.exp(g * np.asarray(t, dtype=float))
        L = (1 + self.rate_eps) * e / (1 + e)
        return L, self.kappa * L * (1 + self.rate_eps - L)

    def _chi(self, t):
        t0, t1 = self.cutoff
        x = (np.asarray(t, dtype=float) - t0) / (t1 - t0)
        return smoothstep(x), dsmoothstep(x) / (t1 - t0)

    def _xa_delta(self):
        return 1 - self.clamp_gap, 2 * self.clamp_gap

    def beta(self, t):
        t = np.asarray(t, dtype=float)
        L, _ = self._logistic(t)
        c, _ = self._chi(t)
        xa, dl = self._xa_delta()
        out = _clamp(c * L, xa, dl)
        return np.where(t <= self.cutoff[0], 0.0, out)

    def dbeta(self, t):
        t = np.asarray(t, dtype=float)
        L, dL = self._logistic(t)
        c, dc = self._chi(t)
        xa, dl = self._xa_delta()
        return _dclamp(c * L, xa, dl) * (dc * L + c * dL)

    def beta_rhs(self, t):
        """``k0 r0^2 e^-2t + kappa beta (1 + eps - beta)``."""
        b = self.beta(t)
        return self.k0 * self.r0 ** 2 * np.exp(-2 * np.asarray(t)) + self.kappa * b * (1 + self.eps - b)

    def alpha(self, r):
        return self.beta(np.log(self.r0 / np.asarray(r, dtype=float)))

    def dalpha(self, r):
        r = np.asarray(r, dtype=float)
        return -self.dbeta(np.log(self.r0 / r)) / r

    def log_u(self, r):
        """``log u(r) = int_0^{t(r)} beta``, by Gauss-Legendre per cell.

        Cells are cut at the requested points and at a fixed mesh (step
        ``LOGU_STEP`` plus the cutoff ends), so accuracy does not depend on
        how many points are asked for.
        """
        r = np.asarray(r, dtype=float)
        t = np.maximum(np.log(self.r0 / r), 0.0)
        tmax = float(np.max(t)) if t.size else 0.0
        mesh = np.linspace(0.0, tmax, int(np.ceil(tmax / LOGU_STEP)) + 1)
        knots, inv = np.unique(np.concatenate([mesh, list(self.cutoff), t.ravel()]),
                               return_inverse=True)
        a, b = knots[:-1], knots[1:]
        half = 0.5 * (b - a)
        nodes = a[:, None] + half[:, None] * (_GL_X[None, :] + 1)
        seg = half * (self.beta(nodes.ravel()).reshape(nodes.shape) @ _GL_W)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        return cum[inv[mesh.size + 2:]].reshape(t.shape)

    def to_json(self):
        return {k: getattr(self, k) for k in
                ("eps", "kappa", "k", "k0", "C", "D", "r0", "A", "a_max", "rate_eps",
                 "clamp_gap", "t_saturate", "margin")} | {"cutoff": list(self.cutoff)}


def diagonal_min(K_rad, K_sph, kappa, a_max):
    """Minimum of ``a K_sph + (1 - a) K_rad`` over ``a`` in [kappa, a_max],
    and the minimizing a."""
    lo = kappa * K_sph + (1 - kappa) * K_rad
    hi = a_max * K_sph + (1 - a_max) * K_rad
    return np.minimum(lo, hi), np.where(lo <= hi, kappa, a_max)


def build_profile(background, k, eps, a_max=1.0, k0=None, clamp_gap=0.05, rate_factor=0.5,
                  cutoff=(0.05, 1.0), d_factor=2.0, splice_tol=1e-4, t_margin=3.0,
                  check_points=20000):
    """Choose the constants and the beta profile for a background and set.

    ``k`` is the radial-split constant of the set (tangential mass of a unit
    element is at least ``k^2``), ``a_max`` the largest tangential mass.
    """
    if not k > 0:
        raise ValueError("k must be positive (sets in the obstructed class cannot be glued)")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    kappa = k * k
    rr = log_grid(1e-6 * background.r_max, background.r_max, 4000)
    if k0 is None:
        k0 = float(np.min(diagonal_min(background.K_rad(rr), background.K_sph(rr), kappa, a_max)[0]))
    if not k0 > 0:
        raise ValueError("background must have positive S-curvature (k0 > 0)")
    C = max(background.C_constant(rr), 1e-12)
    D = d_factor * C
    r0 = min(np.sqrt(kappa * (1 - eps) / D), background.r_max)
    rate_eps = rate_factor * eps
    if not clamp_gap < rate_eps:
        raise ValueError("clamp_gap must be smaller than the logistic overshoot")
    t0, t1 = cutoff
    xs = np.linspace(0, 1, 4001)
    max_dchi = float(np.max(dsmoothstep(xs))) / (t1 - t0)
    g = (1 + rate_eps) * kappa
    A = k0 * r0 ** 2 * np.exp(-2 * t1) / (4 * (1 + rate_eps) * np.exp(g * t1) * max_dchi)
    A = min(A, splice_tol / ((1 + rate_eps) * np.exp(g * t1)))
    # L reaches 1 + gap (and beta saturates) at
    ratio = (1 + clamp_gap) / (rate_eps - clamp_gap)
    t_sat = max(np.log(ratio / A) / g, t1)
    tg = np.linspace(0, t_sat + t_margin, check_points)
    prof = Profile(eps, kappa, k, k0, C, D, r0, A, a_max, rate_eps, clamp_gap, cutoff,
                   float(t_sat), tg)
    gap = prof.beta_rhs(tg) - prof.dbeta(tg)
    bad = np.nonzero(gap <= 0)[0]
    if bad.size:
        raise InequalityViolated("beta' bound fails", where=float(tg[bad[0]]))
    prof.margin = float(np.min(gap))
    b = prof.beta(tg)
    if np.any(np.diff(b) < -1e-15) or b[-1] != 1.0:
        raise InequalityViolated("beta is not a monotone step from 0 to 1")
    return prof


# ------------------------------------------------------------ geometry

@dataclass
class RadialGeometry:
    n: int
    r: np.ndarray
    w: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    alpha: np.ndarray
    dalpha: np.ndarray
    log_u: np.ndarray
    background: Background = None
    profile: Profile = None
    label: str = ""

    @property
    def u(self):
        return np.exp(self.log_u)

    @classmethod
    def _from_bg(cls, bg, r, alpha, dalpha, log_u, profile=None, label=""):
        return cls(bg.n, r, bg.w(r), bg.w(r, 1), bg.w(r, 2), alpha, dalpha, log_u, bg, profile, label)

    @classmethod
    def trivial(cls, bg, points=2000, r_min=None):
        r = log_grid(r_min or 1e-3 * bg.r_max, bg.r_max, points)
        z = np.zeros_like(r)
        return cls._from_bg(bg, r, z, z, z, label="trivial")

    @classmethod
    def cylinder(cls, n, points=2000, r_min=1e-3, r_max=1.0):
        """Flat metric times ``u = 1/r``: the round cylinder of radius 1."""
        bg = Background("flat", n, r_max)
        r = log_grid(r_min, r_max, points)
        one = np.ones_like(r)
        return cls._from_bg(bg, r, one, 0 * r, -np.log(r), label="cylinder")

    @classmethod
    def glued(cls, bg, profile, points=2000):
        T = profile.t_saturate + 3.0
        r = log_grid(profile.r0 * np.exp(-T), bg.r_max, points)
        return cls._from_bg(bg, r, profile.alpha(r), profile.dalpha(r), profile.log_u(r),
                            profile, label="glued")

    def scaled(self, c):
        """Same construction on the background ``c^2 g``."""
        return RadialGeometry(self.n, c * self.r, c * self.w, self.w1, self.w2 / c, self.alpha,
                              self.dalpha / c, self.log_u,
                              self.background.scaled(c) if self.background else None,
                              self.profile, self.label)

    @property
    def neck(self):
        """Mask of grid points where alpha is identically 1."""
        return self.alpha == 1.0


@dataclass
class RadialCurvature:
    r: np.ndarray
    K_rad: np.ndarray
    K_sph: np.ndarray
    f: np.ndarray
    fs: np.ndarray
    fss: np.ndarray
    conformal: dict = None
    finite_difference: dict = None

    def operator(self, i, n):
        """``K_rad P_rad + K_sph P_tan`` at grid index i."""
        return self.K_rad[i] * radial_projector(n) + self.K_sph[i] * tangential_projector(n)


def _fd(y, h):
    """First and second derivatives on a uniform grid, fourth order."""
    d1 = np.empty_like(y)
    d2 = np.empty_like(y)
    d1[2:-2] = (-y[4:] + 8 * y[3:-1] - 8 * y[1:-3] + y[:-4]) / (12 * h)
    d2[2:-2] = (-y[4:] + 16 * y[3:-1] - 30 * y[2:-2] + 16 * y[1:-3] - y[:-4]) / (12 * h * h)
    # one-sided fourth-order stencils at the ends
    c1 = np.array([-25, 48, -36, 16, -3]) / (12 * h)
    c2 = np.array([35, -104, 114, -56, 11]) / (12 * h * h)
    b1 = np.array([-3, -10, 18, -6, 1]) / (12 * h)
    b2 = np.array([11, -20, 6, 4, -1]) / (12 * h * h)
    d1[0], d2[0] = c1 @ y[:5], c2 @ y[:5]
    d1[1], d2[1] = b1 @ y[:5], b2 @ y[:5]
    d1[-1], d2[-1] = -(c1 @ y[-5:][::-1]), c2 @ y[-5:][::-1]
    d1[-2], d2[-2] = -(b1 @ y[-5:][::-1]), b2 @ y[-5:][::-1]
    return d1, d2


def _background_K(geom):
    if geom.background is not None:
        return geom.background.K_rad(geom.r), geom.background.K_sph(geom.r)
    return -geom.w2 / geom.w, (1 - geom.w1 ** 2) / geom.w ** 2


def _conformal_path(geom):
    """Sectional curvatures from ``u^-2 (R - A o g)`` with the Kulkarni-Nomizu
    product, in an adapted frame (e_0 radial)."""
    n = geom.n
    r, w, w1, w2 = geom.r, geom.w, geom.w1, geom.w2
    psi = -geom.alpha / r                        # u'/u
    upp = -geom.dalpha / r + geom.alpha / r ** 2 + psi ** 2   # u''/u
    hess_r = w1 / w                              # Hess r = (w'/w)(g - dr^2)
    Krad0, Ksph0 = _background_K(geom)
    g = np.eye(n)
    Kr = np.empty_like(r)
    Ks = np.empty_like(r)
    mixed = 0.0
    pairs = lie.basis_pairs(n)
    i01, i12 = pairs.index((0, 1)), pairs.index((1, 2))
    off = ~np.eye(lie.dim_so(n), dtype=bool)
    for m in range(r.size):
        hess = np.diag([upp[m]] + [psi[m] * hess_r[m]] * (n - 1))   # Hess u / u
        du = np.zeros(n)
        du[0] = psi[m]                                               # du / u
        A = hess - 2 * np.outer(du, du) + 0.5 * (du @ du) * g
        R0 = CurvatureOperator(n, np.diag([Krad0[m] if i == 0 else Ksph0[m] for i, j in pairs]))
        Rt = (R0.matrix - kulkarni_nomizu(A, g).matrix) * np.exp(-2 * geom.log_u[m])
        Kr[m], Ks[m] = Rt[i01, i01], Rt[i12, i12]
        mixed = max(mixed, float(np.max(np.abs(Rt[off]))) * np.exp(2 * geom.log_u[m]))
    return {"K_rad": Kr, "K_sph": Ks, "mixed": mixed}


def radial_curvature(geom, check=True, tol=AGREE_TOL):
    """Exact sectional curvatures of ``u^2 g`` on the grid.

    Arc-length formulas use the exact derivatives
    ``f_s = w' - alpha w / r`` and
    ``f_ss = (w'' - alpha' w / r - alpha w' / r + alpha w / r^2) / u``.
    With ``check`` the conformal (Kulkarni-Nomizu) path is evaluated too and
    the scale-relative disagreement ``f^2 |dK|`` must stay below ``tol``.
    """
    r, w, w1, w2 = geom.r, geom.w, geom.w1, geom.w2
    a, da = geom.alpha, geom.dalpha
    u = geom.u
    f = u * w
    if np.any(f <= 0):
        raise ValueError("f = u w must be positive")
    fs = w1 - a * w / r
    fss = (w2 - da * w / r - a * w1 / r + a * w / r ** 2) / u
    out = RadialCurvature(r, -fss / f, (1 - fs ** 2) / f ** 2, f, fs, fss)
    if check:
        conf = _conformal_path(geom)
        dev = f ** 2 * np.maximum(np.abs(conf["K_rad"] - out.K_rad), np.abs(conf["K_sph"] - out.K_sph))
        conf["deviation"] = float(np.max(dev))
        out.conformal = conf
        if conf["deviation"] > tol:
            raise ValueError(f"curvature paths disagree by {conf['deviation']:.2e}")
        out.finite_difference = finite_difference_check(geom, out)
    return out


def finite_difference_check(geom, curv):
    """Arc-length curvatures from fourth-order differences of ``f`` and ``s``
    on the logarithmic grid, compared with the exact values."""
    x = np.log(geom.r)
    h = np.diff(x)
    if np.max(np.abs(h - h[0])) > 1e-9 * abs(h[0]):
        return None
    h = h[0]
    f = curv.f
    fx, fxx = _fd(f, h)
    sx = geom.u * geom.r                      # ds/dx
    sxx = sx * (1 - geom.alpha)               # d/dx (u r) = u r (1 - alpha)
    fs = fx / sx
    fss = (fxx - fx * sxx / sx) / sx ** 2
    Kr, Ks = -fss / f, (1 - fs ** 2) / f ** 2
    inner = slice(2, -2)
    dev = f ** 2 * np.maximum(np.abs(Kr - curv.K_rad), np.abs(Ks - curv.K_sph))
    return {"K_rad": Kr, "K_sph": Ks, "deviation": float(np.max(dev[inner])),
            "deviation_boundary": float(np.max(dev))}


# ------------------------------------------------------------ scans

@dataclass
class ScanReport:
    r: np.ndarray
    qmin: np.ndarray
    a_argmin: np.ndarray
    k: float
    a_max: float
    min_value: float
    worst_r: float
    worst_a: float
    crosscheck: list
    curvature: RadialCurvature = field(repr=False, default=None)

    def to_csv(self, geom):
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["r", "u", "w", "K_rad", "K_sph", "qmin", "a_argmin"])
        c = self.curvature
        for i in range(self.r.size):
            wr.writerow([f"{v:.12g}" for v in (self.r[i], geom.u[i], geom.w[i], c.K_rad[i],
                                                 c.K_sph[i], self.qmin[i], self.a_argmin[i])])
        return buf.getvalue()


def positivity_scan(geom, S, k=None, a_max=None, force=False, crosscheck=5, seed=0, curv=None):
    """Minimum of the normalized S-curvature of ``u^2 g`` over the grid.

    On a rotationally symmetric metric ``q(X) = a K_sph + (1 - a) K_rad``
    with ``a = |X_1|^2``; over unit X in S the mass a ranges over
    ``[k^2, a_max]``.  A few grid points are re-checked with the generic
    optimizer.
    """
    from . import cones

    n = geom.n
    if k is None:
        k, _ = cones.radial_k(S, n=n)
    if k <= 1e-6 and not force:
        raise ValueError("radial_k(S) = 0: S meets the radial simple elements, scan refused")
    if a_max is None:
        a_max, _ = cones.radial_amax(S, n=n)
    curv = curv or radial_curvature(geom)
    q, a = diagonal_min(curv.K_rad, curv.K_sph, k * k, a_max)
    i = int(np.argmin(q))
    rng = np.random.default_rng(seed)
    checks = []
    for j in sorted(rng.choice(geom.r.size, size=min(crosscheck, geom.r.size), replace=False)):
        R = curv.operator(j, n)
        c = cones.certify(R, S, restarts=8, iterations=300, seed=seed)
        scale = max(1.0, abs(curv.K_rad[j]), abs(curv.K_sph[j]))
        checks.append({"r": float(geom.r[j]), "scan": float(q[j]), "certify": c.min_value,
                       "rel_diff": abs(c.min_value - q[j]) / scale})
    return ScanReport(geom.r, q, a, float(k), float(a_max), float(q[i]), float(geom.r[i]),
                      float(a[i]), checks, curv)


def neck_report(geom, curv=None):
    """How close the centre is to the round cylinder ``ds^2 + rho^2 g_0``."""
    curv = curv or radial_curvature(geom, check=False)
    mask = geom.neck
    if not np.any(mask):
        return {"has_neck": False}
    f = curv.f[mask]
    rho = float(f[np.argmin(geom.r[mask])])
    return {
        "has_neck": True,
        "rho": rho,
        "r_neck": float(np.max(geom.r[mask])),
        "points": int(mask.sum()),
        "C0": float(np.max(np.abs(f - rho)) / rho),
        "C1": float(np.max(np.abs(curv.fs[mask]))),
        "C2": float(np.max(np.abs(curv.fss[mask])) * rho),
        "K_sph": float(np.max(np.abs(curv.K_sph[mask] * rho ** 2 - 1))),
        "K_rad": float(np.max(np.abs(curv.K_rad[mask])) * rho ** 2),
    }


def inequality_chain(geom, curv=None):
    """Pointwise check of the proof's lower bounds against exact values.

    * tangential planes: ``u^2 K~ >= K + alpha (2 - alpha)/r^2 - C alpha``
    * radial planes:     ``u^2 K~ >= K + alpha'/r - C alpha``
    * final display:     ``k0 + alpha'/r + kappa alpha (1 + eps - alpha)/r^2 > 0``
    """
    prof = geom.profile
    curv = curv or radial_curvature(geom, check=False)
    r, a, da = geom.r, geom.alpha, geom.dalpha
    C = prof.C if prof else (geom.background.C_constant(r) if geom.background else 0.0)
    u2 = geom.u ** 2
    Kr0, Ks0 = _background_K(geom)
    h = u2 * curv.K_sph - (Ks0 + a * (2 - a) / r ** 2 - C * a)
    i = u2 * curv.K_rad - (Kr0 + da / r - C * a)
    scale = 1 + a / r ** 2 + np.abs(da) / r
    out = {"h_margin": float(np.min(h / scale)), "i_margin": float(np.min(i / scale)),
           "h_ok": bool(np.all(h >= -1e-9 * scale)), "i_ok": bool(np.all(i >= -1e-9 * scale))}
    if prof:
        disp = prof.k0 + da / r + prof.kappa * a * (1 + prof.eps - a) / r ** 2
        bad = np.nonzero(disp <= 0)[0]
        out.update({"display_min": float(np.min(disp * r ** 2 / np.maximum(r, prof.r0) ** 2)),
                    "display_ok": bad.size == 0,
                    "display_fail_r": float(r[bad[0]]) if bad.size else None})
    return out
