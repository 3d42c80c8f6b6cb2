import numpy as np
import pytest
from scipy.integrate import quad

from curvlab import cones, gluing
from curvlab.gluing import Background, RadialGeometry, build_profile, radial_curvature

K_S0 = 2 ** -0.5


@pytest.fixture(scope="module")
def glued():
    bg = Background("sphere", 5, 1.0)
    a_max, _ = cones.radial_amax(cones.S0(), n=5)
    prof = build_profile(bg, K_S0, 0.5, a_max=a_max)
    geom = RadialGeometry.glued(bg, prof, 2000)
    return bg, prof, geom, radial_curvature(geom)


def test_background_derivatives():
    bg = Background("sphere", 5, 1.0, scale=1.3)
    r = np.linspace(0.1, 1.0, 7)
    h = 1e-5
    assert np.allclose((bg.w(r + h) - bg.w(r - h)) / (2 * h), bg.w(r, 1), atol=1e-9)
    assert np.allclose((bg.w(r + h, 1) - bg.w(r - h, 1)) / (2 * h), bg.w(r, 2), atol=1e-9)
    Kr = -bg.w(r, 2) / bg.w(r)
    Ks = (1 - bg.w(r, 1) ** 2) / bg.w(r) ** 2
    assert np.allclose(Kr, bg.K_rad(r)) and np.allclose(Ks, bg.K_sph(r))
    with pytest.raises(ValueError):
        Background("torus", 5)
    with pytest.raises(ValueError):
        Background("sphere", 5, 4.0)


def test_smoothstep_and_clamp():
    x = np.linspace(-0.5, 1.5, 2001)
    s = gluing.smoothstep(x)
    assert s[0] == 0 and s[-1] == 1 and np.all(np.diff(s) >= 0)
    h = 1e-6
    xi = np.linspace(0.05, 0.95, 19)
    fd = (gluing.smoothstep(xi + h) - gluing.smoothstep(xi - h)) / (2 * h)
    assert np.allclose(fd, gluing.dsmoothstep(xi), atol=1e-6)
    y = np.linspace(0, 2, 4001)
    c = gluing._clamp(y, 0.9, 0.2)
    assert np.all(np.diff(c) >= -1e-15) and c[-1] == 1.0
    assert np.allclose(c[y <= 0.9], y[y <= 0.9])


def test_profile_s0(glued):
    bg, prof, geom, _ = glued
    assert prof.kappa == pytest.approx(0.5, abs=1e-8)
    assert prof.margin > 0
    assert prof.r0 == pytest.approx(np.sqrt(prof.kappa * (1 - prof.eps) / prof.D))
    t = np.linspace(0, prof.t_saturate + 3, 5000)
    b = prof.beta(t)
    assert b[0] == 0 and b[-1] == 1 and np.all(np.diff(b) >= -1e-15)
    assert np.all(prof.dbeta(t) < prof.beta_rhs(t))
    js = prof.to_json()
    assert set(js) >= {"eps", "kappa", "r0", "A", "margin"}


def test_profile_derivatives(glued):
    _, prof, _, _ = glued
    t = np.linspace(0.1, prof.t_saturate + 1, 40)
    h = 1e-6
    assert np.allclose((prof.beta(t + h) - prof.beta(t - h)) / (2 * h), prof.dbeta(t),
                       atol=1e-6)
    r = prof.r0 * np.exp(-t)
    assert np.allclose((prof.alpha(r * (1 + h)) - prof.alpha(r * (1 - h))) / (2 * h * r),
                       prof.dalpha(r), rtol=1e-4, atol=1e-6)


def test_log_u_quadrature(glued):
    _, prof, _, _ = glued
    for r in (prof.r0 * 0.9, prof.r0 * 0.2, prof.r0 * 1e-3):
        t = np.log(prof.r0 / r)
        ref, _ = quad(lambda s: float(prof.beta(s)), 0, t, limit=200, epsabs=1e-13)
        assert prof.log_u(np.array([r]))[0] == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_profile_regions(glued):
    bg, prof, geom, _ = glued
    out = geom.r >= prof.r0
    assert np.all(geom.alpha[out] == 0) and np.allclose(geom.u[out], 1.0)
    neck = geom.neck
    assert neck.sum() > 10
    ur = geom.u[neck] * geom.r[neck]
    assert np.max(np.abs(ur - ur[0])) < 1e-10 * ur[0]


def test_profile_errors():
    bg = Background("sphere", 5, 1.0)
    with pytest.raises(ValueError):
        build_profile(bg, 0.0, 0.5)
    with pytest.raises(ValueError):
        build_profile(bg, K_S0, 1.5)
    with pytest.raises(ValueError):
        build_profile(Background("flat", 5), K_S0, 0.5)
    with pytest.raises(ValueError):
        build_profile(bg, K_S0, 0.5, clamp_gap=0.3)


def test_profile_inequality_violation_reported():
    bg = Background("sphere", 5, 1.0)
    # a logistic rate above eps outruns the right-hand side once beta is near 1
    with pytest.raises(gluing.InequalityViolated) as ex:
        build_profile(bg, K_S0, 0.5, rate_factor=1.8)
    assert ex.value.where is not None


def test_curvature_examples():
    sph = RadialGeometry.trivial(Background("sphere", 5, 1.0))
    c = radial_curvature(sph)
    assert np.allclose(c.K_rad, 1) and np.allclose(c.K_sph, 1)
    cyl = RadialGeometry.cylinder(5)
    c = radial_curvature(cyl)
    assert np.allclose(c.K_rad, 0, atol=1e-12) and np.allclose(c.K_sph, 1)
    flat = RadialGeometry.trivial(Background("flat", 5, 1.0))
    c = radial_curvature(flat)
    assert np.allclose(c.K_rad, 0) and np.allclose(c.K_sph, 0)


def test_two_paths_and_finite_differences(glued):
    _, _, geom, curv = glued
    assert curv.conformal["deviation"] <= 1e-6
    assert curv.conformal["mixed"] <= 1e-9
    assert curv.finite_difference["deviation"] <= 1e-4


def test_scaling(glued):
    _, _, geom, curv = glued
    c = 1.7
    cs = radial_curvature(geom.scaled(c))
    assert np.max(curv.f ** 2 * np.abs(cs.K_rad * c * c - curv.K_rad)) < 1e-10
    assert np.max(curv.f ** 2 * np.abs(cs.K_sph * c * c - curv.K_sph)) < 1e-10


def test_positivity_scan(glued):
    _, prof, geom, curv = glued
    sph = RadialGeometry.trivial(Background("sphere", 5, 1.0))
    rep = gluing.positivity_scan(sph, cones.S0(), k=K_S0, a_max=1.0, crosscheck=2)
    assert rep.min_value == pytest.approx(1)
    rep = gluing.positivity_scan(geom, cones.S0(), k=K_S0, a_max=prof.a_max, curv=curv,
                                 crosscheck=3)
    assert rep.min_value > 0
    assert max(c["rel_diff"] for c in rep.crosscheck) < 1e-6
    lines = rep.to_csv(geom).splitlines()
    assert lines[0].startswith("r,u,w") and len(lines) == geom.r.size + 1


def test_sprime_scan_refused_and_forced(glued):
    _, _, geom, curv = glued
    with pytest.raises(ValueError):
        gluing.positivity_scan(geom, cones.SPrime(), k=0.0, a_max=1.0, curv=curv)
    rep = gluing.positivity_scan(geom, cones.SPrime(), k=0.0, a_max=1.0, curv=curv,
                                 force=True, crosscheck=0)
    rho = gluing.neck_report(geom, curv)["rho"]
    neck = geom.neck
    # flat radial planes: zero at the neck on the cylinder's own scale
    assert np.max(np.abs(rep.qmin[neck])) * rho ** 2 < 1e-6
    assert rep.min_value < 0


def test_neck_report(glued):
    _, _, geom, curv = glued
    rep = gluing.neck_report(geom, curv)
    assert rep["has_neck"]
    for key in ("C0", "C1", "C2", "K_sph", "K_rad"):
        assert rep[key] <= 1e-2
    cyl = gluing.neck_report(RadialGeometry.cylinder(5))
    assert all(cyl[k] < 1e-12 for k in ("C0", "C1", "C2", "K_sph", "K_rad"))
    assert gluing.neck_report(RadialGeometry.trivial(Background("sphere", 5))) == {"has_neck": False}


def test_inequality_chain(glued):
    bg, prof, geom, curv = glued
    ch = gluing.inequality_chain(geom, curv)
    assert ch["h_ok"] and ch["i_ok"] and ch["display_ok"] and ch["display_min"] > 0
    flat = gluing.inequality_chain(RadialGeometry.trivial(bg))
    # only roundoff of (1 - w'^2)/w^2 at small r remains
    assert abs(flat["h_margin"]) < 1e-8 and abs(flat["i_margin"]) < 1e-8


def test_oversized_D_keeps_display_positive(glued):
    bg, prof, _, _ = glued
    big = build_profile(bg, K_S0, 0.5, a_max=prof.a_max, d_factor=8.0)
    assert big.r0 < prof.r0
    geom = RadialGeometry.glued(bg, big, 1000)
    assert gluing.inequality_chain(geom)["display_ok"]
