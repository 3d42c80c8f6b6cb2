import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvlab import lie
from curvlab.curvature import (CurvatureOperator, bianchi_project, bianchi_residual,
                               components, conjugate, fubini_study, kulkarni_nomizu, model,
                               qform, random_operator, rsharp, tangential_projector)
from curvlab.flow import flow
import oracles

seeds = st.integers(0, 2**32 - 1)


def test_operator_validation():
    with pytest.raises(ValueError):
        CurvatureOperator(4, np.eye(5))
    with pytest.raises(ValueError):
        qform(CurvatureOperator.identity(4), np.zeros((5, 5)))
    with pytest.raises(ValueError):
        CurvatureOperator.identity(4) + CurvatureOperator.identity(5)


def test_json_roundtrip(rng):
    R = random_operator(5, rng)
    R2 = CurvatureOperator.from_json(R.to_json())
    assert np.array_equal(R.matrix, R2.matrix)
    with pytest.raises(ValueError):
        CurvatureOperator.from_json({"n": 3, "basis": "other", "matrix": np.eye(3).tolist()})


def test_qform_examples():
    e = np.eye(4)
    Id = CurvatureOperator.identity(4)
    assert qform(Id, lie.basis_so_n(4)[0]) == pytest.approx(1)
    X = lie.phi(e[0] + 1j * e[1], e[2] + 1j * e[3])
    assert qform(Id, X) == pytest.approx(4)
    sp = model("sphere_product", 4, 2, 2)
    # X only involves the mixed planes 02, 03, 12, 13, all flat on S2 x S2
    assert oracles.q_expand(sp.matrix, X) == pytest.approx(0, abs=1e-15)
    assert qform(sp, X) == pytest.approx(0, abs=1e-15)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(3, 8))
def test_qform_hermitian_splitting_and_oracle(seed, n):
    rng = np.random.default_rng(seed)
    R = random_operator(n, rng, bianchi=False)
    A, B = lie.random_skew(n, rng, False), lie.random_skew(n, rng, False)
    q = qform(R, A + 1j * B)
    assert abs(q - qform(R, A) - qform(R, B)) <= 1e-10 * (1 + abs(q))
    assert q == pytest.approx(oracles.q_expand(R.matrix, A + 1j * B), rel=1e-10, abs=1e-10)


def test_components_examples():
    c = components(model("sphere", 5))
    assert c.K(0, 3) == 1 and c.R(0, 1, 2, 3) == 0
    cyl = components(model("cylinder", 5))
    assert all(cyl.K(0, j) == 0 for j in range(1, 5))
    assert all(cyl.K(i, j) == 1 for i in range(1, 5) for j in range(i + 1, 5))
    with pytest.raises(IndexError):
        c.R(0, 5, 1, 2)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(3, 7))
def test_component_symmetries(seed, n):
    R = random_operator(n, np.random.default_rng(seed))
    T = components(R).tensor()
    assert np.allclose(T, -T.transpose(1, 0, 2, 3))
    assert np.allclose(T, -T.transpose(0, 1, 3, 2))
    assert np.allclose(T, T.transpose(2, 3, 0, 1))
    assert bianchi_residual(R) < 1e-12


def test_kulkarni_nomizu_against_componentwise(rng):
    for n in range(3, 7):
        a = rng.standard_normal((n, n)); a = a + a.T
        b = rng.standard_normal((n, n)); b = b + b.T
        assert np.allclose(kulkarni_nomizu(a, b).matrix, oracles.brute_kn(a, b))
        assert np.allclose(kulkarni_nomizu(a, b).matrix, kulkarni_nomizu(b, a).matrix)
        g = np.eye(n)
        assert np.allclose((kulkarni_nomizu(g, g) * 0.5).matrix, np.eye(lie.dim_so(n)))
    with pytest.raises(ValueError):
        kulkarni_nomizu(np.eye(3), np.eye(4))


def test_kulkarni_nomizu_tangential_support(rng):
    n = 5
    g = np.eye(n)
    h = np.zeros((n, n))
    h[0, 0] = 2.0
    M = kulkarni_nomizu(g, h)
    tan = [a for a, (i, j) in enumerate(lie.basis_pairs(n)) if i >= 1]
    assert np.all(M.matrix[np.ix_(tan, tan)] == 0)
    h2 = np.zeros((n, n)); h2[1:, 1:] = np.diag(rng.uniform(1, 2, n - 1))
    assert np.any(kulkarni_nomizu(g, h2).matrix[np.ix_(tan, tan)] != 0)


@pytest.mark.parametrize("n", range(3, 9))
def test_rsharp_calibration(n):
    Id = CurvatureOperator.identity(n)
    assert np.max(np.abs(rsharp(Id).matrix - (n - 2) * Id.matrix)) <= 1e-12
    P = tangential_projector(n)
    assert np.max(np.abs(rsharp(P).matrix - (n - 3) * P.matrix)) <= 1e-12
    c = oracles.brute_structure_constants(n)
    d = lie.dim_so(n)
    cas = np.einsum("gda,gdb->ab", c, c)
    assert np.allclose(cas, 2 * (n - 2) * np.eye(d))
    assert np.all(rsharp(CurvatureOperator.zero(n)).matrix == 0)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_rsharp_matches_brute_force(n, rng):
    R = random_operator(n, rng, bianchi=False)
    assert np.allclose(rsharp(R).matrix, oracles.brute_sharp(R.matrix, n), atol=1e-12)


def test_rsharp_equivariant(rng):
    n = 5
    R = random_operator(n, rng)
    P = lie.random_orthogonal(n, rng)
    lhs = rsharp(conjugate(R, P)).matrix
    rhs = conjugate(rsharp(R), P).matrix
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_conjugate_moves_the_form(rng):
    n = 5
    R = random_operator(n, rng)
    P = lie.random_orthogonal(n, rng)
    X = lie.random_skew(n, rng)
    assert qform(conjugate(R, P), X) == pytest.approx(qform(R, P.T @ X @ P), rel=1e-10)


def test_bianchi_project_idempotent(rng):
    R = random_operator(6, rng, bianchi=False)
    B = bianchi_project(R)
    assert bianchi_residual(B) < 1e-12
    assert np.allclose(bianchi_project(B).matrix, B.matrix)


def test_models():
    cyl = model("cylinder", 4)
    B = lie.basis_so_n(4)
    assert qform(cyl, B[0]) == 0
    assert qform(cyl, B[3]) == 1
    with pytest.raises(ValueError):
        model("sphere_product", 5, 2, 2)
    with pytest.raises(ValueError):
        model("quarter_pinched", 5, 0.5)
    with pytest.raises(ValueError):
        model("quarter_pinched", 4, 1.5)
    with pytest.raises(ValueError):
        model("nonsense", 4)
    assert np.array_equal(model("diagonal", 3, 1, 2, 3).matrix, np.diag([1.0, 2, 3]))


def test_fubini_study_componentwise():
    for m in (2, 3):
        ref, _ = oracles.fs_components(m)
        assert np.allclose(fubini_study(m).matrix, ref)
        K = np.array([components(fubini_study(m)).K(i, j)
                      for i, j in lie.basis_pairs(2 * m)])
        assert K.min() == pytest.approx(1) and K.max() == pytest.approx(4)


def test_quarter_pinched_sectional_range(rng):
    for s in (0.0, 0.3, 1.0):
        R = model("quarter_pinched", 4, s)
        vals = []
        for _ in range(300):
            Q = lie.random_orthogonal(4, rng)
            vals.append(qform(R, lie.phi(Q[:, 0], Q[:, 1])))
        assert min(vals) >= 0.25 - 1e-12 and max(vals) <= 1 + 1e-12


# ------------------------------------------------------------ ODE

@pytest.mark.parametrize("n", [4, 5, 6])
def test_sphere_blow_up(n):
    tr = flow(CurvatureOperator.identity(n), 1e-4, 1.0, 1e4)
    T = 1 / (n - 1)
    assert abs(tr.blow_up_time - T) <= 0.01 * T
    for t, R in zip(tr.times[::50], tr.operators[::50]):
        assert np.allclose(R.matrix, np.eye(R.d) / (1 - (n - 1) * t), rtol=1e-6)


def test_cylinder_stays_tangential():
    n = 5
    P = tangential_projector(n)
    tr = flow(P, 1e-4, 0.3, 1e4, record_every=100)
    for t, R in zip(tr.times, tr.operators):
        lam = 1 / (1 - (n - 2) * t)
        assert np.max(np.abs(R.matrix - lam * P.matrix)) <= 0.01 * lam


def test_zero_is_fixed():
    tr = flow(CurvatureOperator.zero(4), 0.01, 1.0, 10.0)
    assert tr.blow_up_time is None
    assert all(np.all(R.matrix == 0) for R in tr.operators)


def test_rk4_step_halving():
    n = 4
    R0 = CurvatureOperator.identity(n) + random_operator(n, np.random.default_rng(1), scale=0.1)
    end = lambda dt: flow(R0, dt, 0.1, 1e4).operators[-1].matrix
    e1 = np.max(np.abs(end(0.01) - end(0.0025)))
    e2 = np.max(np.abs(end(0.005) - end(0.0025)))
    # fourth order: halving the step cuts the error by about 16
    assert e1 / e2 > 10


def test_flow_errors_and_csv():
    with pytest.raises(ValueError):
        flow(CurvatureOperator.identity(4), 0.0, 1.0, 10.0)
    with pytest.raises(ValueError):
        flow(CurvatureOperator.identity(4), 0.1, 1.0, 0.5)
    tr = flow(CurvatureOperator.identity(4), 0.01, 0.05, 100.0)
    lines = tr.to_csv().splitlines()
    assert lines[0] == "t,opnorm,min_eig" and len(lines) == len(tr.times) + 1
