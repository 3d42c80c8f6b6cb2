import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvlab import degeneration as dg
from curvlab import lie

seeds = st.integers(0, 2**32 - 1)


def iso_pair(n, a, b):
    e = np.eye(n)
    return lie.phi(e[a] + 1j * e[a + 1], e[b] + 1j * e[b + 1])


def char_poly_tail(T):
    """Coefficients of det(x - T) below the leading one."""
    return np.poly(T)[1:]


def test_unbounded_conjugators_example():
    B = lie.basis_so_n(4)
    fam = dg.unbounded_conjugators(B[0] + 0j)
    n0 = np.linalg.norm(B[0])
    P5 = fam.P(5.0)
    assert np.linalg.norm(P5 @ B[0] @ np.linalg.inv(P5)) > 10 * n0
    assert fam.growing
    for t in (-2.0, 0.5, 3.0):
        assert lie.is_complex_orthogonal(fam.P(t))
    with pytest.raises(ValueError):
        dg.unbounded_conjugators(iso_pair(4, 0, 2))


def test_nilpotent_limit_semisimple_example():
    B = lie.basis_so_n(4)
    X = B[0] + 2 * B[5]
    st_ = dg.nilpotent_limit(X, rng=np.random.default_rng(0))
    T = st_.limit
    assert st_.nilpotency <= 1e-8
    assert np.max(np.abs(char_poly_tail(T))) < 1e-8
    assert np.max(np.abs(np.linalg.eigvals(T))) <= 1e-7
    assert st_.residuals[-1] < 1e-12


def test_nilpotent_limit_square_zero_passthrough():
    X = iso_pair(4, 0, 2)
    st_ = dg.nilpotent_limit(X)
    assert st_.kind == "already-nilpotent"
    assert np.allclose(st_.limit, X / lie.skew_norm(X))


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(4, 6))
def test_nilpotent_limit_random(seed, n):
    rng = np.random.default_rng(seed)
    X = lie.random_skew(n, rng)
    st_ = dg.nilpotent_limit(X, rng=rng)
    assert st_.nilpotency <= 1e-8
    assert lie.is_skew(st_.limit)
    # residuals of the boosted conjugates shrink along the schedule
    assert st_.residuals[-1] <= st_.residuals[0] + 1e-12


def test_reduce_examples():
    X = lie.phi(np.eye(4)[0] + 1j * np.eye(4)[1], np.eye(4)[2] + 1j * np.eye(4)[3])
    red = dg.reduce_to_minimal(X)
    assert red.steps == [] and np.allclose(red.result, X / 2)
    with pytest.raises(dg.PreconditionError):
        dg.reduce_to_minimal(lie.random_skew(3, np.random.default_rng(0)))
    with pytest.raises(dg.PreconditionError):
        dg.reduce_to_minimal(np.zeros((5, 5)))


def test_reduce_square_zero_rank_four():
    X = iso_pair(8, 0, 2) + iso_pair(8, 4, 6)
    assert np.linalg.norm(X @ X) == 0 and dg.numerical_rank(X) == 4
    red = dg.reduce_to_minimal(X, rng=np.random.default_rng(1))
    s = np.linalg.svd(red.result, compute_uv=False)
    assert s[2] < 1e-8 * s[0] and np.linalg.norm(red.result @ red.result) < 1e-8


def test_square_zero_rank_four_needs_n8():
    """A square-zero skew X has isotropic image ((Xu, Xv) = -(u, X^2 v) = 0),
    so rank X <= n/2 and rank 4 first occurs for n = 8."""
    rng = np.random.default_rng(0)
    for _ in range(20):
        Y = dg.reduce_to_minimal(lie.random_skew(6, rng), rng=rng).result
        assert dg.numerical_rank(Y) == 2


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(4, 6))
def test_reduce_random_lands_in_S0(seed, n):
    rng = np.random.default_rng(seed)
    red = dg.reduce_to_minimal(lie.random_skew(n, rng), rng=rng)
    Y = red.result
    assert dg.is_in_S0(Y)
    assert abs(lie.skew_norm(Y) - 1) < 1e-12


def test_jordan_examples():
    J = dg.jordan_matrix((3, 1))
    jd = dg.jordan_partition(J)
    assert jd.partition == (3, 1)
    assert [np.linalg.matrix_rank(np.linalg.matrix_power(J, k)) for k in (1, 2, 3)] == [2, 1, 0]
    assert dg.jordan_partition(np.zeros((4, 4))).partition == (1, 1, 1, 1)
    assert dg.jordan_partition(dg.jordan_matrix((2, 2))).partition == (2, 2)
    with pytest.raises(dg.NotNilpotent):
        dg.jordan_partition(np.eye(3))


def test_partitions_enumeration():
    assert list(dg.partitions(4)) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]
    assert [len(list(dg.partitions(n))) for n in range(1, 8)] == [1, 2, 3, 5, 7, 11, 15]


@pytest.mark.parametrize("n", range(2, 7))
def test_rank_one_every_partition(n):
    rng = np.random.default_rng(n)
    for part in dg.partitions(n):
        if part[0] == 1:
            continue
        G = np.eye(n) + 0.3 * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        Y = G @ dg.jordan_matrix(part) @ np.linalg.inv(G)
        res = dg.degenerate_to_rank_one(Y)
        Z = res.result
        assert res.jordan.partition == part
        assert res.jordan.residual < 1e-8
        s = np.linalg.svd(Z, compute_uv=False)
        assert s[1] < 1e-8 * s[0]
        assert np.linalg.norm(Z @ Z) < 1e-8
        assert res.residuals[-1] < 1e-8


def test_rank_one_examples():
    Y = dg.jordan_matrix((2, 1))
    assert np.allclose(dg.degenerate_to_rank_one(Y).result, Y / np.linalg.norm(Y))
    with pytest.raises(dg.NotNilpotent):
        dg.degenerate_to_rank_one(np.diag([1.0, 2.0]))
    with pytest.raises(dg.PreconditionError):
        dg.degenerate_to_rank_one(np.zeros((3, 3)))


def test_minpoly_degree():
    B = lie.basis_so_n(4)
    # eigenvalues +-i, +-2i
    assert dg.minpoly_degree(B[0] + 2 * B[5]) == 4
    assert dg.minpoly_degree(iso_pair(4, 0, 2)) == 2
    assert dg.minpoly_degree(dg.jordan_matrix((3, 1))) == 3


def test_graded_boost_limit_in_S0(rng):
    Y = dg.nilpotent_limit(lie.random_skew(5, rng), rng=rng).limit
    if dg.is_in_S0(Y):
        return
    st_ = dg.isotropic_boost(Y, rng=rng)
    assert dg.is_in_S0(st_.limit)
    assert st_.residuals[-1] < 1e-10


def test_step_json(rng):
    st_ = dg.nilpotent_limit(lie.random_skew(4, rng), rng=rng)
    js = st_.to_json()
    assert js["kind"] == "norm-boost" and len(js["residuals"]) == len(dg.SCHEDULE)
