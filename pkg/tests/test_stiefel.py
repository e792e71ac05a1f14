"""Tests for Stiefel points, tangents, retractions, and liftings."""

import numpy as np
import pytest

from manifold_means import linalg
from manifold_means import stiefel as st
from manifold_means.errors import InvalidPoint, Unsolvable

from conftest import random_stiefel, random_tangent

ROUND_TRIP_TOL = 1e-9
FD_STEP = 1e-6
FD_TOL = 1e-5


# -- construction contracts ------------------------------------------------


def test_point_accepts_orthonormal(rng):
    u = random_stiefel(rng, 10, 5)
    assert u.p == 10 and u.k == 5
    assert not u.U.flags.writeable
    assert repr(u) == "StiefelPoint(p=10, k=5)"


def test_point_rejects_bad_input(rng):
    with pytest.raises(InvalidPoint):
        st.StiefelPoint(rng.standard_normal((10, 5)))  # not orthonormal
    with pytest.raises(InvalidPoint):
        st.StiefelPoint(np.eye(3)[:2, :])  # wide
    with pytest.raises(InvalidPoint):
        st.StiefelPoint(np.full((4, 2), np.nan))
    with pytest.raises(InvalidPoint):
        st.StiefelPoint(np.ones(5))  # not a matrix


def test_tangent_validation(rng):
    u = random_stiefel(rng, 8, 3)
    xi = random_tangent(rng, u)
    a = u.U.T @ xi.xi
    assert np.linalg.norm(a + a.T) < 1e-12

    with pytest.raises(InvalidPoint):
        st.StiefelTangent(u, u.U)  # U itself is not tangent at U
    with pytest.raises(InvalidPoint):
        st.StiefelTangent(u, np.zeros((8, 4)))  # shape mismatch


def test_tangent_base_mismatch(rng):
    u1 = random_stiefel(rng, 8, 3)
    u2 = random_stiefel(rng, 8, 3)
    xi = random_tangent(rng, u1)
    with pytest.raises(ValueError):
        st.retract_polar(u2, xi)


def test_tangent_project_is_orthogonal_projection(rng):
    u = random_stiefel(rng, 10, 5)
    for _ in range(20):
        z = rng.standard_normal((10, 5))
        xi = st.tangent_project(u, z)
        # idempotent
        again = st.tangent_project(u, xi.xi)
        assert np.allclose(again.xi, xi.xi, atol=1e-12)
        # the residual is orthogonal to every tangent direction
        eta = random_tangent(rng, u)
        assert abs(np.sum((z - xi.xi) * eta.xi)) < 1e-9


def test_proj_to_stiefel_fixes_stiefel_points(rng):
    u = random_stiefel(rng, 10, 5)
    assert np.allclose(st.proj_to_stiefel(u.U).U, u.U, atol=1e-12)


def test_proj_to_stiefel_is_closest(rng):
    """uf(X) beats random candidates in Frobenius distance to X."""
    x = rng.standard_normal((8, 3))
    best = np.linalg.norm(st.proj_to_stiefel(x).U - x)
    for _ in range(200):
        cand = random_stiefel(rng, 8, 3)
        assert best <= np.linalg.norm(cand.U - x) + 1e-12


# -- retractions ------------------------------------------------------------

RETRACTIONS = {
    "polar": st.retract_polar,
    "qr": st.retract_qr,
    "orthographic": st.retract_orthographic,
}


@pytest.mark.parametrize("name", sorted(RETRACTIONS))
def test_retraction_at_zero(rng, name):
    u = random_stiefel(rng, 10, 5)
    zero = st.StiefelTangent(u, np.zeros((10, 5)))
    v = RETRACTIONS[name](u, zero)
    assert np.allclose(v.U, u.U, atol=1e-12)


@pytest.mark.parametrize("name", sorted(RETRACTIONS))
def test_retraction_first_order(rng, name):
    """||R(t xi) - (U + t xi)|| must shrink like t^2."""
    u = random_stiefel(rng, 10, 5)
    xi = random_tangent(rng, u)
    ts = np.array([1e-1, 1e-2, 1e-3, 1e-4])
    errs = []
    for t in ts:
        v = RETRACTIONS[name](u, st.StiefelTangent(u, t * xi.xi))
        errs.append(np.linalg.norm(v.U - (u.U + t * xi.xi)))
    slope = np.polyfit(np.log(ts), np.log(errs), 1)[0]
    assert slope > 1.9, f"{name}: slope {slope:.3f}"


def test_retractions_agree_to_first_order(rng):
    u = random_stiefel(rng, 10, 5)
    xi = random_tangent(rng, u)
    t = 1e-3
    step = st.StiefelTangent(u, t * xi.xi)
    vp = st.retract_polar(u, step).U
    vq = st.retract_qr(u, step).U
    vo = st.retract_orthographic(u, step).U
    assert np.linalg.norm(vp - vq) < 10 * t**2
    assert np.linalg.norm(vp - vo) < 10 * t**2


def test_orthographic_correction_is_normal(rng):
    """V - (U + xi) must lie in the normal space {U S : S symmetric}."""
    u = random_stiefel(rng, 10, 5)
    xi = random_tangent(rng, u, scale=0.3)
    v = st.retract_orthographic(u, xi)
    corr = v.U - (u.U + xi.xi)
    # no component outside the column span of U
    assert np.linalg.norm(corr - u.U @ (u.U.T @ corr)) < 1e-10
    s = u.U.T @ corr
    assert np.allclose(s, s.T, atol=1e-10)


# -- inverse retractions and liftings ---------------------------------------


@pytest.mark.parametrize(
    "retract,invert",
    [
        (st.retract_polar, st.inv_retract_polar),
        (st.retract_qr, st.inv_retract_qr),
        (st.retract_orthographic, st.lift_orthographic),
    ],
    ids=["polar", "qr", "orthographic"],
)
def test_lift_of_retract_recovers_tangent(rng, retract, invert):
    for _ in range(25):
        u = random_stiefel(rng, 10, 5)
        xi = random_tangent(rng, u, scale=0.3)
        v = retract(u, xi)
        back = invert(u, v)
        assert np.linalg.norm(back.xi - xi.xi) < ROUND_TRIP_TOL


@pytest.mark.parametrize(
    "retract,invert",
    [
        (st.retract_polar, st.inv_retract_polar),
        (st.retract_qr, st.inv_retract_qr),
        (st.retract_orthographic, st.lift_orthographic),
    ],
    ids=["polar", "qr", "orthographic"],
)
def test_retract_of_lift_recovers_point(rng, retract, invert):
    for _ in range(25):
        u = random_stiefel(rng, 10, 5)
        om = rng.standard_normal((10, 10))
        rot = linalg.expm_skew(0.3 * 0.5 * (om - om.T))
        v = st.StiefelPoint(rot @ u.U)
        xi = invert(u, v)
        again = retract(u, xi)
        assert np.linalg.norm(again.U - v.U) < ROUND_TRIP_TOL


def test_inv_retract_polar_solves_sylvester(rng):
    u = random_stiefel(rng, 10, 5)
    xi = random_tangent(rng, u, scale=0.2)
    v = st.retract_polar(u, xi)
    back = st.inv_retract_polar(u, v)
    # U + xi must be V times a symmetric matrix (the defining property)
    m = np.linalg.solve(v.U.T @ v.U, v.U.T @ (u.U + back.xi))
    assert np.allclose(m, m.T, atol=1e-10)


def test_inv_retract_polar_unsolvable_for_orthogonal_spans():
    u = st.StiefelPoint(np.eye(6)[:, :2])
    v = st.StiefelPoint(np.eye(6)[:, 2:4])  # U.T V = 0
    with pytest.raises(Unsolvable):
        st.inv_retract_polar(u, v)


def test_lift_orthographic_small_example():
    """Hand-checked 2-vector case: U = e1, V = e2 lifts to (0, 1)."""
    u = st.StiefelPoint(np.array([[1.0], [0.0]]))
    v = st.StiefelPoint(np.array([[0.0], [1.0]]))
    xi = st.lift_orthographic(u, v)
    assert np.allclose(xi.xi, [[0.0], [1.0]], atol=1e-15)


def test_orthonormal_complement(rng):
    u = random_stiefel(rng, 10, 4)
    perp = st.orthonormal_complement(u)
    assert perp.shape == (10, 6)
    full = np.hstack([u.U, perp])
    assert np.allclose(full.T @ full, np.eye(10), atol=1e-12)


# -- differential of the qr factor ------------------------------------------


def qf(x):
    return linalg.qr_positive(x)[0]


def test_lift_qr_differential_matches_finite_difference(rng):
    for _ in range(10):
        g = random_stiefel(rng, 10, 5)
        m = random_stiefel(rng, 10, 5)
        d = m.U - g.U
        fd = (qf(g.U + FD_STEP * d) - qf(g.U - FD_STEP * d)) / (2 * FD_STEP)
        xi = st.lift_qr_differential(g, m)
        assert np.linalg.norm(xi.xi - fd) < FD_TOL


def test_lift_qr_differential_zero_at_base(rng):
    g = random_stiefel(rng, 10, 5)
    xi = st.lift_qr_differential(g, g)
    assert np.linalg.norm(xi.xi) == 0.0


def test_lift_qr_differential_output_is_tangent(rng):
    for _ in range(20):
        g = random_stiefel(rng, 10, 5)
        m = random_stiefel(rng, 10, 5)
        xi = st.lift_qr_differential(g, m)  # constructor checks tangency
        a = g.U.T @ xi.xi
        assert np.linalg.norm(a + a.T) < 1e-12


def test_qf_kills_upper_triangular_scaling(rng):
    """qf(X R) = qf(X) for upper-triangular R with positive diagonal --
    the invariance behind the closed-form differential."""
    x = rng.standard_normal((10, 5))
    r_up = np.triu(rng.standard_normal((5, 5)))
    np.fill_diagonal(r_up, np.abs(np.diag(r_up)) + 0.5)
    assert np.allclose(qf(x @ r_up), qf(x), atol=1e-10)
