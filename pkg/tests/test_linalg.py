"""Tests for the dense linear-algebra layer.

Every factorization and solver is checked against an independent oracle
(a textbook algorithm or the defining equation) before any round-trip or
invariant test.  The ``kernel_backend`` fixture repeats the numerical
checks on each available kernel implementation.
"""

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, seed, settings
from hypothesis import strategies as hst
from hypothesis.extra.numpy import arrays

from manifold_means import linalg
from manifold_means.errors import NoConvergence, RankDeficient, Unsolvable

ORACLE_TOL = 1e-10
RESIDUAL_TOL = 1e-10
N_RANDOM = 300


# -- independent oracles -------------------------------------------------


def mgs_qr(x):
    """Modified Gram-Schmidt QR; the diagonal of R is positive by
    construction, which matches the uniqueness convention under test."""
    x = np.array(x, dtype=float)
    p, k = x.shape
    q = np.zeros((p, k))
    r = np.zeros((k, k))
    for j in range(k):
        v = x[:, j].copy()
        for i in range(j):
            r[i, j] = q[:, i] @ v
            v -= r[i, j] * q[:, i]
        r[j, j] = np.linalg.norm(v)
        q[:, j] = v / r[j, j]
    return q, r


def polar_via_normal_equations(x):
    """uf(X) = X (X^T X)^{-1/2} through an eigendecomposition."""
    w, v = np.linalg.eigh(x.T @ x)
    return x @ (v / np.sqrt(w)) @ v.T


def taylor_expm(a, terms=30):
    """Plain truncated exponential series; accurate for ||A|| <= 1."""
    out = np.eye(a.shape[0])
    term = np.eye(a.shape[0])
    for j in range(1, terms + 1):
        term = term @ a / j
        out = out + term
    return out


# -- oracle comparisons --------------------------------------------------


def test_qr_positive_matches_gram_schmidt(rng, kernel_backend):
    for _ in range(50):
        x = rng.standard_normal((10, 5))
        q, r = linalg.qr_positive(x)
        q_ref, r_ref = mgs_qr(x)
        assert np.allclose(q, q_ref, atol=1e-9)
        assert np.allclose(r, r_ref, atol=1e-9)


def test_polar_factor_matches_normal_equations(rng, kernel_backend):
    for _ in range(50):
        x = rng.standard_normal((10, 5))
        u = linalg.polar_orthogonal_factor(x)
        assert np.allclose(u, polar_via_normal_equations(x), atol=1e-9)


def test_expm_skew_matches_taylor_series(rng, kernel_backend):
    for _ in range(50):
        om = rng.standard_normal((8, 8))
        om = 0.05 * (om - om.T)  # ||om|| well under 1
        assert np.allclose(linalg.expm_skew(om), taylor_expm(om), atol=1e-12)


def test_solve_sym_product_matches_bartels_stewart(rng, kernel_backend):
    """The vectorized solver must agree with scipy's Schur-based one."""
    for _ in range(50):
        a = np.eye(5) + 0.3 * rng.standard_normal((5, 5))
        s = linalg.solve_sym_product(a)
        s_ref = scipy.linalg.solve_sylvester(a, a.T, 2.0 * np.eye(5))
        assert np.allclose(s, s_ref, atol=1e-9)


def test_principal_angles_known_rotations():
    theta = 0.7
    u = np.eye(4)[:, :2]
    c, s = np.cos(theta), np.sin(theta)
    v = np.array([[1.0, 0.0], [0.0, c], [0.0, s], [0.0, 0.0]])
    angles = linalg.principal_angles(u, v)
    assert np.allclose(angles, [0.0, theta], atol=1e-12)

    # fully orthogonal subspaces: both angles are pi/2
    w = np.eye(4)[:, 2:]
    assert np.allclose(linalg.principal_angles(u, w), np.pi / 2, atol=1e-12)
    # identical subspaces: all angles vanish
    assert np.allclose(linalg.principal_angles(u, u), 0.0, atol=1e-12)


def test_sym_eig_reconstructs_and_orders(rng, kernel_backend):
    for _ in range(50):
        s = rng.standard_normal((6, 6))
        s = s + s.T
        w, v = linalg.sym_eig(s)
        assert np.all(np.diff(w) <= 1e-12)  # descending
        assert np.allclose(v.T @ v, np.eye(6), atol=1e-12)
        assert np.allclose((v * w) @ v.T, s, atol=1e-10)


# -- defining-equation residuals ----------------------------------------


def test_solve_sym_product_residual(rng, kernel_backend):
    for _ in range(N_RANDOM):
        a = np.eye(5) + 0.4 * rng.standard_normal((5, 5))
        s = linalg.solve_sym_product(a)
        assert np.allclose(s, s.T)
        residual = a @ s + s @ a.T - 2.0 * np.eye(5)
        assert np.linalg.norm(residual) < RESIDUAL_TOL


def test_solve_upper_from_sym_residual(rng, kernel_backend):
    for _ in range(N_RANDOM):
        b = np.eye(5) + 0.4 * rng.standard_normal((5, 5))
        r = linalg.solve_upper_from_sym(b)
        assert np.allclose(r, np.triu(r)), "solution must be upper triangular"
        residual = b @ r + r.T @ b.T - 2.0 * np.eye(5)
        assert np.linalg.norm(residual) < RESIDUAL_TOL


def test_solve_riccati_residual(rng, kernel_backend):
    for _ in range(100):
        a = rng.standard_normal((5, 5))
        a = 0.08 * (a - a.T)
        g = rng.standard_normal((5, 5))
        q = 0.01 * (g @ g.T)
        s = linalg.solve_riccati(a, q)
        assert np.allclose(s, s.T)
        residual = 2.0 * s - (q + a @ s - s @ a + s @ s)
        assert np.linalg.norm(residual) < 1e-9


# -- invariants over random inputs ---------------------------------------


def test_qr_positive_invariants(rng, kernel_backend):
    for _ in range(N_RANDOM):
        x = rng.standard_normal((10, 5))
        q, r = linalg.qr_positive(x)
        assert np.allclose(q.T @ q, np.eye(5), atol=1e-12)
        assert np.allclose(q @ r, x, atol=1e-12)
        assert np.allclose(r, np.triu(r))
        assert np.all(np.diag(r) > 0.0)


def test_polar_factor_invariants(rng, kernel_backend):
    for _ in range(N_RANDOM):
        x = rng.standard_normal((10, 5))
        u = linalg.polar_orthogonal_factor(x)
        assert np.allclose(u.T @ u, np.eye(5), atol=1e-12)
        s = u.T @ x  # the symmetric positive definite polar part
        assert np.allclose(s, s.T, atol=1e-10)
        assert np.all(np.linalg.eigvalsh(0.5 * (s + s.T)) > 0.0)


def test_expm_skew_is_a_rotation(rng, kernel_backend):
    for _ in range(N_RANDOM):
        om = rng.standard_normal((10, 10))
        om = 0.5 * (om - om.T)
        w = linalg.expm_skew(om)
        assert np.allclose(w.T @ w, np.eye(10), atol=1e-12)
        assert np.linalg.det(w) > 0.0


def test_expm_skew_large_norm_still_orthogonal(rng, kernel_backend):
    # exercise the scaling-and-squaring branch
    om = rng.standard_normal((10, 10))
    om = 40.0 * (om - om.T)
    w = linalg.expm_skew(om)
    assert np.allclose(w.T @ w, np.eye(10), atol=1e-10)


def test_expm_skew_inverse_is_transpose(rng, kernel_backend):
    om = rng.standard_normal((7, 7))
    om = om - om.T
    w_fwd = linalg.expm_skew(om)
    w_bwd = linalg.expm_skew(-om)
    assert np.allclose(w_fwd @ w_bwd, np.eye(7), atol=1e-12)


def test_principal_angles_range_and_symmetry(rng, kernel_backend):
    for _ in range(100):
        u, _ = np.linalg.qr(rng.standard_normal((10, 4)))
        v, _ = np.linalg.qr(rng.standard_normal((10, 4)))
        ang_uv = linalg.principal_angles(u, v)
        ang_vu = linalg.principal_angles(v, u)
        assert np.all(ang_uv >= 0.0) and np.all(ang_uv <= np.pi / 2 + 1e-12)
        assert np.all(np.diff(ang_uv) >= -1e-12)  # ascending
        assert np.allclose(ang_uv, ang_vu, atol=1e-8)


# -- error contracts ------------------------------------------------------


def test_polar_factor_rank_deficient(kernel_backend):
    x = np.outer(np.arange(1.0, 11.0), np.ones(5))  # rank one
    with pytest.raises(RankDeficient):
        linalg.polar_orthogonal_factor(x)


def test_qr_positive_rank_deficient(kernel_backend):
    x = np.ones((10, 3))
    x[:, 2] = x[:, 0] + x[:, 1]
    with pytest.raises(RankDeficient):
        linalg.qr_positive(x)


def test_solve_sym_product_singular(kernel_backend):
    # eigenvalues 1 and -1 sum to zero across the pair, so the
    # vectorized system is exactly singular
    with pytest.raises(Unsolvable):
        linalg.solve_sym_product(np.diag([1.0, -1.0]))


def test_solve_upper_from_sym_singular_block(kernel_backend):
    b = np.eye(4)
    b[0, 0] = 0.0  # first leading block is singular
    with pytest.raises(Unsolvable):
        linalg.solve_upper_from_sym(b)


def test_solve_riccati_diverges_outside_neighborhood(rng, kernel_backend):
    # a skew part with spectral spread above 2 amplifies some mode of
    # S -> (AS - SA)/2 each sweep, so the fixed point is repelling
    z = rng.standard_normal((5, 5))
    a = 2.0 * (z - z.T)
    g = rng.standard_normal((5, 5))
    q = 0.5 * (g @ g.T)
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(NoConvergence):
            linalg.solve_riccati(a, q)


def test_validation_rejects_bad_shapes():
    with pytest.raises(ValueError):
        linalg.polar_orthogonal_factor(np.ones((3, 5)))  # wide, not tall
    with pytest.raises(ValueError):
        linalg.sym_eig(np.ones((3, 4)))
    with pytest.raises(ValueError):
        linalg.expm_skew(np.arange(9.0).reshape(3, 3))  # not skew
    with pytest.raises(ValueError):
        linalg.sym_eig(np.triu(np.ones((3, 3))))  # not symmetric
    with pytest.raises(ValueError):
        linalg.principal_angles(np.eye(4)[:, :2], np.eye(5)[:, :2])
    with pytest.raises(ValueError):
        linalg.principal_angles(np.ones((4, 2)), np.eye(4)[:, :2])


def test_validation_rejects_non_finite():
    x = np.ones((4, 2))
    x[1, 1] = np.nan
    with pytest.raises(ValueError):
        linalg.qr_positive(x)
    with pytest.raises(ValueError):
        linalg.polar_orthogonal_factor(np.full((4, 2), np.inf))


def test_riccati_argument_checks(rng):
    a = rng.standard_normal((4, 4))
    a = a - a.T
    q = np.eye(4)
    with pytest.raises(ValueError):
        linalg.solve_riccati(a + 0.1, q)  # skew check
    with pytest.raises(ValueError):
        linalg.solve_riccati(a, q + np.triu(np.ones((4, 4)), 1))  # sym check
    with pytest.raises(ValueError):
        linalg.solve_riccati(a, np.eye(3))  # shape mismatch


# -- a couple of hypothesis properties ------------------------------------


@seed(7)
@settings(max_examples=25, deadline=None)
@given(
    arrays(
        np.float64,
        (6, 6),
        elements=hst.floats(min_value=-1.0, max_value=1.0),
    )
)
def test_expm_skew_orthogonal_property(m):
    om = m - m.T
    w = linalg.expm_skew(om)
    assert np.allclose(w.T @ w, np.eye(6), atol=1e-10)


@seed(11)
@settings(max_examples=25, deadline=None)
@given(
    arrays(
        np.float64,
        (4, 4),
        elements=hst.floats(min_value=-0.2, max_value=0.2),
    )
)
def test_solve_sym_product_property(m):
    a = np.eye(4) + m
    s = linalg.solve_sym_product(a)
    assert np.linalg.norm(a @ s + s @ a.T - 2.0 * np.eye(4)) < 1e-8
