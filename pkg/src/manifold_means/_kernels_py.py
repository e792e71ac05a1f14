"""NumPy/SciPy implementation of the dense linear-algebra kernels.

This is the fallback twin of the compiled extension ``_kernels_cy``;
both expose the same eight functions with identical semantics (shapes,
sign conventions, error types), and the test suite runs against both.
Inputs are assumed float64 and finite -- validation happens one layer
up, in :mod:`manifold_means.linalg`.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import NoConvergence, RankDeficient, Unsolvable

# Relative factor for numerical rank decisions: a factorization input is
# declared rank deficient when its smallest scale drops below
# RANK_TOL_FACTOR * max(p, k) * (largest scale).
RANK_TOL_FACTOR = 1e-12


def polar_factor(x):
    """Orthogonal polar factor uf(X) = A @ B.T from the thin SVD X = A S B.T.

    uf(X) is the closest orthonormal-column matrix to X in Frobenius
    norm; it is unique iff X has full column rank.

    Raises
    ------
    RankDeficient
        If the smallest singular value is below the rank tolerance.
    """
    a, s, bt = np.linalg.svd(x, full_matrices=False)
    p, k = x.shape
    if s[-1] <= RANK_TOL_FACTOR * max(p, k) * s[0]:
        raise RankDeficient(
            f"polar factor undefined: sigma_min={s[-1]:.3e} with sigma_max={s[0]:.3e}"
        )
    return a @ bt


def qr_positive(x):
    """Thin QR factorization X = Q R with diag(R) > 0.

    The positive-diagonal convention makes the factorization unique for a
    full-column-rank X, which in turn makes qf(X) := Q a well-defined map.

    Returns
    -------
    (Q, R) : ndarray of shape (p, k), ndarray of shape (k, k)

    Raises
    ------
    RankDeficient
        If some |R_jj| is below the rank tolerance.
    """
    q, r = np.linalg.qr(x, mode="reduced")
    p, k = x.shape
    d = np.diag(r)
    scale = np.max(np.abs(d))
    if np.min(np.abs(d)) <= RANK_TOL_FACTOR * max(p, k) * scale:
        raise RankDeficient("qr factor undefined: near-zero diagonal in R")
    signs = np.where(d < 0.0, -1.0, 1.0)
    return q * signs, signs[:, None] * r


def sym_eig(s):
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    The input is symmetrized as (S + S.T)/2 before factorization.

    Returns
    -------
    (w, V) : eigenvalues in descending order, matching orthonormal
        eigenvector columns.
    """
    w, v = np.linalg.eigh(0.5 * (s + s.T))
    return w[::-1].copy(), np.ascontiguousarray(v[:, ::-1])


def expm_skew(om):
    """Matrix exponential of a skew-symmetric matrix.

    The result is a rotation: W.T W = I and det W = +1.  The input is
    re-skewed as (Om - Om.T)/2 so round-off in the caller cannot leak a
    symmetric part into the exponential.
    """
    return scipy.linalg.expm(0.5 * (om - om.T))


def solve_sym_product(a):
    """Solve A S + S A.T = 2 I for S, by dense vectorization.

    Row-major vectorization turns the equation into
    (A kron I + I kron A) vec(S) = vec(2I); for the sizes used here
    (k <= 10) the k^2 x k^2 dense solve is exact and cheap.  When the
    solution is unique it is automatically symmetric.

    Raises
    ------
    Unsolvable
        If the vectorized system is singular (some eigenvalue pair of A
        sums to zero).
    """
    k = a.shape[0]
    eye = np.eye(k)
    m = np.kron(a, eye) + np.kron(eye, a)
    try:
        vec = np.linalg.solve(m, (2.0 * eye).reshape(-1))
    except np.linalg.LinAlgError as exc:
        raise Unsolvable("A S + S A.T = 2I is singular") from exc
    if not np.all(np.isfinite(vec)):
        raise Unsolvable("A S + S A.T = 2I produced non-finite solution")
    s = vec.reshape(k, k)
    return 0.5 * (s + s.T)


def solve_upper_from_sym(b):
    """Solve B R + R.T B.T = 2 I for upper-triangular R, column by column.

    Column j of R only enters the equations (i, j) with i <= j, and the
    entries below the diagonal are zero, so the j-th column solves a
    (j+1) x (j+1) system against the leading principal block of B with a
    right-hand side built from the previously computed columns.

    Raises
    ------
    Unsolvable
        If a leading principal block of B is singular.
    """
    k = b.shape[0]
    r = np.zeros((k, k))
    c = np.zeros((k, k))  # c[:, j] = B @ r[:, j] for solved columns
    for j in range(k):
        rhs = np.empty(j + 1)
        rhs[:j] = -c[j, :j]
        rhs[j] = 1.0
        try:
            y = np.linalg.solve(b[: j + 1, : j + 1], rhs)
        except np.linalg.LinAlgError as exc:
            raise Unsolvable(
                f"leading {j + 1}x{j + 1} block of B is singular"
            ) from exc
        if not np.all(np.isfinite(y)):
            raise Unsolvable("triangular recursion produced non-finite column")
        r[: j + 1, j] = y
        c[:, j] = b[:, : j + 1] @ y
    return r


def solve_riccati(a, q, tol=1e-12, max_iter=1000):
    """Solve 2 S = Q + A S - S A + S^2 for symmetric S by fixed point.

    ``a`` is skew-symmetric, ``q`` symmetric positive semidefinite; the
    damped iteration S <- (Q + A S - S A + S^2)/2 starting from S = 0
    contracts whenever ||Q|| is small enough (the retraction's
    neighborhood condition) and preserves symmetry at every step.

    Raises
    ------
    NoConvergence
        If successive iterates still move more than ``tol`` after
        ``max_iter`` sweeps.
    """
    k = q.shape[0]
    s = np.zeros((k, k))
    for _ in range(max_iter):
        s_new = 0.5 * (q + a @ s - s @ a + s @ s)
        delta = np.linalg.norm(s_new - s)
        s = s_new
        if delta < tol:
            return 0.5 * (s + s.T)
    raise NoConvergence(
        f"Riccati fixed point did not reach {tol:.1e} in {max_iter} iterations"
    )


def principal_angles(u, v):
    """Principal angles between span(U) and span(V), ascending.

    The angles are arccos of the singular values of U.T V, clamped to
    [0, 1] to absorb round-off.
    """
    sv = np.linalg.svd(u.T @ v, compute_uv=False)
    return np.arccos(np.clip(sv, 0.0, 1.0))
