"""Validated linear-algebra operations shared by both manifolds.

Thin wrappers around the selected kernel backend: this layer checks
shapes, finiteness and structural preconditions (symmetry, skewness,
orthonormality), then dispatches to :data:`manifold_means.backend.kernels`.
"""

from __future__ import annotations

import numpy as np

from . import backend

# Absolute Frobenius tolerance accepted when checking orthonormality of
# constructed points (accumulated round-off from products of factors).
ATOL_ORTHO = 1e-8

# Structural pre-checks (symmetry, skewness) are relative to the input
# scale: ||X - +-X.T|| <= SYM_RTOL * max(1, ||X||).
SYM_RTOL = 1e-8

# Successive-iterate tolerance and sweep budget of the Riccati solver.
RICCATI_TOL = 1e-12
RICCATI_MAX_ITER = 1000


def as_matrix(x, name="matrix"):
    """Coerce to a finite float64 2-D array, copying if needed."""
    m = np.asarray(x, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def _check_square(m, name):
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")


def _check_symmetric(m, name):
    if np.linalg.norm(m - m.T) > SYM_RTOL * max(1.0, np.linalg.norm(m)):
        raise ValueError(f"{name} is not symmetric within tolerance")


def _check_skew(m, name):
    if np.linalg.norm(m + m.T) > SYM_RTOL * max(1.0, np.linalg.norm(m)):
        raise ValueError(f"{name} is not skew-symmetric within tolerance")


def polar_orthogonal_factor(x):
    """Closest orthonormal-column matrix to X (polar factor uf(X))."""
    x = as_matrix(x, "X")
    if x.shape[0] < x.shape[1]:
        raise ValueError(f"X must be tall, got shape {x.shape}")
    return backend.kernels.polar_factor(x)

def qr_positive(x):
    """Thin QR of X with the positive-diagonal sign convention."""
    x = as_matrix(x, "X")
    if x.shape[0] < x.shape[1]:
        raise ValueError(f"X must be tall, got shape {x.shape}")
    return backend.kernels.qr_positive(x)


def sym_eig(s):
    """Descending eigendecomposition of a symmetric matrix."""
    s = as_matrix(s, "S")
    _check_square(s, "S")
    _check_symmetric(s, "S")
    return backend.kernels.sym_eig(s)


def expm_skew(om):
    """Rotation expm(Omega) of a skew-symmetric Omega."""
    om = as_matrix(om, "Omega")
    _check_square(om, "Omega")
    _check_skew(om, "Omega")
    return backend.kernels.expm_skew(om)


def solve_sym_product(a):
    """Symmetric S with A S + S A.T = 2 I (unique away from singularity)."""
    a = as_matrix(a, "A")
    _check_square(a, "A")
    return backend.kernels.solve_sym_product(a)


def solve_upper_from_sym(b):
    """Upper-triangular R with B R + R.T B.T = 2 I."""
    b = as_matrix(b, "B")
    _check_square(b, "B")
    return backend.kernels.solve_upper_from_sym(b)


def solve_riccati(a, q, tol=RICCATI_TOL, max_iter=RICCATI_MAX_ITER):
    """Symmetric solution of 2 S = Q + A S - S A + S^2.

    Parameters
    ----------
    a : (k, k) skew-symmetric ndarray
    q : (k, k) symmetric ndarray
    tol, max_iter : fixed-point controls; iteration stops once the
        change between sweeps drops below ``tol``.
    """
    a = as_matrix(a, "A")
    q = as_matrix(q, "Q")
    _check_square(a, "A")
    _check_square(q, "Q")
    if a.shape != q.shape:
        raise ValueError(f"A and Q shapes differ: {a.shape} vs {q.shape}")
    _check_skew(a, "A")
    _check_symmetric(q, "Q")
    return backend.kernels.solve_riccati(a, q, tol, max_iter)


def principal_angles(u, v):
    """Principal angles between span(U) and span(V) in ascending order.

    Both inputs must have orthonormal columns (within ``ATOL_ORTHO``).
    """
    u = as_matrix(u, "U")
    v = as_matrix(v, "V")
    if u.shape != v.shape:
        raise ValueError(f"U and V shapes differ: {u.shape} vs {v.shape}")
    k = u.shape[1]
    for m, name in ((u, "U"), (v, "V")):
        if np.linalg.norm(m.T @ m - np.eye(k)) > ATOL_ORTHO:
            raise ValueError(f"{name} does not have orthonormal columns")
    return backend.kernels.principal_angles(u, v)
