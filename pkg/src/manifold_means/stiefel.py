"""Points, tangents, retractions and liftings on the Stiefel manifold.

A point is a p x k matrix with orthonormal columns (k <= p).  Tangent
vectors at U are the p x k matrices xi with U.T xi skew-symmetric.
Three retractions are provided (polar projection, QR, orthographic)
together with their exact inverses where those have closed or
structured forms, plus the differential-based QR lifting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import InvalidPoint

# Frobenius tolerance accepted on construction; products of computed
# factors accumulate round-off well below this.
ATOL_POINT = linalg.ATOL_ORTHO
ATOL_TANGENT = 1e-8


def _frozen_copy(m):
    out = m.copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False, repr=False)
class StiefelPoint:
    """Orthonormal p x k matrix, validated on construction."""

    U: np.ndarray

    def __post_init__(self):
        try:
            u = linalg.as_matrix(self.U, "U")
        except ValueError as exc:
            raise InvalidPoint(str(exc)) from exc
        p, k = u.shape
        if k < 1 or p < k:
            raise InvalidPoint(f"need p >= k >= 1, got shape {u.shape}")
        defect = np.linalg.norm(u.T @ u - np.eye(k))
        if defect > ATOL_POINT:
            raise InvalidPoint(
                f"columns not orthonormal: ||U.T U - I|| = {defect:.3e}"
            )
        object.__setattr__(self, "U", _frozen_copy(u))

    @property
    def p(self) -> int:
        return self.U.shape[0]

    @property
    def k(self) -> int:
        return self.U.shape[1]

    def __repr__(self):
        return f"StiefelPoint(p={self.p}, k={self.k})"


@dataclass(frozen=True, eq=False, repr=False)
class StiefelTangent:
    """Tangent vector xi at ``base``: U.T xi must be skew-symmetric."""

    base: StiefelPoint
    xi: np.ndarray

    def __post_init__(self):
        try:
            xi = linalg.as_matrix(self.xi, "xi")
        except ValueError as exc:
            raise InvalidPoint(str(exc)) from exc
        u = self.base.U
        if xi.shape != u.shape:
            raise InvalidPoint(
                f"tangent shape {xi.shape} does not match point shape {u.shape}"
            )
        a = u.T @ xi
        defect = np.linalg.norm(a + a.T)
        if defect > ATOL_TANGENT:
            raise InvalidPoint(
                f"not tangent at base: ||U.T xi + xi.T U|| = {defect:.3e}"
            )
        object.__setattr__(self, "xi", _frozen_copy(xi))

    def __repr__(self):
        return f"StiefelTangent(p={self.base.p}, k={self.base.k})"


def _check_base(u: StiefelPoint, xi: StiefelTangent):
    if xi.base is not u and not np.array_equal(xi.base.U, u.U):
        raise ValueError("tangent is attached to a different base point")


def proj_to_stiefel(x) -> StiefelPoint:
    """Closest Stiefel point to an arbitrary full-rank tall matrix."""
    return StiefelPoint(linalg.polar_orthogonal_factor(x))


def tangent_project(u: StiefelPoint, z) -> StiefelTangent:
    """Orthogonal projection of an ambient p x k matrix onto the
    tangent space at U: Z - U sym(U.T Z)."""
    z = linalg.as_matrix(z, "Z")
    if z.shape != u.U.shape:
        raise ValueError(f"Z shape {z.shape} does not match point {u.U.shape}")
    a = u.U.T @ z
    return StiefelTangent(u, z - u.U @ (0.5 * (a + a.T)))


def retract_polar(u: StiefelPoint, xi: StiefelTangent) -> StiefelPoint:
    """Polar-projection retraction uf(U + xi)."""
    _check_base(u, xi)
    return StiefelPoint(linalg.polar_orthogonal_factor(u.U + xi.xi))


def retract_qr(u: StiefelPoint, xi: StiefelTangent) -> StiefelPoint:
    """QR retraction qf(U + xi) under the positive-diagonal convention."""
    _check_base(u, xi)
    return StiefelPoint(linalg.qr_positive(u.U + xi.xi)[0])


def retract_orthographic(
    u: StiefelPoint,
    xi: StiefelTangent,
    tol: float = linalg.RICCATI_TOL,
    max_iter: int = linalg.RICCATI_MAX_ITER,
) -> StiefelPoint:
    """Orthographic retraction: the Stiefel point U + xi - U S whose
    correction -U S is normal at U.

    The symmetric S solves the Riccati equation
    2 S = xi.T xi + A S - S A + S^2 with A = U.T xi, handled by a damped
    fixed point that converges for small enough ||xi||.
    """
    _check_base(u, xi)
    a = u.U.T @ xi.xi
    a = 0.5 * (a - a.T)  # tangency makes A skew; drop round-off
    q = xi.xi.T @ xi.xi
    q = 0.5 * (q + q.T)
    s = linalg.solve_riccati(a, q, tol=tol, max_iter=max_iter)
    v = u.U + xi.xi - u.U @ s
    # One Newton-Schulz sweep. The algebraic construction passes the base
    # point's orthonormality defect through (amplified), so chained
    # retractions would drift off the manifold; this squares the defect,
    # pinning it at round-off level without moving V beyond the accuracy
    # the Riccati tolerance already allows.
    v = v @ (1.5 * np.eye(u.k) - 0.5 * (v.T @ v))
    return StiefelPoint(v)


def inv_retract_polar(u: StiefelPoint, v: StiefelPoint) -> StiefelTangent:
    """Exact inverse of the polar retraction.

    Writing U + xi = V S with S symmetric, tangency of xi forces
    A S + S A.T = 2 I with A = U.T V; the returned tangent is V S - U.

    Raises
    ------
    Unsolvable
        If the symmetric system is singular (V too far from U).
    InvalidPoint
        If the solved correction is not tangent within tolerance.
    """
    s = linalg.solve_sym_product(u.U.T @ v.U)
    return StiefelTangent(u, v.U @ s - u.U)


def inv_retract_qr(u: StiefelPoint, v: StiefelPoint) -> StiefelTangent:
    """Exact inverse of the QR retraction.

    Writing U + xi = V R with R upper triangular, tangency forces
    B R + R.T B.T = 2 I with B = U.T V; the returned tangent is V R - U.
    """
    r = linalg.solve_upper_from_sym(u.U.T @ v.U)
    return StiefelTangent(u, v.U @ r - u.U)


def lift_orthographic(u: StiefelPoint, v: StiefelPoint) -> StiefelTangent:
    """Exact inverse of the orthographic retraction: the tangent
    projection of V - U.  Closed form, defined for every pair."""
    return tangent_project(u, v.U - u.U)


def orthonormal_complement(u: StiefelPoint) -> np.ndarray:
    """A p x (p - k) orthonormal basis of the orthogonal complement of
    span(U), taken from the trailing columns of a full QR."""
    q = np.linalg.qr(u.U, mode="complete")[0]
    return q[:, u.k:]


def lift_qr_differential(g: StiefelPoint, m: StiefelPoint) -> StiefelTangent:
    """Differential of qf at G, applied to M - G.

    With D = M - G, A = G.T D and L the strictly lower triangle of A:

        dqf(G)[D] = G_perp G_perp.T D + G (L - L.T)

    (the factor R of G itself is the identity, which is what makes this
    form exact).  Used as the lifting whose fixed point characterizes
    the QR-projected mean.
    """
    d = m.U - g.U
    g_perp = orthonormal_complement(g)
    a = g.U.T @ d
    lower = np.tril(a, -1)
    xi = g_perp @ (g_perp.T @ d) + g.U @ (lower - lower.T)
    return StiefelTangent(g, xi)
