"""The Grassmann manifold as rank-k orthogonal projectors.

A subspace is represented by the symmetric idempotent P = U U.T of any
orthonormal basis U of it, which removes the basis ambiguity of Stiefel
representatives.  Geodesic exp/log maps are computed on representatives
(the corresponding horizontal p x k tangents), distances through
principal angles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import CutLocus, EigenGapDegenerate, InvalidPoint
from .stiefel import StiefelPoint, _frozen_copy

ATOL_PROJ = 1e-8
TRACE_ATOL = 1e-6

# Eigenvalue-gap tolerance of the nearest-projector map, relative to the
# input's Frobenius norm.
GAP_TOL_FACTOR = 1e-10

# Smallest singular value of U.T V accepted before the log is declared
# undefined (a principal angle at pi/2).
ANGLE_TOL = 1e-10


@dataclass(frozen=True, eq=False, repr=False)
class GrassmannPoint:
    """Rank-k orthogonal projector (symmetric, idempotent, trace k)."""

    P: np.ndarray

    def __post_init__(self):
        try:
            m = linalg.as_matrix(self.P, "P")
        except ValueError as exc:
            raise InvalidPoint(str(exc)) from exc
        if m.shape[0] != m.shape[1]:
            raise InvalidPoint(f"projector must be square, got {m.shape}")
        if np.linalg.norm(m - m.T) > ATOL_PROJ:
            raise InvalidPoint("projector is not symmetric within tolerance")
        if np.linalg.norm(m @ m - m) > ATOL_PROJ:
            raise InvalidPoint("matrix is not idempotent within tolerance")
        tr = float(np.trace(m))
        k = round(tr)
        if abs(tr - k) > TRACE_ATOL or k < 1 or k > m.shape[0]:
            raise InvalidPoint(f"trace {tr:.6f} is not a valid rank")
        object.__setattr__(self, "P", _frozen_copy(m))

    @property
    def p(self) -> int:
        return self.P.shape[0]

    @property
    def k(self) -> int:
        return round(float(np.trace(self.P)))

    def __repr__(self):
        return f"GrassmannPoint(p={self.p}, k={self.k})"


@dataclass(frozen=True, eq=False, repr=False)
class GrassmannTangent:
    """Symmetric tangent at ``base``: satisfies P xi + xi P = xi."""

    base: GrassmannPoint
    xi: np.ndarray

    def __post_init__(self):
        try:
            xi = linalg.as_matrix(self.xi, "xi")
        except ValueError as exc:
            raise InvalidPoint(str(exc)) from exc
        m = self.base.P
        if xi.shape != m.shape:
            raise InvalidPoint(
                f"tangent shape {xi.shape} does not match point shape {m.shape}"
            )
        if np.linalg.norm(xi - xi.T) > ATOL_PROJ:
            raise InvalidPoint("tangent is not symmetric within tolerance")
        defect = np.linalg.norm(m @ xi + xi @ m - xi)
        if defect > ATOL_PROJ:
            raise InvalidPoint(
                f"not tangent at base: ||P xi + xi P - xi|| = {defect:.3e}"
            )
        object.__setattr__(self, "xi", _frozen_copy(xi))

    def __repr__(self):
        return f"GrassmannTangent(p={self.base.p}, k={self.base.k})"


def stiefel_to_grassmann(u: StiefelPoint) -> GrassmannPoint:
    """Projector U U.T onto the column span of a Stiefel point."""
    m = u.U @ u.U.T
    return GrassmannPoint(0.5 * (m + m.T))


def proj_to_grassmann(x, k: int) -> GrassmannPoint:
    """Nearest rank-k projector to a symmetric matrix.

    The minimizer of ||X - P|| over rank-k projectors is V_k V_k.T built
    from the k dominant eigenvectors of X; it is unique exactly when the
    spectral gap lambda_k - lambda_{k+1} is positive.

    Raises
    ------
    EigenGapDegenerate
        If the gap at index k is below GAP_TOL_FACTOR * ||X||.
    """
    x = linalg.as_matrix(x, "X")
    p = x.shape[0]
    if not 1 <= k < p:
        raise ValueError(f"need 1 <= k < p, got k={k}, p={p}")
    w, v = linalg.sym_eig(x)
    gap = w[k - 1] - w[k]
    if gap <= GAP_TOL_FACTOR * np.linalg.norm(x):
        raise EigenGapDegenerate(
            f"eigenvalue gap at index {k} is {gap:.3e}; nearest projector not unique"
        )
    vk = v[:, :k]
    m = vk @ vk.T
    return GrassmannPoint(0.5 * (m + m.T))


def tangent_project_gr(point: GrassmannPoint, z) -> GrassmannTangent:
    """Orthogonal projection of a symmetric ambient matrix onto the
    tangent space at P: 2 sym((I - P) Z P)."""
    z = linalg.as_matrix(z, "Z")
    if z.shape != point.P.shape:
        raise ValueError(f"Z shape {z.shape} does not match point {point.P.shape}")
    if np.linalg.norm(z - z.T) > linalg.SYM_RTOL * max(1.0, np.linalg.norm(z)):
        raise ValueError("Z is not symmetric within tolerance")
    m = point.P
    half = (z @ m) - m @ (z @ m)
    return GrassmannTangent(point, half + half.T)


def stiefel_representative(point: GrassmannPoint) -> StiefelPoint:
    """An orthonormal basis of range(P): eigenvectors with eigenvalue
    above 1/2 (a validated projector has k of them near 1)."""
    w, v = linalg.sym_eig(point.P)
    k = point.k
    if w[k - 1] <= 0.5:
        raise InvalidPoint("projector spectrum inconsistent with its trace")
    return StiefelPoint(v[:, :k])


def gr_exp(u: StiefelPoint, delta) -> StiefelPoint:
    """Geodesic endpoint on representatives.

    For a horizontal tangent with thin SVD Delta = W diag(s) Y.T the
    geodesic from span(U) evaluates to

        U Y cos(s) Y.T + W sin(s) Y.T .
    """
    delta = linalg.as_matrix(delta, "Delta")
    if delta.shape != u.U.shape:
        raise ValueError(
            f"Delta shape {delta.shape} does not match point {u.U.shape}"
        )
    if np.linalg.norm(u.U.T @ delta) > ATOL_PROJ:
        raise ValueError("Delta is not horizontal: U.T Delta != 0")
    w, s, yt = np.linalg.svd(delta, full_matrices=False)
    return StiefelPoint((u.U @ yt.T) * np.cos(s) @ yt + (w * np.sin(s)) @ yt)


def gr_log(u: StiefelPoint, v: StiefelPoint) -> np.ndarray:
    """Horizontal tangent at span(U) whose geodesic reaches span(V).

    Computed from the thin SVD of (I - U U.T) V (U.T V)^{-1} as
    W atan(s) Y.T; defined only away from the cut locus.

    Raises
    ------
    CutLocus
        If some principal angle between the spans is at pi/2 within
        ANGLE_TOL (U.T V numerically singular).
    """
    b = u.U.T @ v.U
    if np.linalg.svd(b, compute_uv=False)[-1] <= ANGLE_TOL:
        raise CutLocus("subspaces contain orthogonal directions; log undefined")
    vb = np.linalg.solve(b.T, v.U.T).T  # V (U.T V)^{-1}
    x = vb - u.U @ (u.U.T @ vb)
    w, s, yt = np.linalg.svd(x, full_matrices=False)
    return (w * np.arctan(s)) @ yt


def gr_distance_sq(a: GrassmannPoint, b: GrassmannPoint) -> float:
    """Squared geodesic distance: sum of squared principal angles."""
    if a.P.shape != b.P.shape or a.k != b.k:
        raise ValueError("points live on different Grassmann manifolds")
    theta = linalg.principal_angles(
        stiefel_representative(a).U, stiefel_representative(b).U
    )
    return float(theta @ theta)
