"""Barycenters: fixed-point solvers and closed-form projected means.

The central object is the retraction/lifting fixed point

    G  <-  R_G( (1/n) sum_i L_G(M_i) ),

a barycenter exactly when the averaged lifting vanishes at G.  With a
projection retraction and the matching tangent-projection lifting the
fixed point has a closed form -- the projection of the arithmetic
sample mean -- implemented here alongside the iterative solvers used as
baselines.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import backend
from . import grassmann as gr
from . import linalg
from . import stiefel as st
from .errors import LiftingFailure, ManifoldMeansError


@dataclass(frozen=True)
class SolverControls:
    """Iteration controls shared by the fixed-point solvers.

    ``init_index`` selects which sample the iteration starts from.
    """

    tol: float = 1e-10
    max_iter: int = 200
    init_index: int = 0

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.init_index < 0:
            raise ValueError(f"init_index must be >= 0, got {self.init_index}")


@dataclass(frozen=True)
class BarycenterResult:
    """Outcome of a barycenter computation.

    ``final_step_norm`` is the Frobenius norm of the averaged lifting at
    the returned point (the step the fixed point would take next); a
    converged run has it at or below the requested tolerance.  For
    closed-form estimators ``iterations`` is 0 and the norm doubles as a
    certificate that the returned point is the fixed point.
    ``objective_history`` collects sum_i ||L_G(M_i)||^2 per sweep when
    the solver was asked to track it.
    """

    point: object
    iterations: int
    final_step_norm: float
    converged: bool
    objective_history: tuple[float, ...] | None = None


def rl_fixed_point(samples, retraction, lifting, controls=None,
                   track_objective=False) -> BarycenterResult:
    """Iterate G <- R_G(mean of L_G(M_i)) from a sample until the
    averaged lifting norm drops below tolerance.

    Parameters
    ----------
    samples : sequence of manifold points
    retraction : callable(point, tangent_array) -> point
    lifting : callable(point, point) -> tangent_array
    controls : SolverControls, optional
    track_objective : record sum_i ||L_G(M_i)||^2 at every sweep

    Returns
    -------
    BarycenterResult
        Converged, or -- after ``max_iter`` sweeps -- the evaluated
        iterate with the smallest averaged-lifting norm, flagged
        ``converged=False``.

    Raises
    ------
    LiftingFailure
        If the lifting cannot be evaluated at some sample; carries the
        sample index.
    """
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample")
    controls = controls if controls is not None else SolverControls()
    if controls.init_index >= len(samples):
        raise ValueError(
            f"init_index {controls.init_index} out of range for "
            f"{len(samples)} samples"
        )
    n = len(samples)
    g = samples[controls.init_index]
    best_g, best_norm = g, np.inf
    history: list[float] = []
    for sweep in range(1, controls.max_iter + 1):
        acc = None
        objective = 0.0
        for i, m in enumerate(samples):
            try:
                xi = lifting(g, m)
            except ManifoldMeansError as exc:
                raise LiftingFailure(i, f"sample {i}: {exc}") from exc
            acc = xi.copy() if acc is None else acc + xi
            if track_objective:
                objective += float(np.linalg.norm(xi)) ** 2
        mean_xi = acc / n
        step = float(np.linalg.norm(mean_xi))
        if track_objective:
            history.append(objective)
        if step <= controls.tol:
            return BarycenterResult(g, sweep, step, True,
                                    tuple(history) if track_objective else None)
        if step < best_norm:
            best_g, best_norm = g, step
        g = retraction(g, mean_xi)
    return BarycenterResult(best_g, controls.max_iter, best_norm, False,
                            tuple(history) if track_objective else None)


def mean_lifting_norm(samples, point, lifting) -> float:
    """|| (1/n) sum_i L_point(M_i) ||_F -- the fixed-point residual."""
    samples = list(samples)
    acc = None
    for m in samples:
        xi = lifting(point, m)
        acc = xi.copy() if acc is None else acc + xi
    return float(np.linalg.norm(acc / len(samples)))


def _check_stiefel_samples(samples):
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample")
    shape = samples[0].U.shape
    for i, m in enumerate(samples):
        if m.U.shape != shape:
            raise ValueError(f"sample {i} has shape {m.U.shape}, expected {shape}")
    return samples


def _check_grassmann_samples(samples):
    samples = list(samples)
    if not samples:
        raise ValueError("need at least one sample")
    p, k = samples[0].p, samples[0].k
    for i, m in enumerate(samples):
        if m.p != p or m.k != k:
            raise ValueError(
                f"sample {i} is on Gr({m.p},{m.k}), expected Gr({p},{k})"
            )
    return samples


# -- closed-form projected means --------------------------------------------

def proj_mean_polar(samples) -> st.StiefelPoint:
    """Polar projection of the arithmetic mean of Stiefel samples.

    This is the fixed point of the (polar projection, tangent
    projection) pair: the averaged tangent-projection lifting vanishes
    there identically.
    """
    samples = _check_stiefel_samples(samples)
    acc = np.zeros_like(samples[0].U)
    for m in samples:
        acc += m.U
    return st.proj_to_stiefel(acc / len(samples))


def proj_mean_qr(samples) -> st.StiefelPoint:
    """QR projection qf(mean) of Stiefel samples (positive-diagonal
    convention); fixed point of the differential-based QR lifting."""
    samples = _check_stiefel_samples(samples)
    acc = np.zeros_like(samples[0].U)
    for m in samples:
        acc += m.U
    return st.StiefelPoint(linalg.qr_positive(acc / len(samples))[0])


def proj_mean_grassmann(samples) -> gr.GrassmannPoint:
    """Nearest rank-k projector to the arithmetic mean of projectors."""
    samples = _check_grassmann_samples(samples)
    acc = np.zeros_like(samples[0].P)
    for m in samples:
        acc += m.P
    return gr.proj_to_grassmann(acc / len(samples), samples[0].k)


# -- iterative baselines -----------------------------------------------------
#
# The liftings below run once per sample per sweep, so they go straight
# to the kernel backend; their inputs are slices of already-validated
# points and the public operations in `stiefel` keep the checked
# contracts for direct callers.

def _lift_inv_polar(g, m):
    s = backend.kernels.solve_sym_product(g.U.T @ m.U)
    return m.U @ s - g.U


def _lift_inv_qr(g, m):
    r = backend.kernels.solve_upper_from_sym(g.U.T @ m.U)
    return m.U @ r - g.U


def _lift_tangent_st(g, m):
    d = m.U - g.U
    a = g.U.T @ d
    return d - g.U @ (0.5 * (a + a.T))


def r_barycenter_polar(samples, controls=None) -> BarycenterResult:
    """R-barycenter of the polar retraction (lifting = exact inverse)."""
    samples = _check_stiefel_samples(samples)
    return rl_fixed_point(
        samples,
        retraction=lambda g, xi: st.proj_to_stiefel(g.U + xi),
        lifting=_lift_inv_polar,
        controls=controls,
    )


def r_barycenter_qr(samples, controls=None) -> BarycenterResult:
    """R-barycenter of the QR retraction (lifting = exact inverse)."""
    samples = _check_stiefel_samples(samples)
    return rl_fixed_point(
        samples,
        retraction=lambda g, xi: st.StiefelPoint(
            linalg.qr_positive(g.U + xi)[0]
        ),
        lifting=_lift_inv_qr,
        controls=controls,
    )


def r_barycenter_orthographic(samples, controls=None) -> BarycenterResult:
    """R-barycenter of the orthographic retraction.

    Its lifting is the plain tangent projection of M - G, so by the
    closed-form characterization this iteration and ``proj_mean_polar``
    share their fixed point.
    """
    samples = _check_stiefel_samples(samples)
    return rl_fixed_point(
        samples,
        retraction=lambda g, xi: st.retract_orthographic(
            g, st.StiefelTangent(g, xi)
        ),
        lifting=_lift_tangent_st,
        controls=controls,
    )


def riemannian_mean_grassmann(samples, controls=None) -> BarycenterResult:
    """Riemannian (Frechet) mean on the Grassmann manifold.

    Classical fixed point G <- exp_G(mean of log_G(M_i)) on subspace
    representatives, started from the first sample; the recorded
    objective history (sum of squared log norms per sweep) is
    non-increasing while the iteration contracts.
    """
    samples = _check_grassmann_samples(samples)
    reps = [gr.stiefel_representative(m) for m in samples]
    result = rl_fixed_point(
        reps,
        retraction=gr.gr_exp,
        lifting=gr.gr_log,
        controls=controls,
        track_objective=True,
    )
    return replace(result, point=gr.stiefel_to_grassmann(result.point))
