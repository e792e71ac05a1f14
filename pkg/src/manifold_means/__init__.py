"""Averaging on the Stiefel and Grassmann manifolds.

Closed-form projected arithmetic means (polar, QR, eigenprojector),
their characterization as retraction/lifting fixed points, iterative
R-barycenter and Riemannian-mean baselines, and a Monte Carlo harness
that benchmarks all of them on synthetic rotation-perturbed data.
"""

from .backend import available_backends, backend_name
from .barycenter import (
    BarycenterResult,
    SolverControls,
    mean_lifting_norm,
    proj_mean_grassmann,
    proj_mean_polar,
    proj_mean_qr,
    r_barycenter_orthographic,
    r_barycenter_polar,
    r_barycenter_qr,
    riemannian_mean_grassmann,
    rl_fixed_point,
)
from .errors import (
    CutLocus,
    EigenGapDegenerate,
    InvalidPoint,
    LiftingFailure,
    ManifoldMeansError,
    NoConvergence,
    RankDeficient,
    Unsolvable,
)
from .grassmann import (
    GrassmannPoint,
    GrassmannTangent,
    gr_distance_sq,
    gr_exp,
    gr_log,
    proj_to_grassmann,
    stiefel_representative,
    stiefel_to_grassmann,
    tangent_project_gr,
)
from .simulation import (
    DEFAULT_ESTIMATORS,
    ESTIMATORS,
    ExperimentConfig,
    ResultTable,
    err_gr,
    err_st,
    quantiles,
    run_experiment,
    sample_center_stiefel,
    sample_perturbed,
)
from .stiefel import (
    StiefelPoint,
    StiefelTangent,
    inv_retract_polar,
    inv_retract_qr,
    lift_orthographic,
    lift_qr_differential,
    orthonormal_complement,
    proj_to_stiefel,
    retract_orthographic,
    retract_polar,
    retract_qr,
    tangent_project,
)

__version__ = "0.1.0"

__all__ = [
    "BarycenterResult",
    "CutLocus",
    "DEFAULT_ESTIMATORS",
    "ESTIMATORS",
    "EigenGapDegenerate",
    "ExperimentConfig",
    "GrassmannPoint",
    "GrassmannTangent",
    "InvalidPoint",
    "LiftingFailure",
    "ManifoldMeansError",
    "NoConvergence",
    "RankDeficient",
    "ResultTable",
    "SolverControls",
    "StiefelPoint",
    "StiefelTangent",
    "Unsolvable",
    "available_backends",
    "backend_name",
    "err_gr",
    "err_st",
    "gr_distance_sq",
    "gr_exp",
    "gr_log",
    "inv_retract_polar",
    "inv_retract_qr",
    "lift_orthographic",
    "lift_qr_differential",
    "mean_lifting_norm",
    "orthonormal_complement",
    "proj_mean_grassmann",
    "proj_mean_polar",
    "proj_mean_qr",
    "proj_to_grassmann",
    "proj_to_stiefel",
    "quantiles",
    "r_barycenter_orthographic",
    "r_barycenter_polar",
    "r_barycenter_qr",
    "retract_orthographic",
    "retract_polar",
    "retract_qr",
    "riemannian_mean_grassmann",
    "rl_fixed_point",
    "run_experiment",
    "sample_center_stiefel",
    "sample_perturbed",
    "stiefel_representative",
    "stiefel_to_grassmann",
    "tangent_project",
    "tangent_project_gr",
]
