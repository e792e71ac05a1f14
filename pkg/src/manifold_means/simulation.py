"""Monte Carlo harness: data generation, error measures, sweeps.

One experiment cell (a sample size n and a trial index) draws a random
center, perturbs it n times, runs every configured estimator from the
first sample, and records squared estimation errors.  Cells are seeded
individually with a counter-based generator keyed by (seed, n, trial),
so results are reproducible and independent of scheduling order or the
number of worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import barycenter as bc
from . import grassmann as gr
from . import stiefel as st
from .errors import ManifoldMeansError
from .linalg import expm_skew, qr_positive

MANIFOLDS = ("stiefel", "grassmann")


# -- data generation ---------------------------------------------------------

def sample_center_stiefel(p: int, k: int, rng) -> st.StiefelPoint:
    """Haar-distributed Stiefel point: first k columns of a random
    orthogonal matrix (QR of a Gaussian with positive-diagonal R)."""
    z = rng.standard_normal((p, p))
    q = qr_positive(z)[0]
    return st.StiefelPoint(q[:, :k])


def sample_perturbed(center: st.StiefelPoint, sigma: float, rng) -> st.StiefelPoint:
    """Rotate a center by expm(sigma * skew(Z)) with Z standard normal.

    The perturbation acts from the left on the whole frame, so it moves
    the subspace as well as the basis; sigma controls the spread.
    """
    z = rng.standard_normal((center.p, center.p))
    w = expm_skew(sigma * 0.5 * (z - z.T))
    return st.StiefelPoint(w @ center.U)


# -- error measures ----------------------------------------------------------

def err_st(center: st.StiefelPoint, estimate: st.StiefelPoint) -> float:
    """Squared Stiefel alignment error ||G.T Ghat - I||_F^2."""
    k = center.k
    return float(np.linalg.norm(center.U.T @ estimate.U - np.eye(k)) ** 2)


def err_gr(center: gr.GrassmannPoint, estimate: gr.GrassmannPoint) -> float:
    """Squared subspace error: sum of squared principal angles."""
    return gr.gr_distance_sq(center, estimate)


def quantiles(values, q: float) -> float:
    """Linear-interpolation quantile of a non-empty collection."""
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("quantile of an empty collection")
    return float(np.quantile(arr, q, method="linear"))


# -- estimator registry ------------------------------------------------------

@dataclass(frozen=True)
class Estimator:
    """A named barycenter method on one manifold.

    ``run(samples, controls)`` always returns a BarycenterResult;
    closed-form estimators report ``iterations=0`` with the averaged
    lifting norm under their natural lifting as the residual.
    """

    name: str
    manifold: str
    iterative: bool
    run: object


def _closed_form(fn, lifting):
    def run(samples, controls):
        del controls  # closed forms take none
        point = fn(samples)
        residual = bc.mean_lifting_norm(samples, point, lifting)
        return bc.BarycenterResult(point, 0, residual, True)

    return run


def _lift_tangent_gr(point, m):
    return gr.tangent_project_gr(point, m.P - point.P).xi


ESTIMATORS: dict[str, Estimator] = {
    "R_polar": Estimator("R_polar", "stiefel", True, bc.r_barycenter_polar),
    "R_qr": Estimator("R_qr", "stiefel", True, bc.r_barycenter_qr),
    "R_orthographic": Estimator(
        "R_orthographic", "stiefel", True, bc.r_barycenter_orthographic
    ),
    "proj_polar": Estimator(
        "proj_polar", "stiefel", False,
        _closed_form(bc.proj_mean_polar,
                     lambda g, m: st.lift_orthographic(g, m).xi),
    ),
    "proj_qr": Estimator(
        "proj_qr", "stiefel", False,
        _closed_form(bc.proj_mean_qr,
                     lambda g, m: st.lift_qr_differential(g, m).xi),
    ),
    "Riem_mean": Estimator(
        "Riem_mean", "grassmann", True, bc.riemannian_mean_grassmann
    ),
    "proj_evd": Estimator(
        "proj_evd", "grassmann", False,
        _closed_form(bc.proj_mean_grassmann, _lift_tangent_gr),
    ),
}

DEFAULT_ESTIMATORS: dict[str, tuple[str, ...]] = {
    "stiefel": ("R_polar", "R_qr", "proj_polar", "proj_qr"),
    "grassmann": ("Riem_mean", "proj_evd"),
}


# -- experiment configuration and results ------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one Monte Carlo sweep."""

    manifold: str
    sigma: float
    n_values: tuple[int, ...]
    n_trials: int
    seed: int
    p: int = 10
    k: int = 5
    estimators: tuple[str, ...] | None = None
    controls: bc.SolverControls = field(default_factory=bc.SolverControls)

    def __post_init__(self):
        if self.manifold not in MANIFOLDS:
            raise ValueError(f"manifold must be one of {MANIFOLDS}")
        if not 1 <= self.k <= self.p:
            raise ValueError(f"need 1 <= k <= p, got k={self.k}, p={self.p}")
        if self.manifold == "grassmann" and self.k >= self.p:
            raise ValueError("grassmann experiments need k < p")
        if not self.sigma > 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        n_values = tuple(int(n) for n in self.n_values)
        if not n_values or any(n < 1 for n in n_values):
            raise ValueError(f"n_values must be positive, got {n_values}")
        if len(set(n_values)) != len(n_values):
            raise ValueError("n_values contains duplicates")
        object.__setattr__(self, "n_values", n_values)
        if self.n_trials < 1:
            raise ValueError(f"n_trials must be >= 1, got {self.n_trials}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        names = self.estimators
        if names is None:
            names = DEFAULT_ESTIMATORS[self.manifold]
        names = tuple(names)
        for name in names:
            est = ESTIMATORS.get(name)
            if est is None:
                raise ValueError(f"unknown estimator {name!r}")
            if est.manifold != self.manifold:
                raise ValueError(
                    f"estimator {name!r} runs on {est.manifold}, "
                    f"not {self.manifold}"
                )
        if len(set(names)) != len(names):
            raise ValueError("estimators contains duplicates")
        object.__setattr__(self, "estimators", names)


@dataclass(frozen=True)
class CellStats:
    """Quantile summary of one (n, estimator) cell."""

    median: float
    q10: float
    q90: float
    failures: int

    def __post_init__(self):
        if not math.isnan(self.median):
            if not self.q10 <= self.median <= self.q90:
                raise ValueError(
                    f"quantiles out of order: {self.q10}, {self.median}, {self.q90}"
                )


@dataclass(frozen=True)
class ResultTable:
    """Aggregated sweep results, keyed by (n, estimator name)."""

    n_values: tuple[int, ...]
    estimators: tuple[str, ...]
    n_trials: int
    cells: dict

    def stats(self, n: int, estimator: str) -> CellStats:
        return self.cells[(n, estimator)]


def _run_cell(config: ExperimentConfig, n: int, trial: int):
    """Errors of every configured estimator on one synthetic dataset
    (None where the estimator raised)."""
    ss = np.random.SeedSequence((config.seed, n, trial))
    rng = np.random.Generator(np.random.Philox(ss))
    center = sample_center_stiefel(config.p, config.k, rng)
    samples = [sample_perturbed(center, config.sigma, rng) for _ in range(n)]
    if config.manifold == "grassmann":
        center_m = gr.stiefel_to_grassmann(center)
        samples_m = [gr.stiefel_to_grassmann(u) for u in samples]
        measure = err_gr
    else:
        center_m, samples_m, measure = center, samples, err_st
    out = []
    for name in config.estimators:
        try:
            result = ESTIMATORS[name].run(samples_m, config.controls)
            out.append(measure(center_m, result.point))
        except ManifoldMeansError:
            out.append(None)
    return out


def _run_cell_packed(args):
    config, n, trial = args
    return _run_cell(config, n, trial)


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> ResultTable:
    """Run the full sweep and aggregate per-cell quantiles.

    ``jobs`` > 1 distributes cells over worker processes; because each
    cell re-seeds from (seed, n, trial), the aggregate is identical for
    every jobs value.
    """
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    cells = [(n, t) for n in config.n_values for t in range(config.n_trials)]
    if jobs == 1:
        raw = [_run_cell(config, n, t) for n, t in cells]
    else:
        tasks = [(config, n, t) for n, t in cells]
        chunk = max(1, len(tasks) // (jobs * 4))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            raw = list(pool.map(_run_cell_packed, tasks, chunksize=chunk))
    per_cell: dict[tuple[int, str], list] = {
        (n, name): [] for n in config.n_values for name in config.estimators
    }
    for (n, _), errors in zip(cells, raw):
        for name, err in zip(config.estimators, errors):
            per_cell[(n, name)].append(err)
    table = {}
    for key, errors in per_cell.items():
        values = [e for e in errors if e is not None]
        failures = len(errors) - len(values)
        if values:
            stats = CellStats(
                median=quantiles(values, 0.5),
                q10=quantiles(values, 0.1),
                q90=quantiles(values, 0.9),
                failures=failures,
            )
        else:
            nan = float("nan")
            stats = CellStats(nan, nan, nan, failures)
        table[key] = stats
    return ResultTable(config.n_values, config.estimators, config.n_trials, table)
