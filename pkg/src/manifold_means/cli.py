"""Command-line interface.

Two subcommands:

* ``experiment`` -- run a Monte Carlo sweep and write a CSV of
  per-sample-size quantiles (optionally in decibels).
* ``mean`` -- average the sample matrices from a plain-text file with a
  chosen estimator and write the result in the same format.

Exit codes: 0 on success, 1 on runtime failure (partial output files
are removed), 2 on malformed flags, configuration or input data.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import tempfile

from . import simulation as sim
from .barycenter import SolverControls
from .errors import InvalidPoint, ManifoldMeansError
from .grassmann import GrassmannPoint
from .stiefel import StiefelPoint


class UsageError(Exception):
    """Bad flags, configuration or input data (exit code 2)."""


# -- experiment --------------------------------------------------------------

def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise UsageError(f"{flag} expects a comma-separated list of integers, "
                         f"got {text!r}") from exc


def _fmt_stat(value: float, db: bool) -> str:
    if db:
        if math.isnan(value):
            pass
        elif value > 0.0:
            value = 20.0 * math.log10(value)
        else:
            value = -math.inf
    return f"{value:.12g}"


def _write_csv(table: sim.ResultTable, path: str, db: bool) -> None:
    """Write the result table atomically (no partial file survives)."""
    header = ["n"]
    for name in table.estimators:
        header += [f"{name}_median", f"{name}_q10", f"{name}_q90"]
    failed = [name for name in table.estimators
              if any(table.stats(n, name).failures for n in table.n_values)]
    header += [f"{name}_failures" for name in failed]
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)),
                               suffix=".csv.part")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for n in table.n_values:
                row = [str(n)]
                for name in table.estimators:
                    stats = table.stats(n, name)
                    row += [_fmt_stat(stats.median, db),
                            _fmt_stat(stats.q10, db),
                            _fmt_stat(stats.q90, db)]
                row += [str(table.stats(n, name).failures) for name in failed]
                writer.writerow(row)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cmd_experiment(args) -> int:
    estimators = None
    if args.estimators is not None:
        estimators = tuple(tok.strip() for tok in args.estimators.split(",")
                           if tok.strip())
        if not estimators:
            raise UsageError("--estimators is empty")
    try:
        config = sim.ExperimentConfig(
            manifold=args.manifold,
            sigma=args.sigma,
            n_values=_parse_int_list(args.n_values, "--n-values"),
            n_trials=args.trials,
            seed=args.seed,
            p=args.p,
            k=args.k,
            estimators=estimators,
        )
        if args.jobs < 1:
            raise ValueError(f"--jobs must be >= 1, got {args.jobs}")
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    table = sim.run_experiment(config, jobs=args.jobs)
    _write_csv(table, args.out, db=args.db)
    return 0


# -- mean --------------------------------------------------------------------

def _read_blocks(path: str, manifold: str):
    """Parse the plain-text sample format: a 'p k n' header line then n
    blocks of p rows (k columns on Stiefel, p columns on Grassmann)."""
    try:
        with open(path) as fh:
            raw = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    lines = [ln for ln in raw.splitlines()
             if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise UsageError(f"{path} is empty")
    head = lines[0].split()
    if len(head) != 3:
        raise UsageError(f"header must be 'p k n', got {lines[0]!r}")
    try:
        p, k, n = (int(tok) for tok in head)
    except ValueError as exc:
        raise UsageError(f"header must be three integers, got {lines[0]!r}") from exc
    if p < 1 or not 1 <= k <= p or n < 1:
        raise UsageError(f"invalid dimensions p={p}, k={k}, n={n}")
    cols = k if manifold == "stiefel" else p
    body = lines[1:]
    if len(body) != n * p:
        raise UsageError(
            f"expected {n * p} data rows ({n} blocks of {p}), found {len(body)}"
        )
    samples = []
    for b in range(n):
        rows = []
        for r, ln in enumerate(body[b * p:(b + 1) * p]):
            toks = ln.split()
            if len(toks) != cols:
                raise UsageError(
                    f"sample block {b + 1}, row {r + 1}: expected {cols} "
                    f"columns, found {len(toks)}"
                )
            try:
                rows.append([float(tok) for tok in toks])
            except ValueError as exc:
                raise UsageError(
                    f"sample block {b + 1}, row {r + 1}: non-numeric entry"
                ) from exc
        try:
            if manifold == "stiefel":
                samples.append(StiefelPoint(rows))
            else:
                point = GrassmannPoint(rows)
                if point.k != k:
                    raise InvalidPoint(
                        f"projector rank {point.k} does not match header k={k}"
                    )
                samples.append(point)
        except InvalidPoint as exc:
            raise UsageError(f"sample block {b + 1}: {exc}") from exc
    return p, k, samples


def _write_mean(path: str, matrix, p: int, k: int, result) -> None:
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)),
                               suffix=".txt.part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(f"{p} {k} 1\n")
            for row in matrix:
                fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
            converged = "true" if result.converged else "false"
            fh.write(f"# converged={converged} iterations={result.iterations} "
                     f"residual={result.final_step_norm:.12g}\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cmd_mean(args) -> int:
    est = sim.ESTIMATORS.get(args.estimator)
    if est is None:
        known = ", ".join(sorted(sim.ESTIMATORS))
        raise UsageError(f"unknown estimator {args.estimator!r} (known: {known})")
    if est.manifold != args.manifold:
        raise UsageError(
            f"estimator {est.name!r} runs on {est.manifold}, not {args.manifold}"
        )
    try:
        controls = SolverControls(tol=args.tol, max_iter=args.max_iter)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    p, k, samples = _read_blocks(args.infile, args.manifold)
    result = est.run(samples, controls)
    if args.strict and est.iterative and not result.converged:
        print(
            f"manifold-means: {est.name} did not converge within "
            f"{args.max_iter} iterations (residual {result.final_step_norm:.3e})",
            file=sys.stderr,
        )
        return 1
    matrix = result.point.U if args.manifold == "stiefel" else result.point.P
    _write_mean(args.out, matrix, p, k, result)
    return 0


# -- parser ------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="manifold-means",
        description="Averaging on Stiefel and Grassmann manifolds, plus a "
                    "Monte Carlo benchmark of the available estimators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    exp = sub.add_parser("experiment", help="run a Monte Carlo sweep, write CSV")
    exp.add_argument("--manifold", required=True, choices=sim.MANIFOLDS)
    exp.add_argument("--p", type=int, default=10, help="ambient dimension")
    exp.add_argument("--k", type=int, default=5, help="subspace dimension")
    exp.add_argument("--sigma", type=float, required=True,
                     help="perturbation scale of the sampled datasets")
    exp.add_argument("--n-values", default="20,50,70,100,200,500",
                     help="comma-separated sample sizes")
    exp.add_argument("--trials", type=int, default=100,
                     help="Monte Carlo trials per sample size")
    exp.add_argument("--seed", type=int, default=0, help="master seed")
    exp.add_argument("--estimators", default=None,
                     help="comma-separated estimator names "
                          "(default: all for the manifold)")
    exp.add_argument("--out", required=True, help="output CSV path")
    exp.add_argument("--db", action="store_true",
                     help="report statistics as 20*log10(value)")
    exp.add_argument("--jobs", type=int, default=1,
                     help="worker processes (results are identical for any value)")
    exp.set_defaults(func=_cmd_experiment)

    mean = sub.add_parser("mean", help="average samples from a file")
    mean.add_argument("--manifold", required=True, choices=sim.MANIFOLDS)
    mean.add_argument("--estimator", required=True,
                      help="estimator name, e.g. proj_polar or Riem_mean")
    mean.add_argument("--in", dest="infile", required=True,
                      help="input sample file ('p k n' header, then n blocks)")
    mean.add_argument("--out", required=True, help="output path")
    mean.add_argument("--tol", type=float, default=1e-10,
                      help="fixed-point tolerance for iterative estimators")
    mean.add_argument("--max-iter", type=int, default=200,
                      help="iteration budget for iterative estimators")
    mean.add_argument("--strict", action="store_true",
                      help="exit 1 if an iterative estimator fails to converge")
    mean.set_defaults(func=_cmd_mean)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"manifold-means: error: {exc}", file=sys.stderr)
        return 2
    except (ManifoldMeansError, OSError) as exc:
        print(f"manifold-means: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
