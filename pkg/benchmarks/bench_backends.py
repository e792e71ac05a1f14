"""Compare the pure-Python and compiled kernel backends.

Times each low-level kernel on representative inputs, then a composite
workload (an R-barycenter solve plus a small Monte Carlo sweep) with
each backend selected in-process.  Run from anywhere after installing
the package:

    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --p 40 --k 8 --min-time 0.5
"""

import argparse
import time

import numpy as np

from manifold_means import backend
from manifold_means import barycenter as bc
from manifold_means import simulation as sim
from manifold_means import stiefel as st


def time_call(fn, min_time: float) -> float:
    """Seconds per call, measured over enough repeats to fill min_time."""
    fn()  # warm up / fail fast
    n, elapsed = 1, 0.0
    while True:
        start = time.perf_counter()
        for _ in range(n):
            fn()
        elapsed = time.perf_counter() - start
        if elapsed >= min_time:
            return elapsed / n
        n *= 4


def kernel_cases(p: int, k: int, rng):
    """(name, args) pairs exercising every kernel in its valid regime."""
    x = rng.standard_normal((p, k))
    s = rng.standard_normal((p, p))
    z = rng.standard_normal((k, k))
    g = rng.standard_normal((k, k))
    u, _ = np.linalg.qr(rng.standard_normal((p, k)))
    v, _ = np.linalg.qr(rng.standard_normal((p, k)))
    return [
        ("polar_factor", (x,)),
        ("qr_positive", (x,)),
        ("sym_eig", (s + s.T,)),
        ("expm_skew", (0.5 * (s - s.T),)),
        ("solve_sym_product", (np.eye(k) + 0.1 * z,)),
        ("solve_upper_from_sym", (np.eye(k) + 0.05 * (z + z.T),)),
        # Riccati inputs kept inside the fixed point's contraction basin.
        ("solve_riccati", (0.08 * (z - z.T), 0.01 * (g @ g.T))),
        ("principal_angles", (u, v)),
    ]


def composite_cases(p: int, k: int, rng):
    q, _ = np.linalg.qr(rng.standard_normal((p, k)))
    center = st.StiefelPoint(q)
    samples = [sim.sample_perturbed(center, 0.5, rng) for _ in range(50)]

    def solve():
        bc.rl_fixed_point(
            samples,
            lambda pt, xi: st.retract_qr(pt, st.StiefelTangent(pt, xi)),
            lambda pt, m: st.inv_retract_qr(pt, m).xi,
        )

    config = sim.ExperimentConfig(
        manifold="stiefel",
        sigma=0.5,
        n_values=(50,),
        n_trials=2,
        seed=7,
        p=p,
        k=k,
    )
    return [
        ("R-barycenter (qr, n=50)", solve),
        ("sweep cell (2 trials)", lambda: sim.run_experiment(config)),
    ]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--p", type=int, default=10)
    parser.add_argument("--k", type=int, default=5)
    parser.add_argument("--min-time", type=float, default=0.2,
                        help="seconds of repeats per measurement")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    names = backend.available_backends()
    if names == ("python",):
        print("compiled backend not built; timing the python backend only")

    rng = np.random.default_rng(args.seed)
    rows = []
    for name, call_args in kernel_cases(args.p, args.k, rng):
        per = {}
        for backend_name in names:
            kernels = backend.get_kernels(backend_name)
            fn = getattr(kernels, name)
            per[backend_name] = time_call(
                lambda: fn(*call_args), args.min_time
            )
        rows.append((name, per))

    for label, fn in composite_cases(args.p, args.k, rng):
        per = {}
        for backend_name in names:
            backend.kernels = backend.get_kernels(backend_name)
            try:
                per[backend_name] = time_call(fn, args.min_time)
            finally:
                backend.kernels = backend.get_kernels(backend.BACKEND)
        rows.append((label, per))

    width = max(len(name) for name, _ in rows)
    header = f"{'benchmark'.ljust(width)}  {'python':>12}"
    if "compiled" in names:
        header += f"  {'compiled':>12}  {'speedup':>8}"
    print(f"\n(p, k) = ({args.p}, {args.k})")
    print(header)
    print("-" * len(header))
    for name, per in rows:
        line = f"{name.ljust(width)}  {_fmt(per['python']):>12}"
        if "compiled" in per:
            ratio = per["python"] / per["compiled"]
            line += f"  {_fmt(per['compiled']):>12}  {ratio:>7.2f}x"
        print(line)
    return 0


def _fmt(seconds: float) -> str:
    if seconds < 1e-3:
        return f"{seconds * 1e6:.2f} us"
    if seconds < 1.0:
        return f"{seconds * 1e3:.2f} ms"
    return f"{seconds:.3f} s"


if __name__ == "__main__":
    raise SystemExit(main())
