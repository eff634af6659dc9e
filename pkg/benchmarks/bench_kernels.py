"""Compiled vs pure-NumPy trajectory kernel.

Runs the same ensemble with both kernels and reports wall time, the speedup
and the largest difference between the ensemble means.

    python benchmarks/bench_kernels.py [--n-mom 16] [--n-traj 20] [--t-max 100]
"""

import argparse
import time

import numpy as np

from ringcav import kernel
from ringcav.params import SystemParams
from ringcav.quantum import HilbertSpace, build_model, hot_momentum, momentum_state, run_ensemble


def timed(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-mom", type=int, default=16)
    ap.add_argument("--n-fock", type=int, default=4)
    ap.add_argument("--n-traj", type=int, default=20)
    ap.add_argument("--t-max", type=float, default=100.0)
    ap.add_argument("--n-samples", type=int, default=201)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    p = SystemParams.from_trap_frequency(6.0, -6.0, 0.01, 0.25)
    space = HilbertSpace(n_mom=args.n_mom, n_fock_sine=args.n_fock)
    model = build_model(p, space)
    psi0 = momentum_state(model, hot_momentum(space, p.omega_rec, 25.0))
    print(f"dim={model.dim} n_traj={args.n_traj} t_max={args.t_max} backend={kernel.BACKEND}")

    results = {}
    kernels = {"python": kernel.fallback_advance}
    if kernel.BACKEND == "compiled":
        kernels["compiled"] = kernel.advance
    for name, adv in kernels.items():
        dt, stats = timed(lambda: run_ensemble(model, psi0, args.n_traj, 1, args.t_max,
                                               args.n_samples, workers=1, advance=adv),
                          args.repeat)
        results[name] = (dt, stats)
        print(f"{name:>9}: {dt:8.3f} s  ({dt / args.n_traj * 1e3:.1f} ms/trajectory)")
    if "compiled" in results:
        tp, sp_ = results["python"][0], results["compiled"][0]
        diff = max(float(np.max(np.abs(results["python"][1].mean[k] - results["compiled"][1].mean[k])))
                   for k in results["python"][1].mean)
        print(f"  speedup: {tp / sp_:.2f}x   max |mean difference|: {diff:.3e}")
    else:
        print("compiled kernel not built; run `pip install -e . --no-build-isolation`")


if __name__ == "__main__":
    main()
