#!/usr/bin/env python3
"""Timing comparison between the compiled and pure-Python stepping kernels.

Runs the three hot loops (averaged moments, direct phase-mode, direct with
true delays and counter-rotating terms) through both backends and reports
best-of-N wall times, the speedup, and the endpoint agreement.

Usage: python3 benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import time

import numpy as np

from gapburst._kernels import get_backend
from gapburst.averaged import integrate_averaged
from gapburst.couplings import coupling_vectors
from gapburst.dynamics import integrate_direct
from gapburst.geometry import chain, cubic


def cluster_ensemble(gamma1=1e-3):
    base = cubic(2, 0.05, u0=0.0j, s0=0.0)
    g_raw, _ = coupling_vectors(base)
    gamma_s = 10.0 / float(g_raw.mean())
    u0 = 1e-3
    s0 = np.sqrt(1.0 - 4.0 * u0**2)
    return cubic(
        2, 0.05, gamma_s=gamma_s, u0=u0 + 0.0j, s0=s0,
        gamma1=gamma1, zeta=s0,
    )


def case_averaged(backend):
    return integrate_averaged(
        g=10.0, alpha=1e-3, gamma1=1e-3, zeta=1.0, w0=1e-6, s0=1.0,
        t_end=1e4, dt=0.01, backend=backend,
    )


def case_direct(backend):
    return integrate_direct(
        cluster_ensemble(), t_end=3.0, dt=5e-4,
        record_every=10, backend=backend,
    )


def case_dde(backend):
    ens = chain(
        2, 0.5, omega0=40.0, u0=0.1 + 0.0j, s0=np.sqrt(1.0 - 0.04),
    )
    return integrate_direct(
        ens, t_end=5.0, dt=2e-3, retardation="full_dde",
        counter_rotating=True, record_every=10, backend=backend,
    )


CASES = (
    ("averaged_plateau", case_averaged),
    ("direct_cluster_burst", case_direct),
    ("direct_dde_counter", case_dde),
)


def best_time(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3,
                        help="repetitions per case (best time wins)")
    args = parser.parse_args()

    try:
        get_backend("cython")
        have_cython = True
    except ImportError:
        have_cython = False
        print("compiled extension not available; timing pure backend only\n")

    header = "%-22s %10s %10s %9s %12s" % (
        "case", "python", "cython", "speedup", "|ds_end|"
    )
    print(header)
    print("-" * len(header))
    for name, fn in CASES:
        t_py, r_py = best_time(lambda: fn("python"), args.repeat)
        if have_cython:
            t_cy, r_cy = best_time(lambda: fn("cython"), args.repeat)
            ds = abs(float(r_py.s_mean[-1]) - float(r_cy.s_mean[-1]))
            print("%-22s %9.3fs %9.3fs %8.1fx %12.2e"
                  % (name, t_py, t_cy, t_py / t_cy, ds))
        else:
            print("%-22s %9.3fs %10s %9s %12s"
                  % (name, t_py, "-", "-", "-"))


if __name__ == "__main__":
    main()
