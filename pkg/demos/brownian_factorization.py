"""Simulate the exponential functionals of a Brownian motion with drift and its dual.

Prints the KS statistics of the arc-sine and Pareto factorizations and the
comparison of each functional with its exact (Dufresne) law.

    python3 demos/brownian_factorization.py --rho 0.4 --n 4000
"""

import argparse

from arcsine_levy import exponent as ex, simulate as sim, verify as V


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--rho", type=float, default=0.4)
    p.add_argument("--n", type=int, default=4000)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    # Psi(z) = a z + z^2/2 has its positive root at rho = -2a
    psi = ex.brownian(-args.rho / 2)
    rep = V.check_main_theorem(psi, "paths", n=args.n, seed=args.seed, path_config=sim.PathConfig(dt=args.dt))
    print(rep.summary())
    for t in rep.tests:
        p_txt = "" if t.p_value is None else f"  p={t.p_value:.3g}"
        print(f"  {t.kind:8s} {t.name:28s} stat={t.statistic:.4g}{p_txt}  {'ok' if t.passed else 'FAILED'}")


if __name__ == "__main__":
    main()
