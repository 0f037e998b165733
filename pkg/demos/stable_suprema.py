"""Discretized stable suprema: KS distance to the arc-sine law under grid refinement.

One set of paths is simulated on the finest grid; coarser grids are nested
subsamples, so the distances at different resolutions share their noise.

    python3 demos/stable_suprema.py --alpha 1 --rho 0.5 --levels 5
"""

import argparse

import numpy as np

from arcsine_levy import laws, simulate as sim, stats


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--nsteps", type=int, default=256, help="coarsest grid")
    p.add_argument("--levels", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    a, r = args.alpha, args.rho
    fine = args.nsteps << (args.levels - 1)
    m = sim.stable_suprema_nested(a, r, fine, args.n, args.seed, levels=args.levels)
    mh = sim.stable_suprema_nested(a, 1 - r, fine, args.n, args.seed + 1, levels=args.levels)
    law = laws.arcsine_law(r)
    print(f"{'nSteps':>8s} {'KS':>9s} {'p':>8s} {'zero sup':>9s}")
    for k in sorted(m):
        s = m[k] ** a + mh[k] ** a
        ok = s > 0  # both suprema vanish on a few coarse paths
        res = stats.ks_one_sample(m[k][ok] ** a / s[ok], law.cdf)
        zero = np.mean(m[k] == 0) + np.mean(mh[k] == 0)
        print(f"{k:8d} {res.statistic:9.5f} {res.pvalue:8.3g} {zero / 2:9.4f}")


if __name__ == "__main__":
    main()
