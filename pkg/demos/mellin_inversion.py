"""Recover the arc-sine density from its Mellin transform and print a comparison table.

    python3 demos/mellin_inversion.py --rho 0.3
"""

import argparse

import numpy as np

from arcsine_levy import laws, mellin as me


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--rho", type=float, default=0.3)
    args = p.parse_args()

    m, law = me.arcsine_mellin(args.rho), laws.arcsine_law(args.rho)
    print(f"{'x':>6s} {'inverted':>14s} {'exact':>14s} {'error':>9s}")
    for x in np.linspace(0.05, 0.95, 10):
        f = me.invert_to_density(m, None, x)
        g = float(law.pdf(x))
        print(f"{x:6.3f} {f:14.10f} {g:14.10f} {abs(f - g):9.2e}")


if __name__ == "__main__":
    main()
