#!/usr/bin/env python3
"""Scan the gap between the elliptic height oracle and the lattice bound.

For tau = iy the stable Faltings height has a closed form through the
modular discriminant, while the package produces the lower-bound term from
the injectivity diameter rho(iy). Their difference converges to
(1/2) ln(pi e / 6) ~ 0.176485 as y grows, which is what "the constant in
front of 1/rho^2 is sharp" looks like numerically.

Usage: python scripts/gap_scan.py [--ymax 100] [--points 40]
"""

import argparse
import math

import numpy as np

from mlk.bounds import height_term
from mlk.oracle import faltings_height_ec
from mlk.siegel import injectivity_diameter, validate_period_matrix


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ymax", type=float, default=100.0)
    ap.add_argument("--points", type=int, default=40)
    args = ap.parse_args()

    limit = 0.5 * math.log(math.pi * math.e / 6.0)
    print(f"{'y':>10} {'h(iy)':>14} {'bound term':>14} {'gap':>12} {'gap-limit':>12}")
    for y in np.geomspace(1.0, args.ymax, args.points):
        om = validate_period_matrix([[0.0]], [[y]])
        rho = injectivity_diameter(om)
        h = faltings_height_ec(1j * y)
        term = height_term(rho, 1)
        gap = h - term
        print(f"{y:10.3f} {h:14.8f} {term:14.8f} {gap:12.8f} {gap - limit:12.3e}")
    print(f"\nlimit (1/2) ln(pi e / 6) = {limit:.10f}")


if __name__ == "__main__":
    main()
