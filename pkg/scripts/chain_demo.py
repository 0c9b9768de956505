#!/usr/bin/env python3
"""Run the full inequality chain on a few period matrices and print slacks.

Usage: python scripts/chain_demo.py [--budget 65536]
"""

import argparse

import numpy as np

from mlk.bounds import EmbeddingSet, verify_chain
from mlk.siegel import validate_period_matrix


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--budget", type=int, default=65536)
    args = ap.parse_args()

    cases = {
        "tau = i": (1, validate_period_matrix([[0.0]], [[1.0]])),
        "tau = 1/2 + i": (1, validate_period_matrix([[0.5]], [[1.0]])),
        "tau = 2i": (1, validate_period_matrix([[0.0]], [[2.0]])),
        "Omega = i I_2": (2, validate_period_matrix(np.zeros((2, 2)), np.eye(2))),
    }
    for label, (g, om) in cases.items():
        report = verify_chain(EmbeddingSet(g, 1, [om]), budget=args.budget)
        print(f"\n== {label} ==")
        for e in report.entries:
            print(f"  {e.name:28s} lhs={e.lhs:+12.8f} rhs={e.rhs:+12.8f} "
                  f"slack={e.slack:+10.3e} {'ok' if e.passed else 'FAIL'}")
        print(f"  all passed: {report.all_passed}")


if __name__ == "__main__":
    main()
