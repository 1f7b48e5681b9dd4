#!/usr/bin/env python3
"""Scan the coupled metric family on su(3) + torus for Bismut flatness.

Walks a grid in the two scale parameters and the coupling, reporting
the curvature norm, the bi-invariance defect, and the distance to the
positivity wall alpha * beta = 4 |u|^2.

Usage: python3 scripts/family_scan.py [--steps 5] [--umax 0.45]
"""
from __future__ import annotations

import argparse

from samelson_lab.geometry import (biinvariance_residual, curvature_report,
                                   su3_torus_family)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=5)
    ap.add_argument("--umax", type=float, default=0.45)
    args = ap.parse_args()

    print("%6s %6s %6s %12s %12s %10s" % (
        "alpha", "beta", "u", "flat", "binv", "wall"))
    for i in range(1, args.steps + 1):
        alpha = i / args.steps * 2.0
        for j in range(1, args.steps + 1):
            beta = j / args.steps * 2.0
            for k in range(args.steps + 1):
                u = k / args.steps * args.umax
                wall = alpha * beta - 4.0 * u * u
                if wall <= 0:
                    continue
                S, g = su3_torus_family(alpha, beta, u)
                rep = curvature_report(g)
                print("%6.2f %6.2f %6.2f %12.2e %12.2e %10.2e" % (
                    alpha, beta, u, rep.bismut_flat_norm,
                    biinvariance_residual(g), wall))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
