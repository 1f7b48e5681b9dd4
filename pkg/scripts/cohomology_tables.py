#!/usr/bin/env python3
"""Print bigraded cohomology tables for a list of groups.

Usage: python3 scripts/cohomology_tables.py [--groups A2 A1+A1 A2+T2]
"""
from __future__ import annotations

import argparse

from samelson_lab.liealg import build_algebra, cartan_decomposition
from samelson_lab.samelson import build_samelson_structure
from samelson_lab.tanre import aeppli_h11, build_model


def grid(table: dict) -> str:
    if not table:
        return "  (empty)"
    pmax = max(p for p, _q in table)
    qmax = max(q for _p, q in table)
    rows = ["     " + " ".join("q=%d" % q for q in range(qmax + 1))]
    for p in range(pmax + 1):
        cells = " ".join("%3d" % table.get((p, q), 0) for q in range(qmax + 1))
        rows.append("p=%d  %s" % (p, cells))
    return "\n".join(rows)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--groups", nargs="+",
                    default=["A2", "A1+A1", "A1+A1+A1+A1", "B2", "A2+T2"])
    ap.add_argument("--truncation", type=int, default=5)
    args = ap.parse_args()

    for spec in args.groups:
        S = build_samelson_structure(cartan_decomposition(build_algebra(spec)))
        M = build_model(S, truncation=args.truncation)
        print("== %s (truncation %d)" % (spec, args.truncation))
        for flavor in ("dolbeault", "bott_chern", "aeppli"):
            print(" %s" % flavor)
            print(grid(M.table(flavor)))
        rep = aeppli_h11(M)
        print(" aeppli (1,1): %d, central square: %d, metric classes: %s" % (
            rep.dimension, rep.central.dimension,
            [[str(c) for c in comp] for comp in rep.metric_coords]))
        print()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
