"""Command line front end.

Subcommands
-----------
algebra        build a compact algebra and dump its structure constants
cohomology     build the bigraded model and print cohomology tables
flow           integrate the pluriclosed flow and write a CSV trace
solve-central  solve the central square system over the torus
verify         run the deterministic verification suite

Exit codes: 0 on success, 1 when a verification check fails, 2 on a
usage error such as bad flags or malformed input files.  The env var
SAMELSON_LAB_LOG selects the logging level (DEBUG, INFO, WARNING).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction

import numpy as np

from samelson_lab.bicomplex import complex_to_json
from samelson_lab.flow import (FlowConfig, endpoint_report, integrate_flow,
                               pluriclosed_perturbation, write_trace_csv)
from samelson_lab.geometry import as_metric
from samelson_lab.liealg import build_algebra, cartan_decomposition, cartan_to_json
from samelson_lab.samelson import (build_samelson_structure, default_torus_j,
                                   mixing_torus_j, product_torus_j,
                                   structure_to_json)
from samelson_lab.tanre import aeppli_h11, build_model, central_square_solve, torus_blocks
from samelson_lab.verify import (CheckResult, VerificationReport,
                                 run_verify_suite)

__all__ = [
    "CheckResult",
    "VerificationReport",
    "main",
    "run_verify_suite",
]

log = logging.getLogger("samelson_lab")

_TORUS_MAKERS = {
    "default": default_torus_j,
    "mixing": mixing_torus_j,
    "product": product_torus_j,
}


def _configure_logging() -> None:
    name = os.environ.get("SAMELSON_LAB_LOG", "WARNING").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _torus_j_from(spec: str, cd):
    maker = _TORUS_MAKERS.get(spec)
    if maker is not None:
        return maker(cd)
    with open(spec) as fh:
        raw = json.load(fh)
    if not isinstance(raw, list):
        raise ValueError("torus map file must hold a JSON matrix")
    return [[Fraction(str(x)) for x in row] for row in raw]


def _structure_from(args):
    cd = cartan_decomposition(build_algebra(args.group))
    S = build_samelson_structure(cd, torus_J=_torus_j_from(args.torus_j, cd))
    log.info("built %s, dimension %d, rank %d",
             args.group, cd.algebra.dimension, cd.rank)
    return S


def _metric_from(path: str, S):
    with open(path) as fh:
        raw = json.load(fh)
    rows = raw.get("g") if isinstance(raw, dict) else raw
    if not isinstance(rows, list):
        raise ValueError("metric file must hold a JSON matrix, or {\"g\": matrix}")
    return as_metric(np.array(rows, dtype=float), S)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
        log.info("wrote %s", out)
    else:
        print(text)


def _generator_section(model) -> dict:
    cd = model.structure.cartan
    ab = set(cd.abelian_coords)
    gens = []
    for i in range(model.coinv.dim(1)):
        gens.append({"name": "w%d" % (i + 1), "bidegree": [1, 1]})
    n_nu = n_psi = 0
    for row in model.eta:
        support = {l for l, c in enumerate(row) if not c.is_zero()}
        if support <= ab:
            n_psi += 1
            stem = "psi%d" % n_psi
        else:
            n_nu += 1
            stem = "nu%d" % n_nu
        coeffs = [str(c) for c in row]
        gens.append({"name": stem, "bidegree": [1, 0], "coefficients": coeffs})
        gens.append({"name": stem + "bar", "bidegree": [0, 1]})
    return {"generators": gens}


def _cmd_algebra(args) -> int:
    cd = cartan_decomposition(build_algebra(args.group))
    log.info("built %s, dimension %d", args.group, cd.algebra.dimension)
    data = cartan_to_json(cd)
    if args.full:
        S = build_samelson_structure(cd, torus_J=_torus_j_from(args.torus_j, cd))
        data = {"cartan": data["algebra"], "structure": structure_to_json(S)}
    _emit(json.dumps(data, indent=2, sort_keys=True), args.out)
    return 0


def _cmd_cohomology(args) -> int:
    S = _structure_from(args)
    model = build_model(S, truncation=args.truncation)
    lines = ["group %s, truncation %d" % (args.group, args.truncation)]
    for flavor in ("dolbeault", "conj_dolbeault", "bott_chern", "aeppli"):
        lines.append(flavor)
        for (p, q), d in sorted(model.table(flavor).items()):
            lines.append("  (%d,%d) %d" % (p, q, d))
    lines.append("de_rham")
    for k, d in sorted(model.table("de_rham").items()):
        lines.append("  %d %d" % (k, d))
    rep = aeppli_h11(model)
    lines.append("aeppli (1,1) dimension %d, central square dimension %d"
                 % (rep.dimension, rep.central.dimension))
    print("\n".join(lines))
    if args.out:
        data = {
            "group": args.group,
            "truncation": args.truncation,
            "complex": complex_to_json(model.complex),
        }
        data.update(_generator_section(model))
        _emit(json.dumps(data, indent=2, sort_keys=True), args.out)
    return 0


def _cmd_flow(args) -> int:
    S = _structure_from(args)
    if args.metric:
        g0 = _metric_from(args.metric, S)
    else:
        g0 = pluriclosed_perturbation(S, args.seed, amplitude=0.1)
        log.info("seeded pluriclosed perturbation, seed %d", args.seed)
    cfg = FlowConfig(dt=args.dt, t_max=args.t_max, eps_conv=args.tol)
    result = integrate_flow(g0, cfg)
    if args.out:
        write_trace_csv(result, args.out)
        log.info("wrote %s", args.out)
    print(json.dumps(endpoint_report(result), indent=2, sort_keys=True))
    return 0


def _cmd_central(args) -> int:
    S = _structure_from(args)
    blocks, ab = torus_blocks(S.cartan)
    rep = central_square_solve(S.torus_J, blocks, ab)
    data = {
        "dimension": rep.dimension,
        "full_dimension": rep.full_dimension,
        "trivial_dimension": rep.trivial_dimension,
        "b_equal": rep.b_equal,
        "identity_b": [str(b) for b in rep.identity_b],
        "antisym_kernel_dim": rep.antisym_kernel_dim,
    }
    if args.full:
        data["basis"] = [{
            "A": [[str(x) for x in row] for row in A],
            "b": [str(x) for x in b],
        } for A, b in rep.basis]
    _emit(json.dumps(data, indent=2, sort_keys=True), args.out)
    return 0


def _cmd_verify(args) -> int:
    rep = run_verify_suite(args.seed, only=args.only)
    print(rep.to_text())
    if args.out:
        _emit(rep.to_json(), args.out)
    elif args.full:
        print(rep.to_json())
    return 0 if rep.passed else 1


def _add_group(sp, torus: bool = True) -> None:
    sp.add_argument("--group", required=True,
                    help="group spec such as A2, A1+A1, or A2+T2")
    if torus:
        sp.add_argument("--torus-j", default="default",
                        help="default, mixing, product, or a JSON matrix path")


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="samelson-lab",
        description="compact-group complex structures, Bismut geometry, "
                    "and bigraded cohomology")
    sub = p.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("algebra", help="dump structure constants as JSON")
    _add_group(pa)
    pa.add_argument("--out", help="output path, stdout when absent")
    pa.add_argument("--full", action="store_true",
                    help="include the complex structure")
    pa.set_defaults(func=_cmd_algebra)

    pc = sub.add_parser("cohomology", help="print cohomology tables")
    _add_group(pc)
    pc.add_argument("--truncation", type=int, default=6,
                    help="trusted total degree of the model")
    pc.add_argument("--out", help="write the model JSON export here")
    pc.set_defaults(func=_cmd_cohomology)

    pf = sub.add_parser("flow", help="integrate the pluriclosed flow")
    _add_group(pf)
    pf.add_argument("--metric", help="JSON file with the initial metric; "
                    "a seeded perturbation when absent")
    pf.add_argument("--dt", type=float, default=0.02)
    pf.add_argument("--t-max", type=float, default=100.0)
    pf.add_argument("--tol", type=float, default=1e-8,
                    help="convergence threshold on the Ricci form")
    pf.add_argument("--seed", type=int, default=0)
    pf.add_argument("--out", help="CSV trace path")
    pf.set_defaults(func=_cmd_flow)

    ps = sub.add_parser("solve-central", help="solve the central square system")
    _add_group(ps)
    ps.add_argument("--out", help="output path, stdout when absent")
    ps.add_argument("--full", action="store_true",
                    help="include the essential solution basis")
    ps.set_defaults(func=_cmd_central)

    pv = sub.add_parser("verify", help="run the verification suite")
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--only", default="",
                    help="run only checks whose name starts with this prefix")
    pv.add_argument("--out", help="write the JSON report here")
    pv.add_argument("--full", action="store_true",
                    help="print the JSON report as well")
    pv.set_defaults(func=_cmd_verify)
    return p


def main(argv=None) -> int:
    _configure_logging()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as e:
        print("error: %s" % e, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
