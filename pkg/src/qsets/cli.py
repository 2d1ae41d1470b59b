"""Command-line front end.

Every verb consumes JSON files in the schemas of the owning modules and
writes JSON to stdout (or ``--out``).  Exit codes: 0 on success, 1 on a
mathematical failure (law violation, violated precondition, failed check),
2 on malformed input.  All randomness flows from one seed; outputs are
deterministic given inputs and seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import coloring, laws, opalg, pred, qfun, qrel
from .errors import PreconditionError, SchemaError
from .linalg import Tolerance

EXIT_OK = 0
EXIT_MATH = 1
EXIT_INPUT = 2

CONFIG_ENV = "QSETS_CONFIG"


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON in {path}: {exc}")


def _emit(obj, out_path=None):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _tolerance(args) -> Tolerance:
    cfg = {}
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV)
    if path:
        cfg = _load_json(path)
        if not isinstance(cfg, dict):
            raise SchemaError("config must be a JSON object", path)
    rank_cut = args.rank_cut if args.rank_cut is not None else cfg.get("rank_cut", 1e-10)
    eq_tol = args.eq_tol if args.eq_tol is not None else cfg.get("eq_tol", 1e-8)
    try:
        return Tolerance(rank_cut=float(rank_cut), eq_tol=float(eq_tol))
    except (TypeError, ValueError, SchemaError) as exc:
        raise SchemaError(f"bad tolerance: {exc}")


def _cmd_laws(args):
    tol = _tolerance(args)
    if args.trials < 1:
        raise SchemaError("--trials must be >= 1")
    report = laws.run_laws(seed=args.seed, trials=args.trials,
                           max_atoms=args.max_atoms, max_dim=args.max_dim,
                           tol=tol, fault=args.inject_fault)
    _emit(report.to_json(), args.out)
    return EXIT_OK if report.passed else EXIT_MATH


def _cmd_check(args):
    tol = _tolerance(args)
    r = qrel.relation_from_json(_load_json(args.relation))
    witness = qfun.check_axioms(r, tol)
    _emit(witness.to_json(), args.out)
    return EXIT_OK


def _cmd_compose(args):
    tol = _tolerance(args)
    s = qrel.relation_from_json(_load_json(args.outer))
    r = qrel.relation_from_json(_load_json(args.inner))
    _emit(qrel.relation_to_json(qrel.compose(s, r, tol)), args.out)
    return EXIT_OK


def _cmd_star(args):
    tol = _tolerance(args)
    f = qrel.relation_from_json(_load_json(args.relation))
    b = opalg.blockop_from_json(_load_json(args.operator))
    img = opalg.star_map(f, b, tol)
    _emit(opalg.blockop_to_json(img), args.out)
    return EXIT_OK


def _cmd_fission(args):
    tol = _tolerance(args)
    f = qrel.relation_from_json(_load_json(args.relation))
    fi = opalg.fission_from_function(f, tol)
    _emit(opalg.fission_to_json(fi), args.out)
    return EXIT_OK


def _cmd_pred_image(args):
    tol = _tolerance(args)
    r = qrel.relation_from_json(_load_json(args.relation))
    p = pred.predicate_from_json(_load_json(args.predicate), tol=tol)
    if args.inverse:
        out = pred.inverse_image(r, p, tol)
    else:
        out = pred.direct_image(r, p, tol)
    _emit(pred.predicate_to_json(out), args.out)
    return EXIT_OK


def _cmd_corange(args):
    tol = _tolerance(args)
    g = qrel.relation_from_json(_load_json(args.relation))
    p = pred.corange(g, tol)
    result = {"corange": pred.predicate_to_json(p)}
    if args.factor:
        kp, f = pred.corange_factor(g, tol)
        result["compression"] = qrel.relation_to_json(kp)
        result["function"] = qrel.relation_to_json(f)
    _emit(result, args.out)
    return EXIT_OK


def _cmd_spectral(args):
    tol = _tolerance(args)
    a = opalg.blockop_from_json(_load_json(args.operator))
    values, f = opalg.spectral_function(a, tol)
    _emit({"eigenvalues": values, "function": qrel.relation_to_json(f)}, args.out)
    return EXIT_OK


def _cmd_coloring_verify(args):
    tol = _tolerance(args)
    g = coloring.graph_from_json(_load_json(args.graph))
    fam = coloring.family_from_json(_load_json(args.family))
    report = coloring.verify(g, fam, tol)
    _emit(report.to_json(), args.out)
    return EXIT_OK if report.passed else EXIT_MATH


def _cmd_coloring_search(args):
    tol = _tolerance(args)
    g = coloring.graph_from_json(_load_json(args.graph))
    fam = coloring.search(g, args.colors, args.dim, seed=args.seed,
                          restarts=args.restarts, sweeps=args.sweeps, tol=tol)
    if fam is None:
        _emit({"found": False,
               "note": "no certificate within budget; this is not a proof "
                       "of nonexistence"}, args.out)
        return EXIT_MATH
    _emit({"found": True, "family": coloring.family_to_json(fam)}, args.out)
    return EXIT_OK


def _add_common(p):
    p.add_argument("--config", help=f"config JSON path (default ${CONFIG_ENV})")
    p.add_argument("--rank-cut", type=float, dest="rank_cut", default=None)
    p.add_argument("--eq-tol", type=float, dest="eq_tol", default=None)
    p.add_argument("--out", help="write the JSON result here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsets",
        description="Finite quantum sets: relations, functions, duality, "
                    "predicates, and quantum graph colorings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("laws", help="run the randomized law suite")
    _add_common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--max-atoms", type=int, default=3)
    p.add_argument("--max-dim", type=int, default=3)
    p.add_argument("--inject-fault", choices=["dagger"], default=None,
                   help="negative control: corrupt an operation and expect failure")
    p.set_defaults(fn=_cmd_laws)

    p = sub.add_parser("check", help="classify a relation (function axioms)")
    _add_common(p)
    p.add_argument("relation")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("compose", help="compose two relations (outer o inner)")
    _add_common(p)
    p.add_argument("outer")
    p.add_argument("inner")
    p.set_defaults(fn=_cmd_compose)

    p = sub.add_parser("star", help="apply the induced *-homomorphism")
    _add_common(p)
    p.add_argument("relation")
    p.add_argument("operator")
    p.set_defaults(fn=_cmd_star)

    p = sub.add_parser("fission", help="the coisometry family of a partial function")
    _add_common(p)
    p.add_argument("relation")
    p.set_defaults(fn=_cmd_fission)

    p = sub.add_parser("pred-image", help="direct (or inverse) image of a predicate")
    _add_common(p)
    p.add_argument("relation")
    p.add_argument("predicate")
    p.add_argument("--inverse", action="store_true")
    p.set_defaults(fn=_cmd_pred_image)

    p = sub.add_parser("corange", help="domain of definition of a partial function")
    _add_common(p)
    p.add_argument("relation")
    p.add_argument("--factor", action="store_true",
                   help="also emit the compression factorization")
    p.set_defaults(fn=_cmd_corange)

    p = sub.add_parser("spectral", help="spectral function of a self-adjoint operator")
    _add_common(p)
    p.add_argument("operator")
    p.set_defaults(fn=_cmd_spectral)

    p = sub.add_parser("coloring", help="quantum graph colorings")
    csub = p.add_subparsers(dest="subcommand", required=True)

    pv = csub.add_parser("verify", help="verify a projection family against a graph")
    _add_common(pv)
    pv.add_argument("graph")
    pv.add_argument("family")
    pv.set_defaults(fn=_cmd_coloring_verify)

    ps = csub.add_parser("search", help="see-saw search for a coloring certificate")
    _add_common(ps)
    ps.add_argument("graph")
    ps.add_argument("--colors", type=int, required=True)
    ps.add_argument("--dim", type=int, required=True)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--restarts", type=int, default=200)
    ps.add_argument("--sweeps", type=int, default=500)
    ps.set_defaults(fn=_cmd_coloring_search)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
