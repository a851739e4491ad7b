"""Command-line surface: inspect, realize, check-flat, verify-identities,
jacobian, move, invariant, compare.

Every command prints one JSON report to stdout and exits 0 when all
requested checks pass, 1 on a failed check or input error, 2 on usage
errors.  Reports echo the effective tolerances and seeds; apart from the
timing field they are byte-identical across runs with equal inputs.
"""
from __future__ import annotations

import argparse
import sys
import time

from . import identities, invariants
from .complexes import pachner_33
from .errors import Pachner33Error
from .flatmetric import FLATNESS_TOL, check_flat, random_realization, realize
from .io import ComplexDocument, dumps, load_document, serialize_complex
from .jacobians import PIVOT_TOL, build_jacobians, rank_and_submatrix


def _report(command, args, **fields):
    rep = {
        "command": command,
        "inputs": {"file": getattr(args, "file", None)},
        "seed": getattr(args, "seed", None),
        "tolerances": fields.pop("tolerances", {}),
    }
    rep.update(fields)
    return rep


def _emit(rep, t0):
    rep["timing_s"] = time.perf_counter() - t0
    sys.stdout.write(dumps(rep) + "\n")


def _coords_for(doc, args, c):
    coords = doc.realization()
    if coords is None:
        if getattr(args, "seed", None) is None:
            raise Pachner33Error("document has no coords; pass --seed to realize")
        coords = random_realization(c, seed=args.seed)
    return coords


def _selection_fields(sel):
    return {
        "rank": sel.rank,
        "det": sel.det,
        "rows": [list(k) for k in sel.row_keys],
        "cols": [list(k) for k in sel.col_keys],
        "rows_complement": [list(k) for k in sel.row_comp_keys],
        "cols_complement": [list(k) for k in sel.col_comp_keys],
    }


def cmd_inspect(args, t0):
    doc = load_document(args.file)
    c = doc.to_complex()
    fv = c.f_vector()
    rep = _report(
        "inspect",
        args,
        counts={
            "vertices": fv[0],
            "edges": fv[1],
            "triangles": fv[2],
            "tetrahedra": fv[3],
            "simplices": fv[4],
        },
        euler_characteristic=c.euler_characteristic(),
        closed=c.is_closed,
        orientation_consistent=c.orientation_consistent,
        has_coords=doc.coords is not None,
    )
    _emit(rep, t0)
    return 0 if (c.is_closed and c.orientation_consistent) else 1


def cmd_realize(args, t0):
    doc = load_document(args.file)
    c = doc.to_complex()
    coords = random_realization(c, seed=args.seed)
    out = serialize_complex(doc.with_coords(coords))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
        rep = _report("realize", args, output=args.output)
        _emit(rep, t0)
    else:
        sys.stdout.write(out)
    return 0


def cmd_check_flat(args, t0):
    doc = load_document(args.file)
    c = doc.to_complex()
    coords = _coords_for(doc, args, c)
    m = realize(c, coords)
    if args.perturb:
        u, v, amount = args.perturb.split(",")
        key = tuple(sorted((int(u), int(v))))
        L = dict(m.L)
        if key not in L:
            raise Pachner33Error(f"{key} is not an edge of the complex")
        L[key] += float(amount)
        m = m.with_lengths(L, c)
    flat = check_flat(c, m, tol=args.tol)
    rep = _report(
        "check-flat",
        args,
        tolerances={"flatness": args.tol},
        passed=flat.passed,
        max_omega=flat.max_omega,
        max_Omega=flat.max_Omega,
        bad_faces=[list(f) for f in flat.bad_faces],
        bad_edges=[list(e) for e in flat.bad_edges],
        perturb=args.perturb,
    )
    _emit(rep, t0)
    return 0 if flat.passed else 1


def cmd_verify_identities(args, t0):
    results = identities.run_all_batteries(trials=args.trials, seed=args.seed, tol=args.tol)
    rep = _report(
        "verify-identities",
        args,
        tolerances={"identity": args.tol},
        trials=args.trials,
        checks=[
            {
                "name": r.name,
                "passed": r.passed,
                "max_residual": r.max_residual,
                "failures": r.failures,
                "extras": r.extras,
            }
            for r in results
        ],
    )
    _emit(rep, t0)
    return 0 if all(r.passed for r in results) else 1


def cmd_jacobian(args, t0):
    doc = load_document(args.file)
    c = doc.to_complex()
    coords = _coords_for(doc, args, c)
    m = realize(c, coords)
    jac = build_jacobians(c, m, richardson=True)
    sel = rank_and_submatrix(jac.dOmega_dL, tol=args.pivot_tol).with_keys(
        c.faces[2], c.faces[1]
    )
    sym = jac.symmetry_residual()
    conj = jac.conjugacy_residual()
    rep = _report(
        "jacobian",
        args,
        tolerances={"residual": args.tol, "pivot": args.pivot_tol},
        rank=sel.rank,
        symmetry_residual=sym,
        conjugacy_residual=conj,
        selection=_selection_fields(sel),
        matrices={
            "face_keys": [list(k) for k in jac.face_keys],
            "edge_keys": [list(k) for k in jac.edge_keys],
            "dOmega_dL": jac.dOmega_dL.tolist(),
            "dOmega_dS": jac.dOmega_dS.tolist(),
            "dBigOmega_dS": jac.dBigOmega_dS.tolist(),
        },
    )
    _emit(rep, t0)
    return 0 if (sym <= args.tol and conj <= args.tol) else 1


def cmd_move(args, t0):
    doc = load_document(args.file)
    c = doc.to_complex()
    t = tuple(int(v) for v in args.face.split(","))
    moved, record = pachner_33(c, t)
    out_doc = ComplexDocument(
        simplices=[list(moved.oriented_simplex(i)) for i in range(len(moved.simplices))],
        metadata=dict(doc.metadata),
    )
    if doc.coords is not None:
        out_doc = out_doc.with_coords(doc.realization())
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(serialize_complex(out_doc))
    rep = _report(
        "move",
        args,
        face=list(record.old_face),
        new_face=list(record.new_face),
        removed=list(record.removed),
        added=list(record.added),
        six_vertices=list(record.six_vertices),
        output=args.output,
        moved=None if args.output else serialize_complex(out_doc).strip(),
    )
    _emit(rep, t0)
    return 0


def cmd_invariant(args, t0):
    doc = load_document(args.file)
    c = doc.to_complex()
    coords = _coords_for(doc, args, c)
    m = realize(c, coords)
    report = invariants.full_invariant(c, m, pivot_tol=args.pivot_tol, richardson=True)
    rep = _report(
        "invariant",
        args,
        tolerances={"pivot": args.pivot_tol},
        value=report.value,
        abs_value=abs(report.value),
        prod_S=report.prod_S,
        prod_V=report.prod_V,
        selection=_selection_fields(report.selection),
    )
    _emit(rep, t0)
    return 0


def cmd_compare(args, t0):
    doc = load_document(args.file)
    c = doc.to_complex()
    coords = _coords_for(doc, args, c)
    t = tuple(int(v) for v in args.face.split(","))
    report = invariants.compare_under_move(c, coords, t, pivot_tol=args.pivot_tol)
    mc = report.move_context
    passed = mc.deviation <= args.tol
    rep = _report(
        "compare",
        args,
        tolerances={"ratio": args.tol, "pivot": args.pivot_tol},
        face=list(mc.old_face),
        new_face=list(mc.new_face),
        value_before=mc.value_before,
        value_after=mc.value_after,
        ratio=mc.ratio,
        deviation=mc.deviation,
        materialized=mc.materialized,
        passed=passed,
        selection=_selection_fields(report.selection),
    )
    _emit(rep, t0)
    return 0 if passed else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pachner33",
        description="Geometric invariants of 3->3 moves on triangulated 4-manifolds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, needs_file=True):
        p = sub.add_parser(name)
        if needs_file:
            p.add_argument("file", help="complex document (JSON)")
        p.set_defaults(fn=fn)
        return p

    add("inspect", cmd_inspect)

    p = add("realize", cmd_realize)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output", "-o", default=None)

    p = add("check-flat", cmd_check_flat)
    p.add_argument("--tol", type=float, default=FLATNESS_TOL)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--perturb", default=None, metavar="U,V,AMOUNT",
                   help="add AMOUNT to the squared length of edge (U, V) first")

    p = add("verify-identities", cmd_verify_identities, needs_file=False)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=identities.DEFAULT_TOL)

    p = add("jacobian", cmd_jacobian)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=float, default=identities.DEFAULT_TOL)
    p.add_argument("--pivot-tol", type=float, default=PIVOT_TOL)

    p = add("move", cmd_move)
    p.add_argument("--face", required=True, metavar="A,B,C")
    p.add_argument("--output", "-o", default=None)

    p = add("invariant", cmd_invariant)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--pivot-tol", type=float, default=PIVOT_TOL)

    p = add("compare", cmd_compare)
    p.add_argument("--face", required=True, metavar="A,B,C")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=float, default=identities.DEFAULT_TOL)
    p.add_argument("--pivot-tol", type=float, default=PIVOT_TOL)

    return parser


def main(argv=None):
    t0 = time.perf_counter()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args, t0)
    except Pachner33Error as exc:
        rep = {
            "command": args.command,
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }
        sys.stdout.write(dumps(rep) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
