"""Command line entry point: ``matchkit <area> <command> ...``.

Every command prints a JSON document.  Exit codes: 0 success, 1 internal
consistency failure, 2 usage or input error, 3 result incomplete because a
budget or cap was hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import harness, intersectfam, matchgrp, matchlin
from .abelian import coset_structure, cyclic_phi_psi
from .errors import InternalTheoremViolation, MatchkitError, StructuralError
from .gfq import FieldTower, subfield_lattice
from .serial import (
    dumps,
    group_from_json,
    loads_maybe,
    span_from_json,
    subset_from_json,
    subspace_from_json,
    subspace_to_json,
    vector_from_json,
    vector_to_json,
)
from .subspace import VectorSpace

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_INCOMPLETE = 0, 1, 2, 3


def _int(text) -> int:
    """Integers, also written as 1e6."""
    if isinstance(text, int):
        return text
    value = float(text)
    if value != int(value):
        raise argparse.ArgumentTypeError(f"{text} is not an integer")
    return int(value)


def _int_list(text):
    text = loads_maybe(text)
    if isinstance(text, list):
        return [int(x) for x in text]
    return [int(x) for x in str(text).split(",") if x.strip()]


def _subspace(space, data):
    """{"basis": rows} must be RREF; a bare list of vectors is taken as a spanning set."""
    data = loads_maybe(data)
    if isinstance(data, dict):
        return subspace_from_json(space, data)
    return span_from_json(space, data)


def _subspace_list(space, data):
    data = loads_maybe(data)
    if not isinstance(data, list):
        raise StructuralError("expected a JSON list of subspaces")
    return [_subspace(space, d) for d in data]


def _tower(args) -> FieldTower:
    return FieldTower.from_q(args.q, args.n)


def _elem(g, e):
    return list(e) if g.rank > 1 else e[0]


# -- group ---------------------------------------------------------------------


def cmd_group_match(args):
    g = group_from_json(args.group)
    a = subset_from_json(g, args.set_a)
    b = subset_from_json(g, args.set_b)
    rep = matchgrp.deficiency(a, b)
    obstructions = matchgrp.coset_free_sufficiency(a, b)
    return {
        "group": g.to_dict(),
        "A": [_elem(g, x) for x in a],
        "B": [_elem(g, x) for x in b],
        "matched": rep.M == len(a),
        "M": rep.M,
        "D": rep.D,
        "matching": [[_elem(g, x), _elem(g, y)] for x, y in rep.matching],
        "hall_violator": [_elem(g, x) for x in rep.violator],
        "method": rep.method,
        "sumset_equals_A": rep.sumset_equals_a,
        "coset_obstructions": [
            {"b": _elem(g, y), "coset": [_elem(g, x) for x in c]} for y, c in obstructions
        ],
        "warnings": rep.warnings,
    }, EXIT_OK


def cmd_group_coset(args):
    g = group_from_json(args.group)
    a = subset_from_json(g, args.set_a)
    b = subset_from_json(g, args.set_b)
    res = coset_structure(a, b)
    out = {"group": g.to_dict(), "sumset_equals_A": res is not None}
    if res is not None:
        out["subgroup"] = [_elem(g, x) for x in res[0]]
        out["representative"] = _elem(g, res[1])
    return out, EXIT_OK


def cmd_group_cyclic(args):
    r = cyclic_phi_psi(args.p, args.r)
    return {"p": r.p, "r": r.r, "order": r.order, "psi": r.psi, "phi": r.phi}, EXIT_OK


# -- linear matchings ------------------------------------------------------------


def cmd_lin_basis_match(args):
    t = _tower(args)
    basis = [vector_from_json(t, v) for v in loads_maybe(args.basis)]
    a = span_from_json(t, [vector_to_json(t, v) for v in basis])
    b = _subspace(t, args.b)
    rep = matchlin.check_basis_matched(basis, a, b, mode=args.mode)
    return {
        "field": t.to_dict(),
        "matched": rep.matched,
        "violating_J": list(rep.violating_J) if rep.violating_J else None,
        "deficiency": rep.deficiency,
        "criterion_dims": {",".join(map(str, j)): d for j, d in rep.criterion_dims.items()},
        "partner_basis": [vector_to_json(t, v) for v in rep.partner_basis] if rep.partner_basis else None,
        "mode": rep.mode,
    }, EXIT_OK


def cmd_lin_subspace_match(args):
    t = _tower(args)
    a, b = _subspace(t, args.a), _subspace(t, args.b)
    res = matchlin.subspace_matched(a, b, budget=args.budget, seed=args.seed)
    obs = matchlin.translate_obstructions(a, b)
    out = {
        "field": t.to_dict(),
        "A": subspace_to_json(a),
        "B": subspace_to_json(b),
        "verdict": res.verdict,
        "exact": res.exact,
        "witness_basis": [vector_to_json(t, v) for v in res.witness] if res.witness else None,
        "bases_checked": res.bases_checked,
        "reason": res.reason,
        "product_span_equals_A": matchlin.product_span(a, b) == a,
        "B_primitive": matchlin.is_primitive(b),
        "translate_obstructions": [
            {"degree": o.degree, "b": vector_to_json(t, o.b), "x": vector_to_json(t, o.x)} for o in obs
        ],
    }
    return out, EXIT_OK if res.exact else EXIT_INCOMPLETE


# -- field structure -------------------------------------------------------------


def cmd_field_phi_psi(args):
    t = _tower(args)
    r = matchlin.psi_phi(t, mode=args.mode)
    return {
        "field": t.to_dict(),
        "psi": r.psi,
        "phi": r.phi,
        "witness": subspace_to_json(r.witness),
        "exhaustive": r.exhaustive,
        "method": r.method,
    }, EXIT_OK


def cmd_field_partition(args):
    t = _tower(args)
    plan = matchlin.build_partition(t, _int_list(args.dims) if args.dims else None)
    matchlin.verify_partition(t, plan)
    return {
        "field": t.to_dict(),
        "subfield_part": subspace_to_json(plan.subfield_part),
        "primitive_part": subspace_to_json(plan.primitive_part),
        "translated_parts": [
            {"i": i, "alpha": vector_to_json(t, t.from_code(c)), "part": subspace_to_json(p)}
            for (i, c), p in plan.translated_parts.items()
        ],
        "part_dims": [p.dim for p in plan.parts()],
        "nonzero_covered": sum(t.q**p.dim - 1 for p in plan.parts()),
    }, EXIT_OK


def cmd_field_max_trivial(args):
    t = _tower(args)
    fam = _subspace_list(t, args.family) if args.family else matchlin.proper_subfields(t)
    w = matchlin.max_trivial_intersector(t, fam)
    return {"field": t.to_dict(), "family_size": len(fam), "T": subspace_to_json(w), "dim": w.dim}, EXIT_OK


def cmd_field_lattice(args):
    t = _tower(args)
    return {
        "field": t.to_dict(),
        "subfields": [{"degree": d.d, "subspace": subspace_to_json(d.subspace)} for d in subfield_lattice(t)],
    }, EXIT_OK


# -- families ------------------------------------------------------------------------


def _family_inputs(args):
    if args.sets is not None:
        return "sets", intersectfam.SetFamily.of(args.universe, loads_maybe(args.sets), args.m)
    if args.subspaces is not None:
        space = VectorSpace(args.q, args.dim)
        return "subspaces", _subspace_list(space, args.subspaces)
    raise StructuralError("give --sets or --subspaces")


def _prop(res):
    return {"holds": res.holds, "violator": list(res.violator) if res.violator else None}


def cmd_fam_check(args):
    kind, fam = _family_inputs(args)
    if kind == "sets":
        return _prop(intersectfam.check_set_intersection_property(fam, "weak" if args.weak else "strict")), EXIT_OK
    return _prop(intersectfam.check_dimension_intersection_property(fam, args.m)), EXIT_OK


def cmd_fam_extend(args):
    kind, fam = _family_inputs(args)
    if kind == "sets":
        ext = intersectfam.extend_set_family(fam)
        return {"members": [list(s) for s in ext.members]}, EXIT_OK
    ext = intersectfam.extend_dimension_family(fam, args.m)
    return {"members": [subspace_to_json(s) for s in ext]}, EXIT_OK


def cmd_fam_transversal(args):
    space = VectorSpace(args.q, args.dim)
    res = intersectfam.free_transversal(_subspace_list(space, args.subspaces))
    return {
        "exists": res.exists,
        "vectors": [list(v) for v in res.vectors] if res.exists else None,
        "violator": list(res.violator) if res.violator else None,
    }, EXIT_OK


def cmd_fam_dual_basis(args):
    space = VectorSpace(args.q, args.dim)
    cert = intersectfam.dual_basis_pipeline(_subspace_list(space, args.subspaces))
    return {
        "family": [subspace_to_json(u) for u in cert.family],
        "basis": [list(v) for v in cert.basis],
        "functionals": [list(v) for v in cert.functionals],
        "kernels": [subspace_to_json(k) for k in cert.kernels],
    }, EXIT_OK


# -- conjecture harness ----------------------------------------------------------------


def _config(args) -> harness.RunConfig:
    return harness.RunConfig(
        seed=args.seed,
        basis_budget=args.budget,
        subset_cap=args.subset_cap,
        output_format=args.format,
        max_pairs=args.max_pairs,
        workers=args.workers,
    )


def cmd_conjecture_linear(args):
    t = _tower(args)
    cfg = _config(args)
    dims = _int_list(args.dims) if args.dims else None
    reports = list(harness.conjecture_linear_deficiency(t, dims, cfg))
    dicts = [r.to_dict() for r in reports]
    if args.verify:
        bad = [(d["index"], p) for d in dicts if (p := harness.verify_linear_case(d))]
        if bad:
            raise InternalTheoremViolation("report verifier rejected cases", cases=bad[:10])
    complete = all(d["enumeration_complete"] for d in dicts)
    return harness.report_emit(dicts, cfg.output_format), EXIT_OK if complete else EXIT_INCOMPLETE


def cmd_conjecture_divisor(args):
    cfg = _config(args)
    reports = list(harness.question_divisor_family(args.q, args.n, args.trials, cfg))
    complete = all(r.complete for r in reports if r.status == "evaluated")
    return harness.report_emit(reports, cfg.output_format), EXIT_OK if complete else EXIT_INCOMPLETE


# -- parser --------------------------------------------------------------------------


def _common(p, json_help="write JSON here instead of stdout (no value: stdout)"):
    p.add_argument("--input", help="JSON file whose keys supply any missing options")
    p.add_argument("--json", nargs="?", const="-", default=None, metavar="PATH", help=json_help)


def _field_args(p):
    p.add_argument("--q", type=_int)
    p.add_argument("--n", type=_int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matchkit", description="Matchings in groups and field extensions.")
    areas = parser.add_subparsers(dest="area", required=True)

    grp = areas.add_parser("group").add_subparsers(dest="command", required=True)
    for name, fn in (("match", cmd_group_match), ("coset", cmd_group_coset)):
        p = grp.add_parser(name)
        p.add_argument("--group", help="invariant factors, e.g. 6 or 2,3")
        p.add_argument("--set-a", dest="set_a", help="elements, e.g. 1,2,3 or [[0,1],[1,0]]")
        p.add_argument("--set-b", dest="set_b")
        _common(p)
        p.set_defaults(func=fn, required=("group", "set_a", "set_b"))
    p = grp.add_parser("cyclic")
    p.add_argument("--p", type=_int)
    p.add_argument("--r", type=_int)
    _common(p)
    p.set_defaults(func=cmd_group_cyclic, required=("p", "r"))

    lin = areas.add_parser("lin").add_subparsers(dest="command", required=True)
    p = lin.add_parser("basis-match")
    _field_args(p)
    p.add_argument("--basis", help="ordered basis of A as a JSON list of vectors")
    p.add_argument("--b", help="B as a spanning list or {\"basis\": RREF rows}")
    p.add_argument("--mode", choices=("exhaustive_J", "rado"), default="exhaustive_J")
    _common(p)
    p.set_defaults(func=cmd_lin_basis_match, required=("q", "n", "basis", "b"))
    p = lin.add_parser("subspace-match")
    _field_args(p)
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--budget", type=_int, default=matchlin.DEFAULT_BASIS_BUDGET)
    p.add_argument("--seed", type=_int, default=matchlin.DEFAULT_SEED)
    _common(p)
    p.set_defaults(func=cmd_lin_subspace_match, required=("q", "n", "a", "b"))

    fld = areas.add_parser("field").add_subparsers(dest="command", required=True)
    p = fld.add_parser("phi-psi")
    _field_args(p)
    p.add_argument("--mode", choices=("greedy", "exhaustive"), default="exhaustive")
    _common(p)
    p.set_defaults(func=cmd_field_phi_psi, required=("q", "n"))
    p = fld.add_parser("partition")
    _field_args(p)
    p.add_argument("--dims", help="dimensions t_i of the translated pieces, e.g. 1,1,1")
    _common(p)
    p.set_defaults(func=cmd_field_partition, required=("q", "n"))
    p = fld.add_parser("max-trivial-intersector")
    _field_args(p)
    p.add_argument("--family", help="JSON list of subspaces (default: proper subfields)")
    _common(p)
    p.set_defaults(func=cmd_field_max_trivial, required=("q", "n"))
    p = fld.add_parser("lattice")
    _field_args(p)
    _common(p)
    p.set_defaults(func=cmd_field_lattice, required=("q", "n"))

    fam = areas.add_parser("fam").add_subparsers(dest="command", required=True)
    for name, fn in (
        ("check", cmd_fam_check),
        ("extend", cmd_fam_extend),
        ("transversal", cmd_fam_transversal),
        ("dual-basis", cmd_fam_dual_basis),
    ):
        p = fam.add_parser(name)
        p.add_argument("--sets", help="JSON list of subsets of {1..universe}")
        p.add_argument("--universe", type=_int, help="universe size for --sets")
        p.add_argument("--subspaces", help="JSON list of subspaces of F_q^dim")
        p.add_argument("--q", type=_int, default=2)
        p.add_argument("--dim", type=_int, help="ambient dimension for --subspaces")
        p.add_argument("--m", type=_int, help="intersection parameter m")
        p.add_argument("--weak", action="store_true", help="weak variant for set families")
        _common(p)
        p.set_defaults(func=fn, required=())

    conj = areas.add_parser("conjecture").add_subparsers(dest="command", required=True)
    for name, fn in (("linear-deficiency", cmd_conjecture_linear), ("divisor-family", cmd_conjecture_divisor)):
        p = conj.add_parser(name)
        _field_args(p)
        p.add_argument("--budget", type=_int, default=matchlin.DEFAULT_BASIS_BUDGET)
        p.add_argument("--seed", type=_int, default=42)
        p.add_argument("--subset-cap", dest="subset_cap", type=_int, default=harness.MAX_SUBSPACE_ENUMERATION)
        p.add_argument("--max-pairs", dest="max_pairs", type=_int, default=None)
        p.add_argument("--workers", type=_int, default=1)
        p.add_argument("--format", choices=("json", "csv", "text"), default="json")
        _common(p, "write the report stream here (no value: stdout)")
        p.set_defaults(func=fn, required=("q", "n"))
        if name == "linear-deficiency":
            p.add_argument("--dims", help="subspace dimensions to sweep, e.g. 1,2")
            p.add_argument("--no-verify", dest="verify", action="store_false",
                           help="skip the independent set-based re-verification")
        else:
            p.add_argument("--trials", type=_int, default=3)
    return parser


def _apply_input(parser, args, argv: list) -> None:
    """Values from --input fill every option not given explicitly on the command line."""
    if not args.input:
        return
    try:
        with open(args.input) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        parser.error(f"cannot read --input: {exc}")
    if not isinstance(data, dict):
        parser.error("--input must hold a JSON object")
    for key, value in data.items():
        key = key.replace("-", "_")
        if not hasattr(args, key):
            parser.error(f"unknown key {key!r} in --input")
        flag = "--" + key.replace("_", "-")
        if not any(a == flag or a.startswith(flag + "=") for a in argv):
            setattr(args, key, value if not isinstance(value, (list, dict)) else json.dumps(value))


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    _apply_input(parser, args, argv)
    missing = [k for k in args.required if getattr(args, k) is None]
    if missing:
        parser.error("missing " + ", ".join("--" + k.replace("_", "-") for k in missing))
    try:
        payload, code = args.func(args)
    except InternalTheoremViolation as exc:
        sys.stdout.write(dumps({"error": exc.to_dict()}))
        return EXIT_INTERNAL
    except MatchkitError as exc:
        sys.stdout.write(dumps({"error": exc.to_dict()}))
        return EXIT_USAGE
    text = payload if isinstance(payload, str) else dumps(payload)
    if args.json and args.json != "-":
        with open(args.json, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
