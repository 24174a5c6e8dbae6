"""Command-line entry point.

    mlie group build --family heisenberg:3 --out heis3.json
    mlie mla check --family heisenberg:3 --star improper
    mlie mla enumerate --family cyclic:5
    mlie ext verify --in data.json
    mlie census --max-order 8 --out census.jsonl

Exit status: 0 success, 1 violations or failed preconditions, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import catalog as cat
from . import io
from .errors import (
    BudgetExceeded,
    ConditionFailed,
    InvalidParameters,
    MLAError,
    NotCentralType,
    PreconditionFailed,
    QuotientMismatch,
    TheoremViolated,
    ValidationError,
)
from .extension import (
    build_group_from_extension,
    build_star_from_extension,
    central_pairing_to_star,
    central_spaces,
    enumerate_central_pairings,
    star_to_central_pairing,
    verify_cocycle,
    verify_star_compatibility,
)
from .groups import center, derived_subgroup, is_class2
from .mla import (
    check_mla_axioms,
    class2_property_report,
    combination_preconditions,
    combine_structures,
)
from .search import SearchOptions, default_budget, enumerate_stars

OK, FOUND, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _group_flags(p):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--group", metavar="FILE", help="group JSON file")
    src.add_argument("--family", metavar="SPEC", help="family spec, e.g. metacyclic:5,4,2,0")


def _common(p):
    p.add_argument("--out", metavar="FILE", help="write the payload here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--timing", action="store_true", help="include wall time in the report")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mlie", description="Multiplicative Lie algebra structures on finite groups")
    sub = p.add_subparsers(dest="area", required=True, parser_class=_Parser)

    g = sub.add_parser("group").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    for name in ("build", "validate"):
        q = g.add_parser(name)
        _group_flags(q)
        _common(q)

    m = sub.add_parser("mla").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    for name in ("check", "identities", "series", "centers", "class2", "enumerate", "combine"):
        q = m.add_parser(name)
        _group_flags(q)
        _common(q)
        if name != "enumerate":
            q.add_argument("--star", metavar="FILE|trivial|improper", default="trivial")
        if name == "combine":
            q.add_argument("--star2", metavar="FILE|trivial|improper", required=True)
        if name == "enumerate":
            q.add_argument("--budget", type=float, metavar="SECONDS")
            q.add_argument("--dedup", action="store_true")
            q.add_argument("--max-solutions", type=int)

    e = sub.add_parser("ext").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    for name in ("verify", "build"):
        q = e.add_parser(name)
        q.add_argument("--in", dest="infile", metavar="FILE", required=True)
        _common(q)

    pr = sub.add_parser("pairing").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    q = pr.add_parser("enumerate")
    _group_flags(q)
    _common(q)
    q = pr.add_parser("apply")
    _group_flags(q)
    _common(q)
    how = q.add_mutually_exclusive_group()
    how.add_argument("--index", type=int, help="apply the N-th enumerated pairing")
    how.add_argument("--in", dest="infile", metavar="FILE", help='pairing file {"pairing": [[int]]}')
    how.add_argument("--star", metavar="FILE|trivial|improper", help="recover the pairing of a star")
    q.add_argument("--transversal", type=lambda s: [int(x) for x in s.split(",")],
                   help="comma-separated coset representatives")

    c = sub.add_parser("census")
    _common(c)
    c.add_argument("--names", nargs="+", help="catalog names (default: whole catalog)")
    c.add_argument("--max-order", type=int, default=16)
    c.add_argument("--budget", type=float, metavar="SECONDS", help="per group")
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--seed", type=int, default=0, help="recorded only; the census is deterministic")
    c.add_argument("--list", action="store_true", help="print the catalog and exit")
    return p


# ---------------------------------------------------------------------------


def _load_group(args):
    if args.group:
        return io.load_group(args.group)
    if args.family:
        return io.resolve_group(args.family)
    raise UsageError("one of --group or --family is required")


def _load_star(ref, g):
    if ref in ("trivial", "improper"):
        return io.named_star(g, ref)
    return io.load_star(ref, g)[1]


def _text(payload, indent=0) -> str:
    pad = "  " * indent
    lines = []
    for k, v in payload.items():
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.append(_text(v, indent + 1))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{pad}{k}: {len(v)}")
            for item in v:
                lines.append(f"{pad}  - " + ", ".join(f"{a}={b}" for a, b in item.items()))
        else:
            lines.append(f"{pad}{k}: {json.dumps(v)}")
    return "\n".join(x for x in lines if x)


def _emit(args, report: cat.RunReport, out=None):
    out = out or sys.stdout
    payload = report.to_json()
    text = io.dumps(payload) if args.format == "json" else _text(payload) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)


def _inputs(args) -> dict:
    """Arguments with input files replaced by a digest of their contents."""
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("out", "format", "timing"):
            continue
        if isinstance(v, str) and os.path.isfile(v):
            with open(v, "rb") as fh:
                v = "sha256:" + hashlib.sha256(fh.read()).hexdigest()
        out[k] = v
    return out


def _group_cmd(args):
    g = _load_group(args)
    res = {"group": g.to_json(), "order": g.order, "abelian": g.is_abelian,
           "class2": is_class2(g), "center": center(g).elements(),
           "derived": derived_subgroup(g).elements()}
    return res, OK


def _mla_cmd(args):
    g = _load_group(args)
    if args.cmd == "enumerate":
        budget = args.budget if args.budget is not None else default_budget()
        opts = SearchOptions(max_solutions=args.max_solutions, dedup_by_automorphism=args.dedup,
                             time_budget=budget)
        try:
            r = enumerate_stars(g, opts)
        except BudgetExceeded as exc:
            r = exc.partial
        res = {"group": g.name, "count": len(r), "complete": r.complete,
               "stars": [s.star for s in r.stars]}
        if r.orbits is not None:
            res["orbits"] = [{"star": s.star, "size": n} for s, n in r.orbits]
        return res, OK if r.complete else FOUND

    star = _load_star(args.star, g)
    if args.cmd == "check":
        v = check_mla_axioms(g, star)
        return {"group": g.name, "violations": [x.to_json() for x in v]}, FOUND if v else OK
    if args.cmd == "combine":
        star2 = _load_star(args.star2, g)
        fails = combination_preconditions(g, star, star2)
        if fails:
            return {"group": g.name, "preconditions": [
                {"condition": f.condition, "witness": f.witness} for f in fails]}, FOUND
        try:
            m = combine_structures(g, star, star2)
        except TheoremViolated as exc:
            return {"group": g.name, "violations": [x.to_json() for x in exc.violations]}, FOUND
        return {"group": g.name, "star": m.star}, OK

    axioms = check_mla_axioms(g, star)
    if axioms:
        return {"group": g.name, "axioms": [x.to_json() for x in axioms]}, FOUND
    if args.cmd == "class2":
        try:
            rep = class2_property_report(g, star)
        except PreconditionFailed as exc:
            return {"group": g.name, "precondition": exc.condition}, FOUND
        return {"group": g.name, "class2": rep.to_json()}, OK if rep.all_true else FOUND
    part = {"identities": "identities", "series": "series", "centers": "centers"}[args.cmd]
    rep = io.mla_report(g, star, ("axioms", part))
    bad = part == "identities" and bool(rep["identities"])
    return {"group": g.name, **rep}, FOUND if bad else OK


def _ext_cmd(args):
    e = io.load_extension(args.infile, certify_brackets=False)
    if args.cmd == "verify":
        v = verify_cocycle(e) + verify_star_compatibility(e)
        for ring, lab in ((e.H, "bracket_H"), (e.K, "bracket_K")):
            v += [type(x)(f"{lab}:{x.label}", x.witness, x.left, x.right)
                  for x in check_mla_axioms(ring.group, ring.bracket)]
        return {"violations": [x.to_json() for x in v]}, FOUND if v else OK
    g = build_group_from_extension(e)
    m = build_star_from_extension(e)
    return {"group": g.to_json(), "star": m.star}, OK


def _pairing_cmd(args):
    g = _load_group(args)
    if not is_class2(g):
        return {"group": g.name, "precondition": "class2"}, FOUND
    q, proj, a, embed = central_spaces(g)
    base = {"group": g.name, "quotient_order": q.order, "derived": embed}
    if args.cmd == "enumerate":
        ps = enumerate_central_pairings(q, a)
        return {**base, "count": len(ps), "pairings": [p.pairing for p in ps]}, OK
    if args.star is not None:
        star = _load_star(args.star, g)
        p = star_to_central_pairing(g, star, args.transversal)
        return {**base, "pairing": p.pairing}, OK
    if args.index is not None:
        ps = enumerate_central_pairings(q, a)
        if not 0 <= args.index < len(ps):
            raise UsageError(f"--index {args.index} out of range (0..{len(ps) - 1})")
        p = ps[args.index]
    elif args.infile:
        from .extension import CentralPairing
        p = CentralPairing(q, a, np.asarray(io.read_json(args.infile)["pairing"]))
    else:
        raise UsageError("one of --index, --in or --star is required")
    return {**base, "pairing": p.pairing, "star": central_pairing_to_star(g, p).star}, OK


def _census_cmd(args):
    entries = cat.select(args.names, max_order=args.max_order)
    if args.list:
        return {"catalog": [cat.entry_asdict(e) for e in entries]}, OK
    recs = cat.census(entries, args.budget, jobs=args.jobs, timing=args.timing)
    lines = cat.census_lines(recs)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(lines)
    else:
        sys.stdout.write(lines)
    bad = any(r.get("summary") and not r["complete"] for r in recs)
    return None, FOUND if bad else OK


HANDLERS = {"group": _group_cmd, "mla": _mla_cmd, "ext": _ext_cmd,
            "pairing": _pairing_cmd, "census": _census_cmd}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except SystemExit as exc:      # --help
        return int(exc.code or 0)
    t0 = time.monotonic()
    try:
        results, code = HANDLERS[args.area](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return USAGE
    except (InvalidParameters, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except ValidationError as exc:
        results, code = {"error": type(exc).__name__, "message": str(exc),
                         "witness": getattr(exc, "witness", None)}, FOUND
    except (ConditionFailed, PreconditionFailed, NotCentralType, QuotientMismatch,
            TheoremViolated, MLAError) as exc:
        results = {"error": type(exc).__name__, "message": str(exc)}
        for attr in ("witness", "condition", "label", "reason"):
            if getattr(exc, attr, None) is not None:
                results[attr] = getattr(exc, attr)
        if isinstance(exc, TheoremViolated):
            results["violations"] = [v.to_json() for v in exc.violations]
        code = FOUND
    if results is None:
        return code
    report = cat.RunReport([args.area] + ([args.cmd] if getattr(args, "cmd", None) else []),
                           _inputs(args), results, complete=code == OK,
                           timing=time.monotonic() - t0, include_timing=args.timing)
    if args.area == "group" and args.cmd == "build" and args.out:
        io.write_json(args.out, results["group"])
        return code
    _emit(args, report)
    return code


if __name__ == "__main__":
    sys.exit(main())
