"""Command-line front end.

Every subcommand builds a JSON document; ``--format text`` renders a short
summary of that document and ``--format dot`` emits a graph where one exists.
Exit codes: 0 success, 1 domain error or failed check, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .arith import Matrix, det, parse_rat
from .canonical import Inconsistent, canonical_reduce, verify_reduction_identity
from .errors import DomainError, SingresError
from .fan import (
    check_fan_property,
    conjugate_pairs,
    covering_check,
    euler_characteristics,
    random_samples,
    refine_fan,
)
from .polyhedron import build_polyhedron
from .resolve import POLICIES, ResolveConfig, default_max_steps, resolve, transformed_exponents_hold
from .series import APPROX, EXACT, SparsePoly, monomial_transform, parse_poly, partial_factorize
from .weierstrass import weierstrass_reduce


class UsageError(Exception):
    """Bad flags or unparsable input; maps to exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit on its own
        raise UsageError(message)


def _common(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--poly", help="inline polynomial, e.g. 'x1^2 + x2^3'")
    src.add_argument("--input", help="file holding one polynomial")
    p.add_argument("--vars", type=int, default=None, help="number of variables (default: highest index used)")
    p.add_argument("--mode", choices=("exact", "approx"), default="exact")
    p.add_argument("--format", choices=("json", "text", "dot"), default="json")
    p.add_argument("--pretty", action="store_true", help="indent JSON output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="singres", description="Newton-polyhedral local resolution of singularities")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("polyhedron", help="Newton polyhedron: vertices, facets, faces")
    _common(p)

    p = sub.add_parser("fan", help="unimodular fan refining the vertex cones")
    _common(p)

    p = sub.add_parser("transform", help="apply an exponential matrix and factor off the chart monomial")
    _common(p)
    p.add_argument("--matrix", required=True, help="JSON rows, e.g. '[[3,1],[2,1]]'")
    p.add_argument("--vertex", help="JSON exponent of the chart vertex, e.g. '[2,0]'")
    p.add_argument("--exceptional", help="JSON list of 1-based exceptional columns, e.g. '[1]'")

    p = sub.add_parser("prepare", help="apex form and Weierstrass form")
    _common(p)
    p.add_argument("--tau", type=int, default=None)
    p.add_argument("--primary", type=int, default=1, help="1-based primary variable")

    p = sub.add_parser("resolve", help="full resolution tree")
    _common(p)
    p.add_argument("--tau", type=int, default=None)
    p.add_argument("--max-steps", type=int, default=None, help="step cap (env SINGRES_MAX_STEPS)")
    p.add_argument("--policy", choices=POLICIES, default="sampled-slices")
    p.add_argument("--points", help="JSON list of user branch points for --policy user-points")
    p.add_argument("--slices", type=int, default=2, help="sampled slices per exceptional line")

    p = sub.add_parser("partition", help="covering certificate over sampled points of the unit polydisc")
    _common(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("check", help="run the invariant suite on one input")
    _common(p)
    p.add_argument("--tau", type=int, default=None)
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    return parser


# ----------------------------------------------------------------------------
# Input handling.


def _read_poly(args) -> SparsePoly:
    text = args.poly
    if text is None:
        try:
            with open(args.input, encoding="utf-8") as fh:
                text = fh.read().strip()
        except OSError as exc:
            raise UsageError(f"cannot read {args.input}: {exc.strerror}") from exc
    try:
        return parse_poly(text, args.vars, APPROX if args.mode == "approx" else EXACT)
    except DomainError as exc:
        raise UsageError(f"cannot parse polynomial: {exc}") from exc


def _json_arg(raw: str, what: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} is not valid JSON: {exc.msg}") from exc


# ----------------------------------------------------------------------------
# Subcommands. Each returns (document, dot-or-None, ok).


def _cmd_polyhedron(args, f):
    np_ = build_polyhedron(f.support())
    return np_.to_json(), None, True


def _fan_doc(f):
    np_ = build_polyhedron(f.support())
    fan = refine_fan(np_)
    doc = fan.to_json()
    doc["dets"] = [det(c.matrix) for c in fan.cones]
    doc["fan_property"] = check_fan_property(fan)
    return fan, doc


def _cmd_fan(args, f):
    fan, doc = _fan_doc(f)
    return doc, fan.to_dot(), doc["fan_property"] and all(d == 1 for d in doc["dets"])


def _cmd_transform(args, f):
    rows = _json_arg(args.matrix, "--matrix")
    try:
        m = Matrix.of(rows)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"--matrix must be a list of integer rows: {exc}") from exc
    total = monomial_transform(f, m)
    doc = {"matrix": m.to_json(), "det": det(m), "total": total.to_json()}
    if args.exceptional is not None:
        exc_cols = [int(j) - 1 for j in _json_arg(args.exceptional, "--exceptional")]
        vertex = _json_arg(args.vertex, "--vertex") if args.vertex else min(f.support(), key=lambda e: (sum(e), e))
        gamma, partial = partial_factorize(total, vertex, m, exc_cols)
        doc.update({"vertex": list(vertex), "exceptional": [j + 1 for j in exc_cols],
                    "exceptional_exponent": list(gamma), "partial": partial.to_json()})
    return doc, None, True


def _cmd_prepare(args, f):
    apex, wf = weierstrass_reduce(f, args.tau, args.primary - 1)
    ok = wf.multiply_back_ok()
    doc = {"apex_form": apex.to_json(), "weierstrass": wf.to_json(), "multiply_back": ok}
    return doc, None, ok


def _config(args) -> ResolveConfig:
    steps = args.max_steps if args.max_steps is not None else default_max_steps()
    points = ()
    if getattr(args, "points", None):
        points = tuple(tuple(parse_rat(v) for v in p) for p in _json_arg(args.points, "--points"))
    return ResolveConfig(mode=args.mode, tau=args.tau, max_steps=steps,
                         policy=getattr(args, "policy", "sampled-slices"), user_points=points,
                         slice_samples=getattr(args, "slices", 2))


def _cmd_resolve(args, f):
    tree = resolve(f, _config(args))
    return tree.to_json(), tree.to_dot(), True


def _cmd_partition(args, f):
    fan = refine_fan(build_polyhedron(f.support()))
    report = covering_check(fan, random_samples(f.n, args.samples, args.seed))
    doc = {"cones": len(fan.cones), "seed": args.seed, **report.to_json()}
    return doc, None, report.all_covered


def _transformed_exponents_ok(tree) -> bool:
    for nd in tree.nodes:
        if nd.weierstrass is None:
            continue
        w = nd.weierstrass.w
        for entry in nd.notes.get("charts", []):
            if not entry["consistent"]:
                continue
            m = Matrix.of(entry["matrix"])
            exc = [j - 1 for j in entry["exceptional"]]
            try:
                cr = canonical_reduce(m, exc)
            except Inconsistent:
                continue
            if not transformed_exponents_hold(w, entry["vertex"], cr, nd.height):
                return False
    return True


def _cmd_check(args, f):
    fan, fan_doc = _fan_doc(f)
    euler = euler_characteristics(fan.complex)
    pairs = conjugate_pairs(fan)
    cover = covering_check(fan, random_samples(f.n, args.samples, args.seed))
    checks = {
        "unimodular": all(d == 1 for d in fan_doc["dets"]),
        "fan_property": fan_doc["fan_property"],
        "euler_sigma": euler.chi == 1,
        "euler_boundary": euler.chi_boundary == 1 + (-1) ** f.n,
        "conjugacy": all(tuple(-x for x in p.adjoint[0]) == p.adjoint[1] for p in pairs),
        "covering": cover.all_covered,
    }
    reductions = 0
    identities = True
    for c in fan.cones:
        for j in range(f.n):
            try:
                cr = canonical_reduce(c.matrix, [j])
            except (Inconsistent, DomainError):
                continue
            reductions += 1
            identities = identities and verify_reduction_identity(cr)
    checks["reduction_identity"] = identities
    if f.ord() >= 1 and f.n <= 3:
        _, wf = weierstrass_reduce(f, args.tau)
        checks["multiply_back"] = wf.multiply_back_ok()
        tree = resolve(f, ResolveConfig(mode=args.mode, tau=args.tau, max_steps=args.max_steps or default_max_steps()))
        checks["height_ledger"] = tree.ledger.ok
        checks["transformed_exponents"] = _transformed_exponents_ok(tree)
    ok = all(checks.values())
    return {"checks": checks, "reductions_checked": reductions, "ok": ok}, None, ok


COMMANDS = {
    "polyhedron": _cmd_polyhedron,
    "fan": _cmd_fan,
    "transform": _cmd_transform,
    "prepare": _cmd_prepare,
    "resolve": _cmd_resolve,
    "partition": _cmd_partition,
    "check": _cmd_check,
}


# ----------------------------------------------------------------------------
# Rendering.


def _default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return str(obj)


def render_json(doc, pretty: bool) -> str:
    if pretty:
        return json.dumps(doc, indent=2, sort_keys=True, default=_default) + "\n"
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), default=_default) + "\n"


def render_text(command: str, doc: dict) -> str:
    lines = [f"{command}:"]
    if command == "resolve":
        nodes = doc["nodes"]
        leaves = [nd for nd in nodes if not nd.get("children")]
        lines.append(f"  nodes: {len(nodes)}")
        lines.append(f"  leaves: {len(leaves)}")
        lines.append(f"  all resolved: {doc['all_resolved']}")
        lines.append(f"  ledger ok: {doc['ledger']['ok'] if doc['ledger'] else None}")
        for nd in leaves:
            stop = f" ({nd['stop_reason']})" if nd.get("stop_reason") else ""
            lines.append(f"  node {nd['id']}: {nd['status']} height {nd['height']}{stop}")
        return "\n".join(lines) + "\n"
    for key in sorted(doc):
        value = doc[key]
        if isinstance(value, (list, dict)) and len(json.dumps(value, default=_default)) > 72:
            size = len(value)
            lines.append(f"  {key}: <{size} {'entries' if isinstance(value, list) else 'keys'}>")
        else:
            lines.append(f"  {key}: {json.dumps(value, sort_keys=True, default=_default)}")
    return "\n".join(lines) + "\n"


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        f = _read_poly(args)
        doc, dot, ok = COMMANDS[args.command](args, f)
        if args.format == "dot":
            if dot is None:
                raise UsageError(f"{args.command} has no DOT output")
            out.write(dot)
        elif args.format == "text":
            out.write(render_text(args.command, doc))
        else:
            out.write(render_json(doc, args.pretty))
    except UsageError as exc:
        err.write(parser.format_usage())
        err.write(f"singres: error: {exc}\n")
        return 2
    except DomainError as exc:
        err.write(f"singres: {type(exc).__name__}: {exc}\n")
        return 1
    except SingresError as exc:
        err.write(f"singres: {type(exc).__name__}: {exc}\n")
        return 1
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())
