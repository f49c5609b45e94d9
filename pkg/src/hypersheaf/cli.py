"""Command-line front end.

Exit codes: 0 success (or the expected verdict), 1 mathematical verdict
failure, 2 input error, 3 internal certificate failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Sequence

from . import __version__
from .algebra import CoefficientRing, ComplexError, GradedAbelianGroup
from .engine import (
    REPORT_SCHEMA,
    StabilizationError,
    check_descent,
    compare,
    default_depth,
    is_cohomologically_locally_connected,
    sheaf_cohomology,
    singular_cohomology,
)
from .multiplicative import cohomology_ring
from .sheaves import (
    ConstantPresheaf,
    GodementLayer,
    GodementPresheaf,
    GodementTower,
    SheafBacked,
    SingularModelPresheaf,
    constant_sheaf,
    sheaf_from_json,
    table_from_json,
)
from .spaces import (
    GuardExceeded,
    InvalidPosetError,
    NotOpenError,
    all_opens,
    cover_from_json,
    load_space,
    order_complex,
    point_label,
)
from .suite import run_suite

EXIT_OK, EXIT_VERDICT, EXIT_INPUT, EXIT_CERTIFICATE = 0, 1, 2, 3


class InputError(Exception):
    pass


def _ring(text: str) -> CoefficientRing:
    try:
        return CoefficientRing.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _depth(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"depth must be an integer, got {text!r}")
    if n < 0:
        raise argparse.ArgumentTypeError("depth must be >= 0")
    return n


def _read_json(ref: str):
    """A JSON file path, or literal JSON when the argument starts with ``[`` or ``{``."""
    text = ref.strip()
    if text.startswith(("[", "{")):
        return json.loads(text)
    with open(ref) as fh:
        return json.load(fh)


def _emit(obj: dict, fmt: str, text: str):
    if fmt == "json":
        sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _table(rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def _group_rows(groups: Sequence[GradedAbelianGroup], top: int) -> List[List[str]]:
    return [[f"H^{k}"] + [g.render(k) for g in groups] for k in range(top + 1)]


# --- commands -------------------------------------------------------------------

def cmd_compare(args) -> int:
    X = load_space(args.space)
    report = compare(X, args.ring, depth=args.depth, normalized=args.normalized)
    top = report.certificate.agreed_through
    rows = [["degree", "singular", "sheaf"]] + [[r[0], r[1], r[2]] for r in
                                                 _group_rows([report.singular, report.sheaf], top)]
    verdict = "isomorphic" if report.isomorphic else "NOT isomorphic"
    text = (f"space {X.name} over {args.ring}\n{_table(rows)}\n"
            f"verdict: {verdict} (Godement depth {report.certificate.depth}, "
            f"stable through degree {top})")
    _emit(report.to_json(), args.format, text)
    return EXIT_OK if report.isomorphic else EXIT_VERDICT


def _presheaf(X, selector: str, ring: CoefficientRing, depth: int | None, normalized: bool):
    if selector == "constant":
        return ConstantPresheaf(X, ring)
    if selector == "singular":
        return SingularModelPresheaf(X, ring)
    if selector == "constant-sheaf":
        return SheafBacked(constant_sheaf(X, ring))
    N = depth if depth is not None else default_depth(X)
    if selector == "godement":
        return GodementPresheaf(GodementTower(constant_sheaf(X, ring), N), normalized)
    if selector.startswith("godement-layer:"):
        n = int(selector.split(":", 1)[1])
        return GodementLayer(GodementTower(constant_sheaf(X, ring), max(N, n)), n)
    if selector.startswith("sheaf:"):
        return SheafBacked(sheaf_from_json(X, _read_json(selector[len("sheaf:"):])))
    if selector.startswith("table:"):
        return table_from_json(X, _read_json(selector[len("table:"):]))
    raise InputError(f"unknown presheaf selector {selector!r}")


def cmd_descent(args) -> int:
    X = load_space(args.space)
    cover = cover_from_json(X, _read_json(args.cover))
    F = _presheaf(X, args.presheaf, args.ring, args.depth, args.normalized)
    v = check_descent(F, cover)
    out = v.to_json()
    out["expect"] = args.expect
    status = "pass" if v.passed else "FAIL"
    text = (f"descent for {F.id} on {X.name}\n"
            f"cover: {' | '.join('{' + ','.join(p.labels()) + '}' for p in cover.pieces)}\n"
            f"cone cohomology: {v.cone_cohomology}\n"
            f"result: {status} (expected {args.expect})")
    _emit(out, args.format, text)
    return EXIT_OK if v.passed == (args.expect == "pass") else EXIT_VERDICT


def cmd_clc(args) -> int:
    X = load_space(args.space)
    rep = is_cohomologically_locally_connected(X, args.ring, args.max_degree, args.mode)
    points = {point_label(x): {str(k): ok for k, ok in rep.verdict(x).items()} for x in rep.points}
    out = {"schema": REPORT_SCHEMA, "space": X.name, "ring": args.ring.selector(),
           "mode": args.mode, "max_degree": args.max_degree, "points": points, "pass": rep.passed}
    bad = [point_label(x) for x in rep.points if rep.failures[x]]
    text = (f"cohomological local connectedness of {X.name} over {args.ring} "
            f"({args.mode}, degrees <= {args.max_degree})\n"
            + (f"{len(rep.points)} points, all pass" if not bad else f"failing points: {', '.join(bad)}"))
    _emit(out, args.format, text)
    return EXIT_OK if rep.passed else EXIT_VERDICT


def cmd_cohomology(args) -> int:
    X = load_space(args.space)
    out = {"schema": REPORT_SCHEMA, "space": X.name, "ring": args.ring.selector(), "mode": args.mode}
    if args.mode == "sheaf":
        res = sheaf_cohomology(X, constant_sheaf(X, args.ring), depth=args.depth, normalized=args.normalized)
        H = res.groups
        top = res.certificate.agreed_through
        out["certificate"] = res.certificate.to_json()
    else:
        H = singular_cohomology(X.whole, args.ring)
        top = max(H.degrees(), default=0)
    out["cohomology"] = H.to_json()
    rows = [["degree", args.mode]] + _group_rows([H], top)
    _emit(out, args.format, f"{args.mode} cohomology of {X.name} over {args.ring}\n{_table(rows)}")
    return EXIT_OK


def cmd_ring(args) -> int:
    X = load_space(args.space)
    H = cohomology_ring(X, args.ring)
    out = H.to_json()
    out["space"] = X.name
    lines = [f"cohomology ring of {X.name} over {args.ring}"]
    for k in H.degrees:
        lines.append(f"H^{k}: {H.dimension(k)} generator(s), orders {list(H.orders[k])}")
    for (p, i), (q, j) in sorted(H.structure):
        vec = H.structure[(p, i), (q, j)]
        if p and q and any(vec):
            lines.append(f"x{p}_{i} * x{q}_{j} = {list(vec)}")
    for p in H.degrees:
        for q in H.degrees:
            if p and q and p <= q and p + q in H.orders:
                lines.append(f"rank of H^{p} x H^{q} -> H^{p + q}: {H.pairing_rank(p, q)}")
    _emit(out, args.format, "\n".join(lines))
    return EXIT_OK


def cmd_suite(args) -> int:
    def progress(check):
        if args.format == "text":
            status = "pass" if check.passed else "FAIL"
            sys.stdout.write(f"[{status}] {check.group}: {check.name}"
                             + (f"  ({check.detail})" if check.detail and not check.passed else "") + "\n")

    report = run_suite(args.seed, args.max_points, args.count, args.max_covers, progress=progress)
    if args.format == "json":
        _emit(report.to_json(), "json", "")
    else:
        total = len(report.checks)
        failed = sum(1 for c in report.checks if not c.passed)
        sys.stdout.write(f"{total - failed}/{total} checks passed\n")
    return EXIT_OK if report.passed else EXIT_VERDICT


def cmd_space_info(args) -> int:
    X = load_space(args.space)
    K = order_complex(X.whole)
    try:
        n_opens = len(all_opens(X))
    except GuardExceeded:
        n_opens = None
    out = {
        "schema": REPORT_SCHEMA,
        "space": X.name,
        "points": len(X),
        "height": X.height,
        "covering_pairs": len(X.covering_pairs()),
        "opens": n_opens,
        "order_complex_f_vector": list(K.f_vector()),
        "default_depth": default_depth(X),
        "poset": X.to_json(),
    }
    text = (f"space {X.name}: {len(X)} points, height {X.height}, "
            f"{len(X.covering_pairs())} covering relations\n"
            f"opens: {n_opens if n_opens is not None else 'over the guard'}\n"
            f"order complex f-vector: {list(K.f_vector())}\n"
            f"default Godement depth: {default_depth(X)}")
    _emit(out, args.format, text)
    return EXIT_OK


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", type=_ring, default=CoefficientRing.parse("Z"),
                        help="coefficient ring: Z, Q or Zmod:<m> (default Z)")
    common.add_argument("--format", choices=("text", "json"), default="text")

    godement = argparse.ArgumentParser(add_help=False)
    godement.add_argument("--depth", type=_depth, default=None,
                          help="Godement truncation depth (default: poset height + 2)")
    g = godement.add_mutually_exclusive_group()
    g.add_argument("--normalized", dest="normalized", action="store_true", default=True)
    g.add_argument("--unnormalized", dest="normalized", action="store_false")

    p = argparse.ArgumentParser(prog="hypersheaf",
                                description="Sheaf versus singular cohomology on finite spaces.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compare", parents=[common, godement], help="run both pipelines and compare")
    c.add_argument("space", help="catalog:<name> or a space JSON file")
    c.set_defaults(func=cmd_compare)

    d = sub.add_parser("descent", parents=[common, godement], help="Čech descent for one cover")
    d.add_argument("space")
    d.add_argument("cover", help="cover JSON file, or literal JSON")
    d.add_argument("--presheaf", default="singular",
                   help="constant | singular | constant-sheaf | godement | godement-layer:<n> "
                        "| sheaf:<file> | table:<file> (default singular)")
    d.add_argument("--expect", choices=("pass", "fail"), default="pass")
    d.set_defaults(func=cmd_descent)

    l = sub.add_parser("clc", parents=[common], help="cohomological local connectedness")
    l.add_argument("space")
    l.add_argument("--mode", choices=("minimal", "exhaustive"), default="minimal")
    l.add_argument("--max-degree", type=int, default=4)
    l.set_defaults(func=cmd_clc)

    h = sub.add_parser("cohomology", parents=[common, godement], help="one pipeline only")
    h.add_argument("space")
    h.add_argument("--mode", choices=("sheaf", "singular"), default="sheaf")
    h.set_defaults(func=cmd_cohomology)

    r = sub.add_parser("ring", parents=[common], help="cup product structure")
    r.add_argument("space")
    r.set_defaults(func=cmd_ring)

    s = sub.add_parser("suite", parents=[common], help="seeded verification battery")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-points", type=int, default=8)
    s.add_argument("--count", type=int, default=10, help="number of random posets")
    s.add_argument("--max-covers", type=int, default=200, help="descent covers per space")
    s.set_defaults(func=cmd_suite)

    sp = sub.add_parser("space", help="space utilities")
    spsub = sp.add_subparsers(dest="space_command", required=True)
    info = spsub.add_parser("info", parents=[common], help="summary of a space")
    info.add_argument("space")
    info.set_defaults(func=cmd_space_info)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StabilizationError as exc:
        sys.stderr.write(f"hypersheaf: certificate failure: {exc}\n")
        return EXIT_CERTIFICATE
    except json.JSONDecodeError as exc:
        sys.stderr.write(f"hypersheaf: malformed JSON: {exc}\n")
        return EXIT_INPUT
    except (InputError, InvalidPosetError, NotOpenError, ComplexError, GuardExceeded,
            ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        sys.stderr.write(f"hypersheaf: {msg}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
