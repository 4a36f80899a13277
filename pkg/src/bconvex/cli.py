"""Command-line interface.

Every command reads one JSON document and writes one JSON document (``render``
writes CSV).  Exit codes: 0 success, 1 unreadable or malformed input,
2 domain error such as a singular system or a size guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction
from itertools import product

from . import __version__
from .documents import (
    DocumentError,
    decimal,
    dump_document,
    load_document,
    parse_matrix,
    parse_points,
    parse_vector,
    result_document,
    scalar_out,
    vector_out,
)
from .errors import BConvexError, CertificateFailure
from .linalg import boxplus_reconstruct, columns_of, cramer_infty, det_infty, det_terms, hyperplane_infty
from .oracle import PSchedule, limit_sweep, phi_p_cramer, phi_p_det, phi_p_hull_member, phi_p_sum, format_approx
from .polytope import build_polytope, locate
from .scalar import nary_boxplus
from .separation import outer_hrep, separate_polytopes

EXIT_OK, EXIT_PARSE, EXIT_DOMAIN = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise DocumentError(message)


def _schedule(args) -> PSchedule:
    try:
        orders = tuple(int(p) for p in args.p_schedule.split(","))
        return PSchedule(orders, args.tolerance, args.precision_bits)
    except ValueError as exc:
        raise DocumentError(f"bad schedule settings: {exc}") from None


def _settings(args) -> dict:
    return {
        "p_schedule": [int(p) for p in args.p_schedule.split(",")],
        "tolerance": args.tolerance,
        "precision_bits": args.precision_bits,
        "seed": args.seed,
        "parallel": args.parallel == "on",
    }


def _read(path: str) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from None
    return load_document(text)


def _intermediate_out(point) -> dict:
    return {"I": list(point.I), "J": list(point.J), "t": vector_out(point.t), "zeta": vector_out(point.zeta)}


def cmd_hull(args, doc):
    points = parse_points(doc)
    P = build_polytope(points, args.parallel == "on")
    outputs = {
        "intermediates": [_intermediate_out(p) for p in P.intermediates],
        "orthants": [{"signs": K.label, "points": list(idx)} for K, idx in P.orthant_map.items()],
    }
    return {"points": [vector_out(p)["exact"] for p in points]}, outputs, {}


def _queries(args, doc) -> list[tuple]:
    raw = list(args.point or []) + list(doc.get("queries", []))
    if not raw:
        raise DocumentError("no query point: pass --point or a 'queries' field")
    return [parse_vector(q) for q in raw]


def cmd_member(args, doc):
    points = parse_points(doc)
    P = build_polytope(points, args.parallel == "on")
    results = []
    for x in _queries(args, doc):
        if len(x) != P.dim:
            raise DocumentError(f"query {x} has the wrong dimension")
        where = locate(P, x)
        entry = {"point": vector_out(x), "member": where is not None}
        if where is not None:
            entry["orthant"] = where[0].label
            entry["weights"] = vector_out(where[1])
        results.append(entry)
    return {"points": [vector_out(p)["exact"] for p in points]}, results, {}


def cmd_det(args, doc):
    M = parse_matrix(doc)
    terms = det_terms(M)
    outputs = {"det_infty": scalar_out(nary_boxplus(terms)), "terms": [str(t) for t in terms]}
    return {"matrix": [vector_out(r)["exact"] for r in M]}, outputs, {}


def cmd_solve(args, doc):
    M = parse_matrix(doc)
    b = parse_vector(doc.get("rhs", []))
    sol = cramer_infty(M, b)
    weights = [
        {"permutation": list(perm), "column": j, "alpha": str(w)} for (perm, j), w in sol.alpha.items() if w != 0
    ]
    outputs = {
        "det_infty": scalar_out(sol.det),
        "solution": vector_out(sol.solution),
        "reconstructs": boxplus_reconstruct(sol, columns_of(M), b),
        "alpha_nonzero": weights,
    }
    diagnostics = {"max_abs_alpha": str(sol.max_weight())}
    return {"matrix": [vector_out(r)["exact"] for r in M], "rhs": vector_out(b)["exact"]}, outputs, diagnostics


def cmd_hyperplane(args, doc):
    points = parse_points(doc)
    H = hyperplane_infty(points)
    C = H.canonical()
    outputs = {
        "coeffs": vector_out(H.coeffs),
        "rhs": scalar_out(H.rhs),
        "canonical": {"coeffs": vector_out(C.coeffs), "rhs": scalar_out(C.rhs)},
    }
    return {"points": [vector_out(p)["exact"] for p in points]}, outputs, {}


def _halfspace_out(h) -> dict:
    return {"a": vector_out(h.a), "c": scalar_out(h.c), "side": h.side}


def cmd_separate(args, doc):
    A = parse_points(doc)
    if args.against:
        E = parse_points(_read(args.against))
    else:
        E = parse_points(doc, "against")
    try:
        res = separate_polytopes(A, E, _schedule(args), seed=args.seed, parallel=args.parallel == "on")
    except CertificateFailure as exc:
        if exc.point is not None:
            print(f"failing point: {[str(v) for v in exc.point]}", file=sys.stderr)
        raise
    outputs = {
        "halfspace": _halfspace_out(res.halfspace),
        "p_disjoint": res.p_disjoint,
        "p_used": res.p_used,
        "converged": res.converged,
        "verified": res.verified,
        "checked_points": len(res.checks),
    }
    diagnostics = {
        "trajectory": [
            {"p": p, "coeffs": [format_approx(v, 15) for v in coeffs], "threshold": format_approx(c, 15)}
            for p, coeffs, c in res.trajectory
        ]
    }
    inputs = {"points": [vector_out(p)["exact"] for p in A], "against": [vector_out(p)["exact"] for p in E]}
    return inputs, outputs, diagnostics


def cmd_hrep(args, doc):
    A = parse_points(doc)
    halfspaces, report = outer_hrep(A, seed=args.seed, parallel=args.parallel == "on")
    outputs = {"halfspaces": [_halfspace_out(h) for h in halfspaces]}
    diagnostics = {
        "member_samples": report.member_samples,
        "member_violations": report.member_violations,
        "interior_samples": report.interior_samples,
        "interior_nonmembers": report.interior_nonmembers,
    }
    return {"points": [vector_out(p)["exact"] for p in A]}, outputs, diagnostics


def cmd_oracle(args, doc):
    schedule = _schedule(args)
    quantity = args.quantity
    if quantity == "sum":
        values = parse_vector(doc.get("values", []))
        series = lambda p: phi_p_sum(values, p)
        limit = scalar_out(nary_boxplus(values))
        inputs = {"values": [str(v) for v in values]}
    elif quantity == "det":
        M = parse_matrix(doc)
        series = lambda p: phi_p_det(M, p)
        limit = scalar_out(det_infty(M))
        inputs = {"matrix": [vector_out(r)["exact"] for r in M]}
    elif quantity == "cramer":
        M = parse_matrix(doc)
        b = parse_vector(doc.get("rhs", []))
        series = lambda p: phi_p_cramer(M, b, p)
        limit = vector_out(cramer_infty(M, b).solution)
        inputs = {"matrix": [vector_out(r)["exact"] for r in M], "rhs": vector_out(b)["exact"]}
    else:  # hull
        A = parse_points(doc)
        queries = _queries(args, doc)
        P = build_polytope(A, args.parallel == "on")
        outputs = []
        for x in queries:
            per_order = {str(p): phi_p_hull_member(x, A, p) for p in schedule.orders}
            outputs.append({"point": vector_out(x), "member": locate(P, x) is not None, "by_order": per_order})
        return {"points": [vector_out(p)["exact"] for p in A]}, outputs, {}
    report = limit_sweep(series, schedule)
    outputs = {
        "values": {str(p): format_approx(v, 20) for p, v in report.values.items()},
        "failures": {str(p): msg for p, msg in report.failures.items()},
        "estimate": None if report.estimate is None else format_approx(report.estimate, 20),
        "max_delta": None if report.max_delta is None else format_approx(report.max_delta, 6),
        "converged": report.converged,
        "limit": limit,
    }
    return inputs, outputs, {}


def _parse_bbox(text: str, dim: int) -> list[tuple[Fraction, Fraction]]:
    parts = text.split(",")
    if len(parts) != dim:
        raise DocumentError(f"--bbox needs {dim} comma-separated lo:hi ranges")
    out = []
    for part in parts:
        lo, sep, hi = part.partition(":")
        if not sep:
            raise DocumentError(f"bad range {part!r}; expected lo:hi")
        lo, hi = parse_vector([lo, hi])
        if lo >= hi:
            raise DocumentError(f"empty range {part!r}")
        out.append((lo, hi))
    return out


def render_csv(P, grid: int, bbox) -> str:
    """CSV raster of membership over a regular exact grid."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"x{i + 1}" for i in range(P.dim)] + ["member"])
    axes = [[lo + (hi - lo) * Fraction(k, grid - 1) for k in range(grid)] for lo, hi in bbox]
    for x in product(*axes):
        writer.writerow([str(v) for v in x] + [int(locate(P, x) is not None)])
    return buf.getvalue()


def cmd_render(args, doc):
    A = parse_points(doc)
    dim = len(A[0])
    if dim not in (2, 3):
        raise DocumentError("render supports dimension 2 or 3")
    if args.grid < 2:
        raise DocumentError("--grid must be at least 2")
    P = build_polytope(A, args.parallel == "on")
    if args.bbox:
        bbox = _parse_bbox(args.bbox, dim)
    else:
        pts = P.points()
        bbox = [(min(z[i] for z in pts) - 1, max(z[i] for z in pts) + 1) for i in range(dim)]
    return render_csv(P, args.grid, bbox)


COMMANDS = {
    "hull": (cmd_hull, "intermediate points and orthant pieces"),
    "member": (cmd_member, "exact membership of query points"),
    "det": (cmd_det, "limit determinant of a square matrix"),
    "solve": (cmd_solve, "limit Cramer solution of M x = rhs"),
    "hyperplane": (cmd_hyperplane, "limit hyperplane through n points"),
    "separate": (cmd_separate, "separating halfspace between two polytopes"),
    "hrep": (cmd_hrep, "outer halfspace description"),
    "oracle": (cmd_oracle, "order-p convergence report for a limit quantity"),
    "render": (cmd_render, "CSV membership raster"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--input", "-i", default="-", help="input JSON document (default: stdin)")
    common.add_argument("--output", "-o", help="write the result here instead of stdout")
    common.add_argument("--p-schedule", default="1,2,4,8,16,32,64", help="comma-separated orders p")
    common.add_argument("--tolerance", type=float, default=1e-6)
    common.add_argument("--precision-bits", type=int, default=256)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--parallel", choices=("on", "off"), default="off")

    parser = _Parser(prog="bconvex", description="Exact computations with limit (Boxplus) polytopes.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name in ("member", "oracle"):
            p.add_argument("--point", action="append", help="query point as comma-separated rationals")
        if name == "separate":
            p.add_argument("--against", help="document holding the second point set")
        if name == "oracle":
            p.add_argument("--quantity", choices=("sum", "det", "cramer", "hull"), required=True)
        if name == "render":
            p.add_argument("--grid", type=int, default=41, help="grid points per axis")
            p.add_argument("--bbox", help="lo:hi per axis, comma-separated")
    return parser


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        doc = _read(args.input)
        handler = COMMANDS[args.command][0]
        result = handler(args, doc)
        if isinstance(result, str):
            text = result
        else:
            inputs, outputs, diagnostics = result
            text = dump_document(result_document(args.command, inputs, _settings(args), outputs, diagnostics))
    except DocumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BConvexError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
