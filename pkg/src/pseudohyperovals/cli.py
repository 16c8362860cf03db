"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 input error, 3 guard exceeded.
Text output prints ``key: value`` lines; ``--format kv`` prints ``key=value``.
"""

from __future__ import annotations

import argparse
import re
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Sequence

from .field import FieldError
from .geometry import GuardExceeded, ProjectivePoint
from .hyperovals import (
    Hyperoval,
    PseudoHyperoval,
    check_hyperoval,
    check_pseudo_hyperoval,
    classify_pseudo_hyperovals_pg52,
    lunelli_sce,
    pointset_stabilizer_pgammal3,
    reduce_hyperoval,
    reduce_pseudo_hyperoval,
    regular_hyperoval,
)
from .linalg import DimensionMismatch, MatrixGF
from .textio import FormatError, format_subspaces, parse_matrix_list, parse_points, parse_subspaces

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3
HARD_POINT_CAP = 1 << 20


class InputError(ValueError):
    pass


class Report:
    def __init__(self):
        self.items: list[tuple[str, object]] = []

    def add(self, key: str, value) -> None:
        self.items.append((key, value))

    def render(self, fmt: str, timestamp: bool) -> str:
        sep = "=" if fmt == "kv" else ": "
        lines = []
        if timestamp:
            lines.append(f"timestamp{sep}{datetime.now(timezone.utc).isoformat(timespec='seconds')}")
        for k, v in self.items:
            if isinstance(v, bool):
                v = str(v).lower()
            elif isinstance(v, (list, tuple)):
                v = ",".join(str(x) for x in v)
            lines.append(f"{k}{sep}{v}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- object registry

_HYPERCONIC = re.compile(r"hyperconic:(\d+)$")
_REDUCE = re.compile(r"field-reduce\((.+)\)$")


def resolve_hyperoval(name: str) -> Hyperoval:
    name = name.strip()
    m = _HYPERCONIC.match(name)
    if m:
        h = int(m.group(1))
        if not 1 <= h <= 8:
            raise InputError("hyperconic:h needs 1 <= h <= 8")
        return regular_hyperoval(h)
    if name == "lunelli-sce":
        return lunelli_sce()
    path = Path(name)
    if not path.exists():
        raise InputError(f"unknown hyperoval {name!r}: not a built-in name or a file")
    d, field, pts = parse_points(path.read_text())
    if d != 3:
        raise InputError("a hyperoval file must hold points of PG(2,q) (d = 3)")
    return Hyperoval(field, tuple(ProjectivePoint.of(p, 3, field) for p in pts))


def resolve_pseudo_hyperoval(name: str) -> PseudoHyperoval:
    name = name.strip()
    m = _REDUCE.match(name)
    if m:
        inner = m.group(1).strip()
        try:
            return reduce_hyperoval(resolve_hyperoval(inner))
        except (FormatError, InputError):
            return reduce_pseudo_hyperoval(resolve_pseudo_hyperoval(inner))
    if name == "appendix-a:O":
        from .appendix import appendix_o

        return appendix_o()
    path = Path(name)
    if not path.exists():
        raise InputError(f"unknown pseudo-hyperoval {name!r}: not a built-in name or a file")
    subs = parse_subspaces(path.read_text())
    if not subs:
        raise InputError("empty subspace file")
    u = subs[0]
    if u.ambient_dim % 3:
        raise InputError("ambient dimension must be a multiple of 3")
    return PseudoHyperoval(u.ambient_dim // 3, u.field.f, tuple(subs))


def resolve_object(name: str) -> Hyperoval | PseudoHyperoval:
    name = name.strip()
    if _HYPERCONIC.match(name) or name == "lunelli-sce":
        return resolve_hyperoval(name)
    if _REDUCE.match(name) or name == "appendix-a:O":
        return resolve_pseudo_hyperoval(name)
    path = Path(name)
    if path.exists():
        try:
            return resolve_hyperoval(name)
        except (FormatError, InputError):
            return resolve_pseudo_hyperoval(name)
    raise InputError(f"unknown object {name!r}")


def resolve_generators(name: str) -> list[MatrixGF]:
    if name == "appendix-a:G":
        from .appendix import load_generators

        return list(load_generators())
    path = Path(name)
    if not path.exists():
        raise InputError(f"unknown generator set {name!r}")
    mats = parse_matrix_list(path.read_text())
    if not mats:
        raise InputError("no matrices in generator file")
    return mats


def _as_glr_input(obj):
    from .quadrangles import build_glr

    def build(guard: int):
        if isinstance(obj, Hyperoval):
            return build_glr([p.subspace() for p in obj.points], 2, 0, obj.field, guard=guard)
        d = 3 * obj.n
        return build_glr(obj.elements, d - 1, obj.n - 1, guard=guard)
    return build


def _pseudo(obj) -> PseudoHyperoval:
    return reduce_hyperoval(obj) if isinstance(obj, Hyperoval) else reduce_pseudo_hyperoval(obj)


def _guard(args, default: int, hard: int) -> int:
    g = args.guard if args.guard is not None else default
    if g > hard:
        raise InputError(f"--guard {g} exceeds the hard cap {hard}")
    if g < 1:
        raise InputError("--guard must be positive")
    return g


# ---------------------------------------------------------------- commands


def cmd_verify(args, rep: Report) -> int:
    if args.kind == "hyperoval":
        h = resolve_hyperoval(args.object)
        v = check_hyperoval(h.points, h.q)
        rep.add("object", args.object)
        rep.add("q", h.q)
        rep.add("points", len(h.points))
        rep.add("expected", h.q + 2)
    else:
        o = resolve_pseudo_hyperoval(args.object)
        v = check_pseudo_hyperoval(o.elements, o.n, o.f)
        rep.add("object", args.object)
        rep.add("n", o.n)
        rep.add("q", o.q)
        rep.add("elements", len(o))
        rep.add("expected", o.q**o.n + 2)
    rep.add("verified", v.ok)
    rep.add("reason", v.reason)
    if v.witness:
        rep.add("witness", [str(w) for w in v.witness])
    return EXIT_OK if v.ok else EXIT_FAIL


def cmd_appendix_a(args, rep: Report) -> int:
    from .appendix import CLAIMS, run_claims

    claims = None
    if args.claims:
        claims = [c.strip() for c in args.claims.split(",") if c.strip()]
        bad = [c for c in claims if c not in CLAIMS]
        if bad:
            raise InputError(f"unknown claims {bad}; choose from {list(CLAIMS)}")
    gens = None
    if args.generators:
        mats = resolve_generators(args.generators)
        if len(mats) != 2 or any(m.nrows != 12 or m.ncols != 12 for m in mats):
            raise InputError("the generator file must hold exactly two 12 x 12 matrices")
        gens = (mats[0], mats[1])
    results = run_claims(claims, gens)
    for r in results:
        rep.add(f"claim.{r.key}", "pass" if r.ok else "fail")
        rep.add(f"claim.{r.key}.detail", r.detail)
    ok = all(r.ok for r in results)
    rep.add("all_pass", ok)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_classify(args, rep: Report) -> int:
    from .screening import parse_range, screen_range

    ok = True
    n = classify_pseudo_hyperovals_pg52()
    rep.add("pg52.classes", n)
    ok &= n == 1
    expected = {2: [6], 3: [1, 9], 4: [1, 17]}
    for h in (2, 3, 4):
        _, orbs = pointset_stabilizer_pgammal3(regular_hyperoval(h))
        sizes = sorted(len(o) for o in orbs)
        rep.add(f"hyperconic.{1 << h}.orbits", sizes)
        ok &= sizes == expected[h]
    stab, orbs = pointset_stabilizer_pgammal3(lunelli_sce())
    rep.add("lunelli_sce.orbits", sorted(len(o) for o in orbs))
    rep.add("lunelli_sce.stabiliser_order", len(stab))
    ok &= len(orbs) == 1 and len(stab) == 144
    lo, hi = parse_range(args.range) if args.range else (13, 120)
    reports = screen_range(lo, hi)
    survivors = [r.d for r in reports if r.survives]
    rep.add("screen.range", f"{lo}..{hi}")
    rep.add("screen.dimensions", len(reports))
    rep.add("screen.survivors", survivors or "none")
    ok &= not survivors and all(r.consistent for r in reports)
    rep.add("all_pass", ok)
    return EXIT_OK if ok else EXIT_FAIL


def _screen_block(rep: Report, r) -> None:
    p = f"d{r.d}."
    rep.add(p + "e", r.e)
    rep.add(p + "target", r.target)
    rep.add(p + "identity", r.identity_holds)
    rep.add(p + "ppds", r.ppds or "none")
    rep.add(p + "phi_star", r.phi_star)
    rep.add(p + "phi_star_divides_target", r.phi_star_divides_target)
    rep.add(p + "classical_bound_excludes", r.classical_bound_excludes)
    for c in r.extension_checks:
        rep.add(p + f"extension.b{c.b}.inequality_holds", c.inequality_holds)
    rep.add(p + "b_constraints_ok", r.b_constraints.ok)
    if r.imprimitive_candidates:
        e, d = r.imprimitive_candidates[0]
        rep.add(p + "imprimitive_candidate", f"({e},{d})")
        rep.add(p + "target_factorisation", "*".join(f"{q}^{k}" if k > 1 else str(q) for q, k in r.target_factorisation.items()))
        rep.add(p + "computed_large_prime", r.computed_large_prime)
        rep.add(p + "printed_prime", r.printed_prime)
        rep.add(p + "deferred_to", r.deferred_to)
    rep.add(p + "excluded", not r.survives)


def cmd_screen(args, rep: Report) -> int:
    from .screening import parse_range, screen_dimension, screen_range

    if (args.d is None) == (args.range is None):
        raise InputError("give exactly one of --d or --range")
    reports = [screen_dimension(args.d)] if args.d is not None else screen_range(*parse_range(args.range))
    for r in reports:
        _screen_block(rep, r)
    ok = all(r.consistent for r in reports)
    rep.add("all_consistent", ok)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_build_gq(args, rep: Report) -> int:
    obj = resolve_object(args.object)
    g = _as_glr_input(obj)(_guard(args, HARD_POINT_CAP, HARD_POINT_CAP))
    rep.add("object", args.object)
    rep.add("r", g.r)
    rep.add("m", g.m)
    rep.add("q", g.field.q)
    rep.add("points", g.npoints)
    rep.add("lines", g.nlines)
    rep.add("line_size", sorted(g.line_sizes()))
    rep.add("point_degree", sorted(g.point_degrees()))
    return EXIT_OK


def cmd_verify_gq(args, rep: Report) -> int:
    from .quadrangles import GQAxiomError, verify_gq

    obj = resolve_object(args.object)
    g = _as_glr_input(obj)(_guard(args, HARD_POINT_CAP, HARD_POINT_CAP))
    if args.delete_line is not None:
        if not 0 <= args.delete_line < g.nlines:
            raise InputError("--delete-line index out of range")
        g = g.without_line(args.delete_line)
    rep.add("object", args.object)
    rep.add("points", g.npoints)
    rep.add("lines", g.nlines)
    try:
        order = verify_gq(g)
    except GQAxiomError as exc:
        rep.add("verified", False)
        rep.add("axiom", exc.axiom)
        rep.add("witness", list(exc.witness))
        rep.add("reason", str(exc))
        return EXIT_FAIL
    rep.add("verified", True)
    rep.add("s", order.s)
    rep.add("t", order.t)
    rep.add("thick", order.thick)
    return EXIT_OK


def cmd_extract(args, rep: Report) -> int:
    from .quadrangles import extract_pseudo_hyperoval, grid_check

    obj = resolve_object(args.object)
    g = _as_glr_input(obj)(_guard(args, HARD_POINT_CAP, HARD_POINT_CAP))
    o = extract_pseudo_hyperoval(g)
    source = obj if isinstance(obj, PseudoHyperoval) else PseudoHyperoval(
        1, obj.field.f, tuple(p.subspace() for p in obj.points))
    roundtrip = set(o.elements) == set(source.elements)
    from itertools import combinations

    grids = all(grid_check(o, i, j, k) and grid_check(o, k, i, j) and grid_check(o, j, k, i)
                for i, j, k in combinations(range(len(o)), 3))
    rep.add("object", args.object)
    rep.add("extracted", len(o))
    rep.add("element_size", sorted({o.q ** u.dim for u in o.elements}))
    rep.add("round_trip", roundtrip)
    rep.add("grid_checks", grids)
    if args.output:
        Path(args.output).write_text(format_subspaces(o.elements))
        rep.add("output", args.output)
    return EXIT_OK if roundtrip and grids else EXIT_FAIL


def cmd_kernel_field(args, rep: Report) -> int:
    from .quadrangles import kernel_field

    o = _pseudo(resolve_object(args.object))
    k = kernel_field(o.elements)
    rep.add("object", args.object)
    rep.add("ambient_dim", 3 * o.n)
    rep.add("kernel_dim", len(k.basis))
    rep.add("kernel_order", k.order)
    rep.add("field_axioms", True)
    return EXIT_OK


def cmd_transitivity_report(args, rep: Report) -> int:
    from .quadrangles import transitivity_report

    o = _pseudo(resolve_object(args.object))
    gens = resolve_generators(args.generators) if args.generators else []
    r = transitivity_report(o, gens, guard=_guard(args, HARD_POINT_CAP, HARD_POINT_CAP))
    rep.add("object", args.object)
    rep.add("generators", len(gens))
    rep.add("o_transitive", r.o_transitive)
    rep.add("line_transitive", r.line_transitive)
    rep.add("flag_transitive", r.flag_transitive)
    rep.add("element_orbits", r.element_orbits)
    rep.add("line_orbits", r.line_orbits)
    rep.add("flag_orbits", r.flag_orbits)
    rep.add("consistent", r.consistent)
    return EXIT_OK


def _group(args):
    from .groups import close_group

    return close_group(resolve_generators(args.generators), cap=_guard(args, 10**5, 10**6))


def cmd_subgroups(args, rep: Report) -> int:
    from .groups import all_subgroups, group_by_class, transitive_subgroups

    G = _group(args)
    lat = all_subgroups(G)
    rep.add("order", G.order)
    rep.add("subgroups", len(lat))
    rep.add("conjugacy_classes", lat.conjugacy_class_count)
    if args.pseudo_hyperoval:
        o = _pseudo(resolve_object(args.pseudo_hyperoval))
        t = transitive_subgroups(G, o, lat)
        classes = group_by_class(lat, t)
        rep.add("transitive_subgroups", len(t))
        rep.add("transitive_classes", len(classes))
        rep.add("transitive_class_orders", [c[0].order for c in classes])
    return EXIT_OK


def cmd_irreducible(args, rep: Report) -> int:
    from .groups import is_irreducible

    G = _group(args)
    irr, witness = is_irreducible(G)
    rep.add("order", G.order)
    rep.add("dim", G.dim)
    rep.add("irreducible", irr)
    if witness is not None:
        rep.add("witness_dim", witness.dim)
        rep.add("witness_basis", [format(b, f"0{G.dim}b") for b in witness.basis])
    return EXIT_OK


def cmd_structure(args, rep: Report) -> int:
    from .groups import structure_report

    G = _group(args)
    r = structure_report(G, args.order)
    rep.add("order", r.order)
    rep.add("center_order", r.center_order)
    rep.add("exponent", r.exponent)
    rep.add("normal_subgroups" + (f".order{args.order}" if args.order else ""), len(r.normal_subgroups))
    for i, (n, chk, e) in enumerate(zip(r.normal_subgroups, r.extraspecial, r.exponents)):
        rep.add(f"normal.{i}.order", n.order)
        rep.add(f"normal.{i}.exponent", e)
        rep.add(f"normal.{i}.extraspecial", chk.ok)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--guard", type=int, default=None, help="override the size guard of the command")
    common.add_argument("--format", choices=("text", "kv"), default="text")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp line")

    p = argparse.ArgumentParser(prog="pseudohyperovals", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("verify", cmd_verify, "verify a hyperoval or pseudo-hyperoval")
    sp.add_argument("kind", choices=("hyperoval", "pseudo-hyperoval"))
    sp.add_argument("object")

    sp = add("appendix-a", cmd_appendix_a, "reproduce the 12-dimensional stabiliser claims")
    sp.add_argument("--claims", help="comma-separated claim keys")
    sp.add_argument("--generators", help="matrix-list file with the two generators")

    sp = add("classify", cmd_classify, "desk-scale classification evidence")
    sp.add_argument("--range", help="screening range LO..HI (default 13..120)")

    sp = add("screen", cmd_screen, "arithmetic screening of dimensions")
    sp.add_argument("--d", type=int)
    sp.add_argument("--range")

    sp = add("build-gq", cmd_build_gq, "build T*(S) and report counts")
    sp.add_argument("object")
    sp = add("verify-gq", cmd_verify_gq, "build T*(S) and verify the GQ axioms")
    sp.add_argument("object")
    sp.add_argument("--delete-line", type=int, help="remove one line first (negative control)")
    sp = add("extract", cmd_extract, "extract the pseudo-hyperoval from T*(S)")
    sp.add_argument("object")
    sp.add_argument("--output")
    sp = add("kernel-field", cmd_kernel_field, "kernel field of a pseudo-hyperoval")
    sp.add_argument("object")
    sp = add("transitivity-report", cmd_transitivity_report, "element, line and flag transitivity")
    sp.add_argument("object")
    sp.add_argument("--generators", help="matrix-list file or appendix-a:G")

    for name, fn, help_ in (("subgroups", cmd_subgroups, "subgroup lattice summary"),
                            ("irreducible", cmd_irreducible, "irreducibility by exhaustive spinning"),
                            ("structure", cmd_structure, "normal subgroups, centre, exponent")):
        sp = add(name, fn, help_)
        sp.add_argument("generators", help="matrix-list file or appendix-a:G")
        if name == "subgroups":
            sp.add_argument("--pseudo-hyperoval", help="count subgroups transitive on this object")
        if name == "structure":
            sp.add_argument("--order", type=int, help="only normal subgroups of this order")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    rep = Report()
    try:
        code = args.fn(args, rep)
    except GuardExceeded as exc:
        rep.add("error", f"guard exceeded: {exc}")
        code = EXIT_GUARD
    except (InputError, FormatError, FieldError, DimensionMismatch, FileNotFoundError, KeyError) as exc:
        rep.add("error", f"input: {exc}")
        code = EXIT_INPUT
    except ValueError as exc:
        rep.add("error", f"input: {exc}")
        code = EXIT_INPUT
    rep.add("exit_code", code)
    sys.stdout.write(rep.render(args.format, not args.no_timestamp))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
