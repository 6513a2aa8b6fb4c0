"""Command-line driver: validate, classify, enumerate, reduce and verify."""

from __future__ import annotations

import argparse
import sys
from importlib import resources

from .classify import UNKNOWN, VectroidProblem, classify, empirical_type_report, verify_wild_plane
from .dsl import (SpecDocument, build_marked_quiver, format_vectroid, load_spec, parse_spec, plane_spec,
                  serialize_spec)
from .errors import (IndPossiblyInfinite, MarkedQuiverError, NotPendant, NotReducible, ParseError,
                     TooLarge, ValidationError)
from .exactlin import GF
from .rep import enumerate_indecomposables, format_representation
from .vectroid import validate_spectroid

__all__ = ["main", "run", "parse_spec", "serialize_spec", "SpecDocument"]

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


def fixture_text(name: str) -> str:
    return resources.files("markedquiver").joinpath("fixtures", name).read_text(encoding="utf-8")


def fixture(name: str):
    doc = parse_spec(fixture_text(name))
    return doc, build_marked_quiver(doc)


def _table(rows, out):
    widths = [max(len(str(r[i])) for r in rows) for i in range(len(rows[0]))]
    for r in rows:
        print("  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip(), file=out)


# ---------------------------------------------------------------- commands


def cmd_validate(args, out) -> int:
    doc = load_spec(args.spec)
    mq = build_marked_quiver(doc)
    bad = 0
    rows = [("vertex", "objects", "kind", "spectroid")]
    for v in mq.vertices:
        rep = validate_spectroid(mq.marking[v])
        bad += not rep.ok
        rows.append((v, " ".join(mq.marking[v].labels), mq.kinds[v], "ok" if rep.ok else "; ".join(c for c, _ in rep.failures)))
    print(f"quiver: {len(mq.vertices)} vertices, {len(mq.arrows)} arrows, p = {mq.p}", file=out)
    _table(rows, out)
    return EXIT_FAIL if bad else EXIT_OK


def _problem_text(problem: VectroidProblem, mq) -> str:
    recipe = mq.marking[problem.source_vertex].recipe
    if recipe is None:
        return str(problem)
    text = format_vectroid(recipe)
    if problem.opposite:
        text = f"op({text})"
    if problem.linear_part:
        lin = format_vectroid(("linear", problem.linear_part))
        text = f"({text}) + {lin}" if " + " in text and not problem.opposite else f"{text} + {lin}"
    return text


def cmd_classify(args, out) -> int:
    mq = build_marked_quiver(load_spec(args.spec))
    v = classify(mq)
    print(f"verdict: {v}", file=out)
    if v.note:
        print(f"note: {v.note}", file=out)
    if isinstance(v.witness, VectroidProblem):
        print(f"vectroid problem: {_problem_text(v.witness, mq)}", file=out)
    if args.evidence:
        fields = tuple(int(t) for t in args.fields.split(","))
        rec = empirical_type_report(mq, args.dim_bound, fields)
        print(f"evidence (dim bound {args.dim_bound}): {', '.join(rec.flags) or 'none'}", file=out)
        rows = [("dims",) + tuple(f"p={p}" for p in rec.fields)]
        for d, c in rec.counts.items():
            if any(c.values()):
                rows.append((d.describe(mq),) + tuple(c[p] for p in rec.fields))
        rows.append(("total",) + tuple(rec.totals()[p] for p in rec.fields))
        _table(rows, out)
        for n in rec.notes:
            print(f"note: {n}", file=out)
    return EXIT_RESOURCE if v.kind == UNKNOWN else EXIT_OK


def cmd_enumerate(args, out) -> int:
    mq = build_marked_quiver(load_spec(args.spec))
    if args.p is not None:
        mq = mq.over(GF(args.p))
    ind = enumerate_indecomposables(mq, args.dim_bound)
    print(f"{len(ind)} indecomposables of total dimension <= {args.dim_bound} over GF({mq.p})", file=out)
    for i, u in enumerate(ind, 1):
        print(f"[{i}] total {u.total_dim}", file=out)
        print(format_representation(u), end="", file=out)
    return EXIT_OK


def cmd_reduce(args, out) -> int:
    from .reduce import lemma7_fast_path, reduce_pendant_arrow, reducible_case
    mq = build_marked_quiver(load_spec(args.spec))
    res = reduce_pendant_arrow(mq, args.arrow, cap=args.dim_cap)
    kept = res.direction["kept"]
    new = res.reduced.marking[kept]
    print(f"removed {res.direction['removed']} along {args.arrow}; new marking at {kept}:", file=out)
    rows = [("object", "dim", "source indecomposable")]
    for (v, lab), u in res.object_table.items():
        rows.append((lab, u.total(kept), u.dims.describe(mq)))
    _table(rows, out)
    print(f"kernel objects: {len(res.kernel_objects)}", file=out)
    for u in res.kernel_objects:
        print(f"  {u.dims.describe(mq)}", file=out)
    print(f"kind of new marking: {res.reduced.kinds[kept]}", file=out)
    try:
        case, _, _ = reducible_case(mq, args.arrow)
        fast = lemma7_fast_path(mq, args.arrow).reduced.marking[kept]
        from .vectroid import almost_equivalent, vectroids_isomorphic
        if case == 2:
            rel, ok = "almost equivalent", almost_equivalent(new, fast)
        else:
            rel, ok = "isomorphic", vectroids_isomorphic(new, fast)
        print(f"reducible case {case}; table vectroid {' '.join(fast.labels)}; {rel}: {ok}", file=out)
    except (NotReducible, NotPendant):
        print("not a reducible arrow", file=out)
    return EXIT_OK


# ---------------------------------------------------------------- built-in verifications


def verify_sec4(out, p=2) -> bool:
    from .reduce import _induced, lemma3_counts, reduce_pendant_arrow
    from .vectroid import make_linear, vectroids_isomorphic
    _, mq = fixture("example5.mq")
    mq = mq.over(GF(p))
    sub = _induced(mq, ["d", "c"])
    ind = enumerate_indecomposables(sub, 3)
    print(f"ind of d -> c up to total dimension 3: {len(ind)} classes", file=out)
    res = reduce_pendant_arrow(mq, "beta")
    vd = res.reduced.marking["d"]
    iso = vectroids_isomorphic(vd, make_linear(3, mq.field))
    print(f"new marking at d: {' '.join(vd.labels)} (isomorphic to k_3: {iso})", file=out)
    kern = sorted(f"c{u.dims.at(sub, 'c').index(1) + 1}^0" for u in res.kernel_objects)
    print(f"kernel objects: {{{', '.join(kern)}}}", file=out)
    left, right, k = lemma3_counts(mq, res, 4)
    print(f"counts up to 4: ind Q = {left}, ind Q' = {right}, kernel = {k}", file=out)
    return len(ind) == 5 and iso and kern == ["c1^0", "c2^0"] and left == right + k


def verify_example6(out, p=2) -> bool:
    from .reduce import lemma7_fast_path, reduce_pendant_arrow
    from .vectroid import almost_equivalent, structure_poset, structure_posets_isomorphic
    _, mq = fixture("example6.mq")
    mq = mq.over(GF(p))
    res = reduce_pendant_arrow(mq, "beta")
    new = res.reduced.marking["w"]
    fast = lemma7_fast_path(mq, "beta").reduced.marking["w"]
    sp = structure_poset(new)
    iso = structure_posets_isomorphic(sp, structure_poset(fast))
    print(f"surviving indecomposables: {len(new)}; kernel objects: {len(res.kernel_objects)}", file=out)
    print(f"object dimensions: {sorted(new.dims)}", file=out)
    print(f"structure poset: {len(sp.poset.elements)} points, isomorphic to the case table: {iso is not None}",
          file=out)
    ae = almost_equivalent(new, fast)
    print(f"almost equivalent to the case table vectroid: {ae}", file=out)
    if iso is not None:
        names = sorted(fast.labels)
        print(f"objects: {{{', '.join(names)}}}", file=out)
    return (len(new) == 8 and sorted(new.dims) == [1] * 7 + [2] and len(sp.poset.elements) == 9
            and iso is not None and ae)


def verify_plane(out, p=2) -> bool:
    doc, mq = fixture("example5.mq")
    mq = mq.over(GF(p))
    rep = verify_wild_plane(mq, plane_spec(doc, "W", mq))
    print(f"GF({p}): {rep.indecomposable}/{rep.points} indecomposable, "
          f"{rep.non_isomorphic}/{rep.pairs} pairs non-isomorphic", file=out)
    for f in rep.failures:
        print(f"  failure: {f}", file=out)
    return rep.ok


def prop8_check(mq, bound: int):
    """``(|ind Q_M|, |ind V + k_{m-1} minus k_{m-1}|, bijective)`` up to ``bound``."""
    from .rep import are_isomorphic, is_indecomposable
    from .reduce import (preliminary_form, prop8_F, prop8_kernel_objects, prop8_matrix_problem,
                         prop8_size, prop8_vectroid_problem)
    _, m = prop8_vectroid_problem(mq)
    left = enumerate_indecomposables(mq, bound)
    prob = prop8_matrix_problem(mq)
    kern = prop8_kernel_objects(prob, m)
    right = [u for u in enumerate_indecomposables(prob, 2 * bound)
             if prop8_size(u, m) <= bound and not any(u == k for k in kern)]
    hits = []
    for u in right:
        w, _, _ = preliminary_form(u, m)
        img = prop8_F(w, m, mq)
        if not is_indecomposable(img):
            return len(left), len(right), False
        hits.extend(j for j, l in enumerate(left) if are_isomorphic(img, l))
    return len(left), len(right), sorted(hits) == list(range(len(left)))


def verify_prop8(out, p=2) -> bool:
    ok = True
    for name in ("prop8_chain.mq", "prop8_antichain.mq"):
        _, mq = fixture(name)
        mq = mq.over(GF(p))
        left, right, bij = prop8_check(mq, 3)
        print(f"{name}: ind Q_M = {left}, transported ind = {right}, bijection: {bij}", file=out)
        ok &= left == right and bij
    return ok


def verify_gelfand(out, p=2) -> bool:
    _, mq = fixture("gelfand.mq")
    mq = mq.over(GF(p))
    v = classify(mq)
    print(f"verdict: {v}", file=out)
    return v.kind == "Tame" and str(v.witness) == "D̃_4"


VERIFIERS = {
    "sec4-reduction": verify_sec4,
    "example6": verify_example6,
    "wild-plane": verify_plane,
    "prop8": verify_prop8,
    "gelfand-d4": verify_gelfand,
}


def cmd_verify(args, out) -> int:
    ok = VERIFIERS[args.name](out, args.p)
    print("PASS" if ok else "FAIL", file=out)
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- entry points


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="markedquiver", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    s = sub.add_parser("validate", help="parse a spec and check every marking")
    s.add_argument("spec")
    s = sub.add_parser("classify", help="representation type of a marked quiver")
    s.add_argument("spec")
    s.add_argument("--evidence", action="store_true", help="also count indecomposables")
    s.add_argument("--dim-bound", type=int, default=3)
    s.add_argument("--fields", default="2,3")
    s = sub.add_parser("enumerate", help="list indecomposables up to a total dimension")
    s.add_argument("spec")
    s.add_argument("--dim-bound", type=int, default=3)
    s.add_argument("--p", type=int, default=None)
    s = sub.add_parser("reduce", help="eliminate a pendant arrow")
    s.add_argument("spec")
    s.add_argument("--arrow", required=True)
    s.add_argument("--dim-cap", type=int, default=6)
    s = sub.add_parser("verify", help="reproduce a built-in example")
    s.add_argument("name", choices=sorted(VERIFIERS))
    s.add_argument("--p", type=int, default=None)
    return ap


COMMANDS = {"validate": cmd_validate, "classify": cmd_classify, "enumerate": cmd_enumerate,
            "reduce": cmd_reduce, "verify": cmd_verify}


def run(argv, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "p", None) is None and args.command == "verify":
        args.p = 3 if args.name == "wild-plane" else 2
    try:
        return COMMANDS[args.command](args, out)
    except (ParseError, ValidationError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    except (TooLarge, IndPossiblyInfinite) as exc:
        print(f"resource bound exceeded: {exc}", file=err)
        return EXIT_RESOURCE
    except (NotPendant, NotReducible, MarkedQuiverError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
