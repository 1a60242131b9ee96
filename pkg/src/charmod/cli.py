"""Command-line front end.

    charmod presentation FILE
    charmod ann FILE [--method elimination|polytope|cone] [--bounds k,d]
    charmod betti FILE
    charmod dirimage FILE --project s [--reduce]
    charmod spline eval FILE --project s --at x1,...,xs
    charmod spline check FILE --project s [--samples N] [--seed S]
    charmod collapse FILE --project s [--samples N] [--seed S]
    charmod verify FILE [--project s] [--samples N] [--seed S]

Output is JSON unless ``--text`` is given.  Exit status is 0 on success,
1 on malformed input and 2 on a domain error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

import sympy

from .errors import CharmodError, ParseError
from .io import parse_complex, parse_number
from .weyl import WeylElement, x_part_groups


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def _common(p: argparse.ArgumentParser, project: bool = False, required: bool = False):
    p.add_argument("file")
    p.add_argument("--text", action="store_true", help="plain text instead of JSON")
    if project:
        p.add_argument("--project", type=int, required=required, metavar="s",
                       help="project onto the first s coordinates")


def _sampling(p: argparse.ArgumentParser):
    p.add_argument("--samples", type=int, default=20, metavar="N")
    p.add_argument("--seed", type=int, default=0, metavar="S")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="charmod", description="Characteristic modules of polyhedral complexes.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    _common(sub.add_parser("presentation", help="canonical presentation of M_K"))
    p = sub.add_parser("ann", help="annihilator of the top-dimensional region")
    _common(p)
    p.add_argument("--method", choices=["elimination", "polytope", "cone"], default="elimination")
    p.add_argument("--bounds", default="3,3", metavar="k,d", help="ansatz order and degree bounds")
    _common(sub.add_parser("betti", help="Borel-Moore Betti numbers"))
    p = sub.add_parser("dirimage", help="presentation of the zeroth direct image")
    _common(p, project=True, required=True)
    p.add_argument("--reduce", action="store_true", help="eliminate generators with positive fiber dimension")
    p = sub.add_parser("spline", help="B-spline evaluation and relation checks")
    ssub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    q = ssub.add_parser("eval")
    _common(q, project=True, required=True)
    q.add_argument("--at", required=True, metavar="x1,...,xs")
    q = ssub.add_parser("check")
    _common(q, project=True, required=True)
    _sampling(q)
    p = sub.add_parser("collapse", help="spline isomorphism certificate via 1-free collapses")
    _common(p, project=True, required=True)
    _sampling(p)
    p.set_defaults(samples=1)
    p = sub.add_parser("verify", help="run the consistency checks on a complex")
    _common(p, project=True)
    _sampling(p)
    return parser


def _seed(args) -> int:
    env = os.environ.get("CHARMOD_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ParseError(f"CHARMOD_SEED: expected an integer, got {env!r}") from None
    return args.seed


# ---------------------------------------------------------------- printing

def factored_text(P: WeylElement) -> str:
    """Group by derivative monomial and factor each polynomial coefficient."""
    m = P.m
    xs = [sympy.Symbol(f"x{i + 1}") for i in range(m)]
    parts = []
    groups = x_part_groups(P)
    for b in sorted(groups, key=lambda b: (sum(b), tuple(-v for v in reversed(b))), reverse=True):
        poly = sum(sympy.Rational(int(c.numerator), int(c.denominator)) * sympy.prod(
            [x ** k for x, k in zip(xs, a)]) for a, c in groups[b].items())
        coeff = str(sympy.factor(poly)).replace("**", "^").replace(" ", "")
        dpart = "*".join(f"d{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(b) if k)
        if not dpart:
            term = coeff
        elif coeff == "1":
            term = dpart
        elif coeff == "-1":
            term = "-" + dpart
        else:
            if _top_level_sum(coeff):
                coeff = f"({coeff})"
            term = f"{coeff}*{dpart}"
        parts.append(term)
    text = "+".join(parts).replace("+-", "-")
    return text or "0"


def _top_level_sum(s: str) -> bool:
    depth = 0
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and i > 0:
            return True
    return False


def _emit(out, payload, text: str | None, as_text: bool):
    if as_text and text is not None:
        out.write(text.rstrip("\n") + "\n")
    else:
        out.write(json.dumps(payload, indent=2) + "\n")


# ---------------------------------------------------------------- verbs

def _presentation(K, args, out):
    from .presentation import presentation
    P = presentation(K)
    lines = [f"generators: {', '.join(P.generators)}"]
    lines += [" + ".join(f"({c.to_text()})*{g}" for g, c in d.items()) for d in P.relation_dicts()]
    _emit(out, P.to_json(), "\n".join(lines), args.text)


def _ann(K, args, out):
    from .annihilator import AnsatzBounds, cone_annihilator, minimal_generators, polytope_annihilator
    from .presentation import annihilator_by_elimination
    bounds = AnsatzBounds.parse(args.bounds)
    top = K.top_cells()
    if args.method == "elimination":
        I = annihilator_by_elimination(K)
    elif args.method == "polytope":
        if len(top) != 1:
            raise CharmodError("the polytope method needs a single top-dimensional cell")
        I = polytope_annihilator(K.cell(top[0]), bounds)
    else:
        I = cone_annihilator(K, bounds)
    gens = sorted(factored_text(g) for g in minimal_generators(I))
    _emit(out, {"region": top, "generators": gens}, ", ".join(gens), args.text)


def _betti(K, args, out):
    from .homology import bm_betti
    B = bm_betti(K)
    _emit(out, json.loads(B.to_json()), " ".join(f"b{k}={v}" for k, v in sorted(B.betti.items())), args.text)


def _dirimage(K, args, out):
    from .dirimage import dir_image_presentation, reduce_generators
    P = dir_image_presentation(K, args.project)
    if args.reduce:
        P = reduce_generators(P)
    payload = P.to_json()
    payload["s"] = P.s
    payload["relation_count"] = len(P.relations)
    payload["generator_count"] = len(P.generators)
    text = f"s={P.s} generators={len(P.generators)} relations={len(P.relations)}"
    _emit(out, payload, text, args.text)


def _spline(K, args, out):
    from .bspline import bspline_value, check_dbh, generic_samples
    s = args.project
    if args.action == "eval":
        x = [parse_number(v.strip(), "--at") for v in args.at.split(",")]
        if len(x) != s:
            raise ParseError(f"--at: expected {s} coordinates, got {len(x)}")
        rows = []
        for c in K.ordered:
            if c.dim != K.dim:
                continue
            v = bspline_value(c, s, x)
            rows.append({"cell": c.id, "lattice_value": str(v.lattice_value),
                         "euclidean_factor": v.euclidean_factor})
        text = "\n".join(f"{r['cell']}: {r['lattice_value']}" for r in rows)
        _emit(out, {"at": [str(a) for a in x], "values": rows}, text, args.text)
        return
    seed = _seed(args)
    rng = random.Random(seed)
    samples = generic_samples(K, s, args.samples, rng)
    report = check_dbh(K, s, samples, seed=seed)
    ok = all(r["equal"] for r in report)
    text = f"{sum(r['equal'] for r in report)}/{len(report)} relations hold exactly"
    _emit(out, {"all_equal": ok, "report": report}, text, args.text)


def _collapse(K, args, out):
    from .dirimage import spline_iso_certificate
    cert = spline_iso_certificate(K, args.project, args.samples, _seed(args))
    text = f"{cert.verdict} after {len(cert.collapse_sequence)} collapses"
    _emit(out, cert.to_json(), text, args.text)


def _verify(K, args, out):
    from .homology import bm_chain_complex
    from .presentation import facet_extraction_operator, presentation
    checks = {}
    checks["boundary_squares_to_zero"] = bm_chain_complex(K).check_square_zero()
    if K.is_closed:
        checks["relation_count"] = len(presentation(K).relations) == K.ambient_dim * len(K.cells)
    extraction = True
    for c in K.cells:
        if c.dim == K.dim and c.is_bounded:
            for f in K.facets_in(c.id):
                try:
                    facet_extraction_operator(K, K.facet_cell_id(f), c.id)
                except CharmodError:
                    extraction = False
    checks["facet_extraction"] = extraction
    if args.project:
        from .bspline import check_dbh, generic_samples
        seed = _seed(args)
        samples = generic_samples(K, args.project, args.samples, random.Random(seed))
        checks["de_boor_hollig"] = all(r["equal"] for r in check_dbh(K, args.project, samples, seed=seed))
    ok = all(checks.values())
    text = "\n".join(f"{k}: {'ok' if v else 'FAILED'}" for k, v in checks.items())
    _emit(out, {"ok": ok, "checks": checks}, text, args.text)
    if not ok:
        raise CharmodError("verification failed: " + ", ".join(k for k, v in checks.items() if not v))


VERBS = {
    "presentation": _presentation,
    "ann": _ann,
    "betti": _betti,
    "dirimage": _dirimage,
    "spline": _spline,
    "collapse": _collapse,
    "verify": _verify,
}


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        K = parse_complex(args.file)
    except ParseError as exc:
        err.write(f"ParseError: {exc}\n")
        return 1
    try:
        VERBS[args.verb](K, args, out)
    except ParseError as exc:
        err.write(f"ParseError: {exc}\n")
        return 1
    except CharmodError as exc:
        err.write(f"{type(exc).__name__}: {exc}\n")
        return 2
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
