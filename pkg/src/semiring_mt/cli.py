"""``semiring-mt`` command line."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import attacks, axioms
from .demos import SCENARIOS, run_demo
from .equivalence import (
    HomPair,
    certify_equivalence,
    distinguisher_search,
    minmax_threshold_family,
    posbool_family,
    user_family,
    why_family,
)
from .errors import ResourceLimit, ScenarioAssertionFailed, SemiringMTError
from .homomorphisms import universal_hom
from .interpretation import evaluate, find_isomorphism, format_table, interpretation_to_json, load_interpretation
from .semirings import MinMaxSemiring, PolySemiring, parse_semiring
from .syntax import parse_formula, print_formula

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _emit(args, text: str, doc) -> None:
    if args.json:
        print(json.dumps(doc, indent=2, sort_keys=False))
    else:
        print(text)


def _read_formula(text: str):
    path = Path(text)
    if path.suffix and path.is_file():
        text = path.read_text(encoding="utf-8")
    return parse_formula(text)


def _assignment(items: Sequence[str]) -> dict[str, str]:
    out = {}
    for item in items or ():
        var, sep, elem = item.partition("=")
        if not sep:
            raise UsageError(f"assignment {item!r} is not of the form var=element")
        out[var.strip()] = elem.strip()
    return out


def _parse_sigma(text: str) -> dict[str, str]:
    sigma = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        src, sep, dst = part.replace("->", "=").partition("=")
        if not sep:
            raise UsageError(f"permutation entry {part!r} is not of the form x->y")
        sigma[src.strip()] = dst.strip()
    return sigma


def _family_from_file(path: str):
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    source = parse_semiring(doc["source"])
    target = parse_semiring(doc["target"])
    if not isinstance(source, PolySemiring):
        raise UsageError("family files need a polynomial source semiring")
    pairs = []
    for i, p in enumerate(doc["pairs"], 1):
        left = universal_hom(source, target, {v: target.parse_value(x) for v, x in p["left"].items()}, f"l{i}")
        right = left
        if "right" in p:
            right = universal_hom(source, target, {v: target.parse_value(x) for v, x in p["right"].items()}, f"r{i}")
        pairs.append(HomPair(left, right))
    return user_family(pairs, trusted=bool(doc.get("trusted", False)))


def build_family(spec: str, tag):
    kind, _, arg = spec.partition(":")
    if kind == "posbool":
        if not isinstance(tag, PolySemiring):
            raise UsageError("the posbool family needs a PosBool[X] interpretation")
        return posbool_family(tag.variables)
    if kind == "why":
        if not isinstance(tag, PolySemiring):
            raise UsageError("the why family needs a W[X] interpretation")
        return why_family(tag.variables, _parse_sigma(arg))
    if kind == "minmax":
        if not isinstance(tag, MinMaxSemiring):
            raise UsageError("the threshold family needs a minmax interpretation")
        return minmax_threshold_family(tag.n)
    if kind == "file":
        return _family_from_file(arg)
    raise UsageError(f"unknown family {spec!r}")


# ---------------------------------------------------------------------------
# commands


def cmd_eval(args) -> int:
    pi = load_interpretation(args.interp)
    phi = _read_formula(args.formula)
    value = evaluate(pi, phi, _assignment(args.assign))
    _emit(args, str(value), {"formula": print_formula(phi), "semiring": str(pi.semiring), "value": str(value)})
    return EXIT_OK


def _format_bijection(sigma) -> str:
    return ", ".join(f"{a} -> {b}" for a, b in sigma.items())


def cmd_iso(args) -> int:
    a, b = load_interpretation(args.file_a), load_interpretation(args.file_b)
    sigma = find_isomorphism(a, b)
    text = "not isomorphic" if sigma is None else _format_bijection(sigma)
    _emit(args, text, {"isomorphic": sigma is not None, "bijection": sigma})
    return EXIT_OK


def cmd_equiv(args) -> int:
    a, b = load_interpretation(args.file_a), load_interpretation(args.file_b)
    if args.family:
        verdict = certify_equivalence(a, b, build_family(args.family, a.semiring))
    else:
        verdict = distinguisher_search(a, b, args.size_bound, args.qr_bound, max_sentences=args.max_sentences)
    lines = [verdict.outcome.upper()]
    if verdict.witness is not None:
        va, vb = verdict.values
        lines.append(f"witness: {print_formula(verdict.witness)}")
        lines.append(f"values: {va} vs {vb}")
    for name, sigma in verdict.bijections:
        lines.append(f"{name}: {_format_bijection(sigma)}")
    if verdict.detail:
        lines.append(verdict.detail)
    _emit(args, "\n".join(lines), verdict.to_json())
    return EXIT_OK


def cmd_axioms(args) -> int:
    pi = load_interpretation(args.interp)
    cap = args.exp_cap
    kind = args.kind
    if kind == "classical":
        ax = axioms.AxiomSet((axioms.classical_characteristic(pi),), "classical")
    elif kind == "viterbi":
        ax = axioms.viterbi_axiomatisation(pi, cap)
    elif kind == "viterbi-eps":
        eps = args.epsilon if args.epsilon is not None else axioms.min_gap(pi.values())
        ax = axioms.viterbi_epsilon_axioms(pi, eps, cap)
    elif kind == "sorting":
        ax = axioms.sorting_axioms(pi.vocab, len(pi.universe), pi.semiring)
    elif kind == "nat":
        if args.q is None:
            raise UsageError("--q is required for nat characteristic sentences")
        ax = axioms.AxiomSet((axioms.nat_characteristic(pi, args.q),), "nat-q", axioms.radix_parameters(pi, args.q))
    elif kind == "natx":
        if args.C is None or args.n is None:
            raise UsageError("--C and --n are required for natx characteristic sentences")
        chi = axioms.natx_characteristic(pi, args.C, args.n)
        ax = axioms.AxiomSet((chi,), "natx", {"C": args.C, "n": args.n, "c": axioms.natx_modulus(pi, args.C, args.n)})
    else:  # pragma: no cover - argparse restricts the choices
        raise UsageError(kind)
    _emit(args, "\n".join(print_formula(s) for s in ax), ax.to_json())
    return EXIT_OK


def cmd_attack(args) -> int:
    if args.kind == "cancellation":
        if not (args.semiring and args.a and args.b and args.c):
            raise UsageError("cancellation needs --semiring, --a, --b and --c")
        tag = parse_semiring(args.semiring)
        w = attacks.verify_witness(tag, args.a, args.b, args.c)
        pi_b, pi_c = attacks.witness_interpretations(w)
        text = "\n".join(
            [
                f"witness verified in {tag}",
                f"ab = ac = {tag.format_value(w.product)}",
                "pi_b:",
                format_table(pi_b),
                "pi_c:",
                format_table(pi_c),
                "not isomorphic",
            ]
        )
        doc = {"witness": w.to_json(), "pi_b": interpretation_to_json(pi_b), "pi_c": interpretation_to_json(pi_c)}
        _emit(args, text, doc)
        return EXIT_OK
    if not args.interp:
        raise UsageError("tropical needs --interp")
    pi = load_interpretation(args.interp)
    res = attacks.tropical_perturbation(pi, [parse_formula(s) for s in args.sentence or ()])
    lines = [f"direction: ({', '.join(map(str, res.direction))}), delta = {res.delta}"]
    for s, x, y in res.agreement:
        lines.append(f"{print_formula(s)}: {x} = {y}")
    lines.append("pi':")
    lines.append(format_table(res.pi_prime))
    lines.append("not isomorphic")
    doc = res.to_json()
    doc["pi_prime"] = interpretation_to_json(res.pi_prime)
    _emit(args, "\n".join(lines), doc)
    return EXIT_OK


def cmd_demo(args) -> int:
    if args.list or not args.scenario:
        print("\n".join(SCENARIOS))
        return EXIT_OK
    try:
        rep = run_demo(args.scenario)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    _emit(args, "\n".join(rep.lines), rep.to_json())
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--json", action="store_true", help="print a JSON document")
    shared.add_argument("--size-bound", type=int, default=6, help="formula size bound for the search")
    shared.add_argument("--qr-bound", type=int, default=2, help="quantifier rank bound for the search")
    shared.add_argument("--exp-cap", type=int, default=axioms.DEFAULT_EXPONENT_CAP, help="largest exponent in a schedule")
    shared.add_argument("--family", help="posbool | why:x->y,y->x | minmax | file:PATH")

    parser = argparse.ArgumentParser(prog="semiring-mt", description="Semiring semantics for first-order logic.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[shared], help="evaluate a formula")
    p.add_argument("interp")
    p.add_argument("formula", help="formula text or a file containing it")
    p.add_argument("--assign", action="append", metavar="VAR=ELEM")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("iso", parents=[shared], help="search an isomorphism")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.set_defaults(run=cmd_iso)

    p = sub.add_parser("equiv", parents=[shared], help="certify or refute elementary equivalence")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--max-sentences", type=int, default=None)
    p.set_defaults(run=cmd_equiv)

    p = sub.add_parser("axioms", parents=[shared], help="generate characteristic sentences")
    p.add_argument("interp")
    p.add_argument("--kind", choices=["classical", "viterbi", "viterbi-eps", "sorting", "nat", "natx"], required=True)
    p.add_argument("--epsilon", type=_fraction)
    p.add_argument("--q", type=int)
    p.add_argument("--C", type=int)
    p.add_argument("--n", type=int)
    p.set_defaults(run=cmd_axioms)

    p = sub.add_parser("attack", parents=[shared], help="cancellation witnesses and tropical perturbation")
    p.add_argument("kind", choices=["cancellation", "tropical"])
    p.add_argument("--semiring")
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--c")
    p.add_argument("--interp")
    p.add_argument("--sentence", action="append")
    p.set_defaults(run=cmd_attack)

    p = sub.add_parser("demo", parents=[shared], help="run a worked example")
    p.add_argument("scenario", nargs="?")
    p.add_argument("--list", action="store_true")
    p.set_defaults(run=cmd_demo)
    return parser


def _fraction(text: str):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except ScenarioAssertionFailed as exc:
        print(f"scenario failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (UsageError, SemiringMTError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
