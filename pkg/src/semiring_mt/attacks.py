"""Constructions that defeat axiomatisations.

Two are implemented.  A *cancellation witness* in an idempotent semiring
yields two non-isomorphic one-relation interpretations that no sentence can
tell apart.  The *tropical perturbation* takes a tropical interpretation and
a set of fewer sentences than it has finite literals, and moves the literal
values along a direction that leaves each sentence's dominant monomial, and
therefore its value, untouched.

Tropical and Viterbi semirings are isomorphic through ``-log``; the Viterbi
version of the perturbation is the image of this one and is not computed
separately (the logarithm would leave the rationals).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from . import polynomials as P
from .errors import (
    ClassViolation,
    ConditionFailed,
    DegenerateKernel,
    DegenerateValues,
    MinimumNotStrict,
    NotModelDefining,
    TagMismatch,
    TooManyAxioms,
)
from .interpretation import (
    KInterpretation,
    evaluate,
    evaluate_payload,
    find_isomorphism,
    format_literal,
    is_model_defining,
    lit_key,
)
from .semirings import TROPICAL, Semiring, Value, boolpoly, sr_classify
from .syntax import Formula, lit_enum, print_formula

# ---------------------------------------------------------------------------
# cancellation


def _as_payload(tag: Semiring, v):
    if isinstance(v, Value):
        if v.tag != tag:
            raise TagMismatch(f"value of {v.tag} used with {tag}")
        return v.payload
    if isinstance(v, str):
        return tag.parse_value(v)
    if not tag.contains(v):
        raise TagMismatch(f"{v!r} is not an element of {tag}")
    return v


@dataclass(frozen=True)
class CancellationWitness:
    tag: Semiring
    a: Any
    b: Any
    c: Any

    @property
    def product(self):
        return self.tag.mul(self.a, self.b)

    def to_json(self) -> dict:
        f = self.tag.format_value
        return {
            "semiring": str(self.tag),
            "a": f(self.a),
            "b": f(self.b),
            "c": f(self.c),
            "ab": f(self.product),
        }


def verify_witness(tag: Semiring, a, b, c) -> CancellationWitness:
    """Check ``a + b = a + c = a``, ``ab = ac`` and ``b != c`` exactly."""
    if not sr_classify(tag).idempotent:
        raise ClassViolation(f"cancellation witnesses live in idempotent semirings, {tag} is not")
    a, b, c = (_as_payload(tag, v) for v in (a, b, c))
    for name, v in (("a", a), ("b", b), ("c", c)):
        if tag.is_zero(v):
            raise ConditionFailed("nonzero", f"{name} is zero")
    if tag.add(a, b) != a or tag.add(a, c) != a:
        raise ConditionFailed(1, "a + b = a + c = a does not hold")
    if tag.mul(a, b) != tag.mul(a, c):
        raise ConditionFailed(2, f"ab = {tag.format_value(tag.mul(a, b))} but ac = {tag.format_value(tag.mul(a, c))}")
    if b == c:
        raise ConditionFailed("distinctness", "b equals c")
    return CancellationWitness(tag, a, b, c)


def witness_interpretations(w: CancellationWitness) -> tuple[KInterpretation, KInterpretation]:
    """The pair with ``R(d) = a`` and ``R(e) = b`` resp. ``c``."""
    universe = ("d", "e")
    vocab = {"R": 1}
    pi_b = KInterpretation(w.tag, universe, vocab, {("R", True, ("d",)): w.a, ("R", True, ("e",)): w.b})
    pi_c = KInterpretation(w.tag, universe, vocab, {("R", True, ("d",)): w.a, ("R", True, ("e",)): w.c})
    if find_isomorphism(pi_b, pi_c) is not None:
        raise DegenerateValues("witness interpretations turned out isomorphic")
    return pi_b, pi_c


# ---------------------------------------------------------------------------
# tropical perturbation


@dataclass(frozen=True)
class PerturbationResult:
    pi_prime: KInterpretation
    literals: tuple            # keys of the finite literals, in variable order
    v: tuple[Fraction, ...]
    w: tuple[Fraction, ...]
    delta: Fraction
    direction: tuple[Fraction, ...]
    agreement: tuple           # (sentence, value on pi, value on pi')
    differing: tuple           # (literal key, old, new)
    dropped: tuple[Formula, ...] = ()
    dominant: tuple = ()       # (provenance polynomial, dominant monomial)

    def to_json(self) -> dict:
        f = TROPICAL.format_value
        return {
            "literals": [format_literal(k) for k in self.literals],
            "v": [f(x) for x in self.v],
            "w": [f(x) for x in self.w],
            "delta": f(self.delta),
            "direction": [str(x) for x in self.direction],
            "agreement": [
                {"sentence": print_formula(s), "pi": f(a), "pi_prime": f(b)} for s, a, b in self.agreement
            ],
            "differing": {"literal": format_literal(self.differing[0]), "pi": f(self.differing[1]), "pi_prime": f(self.differing[2])},
            "dropped": [print_formula(s) for s in self.dropped],
            "dominant": [{"provenance": str(p), "monomial": str(m)} for p, m in self.dominant],
            "isomorphic": False,
        }


def provenance_interpretation(pi: KInterpretation) -> tuple[KInterpretation, list]:
    """Replace the j-th nonzero literal (canonical order) by the variable ``xj`` over ``B[x1..xl]``."""
    keys = [lit_key(lit) for lit in lit_enum(pi.vocab, pi.universe)]
    keys = [k for k in keys if k in pi.table]
    names = [f"x{j}" for j in range(1, len(keys) + 1)]
    tag = boolpoly(*names)
    table = {k: tag.var(x) for k, x in zip(keys, names)}
    return KInterpretation(tag, pi.universe, pi.vocab, table), keys


def _h(m: P.Monomial, names, v) -> Fraction:
    return sum((m.exponent(x) * vj for x, vj in zip(names, v)), Fraction(0))


def _kernel_direction(rows: list[list[Fraction]], width: int) -> list[Fraction]:
    """First basis vector of the null space after reduction to row echelon form."""
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for col in range(width):
        pivot = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        lead = m[r][col]
        m[r] = [x / lead for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                factor = m[i][col]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    free = next(col for col in range(width) if col not in pivots)
    k = [Fraction(0)] * width
    k[free] = Fraction(1)
    for row, col in zip(m, pivots):
        k[col] = -row[free]
    return k


def tropical_perturbation(pi: KInterpretation, psi_set: Sequence[Formula]) -> PerturbationResult:
    if pi.semiring != TROPICAL:
        raise TagMismatch(f"expected a tropical interpretation, got {pi.semiring}")
    if not is_model_defining(pi):
        raise NotModelDefining("interpretation does not define a model")
    prov, keys = provenance_interpretation(pi)
    ell = len(keys)
    psi_set = list(psi_set)
    if len(psi_set) >= ell:
        raise TooManyAxioms(f"{len(psi_set)} sentences for {ell} finite literals")
    names = [f"x{j}" for j in range(1, ell + 1)]
    v = [pi.table[k] for k in keys]

    kept, dropped, polys = [], [], []
    for psi in psi_set:
        p = evaluate_payload(prov, psi)
        if p.is_zero:
            warnings.warn(f"dropping {print_formula(psi)}: its value is the semiring zero", stacklevel=2)
            dropped.append(psi)
            continue
        kept.append(psi)
        polys.append(p)

    dominant, margin = [], None
    for p in polys:
        ranked = sorted(p.monomials(), key=lambda m: _h(m, names, v))
        best = ranked[0]
        if len(ranked) > 1:
            gap = _h(ranked[1], names, v) - _h(best, names, v)
            if gap == 0:
                raise MinimumNotStrict(p, best, ranked[1])
            margin = gap if margin is None else min(margin, gap)
        dominant.append((p, best))

    rows = [[Fraction(m.exponent(x)) for x in names] for _, m in dominant]
    k = _kernel_direction(rows, ell)
    if next(x for x in k if x != 0) < 0:
        k = [-x for x in k]
    # a zero-cost literal cannot move downwards
    if any(kj < 0 and vj == 0 for kj, vj in zip(k, v)):
        if any(kj > 0 and vj == 0 for kj, vj in zip(k, v)):
            raise DegenerateKernel("kernel direction must lower a literal that already costs 0")
        k = [-x for x in k]
    norm = max(abs(x) for x in k)

    bounds = []
    if margin is not None:
        maxdeg = max(m.degree for p in polys for m in p.monomials())
        bounds.append(margin / (2 * maxdeg * norm))
    bounds.extend(vj / (2 * abs(kj)) for kj, vj in zip(k, v) if kj < 0)
    finite = sorted(set(v))
    gap = min((b - a for a, b in zip(finite, finite[1:])), default=Fraction(1))
    bounds.append(gap / (2 * norm))
    delta = min(bounds + [Fraction(1)])

    w = [vj + delta * kj for vj, kj in zip(v, k)]
    table = dict(pi.table)
    table.update(zip(keys, w))
    pi_prime = KInterpretation(TROPICAL, pi.universe, pi.vocab, table)

    agreement = []
    for psi in kept + dropped:
        a, b = evaluate(pi, psi).payload, evaluate(pi_prime, psi).payload
        if a != b:
            raise AssertionError(f"perturbation changed the value of {print_formula(psi)}")
        agreement.append((psi, a, b))
    for p, best in dominant:
        new_best = _h(best, names, w)
        if any(_h(m, names, w) <= new_best for m in p.monomials() if m != best):
            raise AssertionError(f"dominant monomial {best} of {p} moved")
    if find_isomorphism(pi, pi_prime) is not None:
        raise AssertionError("perturbed interpretation is isomorphic to the original")
    j = next(i for i, kj in enumerate(k) if kj != 0)
    return PerturbationResult(
        pi_prime,
        tuple(keys),
        tuple(v),
        tuple(w),
        delta,
        tuple(k),
        tuple(agreement),
        (keys[j], v[j], w[j]),
        tuple(dropped),
        tuple(dominant),
    )
