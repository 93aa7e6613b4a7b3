"""Characteristic sentences and finite axiom sets.

Every construction here starts from the universe formula, which pins a tuple
of variables to a distinct enumeration of the whole universe, and then adds a
body that encodes the literal values of one interpretation:

* the classical body lists the true literals;
* the Viterbi body raises each positive-valued literal to an exponent taken
  from a schedule, so that the value of the sentence on a second
  interpretation can only reach the original value if the literal values are
  the same;
* the radix body reads the literal values as the digits of one natural number
  and raises it to an exponent large enough that power sums determine the
  multiset of summands.
"""

from __future__ import annotations

import decimal
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .errors import (
    CapExceeded,
    ClassViolation,
    EpsilonTooLarge,
    NotModelDefining,
    TagMismatch,
    ValueOutOfRange,
)
from .homomorphisms import PolynomialHomomorphism, universal_hom
from .interpretation import KInterpretation, is_model_defining
from . import polynomials as P
from .semirings import BOOL, NAT, VITERBI, PolySemiring, Semiring, Value, natpoly, sr_classify
from .syntax import (
    And,
    Eq,
    Forall,
    Formula,
    Lit,
    Neq,
    Pow,
    Times,
    Vocabulary,
    conj,
    disj,
    exists_block,
    lit_enum,
    make_vocab,
    print_formula,
)

DEFAULT_EXPONENT_CAP = 10**6


def _xs(n: int) -> list[str]:
    return [f"x{i}" for i in range(1, n + 1)]


def _universe_parts(n: int, bound: str = "y") -> list[Formula]:
    xs = _xs(n)
    parts: list[Formula] = [Neq(a, b) for a, b in itertools.combinations(xs, 2)]
    parts.append(Forall(bound, disj([Eq(bound, x) for x in xs])))
    return parts


def universe_formula(n: int) -> Formula:
    """``x1..xn`` are pairwise distinct and every element is one of them."""
    if n < 1:
        raise ValueError("the universe formula needs n >= 1")
    return conj(_universe_parts(n))


def _enumerated_literals(pi: KInterpretation) -> list[tuple[Lit, Any]]:
    """Literals over ``x1..xn`` paired with their value under the canonical enumeration."""
    if not pi.universe:
        raise ValueError("characteristic sentences need a nonempty universe")
    rename = dict(zip(pi.universe, _xs(len(pi.universe))))
    out = []
    for lit in lit_enum(pi.vocab, pi.universe):
        out.append((lit.substitute(rename), pi.lookup(lit.symbol, lit.positive, lit.args)))
    return out


def _characteristic(n: int, body: Sequence[Formula]) -> Formula:
    return exists_block(_xs(n), conj(_universe_parts(n) + list(body)))


def classical_characteristic(pi: KInterpretation) -> Formula:
    """The sentence true exactly in the models isomorphic to ``pi``."""
    if pi.semiring != BOOL:
        raise TagMismatch(f"classical characteristic sentences need a bool interpretation, got {pi.semiring}")
    if not is_model_defining(pi):
        raise NotModelDefining("interpretation does not define a model")
    true = [lit for lit, v in _enumerated_literals(pi) if v]
    return _characteristic(len(pi.universe), true)


# ---------------------------------------------------------------------------
# Viterbi


@dataclass(frozen=True)
class ExponentSchedule:
    epsilon: Fraction
    f: tuple[int, ...]
    cap: int = DEFAULT_EXPONENT_CAP

    def __iter__(self):
        return iter(self.f)

    def __len__(self):
        return len(self.f)


def schedule_condition(epsilon: Fraction, prefix_sum: int, f: int) -> bool:
    """``(1 - eps)^f < eps^prefix_sum``, decided on integers."""
    p, q = epsilon.numerator, epsilon.denominator
    return (q - p) ** f * q**prefix_sum < p**prefix_sum * q**f


def _minimal_exponent(epsilon: Fraction, prefix_sum: int, cap: int, index: int) -> int:
    ok = lambda f: schedule_condition(epsilon, prefix_sum, f)
    if ok(1):
        return 1
    lo, hi = 1, 2
    while not ok(hi):
        if hi >= cap:
            raise CapExceeded(index, cap)
        lo, hi = hi, min(2 * hi, cap)
    # ok(hi) holds, ok(lo) fails
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def exponent_schedule(epsilon, k: int, cap: int = DEFAULT_EXPONENT_CAP) -> ExponentSchedule:
    """Minimal exponents ``f(1..k)`` with ``(1-eps)^f(i+1) < eps^(f(1)+...+f(i))``."""
    epsilon = Fraction(epsilon)
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    if k < 1:
        raise ValueError("a schedule needs k >= 1")
    if cap < 1:
        raise ValueError("the exponent cap must be positive")
    f = [1]
    total = 1
    for index in range(2, k + 1):
        nxt = _minimal_exponent(epsilon, total, cap, index)
        f.append(nxt)
        total += nxt
    return ExponentSchedule(epsilon, tuple(f), cap)


def _payload(v):
    return v.payload if isinstance(v, Value) else v


def min_gap(values: Iterable) -> Fraction:
    """Smallest distance between two distinct values, 1 if there are no two."""
    vs = sorted({Fraction(_payload(v)) for v in values})
    if len(vs) < 2:
        return Fraction(1)
    return min(b - a for a, b in zip(vs, vs[1:]))


def viterbi_characteristic(pi: KInterpretation, epsilon=None, cap: int = DEFAULT_EXPONENT_CAP) -> Formula:
    if pi.semiring != VITERBI:
        raise TagMismatch(f"expected a viterbi interpretation, got {pi.semiring}")
    if not is_model_defining(pi):
        raise NotModelDefining("interpretation does not define a model")
    gap = min_gap(pi.values())
    epsilon = gap if epsilon is None else Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if epsilon > gap:
        raise EpsilonTooLarge(f"epsilon {epsilon} exceeds the minimal value gap {gap}")
    lits = [lit for lit, v in _enumerated_literals(pi) if v != 0]
    if not lits:
        raise ValueError("no literal with a positive value")
    schedule = exponent_schedule(epsilon, len(lits), cap)
    body = [lit if e == 1 else Pow(lit, e) for lit, e in zip(lits, schedule.f)]
    return _characteristic(len(pi.universe), body)


@dataclass(frozen=True)
class AxiomSet:
    sentences: tuple[Formula, ...]
    kind: str
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def to_json(self) -> dict:
        meta = {"kind": self.kind}
        for key, v in self.metadata.items():
            meta[key] = str(v) if isinstance(v, Fraction) else v
        return {"sentences": [print_formula(s) for s in self.sentences], "metadata": meta}


def _tuple_vars(j: int, arity: int) -> tuple[str, ...]:
    if arity == 1:
        return (f"x{j}",)
    return tuple(f"x{j}_{c}" for c in range(1, arity + 1))


def sorting_sentence(symbol: str, positive: bool, arity: int, i: int) -> Formula:
    """Product of the ``i`` largest values of the literal ``(!)symbol`` (idempotent semirings)."""
    tuples = [_tuple_vars(j, arity) for j in range(1, i + 1)]
    parts: list[Formula] = []
    for s, t in itertools.combinations(tuples, 2):
        parts.append(disj([Neq(a, b) for a, b in zip(s, t)]))
    parts.extend(Lit(symbol, positive, t) for t in tuples)
    return exists_block([v for t in tuples for v in t], conj(parts))


def sorting_axioms(vocab: Vocabulary, n: int, tag: Semiring = VITERBI) -> AxiomSet:
    if n < 1:
        raise ValueError("sorting axioms need n >= 1")
    if not sr_classify(tag).idempotent:
        raise ClassViolation(f"sorting axioms need an additively idempotent semiring, {tag} is not")
    vocab = make_vocab(vocab)
    out = []
    for sym, arity in vocab.items():
        for positive in (True, False):
            for i in range(1, n**arity + 1):
                out.append(sorting_sentence(sym, positive, arity, i))
    return AxiomSet(tuple(out), "sorting", {"vocab": dict(vocab), "n": n})


def viterbi_axiomatisation(pi: KInterpretation, cap: int = DEFAULT_EXPONENT_CAP) -> AxiomSet:
    epsilon = min_gap(pi.values())
    chi = viterbi_characteristic(pi, epsilon, cap)
    sorting = sorting_axioms(pi.vocab, len(pi.universe), pi.semiring)
    lits = [lit for lit, v in _enumerated_literals(pi) if v != 0]
    schedule = exponent_schedule(epsilon, len(lits), cap)
    meta = {"epsilon": epsilon, "exponents": list(schedule.f), "n": len(pi.universe)}
    return AxiomSet(sorting.sentences + (chi,), "viterbi-finite", meta)


def viterbi_epsilon_axioms(pi: KInterpretation, epsilon, cap: int = DEFAULT_EXPONENT_CAP) -> AxiomSet:
    """The single sentence for a given epsilon, wrapped as an axiom set."""
    chi = viterbi_characteristic(pi, epsilon, cap)
    return AxiomSet((chi,), "viterbi-eps", {"epsilon": Fraction(epsilon)})


# ---------------------------------------------------------------------------
# natural numbers


_EXACT_BITS = 1 << 22


def nat_exponent(c: int, k: int) -> int:
    """Least ``e`` with ``(c / (c-1))^e > k``."""
    if c < 2 or k < 1:
        raise ValueError(f"need c >= 2 and k >= 1, got c={c}, k={k}")
    if k == 1:
        return 1
    if c == 2:
        return k.bit_length()
    # (c/(c-1))^x = k has no integer solution x once c > 2, so the answer is
    # floor(x) + 1 for the real root x.
    digits = len(str(c))
    with decimal.localcontext() as ctx:
        ctx.prec = 2 * digits + 60
        D = decimal.Decimal
        x = D(k).ln() / -(D(1) - D(1) / D(c)).ln()
        e = int(x.to_integral_value(rounding=decimal.ROUND_FLOOR)) + 1
    if e * c.bit_length() <= _EXACT_BITS:
        ok = lambda t: c**t > k * (c - 1) ** t
        while not ok(e):
            e += 1
        while e > 1 and ok(e - 1):
            e -= 1
    return e


def _radix_literals(pi: KInterpretation) -> list[Lit]:
    return [lit for lit, _ in _enumerated_literals(pi)]


def radix_parameters(pi: KInterpretation, q: int) -> dict:
    k_lit = len(_radix_literals(pi))
    k_sum = math.factorial(len(pi.universe))
    c = q**k_lit
    return {"q": q, "k_lit": k_lit, "k_sum": k_sum, "c": c, "e": nat_exponent(c, k_sum)}


def _radix_characteristic(pi: KInterpretation, q: int) -> Formula:
    lits = _radix_literals(pi)
    digits = [lit if i == 0 else Times(q**i, lit) for i, lit in enumerate(lits)]
    e = radix_parameters(pi, q)["e"]
    n = len(pi.universe)
    body = And(tuple(_universe_parts(n)) + (disj(digits),))
    return exists_block(_xs(n), body if e == 1 else Pow(body, e))


def nat_characteristic(pi: KInterpretation, q: int) -> Formula:
    """Radix-``q`` characteristic sentence of an interpretation with values below ``q``."""
    if pi.semiring != NAT:
        raise TagMismatch(f"expected a nat interpretation, got {pi.semiring}")
    if q < 2:
        raise ValueError("the radix must be at least 2")
    big = [v for v in pi.table.values() if v >= q]
    if big:
        raise ValueOutOfRange(f"value {max(big)} is not below the radix {q}")
    return _radix_characteristic(pi, q)


def natx_embedding(C: int, n: int, k: int) -> PolynomialHomomorphism:
    """``x_i -> C^(n^(i-1))`` from ``N[x1..xk]`` to ``N``."""
    if C < 2 or n < 1 or k < 0:
        raise ValueError(f"need C >= 2, n >= 1, k >= 0, got C={C}, n={n}, k={k}")
    names = _xs(k)
    source = natpoly(*names)
    return universal_hom(source, NAT, {x: C ** (n**i) for i, x in enumerate(names)}, name="embed")


def bounded_polynomials(C: int, n: int, k: int) -> list[P.Polynomial]:
    """Polynomials over ``x1..xk`` with coefficients below ``C`` and exponents below ``n``."""
    names = _xs(k)
    source = natpoly(*names)
    monos = [P.Monomial.of(dict(zip(names, exps))) for exps in itertools.product(range(n), repeat=k)]
    out = []
    for coeffs in itertools.product(range(C), repeat=len(monos)):
        raw = [(m, a) for m, a in zip(monos, coeffs) if a]
        out.append(P.normalize(P.NATPOLY, source.variables, raw))
    return out


def in_bounded_set(p: P.Polynomial, C: int, n: int) -> bool:
    return all(a < C and all(e < n for _, e in m.powers) for m, a in p.terms)


def natx_modulus(pi: KInterpretation, C: int, n_exp: int) -> int:
    return C ** (n_exp ** len(pi.semiring.variables))


def natx_characteristic(pi: KInterpretation, C: int, n_exp: int) -> Formula:
    tag = pi.semiring
    if not (isinstance(tag, PolySemiring) and tag.variant == P.NATPOLY):
        raise TagMismatch(f"expected a natpoly interpretation, got {tag}")
    if C < 2 or n_exp < 1:
        raise ValueError(f"need C >= 2 and n >= 1, got C={C}, n={n_exp}")
    for v in pi.table.values():
        if not in_bounded_set(v, C, n_exp):
            raise ValueOutOfRange(f"{v} has a coefficient >= {C} or an exponent >= {n_exp}")
    return _radix_characteristic(pi, natx_modulus(pi, C, n_exp))
