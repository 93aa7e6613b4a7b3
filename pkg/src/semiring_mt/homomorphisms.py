"""Semiring homomorphisms.

Two kinds exist.  :class:`PolynomialHomomorphism` is the unique extension of
a variable assignment from a polynomial semiring (universal property);
:class:`MapHomomorphism` wraps an explicit function on a finite carrier and
is only built after the homomorphism laws were checked exhaustively.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from . import polynomials as P
from .errors import ClassViolation, ProfileViolation, TagMismatch
from .semirings import PolySemiring, Semiring, Value, sr_classify

# flags a target must carry for each source variant
_REQUIRED = {
    P.NATPOLY: (),
    P.BOOLPOLY: ("idempotent",),
    P.WHYPOLY: ("idempotent", "mult_idempotent"),
    P.ABSPOLY: ("absorptive",),
    P.POSBOOL: ("absorptive", "idempotent", "mult_idempotent"),
}
# exponent clamping is respected as soon as every assigned value is
# multiplicatively idempotent, even in targets that are not
_ELEMENTWISE = frozenset({P.WHYPOLY, P.POSBOOL})


class Homomorphism:
    source: Semiring
    target: Semiring
    name: str = "h"

    def __call__(self, payload):
        raise NotImplementedError

    def __repr__(self):
        return f"<{self.name}: {self.source} -> {self.target}>"


@dataclass(frozen=True, eq=False, repr=False)
class PolynomialHomomorphism(Homomorphism):
    source: PolySemiring
    target: Semiring
    assignment: Mapping[str, Any]
    name: str = "h"

    def __call__(self, p: P.Polynomial):
        t = self.target
        total = t.zero
        for mono, coeff in p.terms:
            term = t.one
            for var, exp in mono.powers:
                term = t.mul(term, t.pow(self.assignment[var], exp))
                if t.is_zero(term):
                    break
            if coeff != 1:
                term = t.times(coeff, term)
            total = t.add(total, term)
        return total

    def __eq__(self, other):
        return (
            isinstance(other, PolynomialHomomorphism)
            and self.source == other.source
            and self.target == other.target
            and dict(self.assignment) == dict(other.assignment)
        )

    def __hash__(self):
        return hash((self.source, self.target, tuple(sorted(self.assignment.items(), key=lambda kv: kv[0]))))


@dataclass(frozen=True, eq=False, repr=False)
class MapHomomorphism(Homomorphism):
    source: Semiring
    target: Semiring
    fn: Callable[[Any], Any] = field(compare=False)
    name: str = "h"

    def __call__(self, payload):
        return self.fn(payload)


@dataclass(frozen=True, eq=False, repr=False)
class IdentityHomomorphism(Homomorphism):
    source: Semiring
    name: str = "id"

    @property
    def target(self):
        return self.source

    def __call__(self, payload):
        return payload

    def __eq__(self, other):
        return isinstance(other, IdentityHomomorphism) and other.source == self.source

    def __hash__(self):
        return hash(("id", self.source))


def _raw(target: Semiring, v):
    if isinstance(v, Value):
        if v.tag != target:
            raise TagMismatch(f"assignment value of {v.tag} for target {target}")
        return v.payload
    if not target.contains(v):
        raise TagMismatch(f"{v!r} is not an element of {target}")
    return v


def universal_hom(source: PolySemiring, target: Semiring, e: Mapping[str, Any], name: str = "h") -> PolynomialHomomorphism:
    """The homomorphism induced by the assignment ``e`` on the variables."""
    if not isinstance(source, PolySemiring):
        raise TagMismatch(f"universal homomorphisms need a polynomial source, got {source}")
    missing = [v for v in source.variables if v not in e]
    if missing:
        raise ValueError(f"assignment misses variables {missing}")
    extra = [v for v in e if v not in source.variables]
    if extra:
        raise ValueError(f"assignment has unknown variables {extra}")
    try:
        profile = sr_classify(target)
    except ProfileViolation as exc:
        raise ClassViolation(str(exc)) from exc
    assignment = {v: _raw(target, e[v]) for v in source.variables}
    lacking = [flag for flag in _REQUIRED[source.variant] if not getattr(profile, flag)]
    if lacking == ["mult_idempotent"] and source.variant in _ELEMENTWISE:
        if all(target.mul(a, a) == a for a in assignment.values()):
            lacking = []
    if lacking:
        raise ClassViolation(f"{target} is not {' and '.join(lacking)}; no homomorphism from {source}")
    return PolynomialHomomorphism(source, target, assignment, name)


def endomorphism(source: PolySemiring, mapping: Mapping[str, str | None], name: str = "h") -> PolynomialHomomorphism:
    """Endomorphism sending each variable to a variable or to 0 (``None``)."""
    e = {v: source.zero if w is None else source.var(w) for v, w in mapping.items()}
    return universal_hom(source, source, e, name)


def identity_hom(tag: Semiring) -> Homomorphism:
    return IdentityHomomorphism(tag)


def checked_map_hom(source: Semiring, target: Semiring, fn: Callable, name: str = "h") -> MapHomomorphism:
    """Wrap ``fn`` after verifying the homomorphism laws on the whole (finite) source."""
    elems = list(source.elements())
    if fn(source.zero) != target.zero or fn(source.one) != target.one:
        raise ClassViolation(f"{name} does not preserve 0 and 1")
    for a, b in itertools.product(elems, repeat=2):
        if fn(source.add(a, b)) != target.add(fn(a), fn(b)):
            raise ClassViolation(f"{name} is not additive at {(a, b)}")
        if fn(source.mul(a, b)) != target.mul(fn(a), fn(b)):
            raise ClassViolation(f"{name} is not multiplicative at {(a, b)}")
    return MapHomomorphism(source, target, fn, name)


def apply_hom(h: Homomorphism, p) -> Value:
    """Apply ``h`` to a :class:`Value` or raw payload of its source."""
    if isinstance(p, Value):
        if p.tag != h.source:
            raise TagMismatch(f"{h.name} expects {h.source}, got {p.tag}")
        p = p.payload
    elif not h.source.contains(p):
        raise TagMismatch(f"{p!r} is not an element of {h.source}")
    return Value(h.target, h(p))
