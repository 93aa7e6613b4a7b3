"""Exact polynomial semirings N[X], B[X], W[X], S[X] and PosBool[X].

All five variants share one sparse representation: a polynomial is a sorted
tuple of ``(Monomial, coefficient)`` pairs over a fixed, lexicographically
ordered variable set.  Every constructor funnels through :func:`normalize`,
so structural equality coincides with equality in the semiring.

Variant normalization:

* ``natpoly``  -- merge equal monomials, drop zero coefficients.
* ``boolpoly`` -- as above, then every coefficient becomes 1.
* ``whypoly``  -- additionally clamp exponents to 1 (multilinear).
* ``abspoly``  -- coefficients 1, then drop every monomial absorbed by another.
* ``posbool``  -- multilinear and absorption-reduced.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import CarrierError, ParseError, VariantMismatch

NATPOLY = "natpoly"
BOOLPOLY = "boolpoly"
WHYPOLY = "whypoly"
ABSPOLY = "abspoly"
POSBOOL = "posbool"
VARIANTS = (NATPOLY, BOOLPOLY, WHYPOLY, ABSPOLY, POSBOOL)

_MULTILINEAR = frozenset({WHYPOLY, POSBOOL})
_ABSORPTIVE = frozenset({ABSPOLY, POSBOOL})

VARIABLE_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")


@dataclass(frozen=True, slots=True)
class Monomial:
    """Sparse exponent map; ``powers`` is sorted by variable, exponents >= 1."""

    powers: tuple[tuple[str, int], ...] = ()

    @classmethod
    def of(cls, exponents: Mapping[str, int] | None = None, **kw: int) -> "Monomial":
        items = dict(exponents or {})
        items.update(kw)
        return cls(tuple(sorted((v, e) for v, e in items.items() if e)))

    def exponent(self, var: str) -> int:
        for v, e in self.powers:
            if v == var:
                return e
        return 0

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.powers)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.powers)

    def __mul__(self, other: "Monomial") -> "Monomial":
        if not self.powers:
            return other
        if not other.powers:
            return self
        merged = dict(self.powers)
        for v, e in other.powers:
            merged[v] = merged.get(v, 0) + e
        return Monomial(tuple(sorted(merged.items())))

    def __pow__(self, e: int) -> "Monomial":
        if e == 0:
            return Monomial()
        return Monomial(tuple((v, k * e) for v, k in self.powers))

    def absorbs(self, other: "Monomial") -> bool:
        """True iff every exponent of ``self`` is <= the one in ``other``."""
        other_exp = dict(other.powers)
        return all(e <= other_exp.get(v, 0) for v, e in self.powers)

    def multilinear(self) -> "Monomial":
        if all(e == 1 for _, e in self.powers):
            return self
        return Monomial(tuple((v, 1) for v, _ in self.powers))

    def __str__(self) -> str:
        if not self.powers:
            return "1"
        return "*".join(v if e == 1 else f"{v}^{e}" for v, e in self.powers)


ONE_MONOMIAL = Monomial()


def mono_absorbs(m1: Monomial, m2: Monomial) -> bool:
    return m1.absorbs(m2)


def _sort_key(variables: tuple[str, ...]):
    def key(item):
        m = item[0]
        exps = dict(m.powers)
        return (m.degree, tuple(-exps.get(v, 0) for v in variables))

    return key


@dataclass(frozen=True)
class Polynomial:
    variant: str
    variables: tuple[str, ...]
    terms: tuple[tuple[Monomial, int], ...]

    # construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, variant: str, variables: Iterable[str]) -> "Polynomial":
        return normalize(variant, variables, ())

    @classmethod
    def one(cls, variant: str, variables: Iterable[str]) -> "Polynomial":
        return normalize(variant, variables, [(ONE_MONOMIAL, 1)])

    @classmethod
    def var(cls, variant: str, variables: Iterable[str], name: str) -> "Polynomial":
        return normalize(variant, variables, [(Monomial.of({name: 1}), 1)])

    @classmethod
    def constant(cls, variant: str, variables: Iterable[str], c: int) -> "Polynomial":
        return normalize(variant, variables, [(ONE_MONOMIAL, c)])

    # queries -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def monomials(self) -> tuple[Monomial, ...]:
        return tuple(m for m, _ in self.terms)

    def coefficient(self, m: Monomial) -> int:
        for mono, c in self.terms:
            if mono == m:
                return c
        return 0

    @property
    def degree(self) -> int:
        return max((m.degree for m, _ in self.terms), default=0)

    # arithmetic -----------------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if not isinstance(other, Polynomial):
            raise VariantMismatch(f"cannot combine polynomial with {type(other).__name__}")
        if self.variant != other.variant or self.variables != other.variables:
            raise VariantMismatch(
                f"{self.variant}{list(self.variables)} vs {other.variant}{list(other.variables)}"
            )

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        return normalize(self.variant, self.variables, self.terms + other.terms, _trusted=True)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        if not self.terms or not other.terms:
            return Polynomial(self.variant, self.variables, ())
        raw = [(m1 * m2, c1 * c2) for m1, c1 in self.terms for m2, c2 in other.terms]
        return normalize(self.variant, self.variables, raw, _trusted=True)

    def __pow__(self, e: int) -> "Polynomial":
        if e < 0:
            raise ValueError("negative exponent")
        if len(self.terms) == 1:
            # single term: no cross products, power is exact
            (m, c), = self.terms
            return normalize(self.variant, self.variables, [(m ** e, c ** e)], _trusted=True)
        result = Polynomial.one(self.variant, self.variables)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def scale(self, q: int) -> "Polynomial":
        """q-fold sum of ``self``."""
        if q < 0:
            raise ValueError("negative multiple")
        return normalize(self.variant, self.variables, [(m, c * q) for m, c in self.terms], _trusted=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms:
            if not m.powers:
                parts.append(str(c))
            elif c == 1:
                parts.append(str(m))
            else:
                parts.append(f"{c}*{m}")
        return " + ".join(parts)


def normalize(
    variant: str,
    variables: Iterable[str],
    raw: Iterable[tuple[Monomial, int]] | Mapping[Monomial, int],
    _trusted: bool = False,
) -> Polynomial:
    """Return the canonical polynomial of ``variant`` with the given raw terms."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown polynomial variant {variant!r}")
    variables = tuple(variables)
    if isinstance(raw, Mapping):
        raw = raw.items()

    multilinear = variant in _MULTILINEAR
    merged: dict[Monomial, int] = {}
    allowed = None if _trusted else frozenset(variables)
    for m, c in raw:
        if c == 0:
            continue
        if allowed is not None:
            if c < 0:
                raise CarrierError(f"negative coefficient {c}")
            for v in m.variables:
                if v not in allowed:
                    raise CarrierError(f"variable {v!r} not in {list(variables)}")
        if multilinear:
            m = m.multilinear()
        merged[m] = merged.get(m, 0) + c

    if variant != NATPOLY:
        merged = dict.fromkeys(merged, 1)
    if variant in _ABSORPTIVE and len(merged) > 1:
        monos = sorted(merged, key=lambda m: m.degree)
        kept: list[Monomial] = []
        for m in monos:
            # absorbers of m have degree <= deg(m) so they precede it
            if not any(k.absorbs(m) for k in kept):
                kept.append(m)
        merged = dict.fromkeys(kept, 1)

    terms = tuple(sorted(merged.items(), key=_sort_key(variables)))
    return Polynomial(variant, variables, terms)


def poly_normalize(variant, variables, raw) -> Polynomial:
    return normalize(variant, variables, raw)


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([a-zA-Z][a-zA-Z0-9_]*)|(\^)|(\*)|(\+)|(\S))")


def parse_polynomial(text: str, variant: str, variables: Iterable[str]) -> Polynomial:
    """Parse ``"3*x^2*y + y + 1"``; ``"0"`` is the empty polynomial."""
    variables = tuple(variables)
    tokens = []
    for match in _TOKEN_RE.finditer(text):
        if match.group(6):
            raise ParseError(match.start(6), "number, variable, '*', '^' or '+'", text)
        kind = next(i for i in range(1, 6) if match.group(i) is not None)
        tokens.append((kind, match.group(kind), match.start(kind)))
    if not tokens:
        raise ParseError(0, "polynomial", text)

    raw: list[tuple[Monomial, int]] = []
    pos = 0

    def expect_factor():
        nonlocal pos
        if pos >= len(tokens):
            raise ParseError(len(text), "number or variable", text)
        kind, val, at = tokens[pos]
        if kind == 1:
            pos += 1
            return None, int(val)
        if kind == 2:
            pos += 1
            exp = 1
            if pos < len(tokens) and tokens[pos][0] == 3:
                pos += 1
                if pos >= len(tokens) or tokens[pos][0] != 1:
                    raise ParseError(tokens[pos - 1][2] + 1, "exponent", text)
                exp = int(tokens[pos][1])
                pos += 1
            return (val, exp), 1
        raise ParseError(at, "number or variable", text)

    while True:
        coeff = 1
        exps: dict[str, int] = {}
        while True:
            power, c = expect_factor()
            coeff *= c
            if power is not None:
                exps[power[0]] = exps.get(power[0], 0) + power[1]
            if pos < len(tokens) and tokens[pos][0] == 4:
                pos += 1
                continue
            break
        raw.append((Monomial.of(exps), coeff))
        if pos < len(tokens) and tokens[pos][0] == 5:
            pos += 1
            continue
        if pos < len(tokens):
            raise ParseError(tokens[pos][2], "'+' or end of input", text)
        break
    return normalize(variant, variables, raw)
