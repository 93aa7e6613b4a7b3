"""Commutative semirings with exact arithmetic.

A :class:`Semiring` instance doubles as the semiring *tag*: tags are frozen,
hashable and serialize to the strings used in interpretation files
(``"bool"``, ``"minmax:4"``, ``"natpoly:x,y"`` ...).  Arithmetic methods on
the tag operate on raw payloads; :class:`Value` couples a payload with its
tag and is what the public API hands out.
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Iterator

from . import polynomials as P
from .errors import CarrierError, ProfileViolation, TagMismatch


class _Infinity:
    """The tropical zero; a carrier variant of its own, not a float."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("tropical-infinity")


INF = _Infinity()


@dataclass(frozen=True)
class SemiringProfile:
    idempotent: bool
    mult_idempotent: bool
    absorptive: bool

    @property
    def fully_idempotent(self) -> bool:
        return self.idempotent and self.mult_idempotent

    def __post_init__(self):
        if self.absorptive and not self.idempotent:
            raise ValueError("absorptive semirings are idempotent")


class Semiring:
    """Abstract commutative semiring over raw payloads."""

    finite = False
    declared: SemiringProfile

    @property
    def zero(self) -> Any:
        raise NotImplementedError

    @property
    def one(self) -> Any:
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def contains(self, a) -> bool:
        raise NotImplementedError

    def parse_value(self, text: str):
        raise NotImplementedError

    def format_value(self, a) -> str:
        return str(a)

    def sample(self, rng: random.Random):
        raise NotImplementedError

    def elements(self) -> Iterator[Any]:
        raise TypeError(f"{self} has an infinite carrier")

    # derived operations ----------------------------------------------------

    def is_zero(self, a) -> bool:
        return a == self.zero

    def sum(self, values: Iterable):
        acc = self.zero
        for v in values:
            acc = self.add(acc, v)
        return acc

    def prod(self, values: Iterable):
        acc = self.one
        for v in values:
            acc = self.mul(acc, v)
            if self.is_zero(acc):
                return acc
        return acc

    def pow(self, a, e: int):
        """``a`` multiplied with itself ``e`` times (square and multiply)."""
        if e < 0:
            raise ValueError("negative exponent")
        result, base = self.one, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def times(self, q: int, a):
        """``a`` added to itself ``q`` times (doubling)."""
        if q < 0:
            raise ValueError("negative multiple")
        result, base = self.zero, a
        while q:
            if q & 1:
                result = self.add(result, base)
            q >>= 1
            if q:
                base = self.add(base, base)
        return result

    def value(self, payload) -> "Value":
        return Value(self, payload)

    def __str__(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class BoolSemiring(Semiring):
    finite = True
    declared = SemiringProfile(True, True, True)

    zero = False
    one = True

    def add(self, a, b):
        return a or b

    def mul(self, a, b):
        return a and b

    def pow(self, a, e):
        return True if e == 0 else a

    def times(self, q, a):
        return False if q == 0 else a

    def contains(self, a):
        return isinstance(a, bool)

    def parse_value(self, text):
        t = str(text).strip().lower()
        if t in ("true", "1", "top", "⊤"):
            return True
        if t in ("false", "0", "bot", "⊥"):
            return False
        raise CarrierError(f"not a Boolean value: {text!r}")

    def format_value(self, a):
        return "true" if a else "false"

    def sample(self, rng):
        return rng.random() < 0.5

    def elements(self):
        return iter((False, True))

    def __str__(self):
        return "bool"


@dataclass(frozen=True)
class NatSemiring(Semiring):
    declared = SemiringProfile(False, False, False)

    zero = 0
    one = 1

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def pow(self, a, e):
        return a**e

    def times(self, q, a):
        return q * a

    def contains(self, a):
        return isinstance(a, int) and not isinstance(a, bool) and a >= 0

    def parse_value(self, text):
        try:
            v = int(str(text).strip())
        except ValueError:
            raise CarrierError(f"not a natural number: {text!r}") from None
        if v < 0:
            raise CarrierError(f"not a natural number: {text!r}")
        return v

    def sample(self, rng):
        return rng.choice((0, 0, 1, 1, 2, 3, 5, rng.randrange(100)))

    def __str__(self):
        return "nat"


@dataclass(frozen=True)
class MinMaxSemiring(Semiring):
    """Finite chain {0, ..., n-1} with max as addition and min as product."""

    n: int
    finite = True
    declared = SemiringProfile(True, True, True)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("min-max semiring needs n >= 1")

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return self.n - 1

    def add(self, a, b):
        return a if a >= b else b

    def mul(self, a, b):
        return a if a <= b else b

    def pow(self, a, e):
        return self.one if e == 0 else a

    def times(self, q, a):
        return 0 if q == 0 else a

    def contains(self, a):
        return isinstance(a, int) and not isinstance(a, bool) and 0 <= a < self.n

    def parse_value(self, text):
        try:
            v = int(str(text).strip())
        except ValueError:
            raise CarrierError(f"not a level of {self}: {text!r}") from None
        if not 0 <= v < self.n:
            raise CarrierError(f"level {v} outside {{0..{self.n - 1}}}")
        return v

    def sample(self, rng):
        return rng.randrange(self.n)

    def elements(self):
        return iter(range(self.n))

    def __str__(self):
        return f"minmax:{self.n}"


def _parse_fraction(text) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise CarrierError(f"not an exact rational: {text!r}") from None


def _format_fraction(a: Fraction) -> str:
    return str(a)


def _sample_fraction(rng, lo_one=False):
    q = rng.choice((1, 2, 3, 4, 5, 8, 10, 12))
    return Fraction(rng.randint(0, q), q)


@dataclass(frozen=True)
class ViterbiSemiring(Semiring):
    """([0,1] ∩ Q, max, ·, 0, 1)."""

    declared = SemiringProfile(True, False, True)

    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a if a >= b else b

    def mul(self, a, b):
        return a * b

    def pow(self, a, e):
        return a**e

    def times(self, q, a):
        return self.zero if q == 0 else a

    def contains(self, a):
        return isinstance(a, Fraction) and 0 <= a <= 1

    def parse_value(self, text):
        v = _parse_fraction(text)
        if not 0 <= v <= 1:
            raise CarrierError(f"Viterbi value {v} outside [0,1]")
        return v

    def format_value(self, a):
        return _format_fraction(a)

    def sample(self, rng):
        return _sample_fraction(rng)

    def __str__(self):
        return "viterbi"


@dataclass(frozen=True)
class TropicalSemiring(Semiring):
    """(Q≥0 ∪ {inf}, min, +, inf, 0)."""

    declared = SemiringProfile(True, False, True)

    zero = INF
    one = Fraction(0)

    def add(self, a, b):
        if a is INF:
            return b
        if b is INF:
            return a
        return a if a <= b else b

    def mul(self, a, b):
        if a is INF or b is INF:
            return INF
        return a + b

    def is_zero(self, a):
        return a is INF

    def pow(self, a, e):
        if e == 0:
            return self.one
        return INF if a is INF else a * e

    def times(self, q, a):
        return INF if q == 0 else a

    def contains(self, a):
        return a is INF or (isinstance(a, Fraction) and a >= 0)

    def parse_value(self, text):
        t = str(text).strip().lower()
        if t in ("inf", "∞", "infinity"):
            return INF
        v = _parse_fraction(t)
        if v < 0:
            raise CarrierError(f"tropical value {v} is negative")
        return v

    def format_value(self, a):
        return "inf" if a is INF else _format_fraction(a)

    def sample(self, rng):
        if rng.random() < 0.15:
            return INF
        return Fraction(rng.randint(0, 30), rng.choice((1, 2, 3, 4)))

    def __str__(self):
        return "tropical"


@dataclass(frozen=True)
class PolySemiring(Semiring):
    variant: str
    variables: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.variant not in P.VARIANTS:
            raise ValueError(f"unknown polynomial variant {self.variant!r}")
        names = tuple(sorted(self.variables))
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variables in {list(self.variables)}")
        for v in names:
            if not P.VARIABLE_RE.match(v):
                raise ValueError(f"bad variable name {v!r}")
        object.__setattr__(self, "variables", names)

    @property
    def declared(self):
        return {
            P.NATPOLY: SemiringProfile(False, False, False),
            P.BOOLPOLY: SemiringProfile(True, False, False),
            # multilinear, yet (x + y)^2 = x + xy + y
            P.WHYPOLY: SemiringProfile(True, False, False),
            P.ABSPOLY: SemiringProfile(True, False, True),
            P.POSBOOL: SemiringProfile(True, True, True),
        }[self.variant]

    @functools.cached_property
    def zero(self):
        return P.Polynomial.zero(self.variant, self.variables)

    @functools.cached_property
    def one(self):
        return P.Polynomial.one(self.variant, self.variables)

    def var(self, name: str) -> P.Polynomial:
        return P.Polynomial.var(self.variant, self.variables, name)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def is_zero(self, a):
        return not a.terms

    def pow(self, a, e):
        return a**e

    def times(self, q, a):
        if self.variant == P.NATPOLY:
            return a.scale(q)
        return self.zero if q == 0 else a

    def contains(self, a):
        return (
            isinstance(a, P.Polynomial)
            and a.variant == self.variant
            and a.variables == self.variables
        )

    def parse_value(self, text):
        return P.parse_polynomial(str(text), self.variant, self.variables)

    def sample(self, rng):
        if not self.variables:
            return P.Polynomial.constant(self.variant, (), rng.randint(0, 3))
        raw = []
        for _ in range(rng.randint(0, 3)):
            exps = {v: rng.randint(0, 2) for v in self.variables if rng.random() < 0.6}
            raw.append((P.Monomial.of(exps), rng.randint(1, 3)))
        return P.normalize(self.variant, self.variables, raw)

    def __str__(self):
        return f"{self.variant}:{','.join(self.variables)}"


BOOL = BoolSemiring()
NAT = NatSemiring()
VITERBI = ViterbiSemiring()
TROPICAL = TropicalSemiring()


def minmax(n: int) -> MinMaxSemiring:
    return MinMaxSemiring(n)


def natpoly(*variables: str) -> PolySemiring:
    return PolySemiring(P.NATPOLY, variables)


def boolpoly(*variables: str) -> PolySemiring:
    return PolySemiring(P.BOOLPOLY, variables)


def whypoly(*variables: str) -> PolySemiring:
    return PolySemiring(P.WHYPOLY, variables)


def abspoly(*variables: str) -> PolySemiring:
    return PolySemiring(P.ABSPOLY, variables)


def posbool(*variables: str) -> PolySemiring:
    return PolySemiring(P.POSBOOL, variables)


def parse_semiring(text: str) -> Semiring:
    """Inverse of ``str(tag)``."""
    text = text.strip()
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind == "bool":
        return BOOL
    if kind == "nat":
        return NAT
    if kind == "viterbi":
        return VITERBI
    if kind == "tropical":
        return TROPICAL
    if kind == "minmax":
        try:
            return MinMaxSemiring(int(arg))
        except ValueError:
            raise CarrierError(f"bad min-max size in {text!r}") from None
    if kind in P.VARIANTS:
        names = [v.strip() for v in arg.split(",") if v.strip()]
        try:
            return PolySemiring(kind, tuple(names))
        except ValueError as exc:
            raise CarrierError(str(exc)) from None
    raise CarrierError(f"unknown semiring {text!r}")


@dataclass(frozen=True)
class Value:
    """A payload tagged with the semiring it belongs to."""

    tag: Semiring
    payload: Any

    def __post_init__(self):
        if not self.tag.contains(self.payload):
            raise CarrierError(f"{self.payload!r} is not an element of {self.tag}")

    def __add__(self, other: "Value") -> "Value":
        return sr_add(self.tag, self, other)

    def __mul__(self, other: "Value") -> "Value":
        return sr_mul(self.tag, self, other)

    def __str__(self):
        return self.tag.format_value(self.payload)


def _check_tags(tag: Semiring, *values: Value) -> None:
    for v in values:
        if not isinstance(v, Value):
            raise TagMismatch(f"expected a Value of {tag}, got {v!r}")
        if v.tag != tag:
            raise TagMismatch(f"value of {v.tag} used with {tag}")


def sr_add(tag: Semiring, a: Value, b: Value) -> Value:
    _check_tags(tag, a, b)
    return Value(tag, tag.add(a.payload, b.payload))


def sr_mul(tag: Semiring, a: Value, b: Value) -> Value:
    _check_tags(tag, a, b)
    return Value(tag, tag.mul(a.payload, b.payload))


def _check_profile(tag: Semiring, elements, pairs) -> SemiringProfile:
    add, mul = tag.add, tag.mul
    idem = all(add(a, a) == a for a in elements)
    mult_idem = all(mul(a, a) == a for a in elements)
    absorptive = all(add(a, mul(a, b)) == a for a, b in pairs)
    return SemiringProfile(idem, mult_idem, absorptive)


@functools.lru_cache(maxsize=None)
def sr_classify(tag: Semiring, samples: int = 100, seed: int = 0) -> SemiringProfile:
    """Idempotence/absorption profile of ``tag``.

    Finite carriers are checked exhaustively.  For infinite carriers the
    declared profile is returned once ``samples`` random elements (and as
    many random pairs) support every declared flag.
    """
    if tag.finite:
        elems = list(tag.elements())
        return _check_profile(tag, elems, list(itertools.product(elems, repeat=2)))

    declared = tag.declared
    rng = random.Random(seed)
    elems = [tag.zero, tag.one] + [tag.sample(rng) for _ in range(samples)]
    for a in elems:
        if declared.idempotent and tag.add(a, a) != a:
            raise ProfileViolation("idempotent", (a,))
        if declared.mult_idempotent and tag.mul(a, a) != a:
            raise ProfileViolation("mult_idempotent", (a,))
    if declared.absorptive:
        for a in elems:
            b = tag.sample(rng)
            if tag.add(a, tag.mul(a, b)) != a:
                raise ProfileViolation("absorptive", (a, b))
    return declared
