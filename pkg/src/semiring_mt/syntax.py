"""First-order formulas in negation normal form.

Terms are plain names.  Whether a name denotes a variable or a universe
element is decided at evaluation time: names bound by a quantifier or by the
assignment are variables, the remaining ones must be universe elements.

Grammar (whitespace insensitive, loosest binding first)::

    formula  := ("E" | "A") name "." formula | disj
    disj     := conj ("|" conj)*
    conj     := mult ("&" mult)*
    mult     := number "*" mult | power
    power    := unit ("^" number)*
    unit     := name "(" name ("," name)* ")" | "!" name "(" ... ")"
              | name "=" name | name "!=" name | "(" formula ")"
              | ("E" | "A") name "." formula
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import ParseError

Vocabulary = Mapping[str, int]


def make_vocab(relations: Mapping[str, int] | Iterable[tuple[str, int]]) -> dict[str, int]:
    items = dict(relations)
    for sym, arity in items.items():
        if not isinstance(arity, int) or arity < 1:
            raise ValueError(f"relation {sym} needs a positive arity, got {arity!r}")
    return dict(sorted(items.items()))


class Formula:
    __slots__ = ()

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True, slots=True)
class Lit(Formula):
    symbol: str
    positive: bool
    args: tuple[str, ...]

    def complement(self) -> "Lit":
        return Lit(self.symbol, not self.positive, self.args)

    def substitute(self, mapping: Mapping[str, str]) -> "Lit":
        return Lit(self.symbol, self.positive, tuple(mapping.get(a, a) for a in self.args))


@dataclass(frozen=True, slots=True)
class Eq(Formula):
    left: str
    right: str


@dataclass(frozen=True, slots=True)
class Neq(Formula):
    left: str
    right: str


@dataclass(frozen=True, slots=True)
class Or(Formula):
    children: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("empty disjunction")


@dataclass(frozen=True, slots=True)
class And(Formula):
    children: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("empty conjunction")


@dataclass(frozen=True, slots=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class Pow(Formula):
    """Conjunctive repetition: ``body`` joined by ``&`` with itself ``e`` times."""

    body: Formula
    e: int

    def __post_init__(self):
        if self.e < 1:
            raise ValueError("power exponent must be >= 1")


@dataclass(frozen=True, slots=True)
class Times(Formula):
    """Disjunctive repetition: ``q`` copies of ``body`` joined by ``|``."""

    q: int
    body: Formula

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("disjunctive multiple must be >= 1")


def conj(parts: Sequence[Formula]) -> Formula:
    """Conjunction that collapses a single conjunct."""
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else And(parts)


def disj(parts: Sequence[Formula]) -> Formula:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else Or(parts)


def exists_block(variables: Sequence[str], body: Formula) -> Formula:
    for v in reversed(variables):
        body = Exists(v, body)
    return body


# ---------------------------------------------------------------------------
# structural queries


def quantifier_rank(phi: Formula) -> int:
    if isinstance(phi, (Exists, Forall)):
        return 1 + quantifier_rank(phi.body)
    if isinstance(phi, (And, Or)):
        return max(quantifier_rank(c) for c in phi.children)
    if isinstance(phi, (Pow, Times)):
        return quantifier_rank(phi.body)
    return 0


def free_names(phi: Formula) -> frozenset[str]:
    """Names occurring free: free variables and universe constants alike."""
    if isinstance(phi, Lit):
        return frozenset(phi.args)
    if isinstance(phi, (Eq, Neq)):
        return frozenset((phi.left, phi.right))
    if isinstance(phi, (And, Or)):
        return frozenset().union(*(free_names(c) for c in phi.children))
    if isinstance(phi, (Exists, Forall)):
        return free_names(phi.body) - {phi.var}
    return free_names(phi.body)


def is_sentence(phi: Formula) -> bool:
    return not free_names(phi)


def formula_size(phi: Formula) -> int:
    """Node count of the sugar-free expansion of ``phi``."""
    if isinstance(phi, (Lit, Eq, Neq)):
        return 1
    if isinstance(phi, (And, Or)):
        return 1 + sum(formula_size(c) for c in phi.children)
    if isinstance(phi, (Exists, Forall)):
        return 1 + formula_size(phi.body)
    if isinstance(phi, Pow):
        return 1 + phi.e * formula_size(phi.body)
    return 1 + phi.q * formula_size(phi.body)


def expand(phi: Formula) -> Formula:
    """Materialize ``Pow``/``Times`` as explicit conjunctions/disjunctions."""
    if isinstance(phi, Pow):
        body = expand(phi.body)
        return conj([body] * phi.e)
    if isinstance(phi, Times):
        body = expand(phi.body)
        return disj([body] * phi.q)
    if isinstance(phi, And):
        return And(tuple(expand(c) for c in phi.children))
    if isinstance(phi, Or):
        return Or(tuple(expand(c) for c in phi.children))
    if isinstance(phi, Exists):
        return Exists(phi.var, expand(phi.body))
    if isinstance(phi, Forall):
        return Forall(phi.var, expand(phi.body))
    return phi


def canonicalize(phi: Formula) -> Formula:
    """Flatten nested And/Or, sort their children and orient (in)equalities.

    Children are never deduplicated: ``φ ∧ φ`` and ``φ`` differ in
    non-idempotent semirings.
    """
    return _canon(phi)[0]


def _canon(phi: Formula) -> tuple[Formula, str]:
    if isinstance(phi, (Eq, Neq)):
        if phi.right < phi.left:
            phi = type(phi)(phi.right, phi.left)
        return phi, print_formula(phi)
    if isinstance(phi, Lit):
        return phi, print_formula(phi)
    if isinstance(phi, (And, Or)):
        kind = type(phi)
        flat: list[tuple[Formula, str]] = []
        for child in phi.children:
            c, key = _canon(child)
            if isinstance(c, kind):
                flat.extend((g, print_formula(g)) for g in c.children)
            else:
                flat.append((c, key))
        if len(flat) == 1:
            return flat[0]
        flat.sort(key=lambda item: item[1])
        node = kind(tuple(c for c, _ in flat))
        return node, print_formula(node)
    if isinstance(phi, (Exists, Forall)):
        node = type(phi)(phi.var, _canon(phi.body)[0])
    elif isinstance(phi, Pow):
        node = Pow(_canon(phi.body)[0], phi.e)
    else:
        node = Times(phi.q, _canon(phi.body)[0])
    return node, print_formula(node)


# ---------------------------------------------------------------------------
# literal enumeration


def lit_enum(vocab: Vocabulary, domain: Sequence[str] | int) -> list[Lit]:
    """All literals over ``domain`` in the fixed canonical order.

    ``domain`` is either a sequence of universe elements or a number ``n``
    standing for the variables ``x1 .. xn``.
    """
    if isinstance(domain, int):
        names = tuple(f"x{i}" for i in range(1, domain + 1))
    else:
        names = tuple(domain)
    out = []
    for sym in sorted(vocab):
        for positive in (True, False):
            for args in itertools.product(names, repeat=vocab[sym]):
                out.append(Lit(sym, positive, args))
    return out


# ---------------------------------------------------------------------------
# printing

_LEVEL = {Exists: 0, Forall: 0, Or: 1, And: 2, Times: 3, Pow: 4}


def print_formula(phi: Formula) -> str:
    return _print(phi, 0)


def _wrap(phi: Formula, level: int) -> str:
    own = _LEVEL.get(type(phi), 5)
    text = _print(phi, own)
    # quantifiers extend to the right, so parenthesize them whenever nested
    if own < level or (own == 0 and level > 0):
        return f"({text})"
    return text


def _print(phi: Formula, level: int) -> str:
    if isinstance(phi, Lit):
        core = f"{phi.symbol}({','.join(phi.args)})"
        return core if phi.positive else "!" + core
    if isinstance(phi, Eq):
        return f"{phi.left} = {phi.right}"
    if isinstance(phi, Neq):
        return f"{phi.left} != {phi.right}"
    if isinstance(phi, Or):
        return " | ".join(_wrap(c, 2) for c in phi.children)
    if isinstance(phi, And):
        return " & ".join(_wrap(c, 3) for c in phi.children)
    if isinstance(phi, (Exists, Forall)):
        q = "E" if isinstance(phi, Exists) else "A"
        body = phi.body
        if isinstance(body, (Exists, Forall)):
            return f"{q} {phi.var}. {_print(body, 0)}"
        if isinstance(body, (And, Or)):
            return f"{q} {phi.var}. ({_print(body, 0)})"
        return f"{q} {phi.var}. {_wrap(body, 1)}"
    if isinstance(phi, Times):
        return f"{phi.q} * {_wrap(phi.body, 4)}"
    if isinstance(phi, Pow):
        return f"{_wrap(phi.body, 5)}^{phi.e}"
    raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[a-zA-Z][a-zA-Z0-9_]*)|(?P<op>!=|[!=&|^*().,]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    pos, out = 0, []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(pos, "a token", text)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind=None, value=None, expected=None):
        tok = self.peek()
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            raise ParseError(tok[2], expected or value or kind, self.text)
        self.i += 1
        return tok

    def at_op(self, value):
        tok = self.peek()
        return tok[0] == "op" and tok[1] == value

    def at_quantifier(self):
        tok, nxt, dot = self.peek(), self.peek(1), self.peek(2)
        return (
            tok[0] == "name"
            and tok[1] in ("E", "A")
            and nxt[0] == "name"
            and dot[0] == "op"
            and dot[1] == "."
        )

    def formula(self):
        if self.at_quantifier():
            return self.quantified()
        return self.disj()

    def quantified(self):
        q = self.take("name")[1]
        var = self.take("name", expected="variable")[1]
        self.take("op", ".")
        body = self.formula()
        return Exists(var, body) if q == "E" else Forall(var, body)

    def disj(self):
        parts = [self.conj()]
        while self.at_op("|"):
            self.i += 1
            parts.append(self.conj())
        return disj(parts)

    def conj(self):
        parts = [self.mult()]
        while self.at_op("&"):
            self.i += 1
            parts.append(self.mult())
        return conj(parts)

    def mult(self):
        tok = self.peek()
        if tok[0] == "num":
            q = int(self.take("num")[1])
            self.take("op", "*", expected="'*' after a disjunctive multiple")
            return Times(q, self.mult())
        return self.power()

    def power(self):
        node = self.unit()
        while self.at_op("^"):
            self.i += 1
            node = Pow(node, int(self.take("num", expected="exponent")[1]))
        return node

    def unit(self):
        tok = self.peek()
        if self.at_quantifier():
            return self.quantified()
        if tok[0] == "op" and tok[1] == "(":
            self.i += 1
            node = self.formula()
            self.take("op", ")", expected="')'")
            return node
        if tok[0] == "op" and tok[1] == "!":
            self.i += 1
            atom = self.atom(expect_relation=True)
            return atom.complement()
        if tok[0] == "name":
            return self.atom()
        raise ParseError(tok[2], "literal, equality, quantifier or '('", self.text)

    def atom(self, expect_relation=False):
        name = self.take("name", expected="relation symbol or term")[1]
        if self.at_op("("):
            self.i += 1
            args = [self.take("name", expected="term")[1]]
            while self.at_op(","):
                self.i += 1
                args.append(self.take("name", expected="term")[1])
            self.take("op", ")", expected="')'")
            return Lit(name, True, tuple(args))
        if expect_relation:
            raise ParseError(self.peek()[2], "'(' after relation symbol", self.text)
        if self.at_op("="):
            self.i += 1
            return Eq(name, self.take("name", expected="term")[1])
        if self.at_op("!="):
            self.i += 1
            return Neq(name, self.take("name", expected="term")[1])
        raise ParseError(self.peek()[2], "'(', '=' or '!='", self.text)


def parse_formula(text: str) -> Formula:
    """Parse ``text`` and return its canonical AST."""
    parser = _Parser(text)
    node = parser.formula()
    parser.take("end", expected="end of input")
    return canonicalize(node)


# ---------------------------------------------------------------------------
# bounded sentence enumeration


@dataclass
class EnumerationHooks:
    """Callbacks that attach a value to every generated formula.

    ``atom(formula, depth)`` annotates atoms in the scope of the first
    ``depth`` pool variables; ``conj``/``disj`` combine child annotations;
    ``exists``/``forall`` aggregate the innermost scope variable away.
    """

    atom: Callable
    conj: Callable
    disj: Callable
    exists: Callable
    forall: Callable


class SentenceEnumerator:
    """Generates canonical formulas level by level, smallest first.

    Scope depth ``d`` means the variables ``pool[:d]`` may occur free; a
    quantifier introduced at depth ``d`` always binds ``pool[d]``.  And/Or
    nodes are flat (no child of the same connective) with canonically sorted,
    possibly repeated children.  Sugar (Pow/Times) is never generated; its
    expansion is.
    """

    def __init__(self, vocab: Vocabulary, pool: Sequence[str] = ("x", "y", "z"), max_rank: int | None = None, hooks: EnumerationHooks | None = None):
        self.vocab = make_vocab(vocab)
        self.pool = tuple(pool)
        self.max_depth = len(self.pool) if max_rank is None else min(max_rank, len(self.pool))
        self.hooks = hooks
        self._levels: dict[tuple[int, int], list[tuple[Formula, str, object]]] = {}

    def _atoms(self, depth):
        names = self.pool[:depth]
        out: list[Formula] = []
        if not names:
            return out
        for sym in sorted(self.vocab):
            for positive in (True, False):
                for args in itertools.product(names, repeat=self.vocab[sym]):
                    out.append(Lit(sym, positive, args))
        pairs = [tuple(sorted((a, b))) for i, a in enumerate(names) for b in names[i:]]
        out.extend(Eq(a, b) for a, b in pairs)
        out.extend(Neq(a, b) for a, b in pairs)
        return out

    def level(self, size: int, depth: int) -> list[tuple[Formula, str, object]]:
        """All formulas of exactly ``size`` nodes at scope ``depth`` (cached)."""
        key = (size, depth)
        if key not in self._levels:
            self._levels[key] = list(self._generate(size, depth))
        return self._levels[key]

    def _generate(self, size: int, depth: int) -> Iterator[tuple[Formula, str, object]]:
        hooks = self.hooks
        if size == 1:
            for a in self._atoms(depth):
                yield a, print_formula(a), hooks.atom(a, depth) if hooks else None
            return
        if depth < self.max_depth:
            var = self.pool[depth]
            for body, _, ann in self.level(size - 1, depth + 1):
                for kind in (Exists, Forall):
                    node = kind(var, body)
                    if hooks:
                        agg = hooks.exists if kind is Exists else hooks.forall
                        val = agg(ann, depth)
                    else:
                        val = None
                    yield node, print_formula(node), val
        for kind in (And, Or):
            yield from self._connective(kind, size - 1, depth)

    def _connective(self, kind, total, depth):
        hooks = self.hooks
        combine = (hooks.conj if kind is And else hooks.disj) if hooks else None
        for parts in _partitions(total, 2):
            groups = []
            for part_size, count in _run_lengths(parts):
                cands = [item for item in self.level(part_size, depth) if not isinstance(item[0], kind)]
                groups.append(list(itertools.combinations_with_replacement(cands, count)))
            for choice in itertools.product(*groups):
                children = sorted((c for grp in choice for c in grp), key=lambda item: item[1])
                node = kind(tuple(c[0] for c in children))
                val = combine([c[2] for c in children], depth) if combine else None
                yield node, print_formula(node), val

    def sentences(self, size_bound: int) -> Iterator[tuple[Formula, object]]:
        for size in range(1, size_bound + 1):
            # the last level is never a building block, so it is streamed
            items = self.level(size, 0) if size < size_bound else self._generate(size, 0)
            for phi, _, ann in items:
                yield phi, ann


def _partitions(total: int, min_parts: int, max_part: int | None = None):
    """Non-increasing integer partitions of ``total`` with >= ``min_parts`` parts."""
    if max_part is None:
        max_part = total

    def rec(remaining, cap):
        if remaining == 0:
            yield ()
            return
        for first in range(min(remaining, cap), 0, -1):
            for rest in rec(remaining - first, first):
                yield (first,) + rest

    for p in rec(total, max_part):
        if len(p) >= min_parts:
            yield p


def _run_lengths(parts):
    return [(k, len(list(g))) for k, g in itertools.groupby(parts)]


def enumerate_sentences(vocab: Vocabulary, size_bound: int, pool: Sequence[str] = ("x", "y", "z"), max_rank: int | None = None) -> Iterator[Formula]:
    """Every canonical closed sentence with at most ``size_bound`` nodes."""
    if size_bound < 1:
        raise ValueError("size_bound must be >= 1")
    for phi, _ in SentenceEnumerator(vocab, pool, max_rank).sentences(size_bound):
        yield phi
