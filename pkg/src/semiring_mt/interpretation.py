"""K-interpretations over finite universes and their semiring semantics."""

from __future__ import annotations

import functools
import itertools
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Any, Mapping, Sequence

from .errors import CarrierError, ParseError, TagMismatch, UnboundVariable, UnknownSymbol
from .homomorphisms import Homomorphism
from .semirings import BOOL, Semiring, Value, parse_semiring
from .syntax import (
    And,
    Eq,
    Exists,
    Forall,
    Formula,
    Lit,
    Neq,
    Or,
    Pow,
    Times,
    free_names,
    lit_enum,
    make_vocab,
)

Key = tuple[str, bool, tuple[str, ...]]


def lit_key(lit: Lit) -> Key:
    return (lit.symbol, lit.positive, lit.args)


@dataclass(frozen=True)
class KInterpretation:
    """A map from instantiated literals to semiring payloads; absent means 0."""

    semiring: Semiring
    universe: tuple[str, ...]
    vocab: Mapping[str, int]
    table: Mapping[Key, Any] = field(default_factory=dict)

    def __post_init__(self):
        universe = tuple(self.universe)
        if len(set(universe)) != len(universe):
            raise ValueError(f"duplicate universe elements in {list(universe)}")
        vocab = make_vocab(self.vocab)
        members = set(universe)
        clean = {}
        for raw_key, payload in dict(self.table).items():
            key = lit_key(raw_key) if isinstance(raw_key, Lit) else raw_key
            sym, _, args = key
            if sym not in vocab:
                raise UnknownSymbol(f"relation {sym} is not in the vocabulary")
            if len(args) != vocab[sym]:
                raise UnknownSymbol(f"{sym} has arity {vocab[sym]}, got {len(args)} arguments")
            for a in args:
                if a not in members:
                    raise CarrierError(f"{a!r} is not a universe element")
            if isinstance(payload, Value):
                if payload.tag != self.semiring:
                    raise TagMismatch(f"table value of {payload.tag} in a {self.semiring} interpretation")
                payload = payload.payload
            elif not self.semiring.contains(payload):
                raise CarrierError(f"{payload!r} is not an element of {self.semiring}")
            if not self.semiring.is_zero(payload):
                clean[key] = payload
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "vocab", MappingProxyType(vocab))
        object.__setattr__(self, "table", MappingProxyType(clean))

    def __hash__(self):
        return hash((self.semiring, self.universe, tuple(self.vocab.items()), frozenset(self.table.items())))

    def __eq__(self, other):
        return (
            isinstance(other, KInterpretation)
            and self.semiring == other.semiring
            and self.universe == other.universe
            and dict(self.vocab) == dict(other.vocab)
            and dict(self.table) == dict(other.table)
        )

    def lookup(self, symbol: str, positive: bool, args: tuple[str, ...]):
        """Raw payload of an instantiated literal."""
        return self.table.get((symbol, positive, args), self.semiring.zero)

    def __getitem__(self, lit: Lit) -> Value:
        return Value(self.semiring, self.lookup(lit.symbol, lit.positive, lit.args))

    def literals(self) -> list[Lit]:
        return lit_enum(self.vocab, self.universe)

    def values(self) -> set:
        """Payloads taken by the table, including 0 when some literal is missing."""
        out = set(self.table.values())
        if len(self.table) < len(self.literals()):
            out.add(self.semiring.zero)
        return out

    def with_table(self, table: Mapping[Key, Any], semiring: Semiring | None = None) -> "KInterpretation":
        return KInterpretation(semiring or self.semiring, self.universe, self.vocab, table)


def make_interpretation(semiring: Semiring, universe: Sequence[str], vocab: Mapping[str, int], rows: Mapping[str, Any]) -> KInterpretation:
    """Build from ``{"P(a)": value, "!Q(b)": value}`` with values as payloads or strings."""
    table = {}
    for text, value in rows.items():
        key = parse_literal(text)
        if isinstance(value, str):
            value = semiring.parse_value(value)
        elif isinstance(value, int) and not isinstance(value, bool) and not semiring.contains(value):
            value = semiring.parse_value(str(value))
        table[key] = value
    return KInterpretation(semiring, tuple(universe), vocab, table)


_LIT_RE = re.compile(r"\s*(!?)\s*([A-Za-z][A-Za-z0-9_]*)\s*\(([^()]*)\)\s*\Z")


def parse_literal(text: str) -> Key:
    m = _LIT_RE.match(text)
    if not m:
        raise ParseError(0, "literal such as P(a) or !P(a)", text)
    args = tuple(a.strip() for a in m.group(3).split(","))
    if not all(args):
        raise ParseError(m.start(3), "argument", text)
    return (m.group(2), not m.group(1), args)


def format_literal(key: Key) -> str:
    sym, positive, args = key
    return f"{'' if positive else '!'}{sym}({','.join(args)})"


# ---------------------------------------------------------------------------
# evaluation


@functools.lru_cache(maxsize=65536)
def _names(phi: Formula) -> frozenset[str]:
    return free_names(phi)


@functools.lru_cache(maxsize=16384)
def _exists_block(phi: Exists):
    """Split a chain of existentials over a conjunction into per-level conjuncts."""
    variables: list[str] = []
    body: Formula = phi
    while isinstance(body, Exists) and body.var not in variables:
        variables.append(body.var)
        body = body.body
    conjuncts = body.children if isinstance(body, And) else (body,)
    index = {v: i for i, v in enumerate(variables)}
    levels: list[list[Formula]] = [[] for _ in range(len(variables) + 1)]
    for c in conjuncts:
        deepest = max((index[v] for v in _names(c) if v in index), default=-1)
        levels[deepest + 1].append(c)
    return tuple(variables), tuple(tuple(l) for l in levels)


class _Evaluator:
    def __init__(self, interp: KInterpretation):
        self.pi = interp
        self.K = interp.semiring
        self.members = frozenset(interp.universe)

    def resolve(self, name: str, env: Mapping[str, str]) -> str:
        if name in env:
            return env[name]
        if name in self.members:
            return name
        raise UnboundVariable(f"unbound variable {name!r}")

    def ev(self, phi: Formula, env: dict[str, str]):
        K = self.K
        if isinstance(phi, Lit):
            arity = self.pi.vocab.get(phi.symbol)
            if arity is None:
                raise UnknownSymbol(f"relation {phi.symbol} is not in the vocabulary")
            if arity != len(phi.args):
                raise UnknownSymbol(f"{phi.symbol} has arity {arity}, got {len(phi.args)} arguments")
            args = tuple(self.resolve(a, env) for a in phi.args)
            return self.pi.lookup(phi.symbol, phi.positive, args)
        if isinstance(phi, Eq):
            return K.one if self.resolve(phi.left, env) == self.resolve(phi.right, env) else K.zero
        if isinstance(phi, Neq):
            return K.zero if self.resolve(phi.left, env) == self.resolve(phi.right, env) else K.one
        if isinstance(phi, Or):
            acc = K.zero
            for c in phi.children:
                acc = K.add(acc, self.ev(c, env))
            return acc
        if isinstance(phi, And):
            acc = K.one
            for c in phi.children:
                acc = K.mul(acc, self.ev(c, env))
                if K.is_zero(acc):
                    break
            return acc
        if isinstance(phi, Exists):
            return self.exists(phi, env)
        if isinstance(phi, Forall):
            acc = K.one
            saved = env.get(phi.var, _MISSING)
            for a in self.pi.universe:
                env[phi.var] = a
                acc = K.mul(acc, self.ev(phi.body, env))
                if K.is_zero(acc):
                    break
            _restore(env, phi.var, saved)
            return acc
        if isinstance(phi, Pow):
            return K.pow(self.ev(phi.body, env), phi.e)
        if isinstance(phi, Times):
            return K.times(phi.q, self.ev(phi.body, env))
        raise TypeError(f"not a formula: {phi!r}")

    def conj(self, parts, env):
        K = self.K
        acc = K.one
        for c in parts:
            acc = K.mul(acc, self.ev(c, env))
            if K.is_zero(acc):
                break
        return acc

    def exists(self, phi: Exists, env):
        # Σ_{v1} ... Σ_{vm} Π c  with each conjunct multiplied in at the
        # shallowest level where all its block variables are bound
        K = self.K
        variables, levels = _exists_block(phi)
        head = self.conj(levels[0], env)
        if K.is_zero(head):
            return head
        saved = [env.get(v, _MISSING) for v in variables]
        universe = self.pi.universe
        m = len(variables)

        def block(i):
            total = K.zero
            var, here = variables[i], levels[i + 1]
            for a in universe:
                env[var] = a
                val = self.conj(here, env)
                if K.is_zero(val):
                    continue
                if i + 1 < m:
                    val = K.mul(val, block(i + 1))
                total = K.add(total, val)
            return total

        result = K.mul(head, block(0))
        for v, s in zip(variables, saved):
            _restore(env, v, s)
        return result


_MISSING = object()


def _restore(env, var, saved):
    if saved is _MISSING:
        env.pop(var, None)
    else:
        env[var] = saved


def evaluate(pi: KInterpretation, phi: Formula, assignment: Mapping[str, str] | None = None) -> Value:
    """Semiring value of ``phi`` under ``pi`` and ``assignment``."""
    env = dict(assignment or {})
    for var, elem in env.items():
        if elem not in pi.universe:
            raise CarrierError(f"assignment {var} -> {elem!r} is outside the universe")
    return Value(pi.semiring, _Evaluator(pi).ev(phi, env))


def evaluate_payload(pi: KInterpretation, phi: Formula, assignment: Mapping[str, str] | None = None):
    return _Evaluator(pi).ev(phi, dict(assignment or {}))


# ---------------------------------------------------------------------------
# structural operations


def is_model_defining(pi: KInterpretation) -> bool:
    K = pi.semiring
    for lit in pi.literals():
        if not lit.positive:
            continue
        pos = K.is_zero(pi.lookup(lit.symbol, True, lit.args))
        neg = K.is_zero(pi.lookup(lit.symbol, False, lit.args))
        if pos == neg:
            return False
    return True


def classical_model(pi: KInterpretation) -> KInterpretation:
    """The Boolean interpretation marking every literal with nonzero value true."""
    return KInterpretation(BOOL, pi.universe, pi.vocab, {k: True for k in pi.table})


def compose_hom(h: Homomorphism, pi: KInterpretation) -> KInterpretation:
    """The literal-wise image ``h ∘ pi``."""
    if pi.semiring != h.source:
        raise TagMismatch(f"{h.name} expects {h.source}, interpretation is over {pi.semiring}")
    return KInterpretation(h.target, pi.universe, pi.vocab, {k: h(v) for k, v in pi.table.items()})


def _signatures(pi: KInterpretation) -> dict[str, Counter]:
    sig = {a: Counter() for a in pi.universe}
    for (sym, positive, args), v in pi.table.items():
        for a in set(args):
            positions = tuple(i for i, b in enumerate(args) if b == a)
            sig[a][(sym, positive, positions, v)] += 1
    return sig


def find_isomorphism(pi_a: KInterpretation, pi_b: KInterpretation) -> dict[str, str] | None:
    """First bijection (in universe order) preserving every literal value, or None."""
    if pi_a.semiring != pi_b.semiring or dict(pi_a.vocab) != dict(pi_b.vocab):
        return None
    if len(pi_a.universe) != len(pi_b.universe) or len(pi_a.table) != len(pi_b.table):
        return None
    if Counter(pi_a.table.values()) != Counter(pi_b.table.values()):
        return None
    sig_a, sig_b = _signatures(pi_a), _signatures(pi_b)
    if Counter(_freeze(c) for c in sig_a.values()) != Counter(_freeze(c) for c in sig_b.values()):
        return None
    candidates = {
        a: [b for b in pi_b.universe if sig_b[b] == sig_a[a]] for a in pi_a.universe
    }
    order = list(pi_a.universe)
    vocab = list(pi_a.vocab.items())
    sigma: dict[str, str] = {}
    used: set[str] = set()

    def consistent(a: str) -> bool:
        dom = list(sigma)
        for sym, arity in vocab:
            for args in itertools.product(dom, repeat=arity):
                if a not in args:
                    continue
                image = tuple(sigma[x] for x in args)
                for positive in (True, False):
                    if pi_a.lookup(sym, positive, args) != pi_b.lookup(sym, positive, image):
                        return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        a = order[i]
        for b in candidates[a]:
            if b in used:
                continue
            sigma[a] = b
            used.add(b)
            if consistent(a) and search(i + 1):
                return True
            del sigma[a]
            used.discard(b)
        return False

    return dict(sigma) if search(0) else None


def _freeze(c: Counter) -> frozenset:
    return frozenset(c.items())


# ---------------------------------------------------------------------------
# files and display


def interpretation_to_json(pi: KInterpretation) -> dict:
    K = pi.semiring
    return {
        "semiring": str(K),
        "universe": list(pi.universe),
        "relations": dict(pi.vocab),
        "table": [
            {"lit": format_literal(lit_key(lit)), "value": K.format_value(pi.lookup(lit.symbol, lit.positive, lit.args))}
            for lit in pi.literals()
            if lit_key(lit) in pi.table
        ],
    }


def interpretation_from_json(doc: Mapping, semiring: Semiring | None = None) -> KInterpretation:
    try:
        K = semiring or parse_semiring(doc["semiring"])
        universe = tuple(doc["universe"])
        vocab = dict(doc["relations"])
        rows = doc.get("table", [])
    except KeyError as exc:
        raise CarrierError(f"interpretation document lacks field {exc.args[0]!r}") from None
    table = {}
    for row in rows:
        key = parse_literal(row["lit"])
        if key in table:
            raise CarrierError(f"literal {row['lit']} listed twice")
        table[key] = K.parse_value(row["value"])
    return KInterpretation(K, universe, vocab, table)


def load_interpretation(path: str | Path, semiring: Semiring | None = None) -> KInterpretation:
    with open(path, encoding="utf-8") as fh:
        return interpretation_from_json(json.load(fh), semiring)


def save_interpretation(pi: KInterpretation, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(interpretation_to_json(pi), fh, indent=2)
        fh.write("\n")


def format_table(pi: KInterpretation) -> str:
    """Tabular view: one row per universe element, literal columns (unary vocabularies)."""
    K = pi.semiring
    if any(arity != 1 for arity in pi.vocab.values()):
        lines = []
        for lit in pi.literals():
            v = pi.lookup(lit.symbol, lit.positive, lit.args)
            if not K.is_zero(v):
                lines.append(f"{format_literal(lit_key(lit))} = {K.format_value(v)}")
        return "\n".join(lines) or "(all zero)"
    cols = [(s, p) for s in pi.vocab for p in (True, False)]
    header = ["A"] + [("" if p else "!") + s for s, p in cols]
    rows = [header]
    for a in pi.universe:
        rows.append([a] + [K.format_value(pi.lookup(s, p, (a,))) for s, p in cols])
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows)
