"""Separating homomorphism families, certified equivalence and bounded search.

Certification follows the reduction technique: if every pair ``(hA, hB)`` of
a separating family maps the two interpretations to isomorphic images, the
originals agree on every sentence.  Refutation goes the other way round and
looks for a concrete sentence with different values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from .errors import DegenerateValues, NotSeparating, ProfileViolation, SearchLimitExceeded, TagMismatch, UnknownSymbol
from .homomorphisms import Homomorphism, checked_map_hom, endomorphism, universal_hom
from .interpretation import (
    KInterpretation,
    classical_model,
    compose_hom,
    evaluate,
    evaluate_payload,
    find_isomorphism,
    is_model_defining,
)
from .semirings import BOOL, Semiring, Value, minmax, posbool, sr_classify, whypoly
from .syntax import EnumerationHooks, Formula, SentenceEnumerator, print_formula

POSBOOL_FAMILY = "posbool-family"
WHY_FAMILY = "why-family"
MINMAX_THRESHOLD = "minmax-threshold"
USER_SUPPLIED = "user-supplied"

DEFAULT_POOL = ("x", "y", "z", "u", "v", "w")


@dataclass(frozen=True)
class HomPair:
    left: Homomorphism
    right: Homomorphism

    def __post_init__(self):
        if self.left.source != self.right.source or self.left.target != self.right.target:
            raise TagMismatch(f"pair members disagree: {self.left!r} vs {self.right!r}")

    @property
    def name(self) -> str:
        if self.left is self.right:
            return self.left.name
        return f"({self.left.name}, {self.right.name})"


@dataclass(frozen=True)
class SeparatingSet:
    pairs: tuple[HomPair, ...]
    diagonal: bool
    provenance: str
    trusted: bool = False

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        if not self.pairs:
            raise ValueError("a separating set needs at least one pair")
        if self.diagonal and any(p.left is not p.right and p.left != p.right for p in self.pairs):
            raise ValueError("diagonal family with differing pair members")

    @property
    def source(self) -> Semiring:
        return self.pairs[0].left.source

    @property
    def target(self) -> Semiring:
        return self.pairs[0].left.target

    def __len__(self):
        return len(self.pairs)


@dataclass
class Verdict:
    outcome: str  # certified | distinguished | unknown
    witness: Formula | None = None
    values: tuple[Value, Value] | None = None
    bijections: list[tuple[str, dict[str, str]]] = field(default_factory=list)
    bounds: dict[str, Any] = field(default_factory=dict)
    detail: str = ""

    @property
    def certified(self) -> bool:
        return self.outcome == "certified"

    @property
    def distinguished(self) -> bool:
        return self.outcome == "distinguished"

    def to_json(self) -> dict:
        doc: dict[str, Any] = {"outcome": self.outcome}
        doc["witness"] = None if self.witness is None else print_formula(self.witness)
        if self.values is not None:
            doc["values"] = [str(v) for v in self.values]
        doc["pairs"] = [{"pair": name, "bijection": sigma} for name, sigma in self.bijections]
        if self.bounds:
            doc["bounds"] = dict(self.bounds)
        if self.detail:
            doc["detail"] = self.detail
        return doc


def _subsets(variables: Sequence[str]) -> Iterable[tuple[str, ...]]:
    for r in range(len(variables) + 1):
        yield from itertools.combinations(variables, r)


def _set_name(ys: Sequence[str]) -> str:
    return "{" + ",".join(ys) + "}"


# ---------------------------------------------------------------------------
# families


def posbool_family(variables: Sequence[str]) -> SeparatingSet:
    """The diagonal family ``h_Y: PosBool[X] -> B`` for all ``Y ⊆ X``."""
    src = posbool(*variables)
    pairs = []
    for ys in _subsets(src.variables):
        h = universal_hom(src, BOOL, {x: x in ys for x in src.variables}, name=f"h_{_set_name(ys)}")
        pairs.append(HomPair(h, h))
    return SeparatingSet(tuple(pairs), True, POSBOOL_FAMILY)


def orbit_map(sigma: Mapping[str, str], ys: Sequence[str]) -> dict[str, str | None]:
    """``σ^Y``: send ``x ∈ Y`` to the first ``σ^r(x)`` (r >= 1) back in ``Y``, others to 0."""
    inside = set(ys)
    out: dict[str, str | None] = {}
    for x in sigma:
        if x not in inside:
            out[x] = None
            continue
        z = sigma[x]
        while z not in inside:
            z = sigma[z]
        out[x] = z
    return out


def _check_permutation(variables: Sequence[str], sigma: Mapping[str, str]) -> None:
    if set(sigma) != set(variables) or set(sigma.values()) != set(variables):
        raise ValueError(f"{dict(sigma)} is not a permutation of {list(variables)}")


def why_family(variables: Sequence[str], sigma: Mapping[str, str]) -> SeparatingSet:
    """Pairs ``(h_σ^Y, h_id^Y)`` of endomorphisms of ``W[X]`` for all ``Y ⊆ X``."""
    src = whypoly(*variables)
    _check_permutation(src.variables, sigma)
    identity = {x: x for x in src.variables}
    pairs = []
    for ys in _subsets(src.variables):
        label = _set_name(ys)
        left = endomorphism(src, orbit_map(sigma, ys), name=f"h_sigma^{label}")
        right = endomorphism(src, orbit_map(identity, ys), name=f"h_id^{label}")
        pairs.append(HomPair(left, right))
    cycle = ",".join(f"{x}->{sigma[x]}" for x in src.variables)
    return SeparatingSet(tuple(pairs), False, f"{WHY_FAMILY}({cycle})")


def minmax_threshold_family(n: int) -> SeparatingSet:
    """Threshold maps ``v >= t`` from ``minmax(n)`` to B, all checked exhaustively."""
    if n < 2:
        raise ValueError("threshold family needs n >= 2")
    K = minmax(n)
    pairs = []
    for t in range(1, n):
        h = checked_map_hom(K, BOOL, lambda v, t=t: v >= t, name=f"h_{t}")
        pairs.append(HomPair(h, h))
    family = SeparatingSet(tuple(pairs), True, MINMAX_THRESHOLD)
    if not check_separating(family, list(K.elements())):
        raise NotSeparating(f"threshold maps do not separate {K}")
    return family


def user_family(pairs: Sequence[HomPair], trusted: bool = False) -> SeparatingSet:
    diagonal = all(p.left is p.right or p.left == p.right for p in pairs)
    return SeparatingSet(tuple(pairs), diagonal, USER_SUPPLIED, trusted)


def _payload(tag: Semiring, v):
    if isinstance(v, Value):
        if v.tag != tag:
            raise TagMismatch(f"value of {v.tag} checked against {tag}")
        return v.payload
    return v


def check_separating(family: SeparatingSet, values: Iterable) -> bool:
    """Separation restricted to the finite set ``values``."""
    src = family.source
    vals = []
    for v in values:
        p = _payload(src, v)
        if p not in vals:
            vals.append(p)
    images = [[(pair.left(v), pair.right(v)) for v in vals] for pair in family.pairs]
    for i, j in itertools.permutations(range(len(vals)), 2):
        if not any(img[i][0] != img[j][1] for img in images):
            return False
    return True


# ---------------------------------------------------------------------------
# certification


def certify_equivalence(pi_a: KInterpretation, pi_b: KInterpretation, family: SeparatingSet) -> Verdict:
    """Isomorphism of all image pairs certifies elementary equivalence."""
    if pi_a.semiring != pi_b.semiring:
        raise TagMismatch(f"{pi_a.semiring} vs {pi_b.semiring}")
    if pi_a.semiring != family.source:
        raise TagMismatch(f"family acts on {family.source}, interpretations are over {pi_a.semiring}")
    if family.provenance == USER_SUPPLIED:
        if not family.trusted:
            raise NotSeparating("user-supplied families must be marked trusted")
        K = family.source
        achieved = pi_a.values() | pi_b.values() | {K.zero, K.one}
        if not check_separating(family, achieved):
            raise NotSeparating("user-supplied family fails to separate the literal values")

    bijections = []
    for pair in family.pairs:
        img_a, img_b = compose_hom(pair.left, pi_a), compose_hom(pair.right, pi_b)
        sigma = find_isomorphism(img_a, img_b)
        if sigma is None:
            return _fallback(pi_a, pi_b, pair, img_a, img_b, bijections)
        bijections.append((pair.name, sigma))
    return Verdict("certified", bijections=bijections, detail=f"{len(bijections)} image pairs isomorphic ({family.provenance})")


def _fallback(pi_a, pi_b, pair, img_a, img_b, bijections) -> Verdict:
    # a non-isomorphic pair of classical images is told apart by a
    # characteristic sentence; replay it on the originals
    from .axioms import classical_characteristic

    note = f"images under {pair.name} are not isomorphic"
    if img_a.semiring == BOOL and pi_a.universe and pi_b.universe:
        for img in (img_a, img_b):
            if not is_model_defining(img):
                continue
            chi = classical_characteristic(classical_model(img))
            va, vb = evaluate(pi_a, chi), evaluate(pi_b, chi)
            if va != vb:
                return Verdict("distinguished", chi, (va, vb), bijections, detail=note)
    return Verdict("unknown", bijections=bijections, detail=note)


# ---------------------------------------------------------------------------
# bounded search


class TupleDP:
    """Evaluation of enumerated formulas by value tables over assignments.

    An annotation at scope depth ``d`` is an interned tuple of payloads, one
    per assignment of ``pool[:d]`` in lexicographic order.  Connectives and
    quantifiers combine the tables of their children, so every enumerated
    formula costs one table operation instead of a full evaluation.
    """

    def __init__(self, pi: KInterpretation, pool: Sequence[str]):
        self.pi = pi
        self.K = pi.semiring
        self.pool = tuple(pool)
        self.n = len(pi.universe)
        self._assignments = [list(itertools.product(pi.universe, repeat=d)) for d in range(len(self.pool) + 1)]
        self._ids: dict[tuple, int] = {}
        self._tables: list[tuple] = []
        self._cache: dict[tuple, int] = {}

    def _intern(self, table: tuple) -> int:
        i = self._ids.get(table)
        if i is None:
            i = len(self._tables)
            self._ids[table] = i
            self._tables.append(table)
        return i

    def table(self, ident: int) -> tuple:
        return self._tables[ident]

    def sentence_value(self, ident: int):
        return self._tables[ident][0]

    def atom(self, phi: Formula, depth: int) -> int:
        names = self.pool[:depth]
        return self._intern(tuple(evaluate_payload(self.pi, phi, dict(zip(names, asg))) for asg in self._assignments[depth]))

    def _pair(self, op: str, a: int, b: int) -> int:
        key = (op, a, b) if a <= b else (op, b, a)
        hit = self._cache.get(key)
        if hit is None:
            f = self.K.mul if op == "&" else self.K.add
            hit = self._intern(tuple(f(x, y) for x, y in zip(self._tables[a], self._tables[b])))
            self._cache[key] = hit
        return hit

    def conj(self, ids: Sequence[int], depth: int) -> int:
        acc = ids[0]
        for i in ids[1:]:
            acc = self._pair("&", acc, i)
        return acc

    def disj(self, ids: Sequence[int], depth: int) -> int:
        acc = ids[0]
        for i in ids[1:]:
            acc = self._pair("|", acc, i)
        return acc

    def _quantify(self, op: str, ident: int, depth: int) -> int:
        key = (op, ident)
        hit = self._cache.get(key)
        if hit is None:
            body, n, K = self._tables[ident], self.n, self.K
            agg = K.sum if op == "E" else K.prod
            groups = len(self._assignments[depth])
            hit = self._intern(tuple(agg(body[j * n:(j + 1) * n]) for j in range(groups)))
            self._cache[key] = hit
        return hit

    def exists(self, ident: int, depth: int) -> int:
        return self._quantify("E", ident, depth)

    def forall(self, ident: int, depth: int) -> int:
        return self._quantify("A", ident, depth)


class MultiDP:
    """Runs several :class:`TupleDP` instances side by side."""

    def __init__(self, dps: Sequence[TupleDP]):
        self.dps = tuple(dps)

    def hooks(self) -> EnumerationHooks:
        dps = self.dps
        return EnumerationHooks(
            atom=lambda phi, d: tuple(dp.atom(phi, d) for dp in dps),
            conj=lambda anns, d: tuple(dp.conj([a[i] for a in anns], d) for i, dp in enumerate(dps)),
            disj=lambda anns, d: tuple(dp.disj([a[i] for a in anns], d) for i, dp in enumerate(dps)),
            exists=lambda ann, d: tuple(dp.exists(ann[i], d) for i, dp in enumerate(dps)),
            forall=lambda ann, d: tuple(dp.forall(ann[i], d) for i, dp in enumerate(dps)),
        )

    def values(self, ann) -> tuple:
        return tuple(dp.sentence_value(a) for dp, a in zip(self.dps, ann))


def sentence_stream(interps: Sequence[KInterpretation], size_bound: int, qr_bound: int, pool: Sequence[str] | None = None):
    """Yield ``(sentence, payloads)`` for every enumerated sentence, smallest first."""
    vocab = dict(interps[0].vocab)
    for pi in interps[1:]:
        if dict(pi.vocab) != vocab:
            raise UnknownSymbol("interpretations use different vocabularies")
    pool = tuple(pool or DEFAULT_POOL)[:qr_bound]
    if len(pool) < qr_bound:
        raise ValueError(f"variable pool too small for quantifier rank {qr_bound}")
    multi = MultiDP([TupleDP(pi, pool) for pi in interps])
    enum = SentenceEnumerator(vocab, pool, qr_bound, multi.hooks())
    for phi, ann in enum.sentences(size_bound):
        yield phi, multi.values(ann)


def distinguisher_search(
    pi_a: KInterpretation,
    pi_b: KInterpretation,
    size_bound: int,
    qr_bound: int,
    max_sentences: int | None = None,
    pool: Sequence[str] | None = None,
) -> Verdict:
    """First enumerated sentence with different values, or ``unknown``."""
    if pi_a.semiring != pi_b.semiring:
        raise TagMismatch(f"{pi_a.semiring} vs {pi_b.semiring}")
    bounds = {"size_bound": size_bound, "qr_bound": qr_bound}
    count = 0
    for phi, (va, vb) in sentence_stream([pi_a, pi_b], size_bound, qr_bound, pool):
        count += 1
        if va != vb:
            # replay by direct evaluation, independent of the table DP
            ra, rb = evaluate(pi_a, phi), evaluate(pi_b, phi)
            assert ra.payload == va and rb.payload == vb, "table evaluation disagrees with direct evaluation"
            bounds["sentences_checked"] = count
            return Verdict("distinguished", phi, (ra, rb), bounds=bounds)
        if max_sentences is not None and count >= max_sentences:
            raise SearchLimitExceeded(f"stopped after {count} sentences without reaching the bounds")
    bounds["sentences_checked"] = count
    return Verdict("unknown", bounds=bounds, detail="no distinguishing sentence within the bounds")


# ---------------------------------------------------------------------------
# counterexample generator

# element: values of (P, Q, !P, !Q); None is 0
_RS_ROWS = {
    "a": (None, "s", "r", None),
    "b": ("r", None, None, "s"),
    "c": ("s", "r", None, None),
    "d": (None, None, "s", "r"),
}
_SR_ROWS = {
    "a": ("s", None, None, "r"),
    "b": (None, "r", "s", None),
    "c": ("r", "s", None, None),
    "d": (None, None, "r", "s"),
}
_COLUMNS = (("P", True), ("Q", True), ("P", False), ("Q", False))


def lattice_counterexample(tag: Semiring, r, s) -> tuple[KInterpretation, KInterpretation]:
    """The four-element pair ``(π_rs, π_sr)`` over unary ``P, Q``."""
    profile = sr_classify(tag)
    if not profile.fully_idempotent:
        raise ProfileViolation("fully_idempotent", str(tag))
    r, s = _payload(tag, r), _payload(tag, s)
    for v in (r, s):
        if not tag.contains(v):
            raise TagMismatch(f"{v!r} is not an element of {tag}")
    if r == s:
        raise DegenerateValues("r and s must differ")
    if tag.is_zero(r) or tag.is_zero(s):
        raise DegenerateValues("r and s must be nonzero")

    def build(rows):
        table = {}
        for elem, row in rows.items():
            for (sym, positive), cell in zip(_COLUMNS, row):
                if cell is not None:
                    table[(sym, positive, (elem,))] = r if cell == "r" else s
        return KInterpretation(tag, ("a", "b", "c", "d"), {"P": 1, "Q": 1}, table)

    return build(_RS_ROWS), build(_SR_ROWS)
