"""Acceptance criteria 1-14.

Each test carries ``@pytest.mark.criterion(n)``; the terminal summary prints
one PASS/FAIL line per criterion.  Expected values either come from the
embedded worked-example tables or are recomputed by the naive oracles in
``oracles.py``.
"""

import itertools
import random
from collections import defaultdict
from fractions import Fraction

import pytest

import oracles
from semiring_mt import (
    BOOL,
    NAT,
    VITERBI,
    abspoly,
    boolpoly,
    certify_equivalence,
    compose_hom,
    distinguisher_search,
    endomorphism,
    evaluate,
    find_isomorphism,
    lattice_counterexample,
    make_interpretation,
    minmax,
    minmax_threshold_family,
    natpoly,
    parse_formula,
    posbool_family,
    universal_hom,
    whypoly,
    why_family,
)
from semiring_mt import attacks as T
from semiring_mt import axioms as A
from semiring_mt import syntax as S
from semiring_mt.equivalence import sentence_stream
from semiring_mt.interpretation import KInterpretation, interpretation_from_json

F = Fraction
PQ = {"P": 1, "Q": 1}
PSI = parse_formula("A x. (P(x) | Q(x))")


def all_tables(tag, universe, vocab, values):
    keys = [(l.symbol, l.positive, l.args) for l in KInterpretation(tag, universe, vocab).literals()]
    for vals in itertools.product(values, repeat=len(keys)):
        yield KInterpretation(tag, universe, vocab, dict(zip(keys, vals)))


def model_defining_tables(tag, universe, vocab, nonzero):
    """Tables where each atom has exactly one nonzero polarity, with a value from ``nonzero``."""
    atoms = [(l.symbol, l.args) for l in KInterpretation(tag, universe, vocab).literals() if l.positive]
    for pols in itertools.product((True, False), repeat=len(atoms)):
        for vals in itertools.product(nonzero, repeat=len(atoms)):
            yield KInterpretation(tag, universe, vocab, {(s, p, a): v for (s, a), p, v in zip(atoms, pols, vals)})


# ---------------------------------------------------------------------------
# 1. evaluation exactness


@pytest.mark.criterion(1)
def test_c01_evaluation_exactness(interp):
    pi_v = interp("pi_v.json")
    assert evaluate(pi_v, PSI).payload == F(9, 20)
    assert oracles.naive_eval_interp(pi_v, PSI) == F(9, 20)

    twin = interp("pi_v_natx.json")
    K = twin.semiring
    p = evaluate(twin, PSI).payload
    assert p == K.parse_value("x*z + y*z")
    assert oracles.to_dict(p, K.variables) == oracles.naive_eval_poly(twin, PSI)

    h_e = universal_hom(K, VITERBI, {"x": F(3, 10), "y": F(9, 10), "z": F(1, 2), "w": F(2, 5)})
    assert h_e(p) == F(9, 20)
    assert compose_hom(h_e, twin) == pi_v
    assert evaluate(compose_hom(h_e, twin), PSI).payload == h_e(p)


# ---------------------------------------------------------------------------
# 2. PosBool counterexample


def image_grid(pi, columns):
    out = {}
    for a in pi.universe:
        out[a] = ["1" if pi.lookup(c.lstrip("!"), not c.startswith("!"), (a,)) else "0" for c in columns]
    return out


@pytest.mark.criterion(2)
def test_c02_posbool_counterexample(interp, data):
    a, b = interp("pi_xy.json"), interp("pi_yx.json")
    tables = data("posbool_images.json")
    family = posbool_family(["x", "y"])
    assert sorted(p.left.name for p in family.pairs) == sorted(tables["images"])
    for pair in family.pairs:
        h = pair.left
        img_a, img_b = compose_hom(h, a), compose_hom(h, b)
        want = tables["images"][h.name]
        assert image_grid(img_a, tables["columns"]) == want["xy"], h.name
        assert image_grid(img_b, tables["columns"]) == want["yx"], h.name
        assert oracles.brute_isomorphic(img_a, img_b), h.name
    verdict = certify_equivalence(a, b, family)
    assert verdict.certified and len(verdict.bijections) == 4
    for (name, sigma), pair in zip(verdict.bijections, family.pairs):
        assert oracles.is_bijection_iso(compose_hom(pair.left, a), compose_hom(pair.right, b), sigma)
    assert find_isomorphism(a, b) is None
    assert not oracles.brute_isomorphic(a, b)


@pytest.mark.criterion(2)
def test_c02_certificate_agrees_with_bounded_search(interp):
    # every sentence up to size 6, rank 2 takes the same value on both sides
    a, b = interp("pi_xy.json"), interp("pi_yx.json")
    assert distinguisher_search(a, b, 6, 2).outcome == "unknown"


# ---------------------------------------------------------------------------
# 3. W[X] counterexample


@pytest.mark.criterion(3)
def test_c03_why_counterexample(interp):
    W = whypoly("x", "y")
    a, b = interp("pi_xy.json", W), interp("pi_yx.json", W)
    family = why_family(["x", "y"], {"x": "y", "y": "x"})
    assert len(family) == 4
    verdict = certify_equivalence(a, b, family)
    assert verdict.certified
    proper = 0
    for pair in family.pairs:
        img_a, img_b = compose_hom(pair.left, a), compose_hom(pair.right, b)
        assert oracles.brute_isomorphic(img_a, img_b), pair.name
        proper += "{x,y}" not in pair.name
    assert proper == 3
    assert find_isomorphism(a, b) is None
    assert distinguisher_search(a, b, 6, 2).outcome == "unknown"


# ---------------------------------------------------------------------------
# 4. min-max counterexample


@pytest.mark.criterion(4)
def test_c04_minmax_counterexample(interp):
    a, b = interp("pi_pq.json"), interp("pi_qp.json")
    assert certify_equivalence(a, b, minmax_threshold_family(4)).certified
    assert find_isomorphism(a, b) is None and not oracles.brute_isomorphic(a, b)
    a3, b3 = lattice_counterexample(minmax(3), 1, 2)
    assert certify_equivalence(a3, b3, minmax_threshold_family(3)).certified
    assert find_isomorphism(a3, b3) is None and not oracles.brute_isomorphic(a3, b3)
    for x, y in ((a, b), (a3, b3)):
        assert distinguisher_search(x, y, 6, 2).outcome == "unknown"


# ---------------------------------------------------------------------------
# 5. Viterbi distinguishing


@pytest.mark.criterion(5)
def test_c05_viterbi_distinguishing(interp):
    a, b = interp("pi_19.json"), interp("pi_91.json")
    phi = parse_formula("P(x) & Q(x)^2")
    assert evaluate(a, phi, {"x": "a"}).payload == F(1, 10) * F(9, 10) ** 2 == F(81, 1000)
    assert evaluate(b, phi, {"x": "a"}).payload == F(9, 10) * F(1, 10) ** 2 == F(9, 1000)

    verdict = distinguisher_search(a, b, 6, 1)
    assert verdict.distinguished
    w = verdict.witness
    assert S.formula_size(w) <= 6 and S.is_sentence(w)
    va, vb = (v.payload for v in verdict.values)
    assert va != vb
    assert (va, vb) == (oracles.naive_eval_interp(a, w), oracles.naive_eval_interp(b, w))
    if w == S.Exists("x", S.expand(phi)):
        assert (va, vb) == (F(81, 1000), F(9, 1000))


# ---------------------------------------------------------------------------
# 6. exponent schedules


@pytest.mark.criterion(6)
@pytest.mark.parametrize("eps,k,expected", [(F(1, 2), 4, (1, 2, 4, 8)), (F(1, 10), 2, (1, 22))])
def test_c06_exponent_schedules(eps, k, expected):
    f = A.exponent_schedule(eps, k).f
    assert f == expected == oracles.schedule_oracle(eps, k)
    for i in range(1, k):
        prefix = sum(f[:i])
        assert (1 - eps) ** f[i] < eps**prefix
        assert not (1 - eps) ** (f[i] - 1) < eps**prefix


# ---------------------------------------------------------------------------
# 7. Viterbi characteristic sentences, desk scale

QUARTERS = [F(1, 4), F(1, 2), F(3, 4), F(1)]


def chi_agreement_implies_iso(sources, targets, eps):
    checked = 0
    for pa in sources:
        chi = A.viterbi_characteristic(pa, eps)
        va = evaluate(pa, chi).payload
        assert va > 0
        for pb in targets:
            if evaluate(pb, chi).payload == va:
                assert find_isomorphism(pa, pb) is not None
                assert oracles.brute_isomorphic(pa, pb)
            checked += 1
    return checked


@pytest.mark.criterion(7)
def test_c07_one_element_exhaustive():
    tables = list(model_defining_tables(VITERBI, ("a",), PQ, QUARTERS))
    assert len(tables) == 64
    assert chi_agreement_implies_iso(tables, tables, F(1, 4)) == 64 * 64


@pytest.mark.criterion(7)
def test_c07_two_element_sampled():
    tables = list(model_defining_tables(VITERBI, ("a", "b"), PQ, QUARTERS))
    assert len(tables) == 4096
    rng = random.Random(17)
    sources = rng.sample(tables, 40)
    assert chi_agreement_implies_iso(sources, tables, F(1, 4)) == 40 * 4096


# ---------------------------------------------------------------------------
# 8. finite axiomatisation of pi_19


@pytest.mark.criterion(8)
def test_c08_viterbi_axiomatisation(interp):
    pi = interp("pi_19.json")
    ax = A.viterbi_axiomatisation(pi)
    assert len(ax) == 5
    target = [evaluate(pi, s).payload for s in ax]
    tenths = [F(i, 10) for i in range(11)]
    agreeing = 0
    for other in all_tables(VITERBI, ("a",), PQ, tenths):
        if all(evaluate(other, s).payload == t for s, t in zip(ax, target)):
            agreeing += 1
            assert find_isomorphism(pi, other) is not None
            assert oracles.brute_isomorphic(pi, other)
    assert agreeing == 1


# ---------------------------------------------------------------------------
# 9. power sums


@pytest.mark.criterion(9)
def test_c09_power_sums_separate_multisets():
    for c in range(2, 5):
        for k in range(1, 5):
            e = A.nat_exponent(c, k)
            assert e == oracles.nat_exponent_oracle(c, k)
            seen = defaultdict(set)
            for seq in itertools.product(range(c), repeat=k):
                seen[sum(r**e for r in seq)].add(tuple(sorted(seq)))
            assert all(len(v) == 1 for v in seen.values()), (c, k)


@pytest.mark.criterion(9)
def test_c09_nat_exponent_values():
    assert A.nat_exponent(2, 3) == 2 == oracles.nat_exponent_oracle(2, 3)
    assert A.nat_exponent(10, 2) == 7 == oracles.nat_exponent_oracle(10, 2)


# ---------------------------------------------------------------------------
# 10. N[X] embedding


@pytest.mark.criterion(10)
def test_c10_embedding_bijection():
    h = A.natx_embedding(2, 2, 2)
    bounded = A.bounded_polynomials(2, 2, 2)
    assert len(bounded) == len(set(bounded)) == 16
    assert sorted(h(p) for p in bounded) == list(range(16))
    # x_i -> C^(n^(i-1)) evaluated by hand
    for p in bounded:
        assert h(p) == sum(c * 2 ** m.exponent("x1") * 4 ** m.exponent("x2") for m, c in p.terms)


@pytest.mark.criterion(10)
@pytest.mark.parametrize("vocab", [{"P": 1}, PQ], ids=["P", "PQ"])
def test_c10_polynomial_characteristic_sentences(vocab):
    values = A.bounded_polynomials(2, 2, 1)
    tables = list(all_tables(natpoly("x1"), ("a",), vocab, values))
    for pa in tables:
        chi = A.natx_characteristic(pa, 2, 2)
        va = evaluate(pa, chi).payload
        for pb in tables:
            assert (evaluate(pb, chi).payload == va) == oracles.brute_isomorphic(pa, pb)


# ---------------------------------------------------------------------------
# 11. N radix characteristic sentences


@pytest.mark.criterion(11)
def test_c11_nat_characteristic():
    q = 3
    tables = list(all_tables(NAT, ("a",), PQ, range(q)))
    assert len(tables) == 81
    for pa in tables:
        chi = A.nat_characteristic(pa, q)
        va = evaluate(pa, chi).payload
        assert va == oracles.naive_eval_interp(pa, chi)
        for pb in tables:
            assert (evaluate(pb, chi).payload == va) == oracles.brute_isomorphic(pa, pb)


# ---------------------------------------------------------------------------
# 12. cancellation witnesses


@pytest.fixture(scope="module")
def witnesses(data):
    doc = data("cancellation.json")
    out = {}
    for key in ("boolx", "sx"):
        spec = doc[key]
        tag = boolpoly("x", "y") if key == "boolx" else abspoly("x", "y")
        out[key] = (T.verify_witness(tag, spec["a"], spec["b"], spec["c"]), spec)
    return out


@pytest.mark.criterion(12)
def test_c12_witnesses_verify(witnesses):
    w, spec = witnesses["boolx"]
    B = w.tag
    assert w.product == B.parse_value(spec["ab"])
    assert len(w.product.terms) == 9
    # expand ab with dictionary polynomials
    d = oracles.DictPoly("boolpoly", 2)
    ab = d.mul(oracles.to_dict(w.a, B.variables), oracles.to_dict(w.b, B.variables))
    ac = d.mul(oracles.to_dict(w.a, B.variables), oracles.to_dict(w.c, B.variables))
    assert ab == ac == oracles.to_dict(B.parse_value(spec["ab"]), B.variables)
    ws, _ = witnesses["sx"]
    assert ws.product == ws.tag.mul(ws.a, ws.c)


@pytest.mark.criterion(12)
@pytest.mark.parametrize("key", ["boolx", "sx"])
def test_c12_no_distinguishing_sentence(witnesses, key):
    w, _ = witnesses[key]
    pi_b, pi_c = T.witness_interpretations(w)
    assert not oracles.brute_isomorphic(pi_b, pi_c)
    verdict = distinguisher_search(pi_b, pi_c, 8, 2)
    assert verdict.outcome == "unknown"
    assert verdict.bounds["sentences_checked"] > 100000


@pytest.mark.criterion(12)
def test_c12_swap_invariance():
    B = boolpoly("x", "y")
    prov = make_interpretation(B, ["d", "e"], {"R": 1}, {"R(d)": "x", "R(e)": "y"})
    swap = endomorphism(B, {"x": "y", "y": "x"})
    rng = random.Random(3)
    count = 0
    for phi, (p,) in sentence_stream([prov], 8, 2):
        count += 1
        assert swap(p) == p, S.print_formula(phi)
        if rng.random() < 0.002:
            assert oracles.to_dict(p, B.variables) == oracles.naive_eval_poly(prov, phi)
    assert count > 100000


# ---------------------------------------------------------------------------
# 13. tropical perturbation


@pytest.mark.criterion(13)
def test_c13_tropical_attack(data):
    doc = data("tropical_attack.json")
    pi = interpretation_from_json(doc["interpretation"])
    assert len(pi.table) == 2
    for inst in doc["instances"]:
        psi = [parse_formula(s) for s in inst["sentences"]]
        assert len(psi) == 1
        res = T.tropical_perturbation(pi, psi)
        for s in psi:
            assert oracles.naive_eval_interp(pi, s) == oracles.naive_eval_interp(res.pi_prime, s)
        assert find_isomorphism(pi, res.pi_prime) is None
        assert not oracles.brute_isomorphic(pi, res.pi_prime)
        names = ["x1", "x2"]
        for p, best in res.dominant:
            cost = lambda m, v: sum(m.exponent(x) * vj for x, vj in zip(names, v))
            others = [m for m in p.monomials() if m != best]
            assert all(cost(best, res.v) < cost(m, res.v) for m in others)
            assert all(cost(best, res.w) < cost(m, res.w) for m in others)


# ---------------------------------------------------------------------------
# 14. property suites (the sampled algebra suites live in the unit test files)


def top_product_bruteforce(values, i):
    best = F(0)
    for combo in itertools.combinations(values, i):
        prod = F(1)
        for v in combo:
            prod *= v
        best = max(best, prod)
    return best


def lemma20_check(pi, max_i=None):
    for sym, arity in pi.vocab.items():
        tuples = list(itertools.product(pi.universe, repeat=arity))
        for positive in (True, False):
            values = [pi.lookup(sym, positive, t) for t in tuples]
            top = len(tuples) if max_i is None else min(max_i, len(tuples))
            for i in range(1, top + 1):
                got = evaluate(pi, A.sorting_sentence(sym, positive, arity, i)).payload
                assert got == top_product_bruteforce(values, i) == oracles.top_product(values, i), (sym, positive, i)


def random_viterbi(rng, universe, vocab):
    tenths = [F(i, 10) for i in range(11)]
    keys = [(l.symbol, l.positive, l.args) for l in KInterpretation(VITERBI, universe, vocab).literals()]
    return KInterpretation(VITERBI, universe, vocab, {k: rng.choice(tenths) for k in keys})


@pytest.mark.criterion(14)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_c14_sorting_lemma_unary(n):
    rng = random.Random(n)
    universe = tuple("abc"[:n])
    for _ in range(40):
        lemma20_check(random_viterbi(rng, universe, PQ))


@pytest.mark.criterion(14)
@pytest.mark.parametrize("n", [1, 2])
def test_c14_sorting_lemma_binary(n):
    rng = random.Random(10 + n)
    universe = tuple("ab"[:n])
    for _ in range(20):
        lemma20_check(random_viterbi(rng, universe, {"R": 2}))


@pytest.mark.criterion(14)
def test_c14_sorting_lemma_binary_three_elements_partial():
    rng = random.Random(23)
    for _ in range(4):
        lemma20_check(random_viterbi(rng, ("a", "b", "c"), {"R": 2}), max_i=5)


@pytest.mark.slow
@pytest.mark.criterion(14)
def test_c14_sorting_lemma_binary_three_elements_full():
    # i runs to n^k = 9; one interpretation with ties among the values
    rng = random.Random(29)
    universe = ("a", "b", "c")
    keys = [("R", True, (x, y)) for x in universe for y in universe]
    pi = KInterpretation(VITERBI, universe, {"R": 2}, {k: F(rng.choice([1, 3, 3, 7, 9]), 10) for k in keys})
    values = [pi.lookup("R", True, k[2]) for k in keys]
    for i in range(1, 10):
        got = evaluate(pi, A.sorting_sentence("R", True, 2, i)).payload
        assert got == oracles.top_product(values, i) == top_product_bruteforce(values, i)


@pytest.mark.criterion(14)
def test_c14_universe_formula_across_tags():
    tags = [BOOL, NAT, VITERBI, minmax(3), boolpoly("x"), whypoly("x"), abspoly("x")]
    for tag in tags:
        for n in (1, 2, 3):
            universe = tuple("abc"[:n])
            pi = KInterpretation(tag, universe, {"P": 1})
            xs = [f"x{i}" for i in range(1, n + 1)]
            phi = A.universe_formula(n)
            for tup in itertools.product(universe, repeat=n):
                v = evaluate(pi, phi, dict(zip(xs, tup))).payload
                assert v == (tag.one if len(set(tup)) == n else tag.zero)
