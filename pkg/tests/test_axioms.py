import decimal
import itertools
from fractions import Fraction

import pytest

import oracles
from semiring_mt import BOOL, NAT, TROPICAL, VITERBI, evaluate, find_isomorphism, make_interpretation, print_formula
from semiring_mt import axioms as A
from semiring_mt import syntax as S
from semiring_mt.errors import (
    CapExceeded,
    ClassViolation,
    EpsilonTooLarge,
    NotModelDefining,
    TagMismatch,
    ValueOutOfRange,
)
from semiring_mt.interpretation import KInterpretation
from semiring_mt.semirings import natpoly

F = Fraction
PQ = {"P": 1, "Q": 1}


def bool_models(n):
    """All classical models on {P, Q} with n elements, as model-defining B-interpretations."""
    universe = tuple("abc"[:n])
    atoms = [(s, (a,)) for s in ("P", "Q") for a in universe]
    for bits in itertools.product((True, False), repeat=len(atoms)):
        table = {(s, b, args): True for (s, args), b in zip(atoms, bits)}
        yield KInterpretation(BOOL, universe, PQ, table)


def test_classical_characteristic_example():
    pi = make_interpretation(BOOL, ["a"], PQ, {"P(a)": True, "!Q(a)": True})
    assert print_formula(A.classical_characteristic(pi)) == "E x1. ((A y. y = x1) & P(x1) & !Q(x1))"


@pytest.mark.parametrize("n", [1, 2])
def test_classical_characteristic_exhaustive(n):
    models = list(bool_models(n))
    for a in models:
        chi = A.classical_characteristic(a)
        assert evaluate(a, chi).payload is True
        for b in models:
            assert evaluate(b, chi).payload is (find_isomorphism(a, b) is not None)


def test_classical_characteristic_errors(interp):
    with pytest.raises(TagMismatch):
        A.classical_characteristic(interp("pi_v.json"))
    with pytest.raises(NotModelDefining):
        A.classical_characteristic(KInterpretation(BOOL, ("a",), {"P": 1}))


def test_universe_formula_needs_elements():
    with pytest.raises(ValueError):
        A.universe_formula(0)


# ---------------------------------------------------------------------------
# schedules


@pytest.mark.parametrize(
    "eps,k,expected",
    [(F(1, 2), 4, (1, 2, 4, 8)), (F(1, 10), 2, (1, 22)), (F(1), 5, (1, 1, 1, 1, 1)), (F(1, 10), 4, (1, 22, 503, 11496))],
)
def test_schedule_examples(eps, k, expected):
    assert A.exponent_schedule(eps, k).f == expected


@pytest.mark.parametrize("eps", [F(1, 2), F(1, 3), F(2, 3), F(1, 4), F(3, 4), F(1, 5), F(1, 10), F(7, 10)])
def test_schedule_matches_linear_oracle(eps):
    f = A.exponent_schedule(eps, 3).f
    assert f == oracles.schedule_oracle(eps, 3)
    for i in range(1, len(f)):
        prefix = sum(f[:i])
        assert A.schedule_condition(eps, prefix, f[i])
        assert f[i] == 1 or not A.schedule_condition(eps, prefix, f[i] - 1)


def test_schedule_errors():
    with pytest.raises(ValueError):
        A.exponent_schedule(F(0), 2)
    with pytest.raises(ValueError):
        A.exponent_schedule(F(3, 2), 2)
    with pytest.raises(ValueError):
        A.exponent_schedule(F(1, 2), 0)
    with pytest.raises(CapExceeded) as info:
        A.exponent_schedule(F(1, 10), 4, cap=1000)
    assert info.value.index == 4 and info.value.cap == 1000


def test_min_gap():
    assert A.min_gap([F(0), F(1, 10), F(9, 10)]) == F(1, 10)
    assert A.min_gap([F(0), F(1)]) == 1
    assert A.min_gap([F(1, 3)]) == 1


def test_viterbi_characteristic(interp):
    p19, p91 = interp("pi_19.json"), interp("pi_91.json")
    chi = A.viterbi_characteristic(p19, F(1, 10))
    assert print_formula(chi) == "E x1. ((A y. y = x1) & P(x1) & Q(x1)^22)"
    own = evaluate(p19, chi).payload
    assert own > 0
    assert own == F(1, 10) * F(9, 10) ** 22
    assert evaluate(p91, chi).payload != own
    assert oracles.naive_eval_interp(p19, chi) == own


def test_viterbi_characteristic_errors(interp):
    p19 = interp("pi_19.json")
    with pytest.raises(EpsilonTooLarge):
        A.viterbi_characteristic(p19, F(1, 2))
    with pytest.raises(TagMismatch):
        A.viterbi_characteristic(interp("pi_pq.json"))
    with pytest.raises(NotModelDefining):
        A.viterbi_characteristic(KInterpretation(VITERBI, ("a",), {"P": 1}))
    with pytest.raises(CapExceeded):
        A.viterbi_characteristic(p19, F(1, 10), cap=10)


def test_sorting_axioms_counts():
    ax = A.sorting_axioms({"P": 1}, 2)
    assert len(ax) == 4
    assert [print_formula(s) for s in ax][:2] == ["E x1. P(x1)", "E x1. E x2. (x1 != x2 & P(x1) & P(x2))"]
    assert len(A.sorting_axioms({"R": 2}, 2)) == 2 * 4
    with pytest.raises(ClassViolation):
        A.sorting_axioms({"P": 1}, 2, NAT)
    with pytest.raises(ValueError):
        A.sorting_axioms({"P": 1}, 0)


def test_viterbi_axiomatisation_shape(interp):
    ax = A.viterbi_axiomatisation(interp("pi_19.json"))
    assert len(ax) == 5
    doc = ax.to_json()
    assert doc["metadata"] == {"kind": "viterbi-finite", "epsilon": "1/10", "exponents": [1, 22], "n": 1}


# ---------------------------------------------------------------------------
# natural numbers


@pytest.mark.parametrize("c,k,expected", [(2, 3, 2), (10, 2, 7), (5, 1, 1), (2, 1, 1)])
def test_nat_exponent_examples(c, k, expected):
    assert A.nat_exponent(c, k) == expected
    assert oracles.nat_exponent_oracle(c, k) == expected


def test_nat_exponent_matches_oracle():
    for c in range(2, 30):
        for k in range(1, 30):
            assert A.nat_exponent(c, k) == oracles.nat_exponent_oracle(c, k), (c, k)
    for c, k in [(81, 2), (81, 6), (256, 24), (729, 120)]:
        assert A.nat_exponent(c, k) == oracles.nat_exponent_oracle(c, k)


def test_nat_exponent_large_modulus_exact():
    # estimate-then-refine path of the implementation
    for c, k in [(5000, 2), (4099, 3)]:
        e = A.nat_exponent(c, k)
        assert e == oracles.nat_exponent_oracle(c, k)


def test_nat_exponent_huge_modulus_asymptotic():
    # -1/ln(1 - 1/c) = c - 1/2 - 1/(12c) - ..., so e = floor(ln k * (c - 1/2)) + 1
    c, k = 2**200, 24
    with decimal.localcontext() as ctx:
        ctx.prec = 150
        x = decimal.Decimal(k).ln() * (decimal.Decimal(c) - decimal.Decimal(1) / 2)
    assert A.nat_exponent(c, k) == int(x) + 1
    with pytest.raises(ValueError):
        A.nat_exponent(1, 3)


def test_nat_characteristic_shape():
    pi = make_interpretation(NAT, ["a"], PQ, {"P(a)": 2})
    assert A.radix_parameters(pi, 3) == {"q": 3, "k_lit": 4, "k_sum": 1, "c": 81, "e": 1}
    chi = A.nat_characteristic(pi, 3)
    assert print_formula(chi) == "E x1. ((A y. y = x1) & (P(x1) | 3 * !P(x1) | 9 * Q(x1) | 27 * !Q(x1)))"
    assert evaluate(pi, chi).payload == 2


def test_nat_characteristic_two_elements():
    universe = ["a", "b"]
    pi = make_interpretation(NAT, universe, {"P": 1}, {"P(a)": 1, "!P(b)": 2})
    params = A.radix_parameters(pi, 3)
    assert params["k_sum"] == 2 and params["c"] == 81 and params["e"] == A.nat_exponent(81, 2)
    chi = A.nat_characteristic(pi, 3)
    swapped = make_interpretation(NAT, universe, {"P": 1}, {"P(b)": 1, "!P(a)": 2})
    other = make_interpretation(NAT, universe, {"P": 1}, {"P(a)": 2, "!P(b)": 1})
    assert evaluate(swapped, chi) == evaluate(pi, chi)
    assert evaluate(other, chi) != evaluate(pi, chi)


def test_nat_characteristic_errors(interp):
    with pytest.raises(ValueOutOfRange):
        A.nat_characteristic(make_interpretation(NAT, ["a"], PQ, {"P(a)": 3}), 3)
    with pytest.raises(TagMismatch):
        A.nat_characteristic(interp("pi_19.json"), 3)


def test_natx_embedding_values():
    h = A.natx_embedding(2, 2, 2)
    assert h(h.source.parse_value("1 + x1*x2")) == 9
    h0 = A.natx_embedding(2, 2, 0)
    assert h0(h0.source.parse_value("5")) == 5
    with pytest.raises(ValueError):
        A.natx_embedding(1, 2, 2)


def test_natx_bounds(interp):
    K = natpoly("x")
    pi2 = make_interpretation(K, ["a"], {"P": 1}, {"P(a)": "1 + x"})
    A.natx_characteristic(pi2, 2, 2)
    with pytest.raises(ValueOutOfRange):
        A.natx_characteristic(make_interpretation(K, ["a"], {"P": 1}, {"P(a)": "x^2"}), 2, 2)
    A.natx_characteristic(make_interpretation(K, ["a"], {"P": 1}, {"P(a)": "x^2"}), 2, 3)
    with pytest.raises(ValueOutOfRange):
        A.natx_characteristic(make_interpretation(K, ["a"], {"P": 1}, {"P(a)": "x^3"}), 2, 3)
    with pytest.raises(ValueOutOfRange):
        A.natx_characteristic(make_interpretation(K, ["a"], {"P": 1}, {"P(a)": "2*x"}), 2, 2)
    with pytest.raises(TagMismatch):
        A.natx_characteristic(interp("pi_19.json"), 2, 2)
    assert A.natx_modulus(pi2, 2, 2) == 4
    twin = interp("pi_v_natx.json")
    assert A.natx_modulus(twin, 2, 2) == 65536
    A.natx_characteristic(twin, 2, 2)
    assert A.in_bounded_set(twin.semiring.parse_value("x + w"), 2, 2)
    assert not A.in_bounded_set(twin.semiring.parse_value("x^2"), 2, 2)
    assert len(A.bounded_polynomials(2, 2, 1)) == 4


def test_tropical_is_not_viterbi(interp):
    with pytest.raises(TagMismatch):
        A.viterbi_characteristic(KInterpretation(TROPICAL, ("a",), {"P": 1}, {("P", True, ("a",)): F(1)}))
