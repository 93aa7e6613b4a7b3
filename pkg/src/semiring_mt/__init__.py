"""Semiring semantics for first-order logic.

Evaluation of formulas in negation normal form over commutative semirings,
polynomial provenance semirings, homomorphism-based equivalence proofs,
characteristic sentences and the constructions that separate elementary
equivalence from isomorphism.
"""

from .errors import *  # noqa: F401,F403
from .semirings import (
    BOOL,
    INF,
    NAT,
    TROPICAL,
    VITERBI,
    Semiring,
    SemiringProfile,
    Value,
    abspoly,
    boolpoly,
    minmax,
    natpoly,
    parse_semiring,
    posbool,
    sr_add,
    sr_classify,
    sr_mul,
    whypoly,
)
from .polynomials import Monomial, Polynomial, parse_polynomial, poly_add, poly_mul, poly_normalize
from .homomorphisms import apply_hom, checked_map_hom, endomorphism, identity_hom, universal_hom
from .syntax import Formula, canonicalize, enumerate_sentences, lit_enum, parse_formula, print_formula
from .interpretation import (
    KInterpretation,
    compose_hom,
    evaluate,
    find_isomorphism,
    is_model_defining,
    load_interpretation,
    make_interpretation,
)
from .equivalence import (
    certify_equivalence,
    check_separating,
    distinguisher_search,
    lattice_counterexample,
    minmax_threshold_family,
    posbool_family,
    why_family,
)

__version__ = "0.1.0"
