"""Exception hierarchy shared by all modules."""


class SemiringMTError(Exception):
    """Base class for every error raised by this package."""


class TagMismatch(SemiringMTError):
    pass


class VariantMismatch(SemiringMTError):
    pass


class ProfileViolation(SemiringMTError):
    def __init__(self, flag, counterexample):
        self.flag = flag
        self.counterexample = counterexample
        super().__init__(f"semiring violates '{flag}': counterexample {counterexample!r}")


class ClassViolation(SemiringMTError):
    """A homomorphism target lies outside the source's universality class."""


class CarrierError(SemiringMTError, ValueError):
    """A payload or value string does not denote an element of the carrier."""


class ParseError(SemiringMTError, ValueError):
    def __init__(self, position, expected, text=""):
        self.position = position
        self.expected = expected
        self.text = text
        super().__init__(f"syntax error at position {position}: expected {expected}")


class UnboundVariable(SemiringMTError):
    pass


class UnknownSymbol(SemiringMTError):
    pass


class NotSeparating(SemiringMTError):
    pass


class DegenerateValues(SemiringMTError):
    pass


class NotModelDefining(SemiringMTError):
    pass


class EpsilonTooLarge(SemiringMTError):
    pass


class ResourceLimit(SemiringMTError):
    """Base for errors caused by configured caps (CLI exit code 3)."""


class CapExceeded(ResourceLimit):
    def __init__(self, index, cap):
        self.index = index
        self.cap = cap
        super().__init__(f"exponent f({index}) exceeds the cap {cap}")


class SearchLimitExceeded(ResourceLimit):
    pass


class ValueOutOfRange(SemiringMTError):
    pass


class ConditionFailed(SemiringMTError):
    def __init__(self, condition, detail=""):
        self.condition = condition
        super().__init__(f"cancellation witness condition {condition} failed{': ' + detail if detail else ''}")


class TooManyAxioms(SemiringMTError):
    pass


class MinimumNotStrict(SemiringMTError):
    def __init__(self, polynomial, monomial, competitor):
        self.polynomial = polynomial
        self.monomial = monomial
        self.competitor = competitor
        super().__init__(
            f"dominant monomial of {polynomial} is not unique: {monomial} ties with {competitor}"
        )


class DegenerateKernel(SemiringMTError):
    pass


class ScenarioAssertionFailed(SemiringMTError):
    pass
