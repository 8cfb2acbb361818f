"""Exception hierarchy shared by every module."""


class FerrandError(Exception):
    """Base class for all library errors."""


class MixedContext(FerrandError):
    """Operands live over different fields or variable lists."""


class BoundExceeded(FerrandError):
    """A configured degree or search bound was hit before a verdict was reached.

    This is never a negative answer: the question is undecided within the bound.
    """

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class Cancelled(FerrandError):
    """A cooperative cancellation token was set during a long search."""


class ParseError(FerrandError):
    """Malformed polynomial or script text."""

    def __init__(self, message, line=1, column=1, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        detail = f"{message} at {line}:{column}"
        if self.expected:
            detail += " (expected " + ", ".join(self.expected) + ")"
        super().__init__(detail)


class UndeclaredName(ParseError):
    pass


class RelationViolated(FerrandError):
    """A source relation does not map to zero under a proposed homomorphism."""

    def __init__(self, relation, remainder):
        super().__init__(f"relation {relation} maps to nonzero {remainder}")
        self.relation = relation
        self.remainder = remainder


class NotSurjective(FerrandError):
    """A target generator has no preimage (decided: the Groebner computation finished)."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NotIsomorphism(FerrandError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NoPresentation(FerrandError):
    """An object only exists intrinsically and no finite presentation is available."""


class NotZeroDimensional(FerrandError):
    pass


class FactorizationIncomplete(FerrandError):
    """An irreducible factor of degree > 1 appeared; points were emitted with residue degrees."""

    def __init__(self, message, points=None):
        super().__init__(message)
        self.points = points


class NotClosedEmbedding(FerrandError):
    pass


class NotContinuous(FerrandError):
    pass


class NameClash(FerrandError):
    pass


class NotAValuation(FerrandError):
    pass


class NotConstantRank(FerrandError):
    def __init__(self, message, ideal=None):
        super().__init__(message)
        self.ideal = ideal


class CocycleError(FerrandError):
    def __init__(self, i, j, k, witness):
        super().__init__(f"cocycle condition fails on charts ({i}, {j}, {k}): {witness}")
        self.charts = (i, j, k)
        self.witness = witness


class NotEtale(FerrandError):
    """f' is not invertible in a proposed standard étale algebra."""
