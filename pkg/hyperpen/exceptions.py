from typing import Any, Dict, List, Optional, Tuple


class HyperpenException(Exception):
    pass


class DomainError(HyperpenException):
    """Raised when an input lies outside the domain of an operation."""

    pass


class PreconditionError(HyperpenException):
    """Raised when a documented precondition on a parameter is violated."""

    def __init__(self, name: str, value: Any, *args):
        self.name = name
        self.value = value
        super(PreconditionError, self).__init__(*args)


class DegenerateGeodesicError(DomainError):
    """Raised when both endpoints of a geodesic coincide."""

    pass


class ProjectionUndefinedError(DomainError):
    """Raised when projecting an endpoint of a geodesic onto that geodesic."""

    pass


class UnsupportedError(HyperpenException):
    pass


class FixesInfinityError(DomainError):
    """Raised when a matrix with vanishing lower-left entry is used where c != 0 is required."""

    pass


class NotInUQError(DomainError):
    def __init__(self, residual: float, *args):
        self.residual = residual
        super(NotInUQError, self).__init__(*args)


class FiniteExpansionError(DomainError):
    """Raised when a continued fraction expansion terminates early."""

    def __init__(self, digits: List[int], *args):
        self.digits = digits
        super(FiniteExpansionError, self).__init__(*args)


class FamilyError(HyperpenException):
    """Raised when an obstacle family violates its disjointness hypothesis."""

    def __init__(self, pair: Tuple[int, int], gap: float, *args):
        self.pair = pair
        self.gap = gap
        super(FamilyError, self).__init__(*args)


class StepError(HyperpenException):
    """Raised when an iteration of a construction cannot be carried out."""

    def __init__(self, step: int, diagnostics: Optional[Dict[str, Any]] = None, *args):
        self.step = step
        self.diagnostics = diagnostics or {}
        super(StepError, self).__init__(*args)


class PrescriptionInfeasibleError(HyperpenException):
    """Raised when no sign change of the target residual is found on a level set."""

    def __init__(self, grid: List[Tuple[float, float]], *args):
        self.grid = grid
        super(PrescriptionInfeasibleError, self).__init__(*args)


class UnknownLemmaError(HyperpenException):
    def __init__(self, lemma_id: str, *args):
        self.lemma_id = lemma_id
        super(UnknownLemmaError, self).__init__(*args)


class SamplingError(HyperpenException):
    """Raised when rejection sampling exhausts its attempt budget."""

    def __init__(self, attempts: int, *args):
        self.attempts = attempts
        super(SamplingError, self).__init__(*args)
