"""Exception hierarchy shared by all prambig modules."""


class PrambigError(ValueError):
    """Base class for every error raised by this package."""


class InvalidFieldError(PrambigError):
    pass


class SpecMismatchError(PrambigError):
    pass


class OffGridError(PrambigError):
    pass


class NoRootsError(PrambigError):
    pass


class RootFindingError(PrambigError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class SelectionError(PrambigError):
    """A flip selection violates one or more admissibility clauses."""

    def __init__(self, violations, message=None):
        self.violations = list(violations)
        super().__init__(message or "inadmissible selection: " + "; ".join(self.violations))


class GenerationFailedError(PrambigError):
    pass


class PairSpecError(PrambigError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid pair spec: " + "; ".join(self.problems))


class BoxTooSmallError(PrambigError):
    pass


class SceneSpecError(PrambigError):
    pass


class UndefinedRatioError(PrambigError):
    pass
