"""Exception hierarchy. Mathematical check *failures* are reported, not
raised; these exceptions signal bad input or unmet preconditions."""


class ShiftsymError(Exception):
    pass


class DimensionMismatch(ShiftsymError, ValueError):
    pass


class InvalidComplex(ShiftsymError, ValueError):
    pass


class InvalidModel(ShiftsymError, ValueError):
    """A simplicial identity, groupoid axiom or map compatibility fails."""


class InsufficientLevels(ShiftsymError, ValueError):
    pass


class PreconditionError(ShiftsymError, ValueError):
    pass


class Infeasible(ShiftsymError):
    """A linear system has no solution; ``certificate`` is a row vector
    ``y`` with ``y A = 0`` and ``y b != 0``."""

    def __init__(self, message: str, certificate=None, **info):
        super().__init__(message)
        self.certificate = certificate
        self.info = info
