"""Exception hierarchy shared by every module."""


class BellkeyError(Exception):
    """Base class for domain errors; the CLI maps these to exit status 1."""

    @property
    def code(self) -> str:
        return type(self).__name__


class ShapeMismatch(BellkeyError):
    pass


class NegativeEntry(BellkeyError):
    pass


class BadNormalization(BellkeyError):
    pass


class OutOfRange(BellkeyError):
    pass


class OutOfDomain(BellkeyError):
    pass


class BadRange(BellkeyError):
    pass


class NotPsd(BellkeyError):
    pass


class NotNoSignaling(BellkeyError):
    pass


class TooLarge(BellkeyError):
    pass


class SolverFailure(BellkeyError):
    pass


class BadSelection(BellkeyError):
    pass


class AxisOverlap(BellkeyError):
    pass


class ConstraintViolation(BellkeyError):
    pass


class ModelMismatch(BellkeyError):
    pass
