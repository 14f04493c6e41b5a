"""Exception hierarchy.

``MathPreconditionError`` subclasses map to CLI exit code 3 and
``InvariantBreach`` to exit code 4.
"""


class TorExtError(Exception):
    pass


class MathPreconditionError(TorExtError):
    """Input violates a mathematical hypothesis of the requested operation."""


class InvariantBreach(TorExtError):
    """An identity that must hold by theory failed: always a bug."""


class RingMismatch(MathPreconditionError):
    pass


class ShapeError(MathPreconditionError):
    pass


class HomogeneityError(MathPreconditionError):
    pass


class MinimalityError(MathPreconditionError):
    pass


class ChainMapError(MathPreconditionError):
    pass


class AnnihilationError(MathPreconditionError):
    pass


class NotHighSyzygy(MathPreconditionError):
    pass


class GenerationError(MathPreconditionError):
    pass


class RegularityHypothesisFailed(MathPreconditionError):
    pass


class NotRegularSequence(MathPreconditionError):
    pass


class InconsistentSystem(MathPreconditionError):
    """A linear system A X = B has no solution."""


class LiftError(InvariantBreach):
    pass


class ParseError(TorExtError):
    def __init__(self, msg: str, pos: int | None = None):
        super().__init__(msg if pos is None else f"{msg} (at position {pos})")
        self.pos = pos
