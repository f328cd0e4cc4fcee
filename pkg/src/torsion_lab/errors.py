"""Exception types raised by torsion_lab."""


class TorsionLabError(Exception):
    """Base class for all library errors."""


class DegenerateMetric(TorsionLabError):
    pass


class NonFinite(TorsionLabError):
    pass


class NotSelfAdjoint(TorsionLabError):
    pass


class SingularP(TorsionLabError):
    """A structure operator that must be inverted is singular at the point."""


class KernelSplitUnavailable(TorsionLabError):
    pass


class NotAlmostHermitian(TorsionLabError):
    pass


class InvalidLambda(TorsionLabError):
    pass


class StructureMismatch(TorsionLabError):
    pass


class ReebNotParallel(TorsionLabError):
    pass


class MissingInput(TorsionLabError):
    pass


class HypothesisNotMet(TorsionLabError):
    pass


class PreconditionNotMet(TorsionLabError):
    pass


class UnknownManifold(TorsionLabError):
    pass


class InvalidParams(TorsionLabError):
    pass


class SamplingExhausted(TorsionLabError):
    pass
