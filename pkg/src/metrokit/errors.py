"""Exception hierarchy shared by all metrokit modules."""


class MetrokitError(Exception):
    """Base class for every error raised by metrokit."""


class SizeTooSmall(MetrokitError, ValueError):
    pass


class OddSizeNonLocal(MetrokitError, ValueError):
    pass


class NonHermitianInput(MetrokitError, ValueError):
    pass


class InhomogeneousGap(MetrokitError, ValueError):
    pass


class AsymmetricSpectrum(MetrokitError, ValueError):
    pass


class ConditionViolation(MetrokitError, ValueError):
    pass


class NegativePartialSum(MetrokitError, ValueError):
    pass


class MixedStructureConstants(MetrokitError, ValueError):
    pass


class Su2ViolationDetected(MetrokitError, ArithmeticError):
    pass


class AnnihilatedState(MetrokitError, ArithmeticError):
    pass


class AnnihilatedAtStart(AnnihilatedState):
    pass


class UnknownBasis(MetrokitError, ValueError):
    pass


class DimensionMismatch(MetrokitError, ValueError):
    pass


class KOutOfRange(MetrokitError, ValueError):
    pass


class SizeTooLargeForExplicitKraus(MetrokitError, ValueError):
    pass


class IncompleteKrausSet(MetrokitError, ValueError):
    pass


class MixedInput(MetrokitError, ValueError):
    pass


class NonHermitianDerivative(MetrokitError, ValueError):
    pass


class NonCommutingNoise(MetrokitError, ValueError):
    pass


class UnsupportedRemixGenerator(MetrokitError, ValueError):
    pass


class InvalidQ(MetrokitError, ValueError):
    pass


class NonPositiveTime(MetrokitError, ValueError):
    pass


class FlatObjective(MetrokitError, ArithmeticError):
    pass


class CaseUnknown(MetrokitError, KeyError):
    pass
