"""Exception hierarchy for collcoh."""


class CollcohError(Exception):
    """Base class for all library errors."""


class StiffnessFailure(CollcohError):
    """Adaptive step size underflowed; use steady_state for this rate scale."""


class SingularSystem(CollcohError):
    """Trace-constrained steady-state system is rank deficient."""


class NonRealCoherence(CollcohError, ValueError):
    pass


class NegativeWeight(CollcohError, ValueError):
    pass


class TruncationError(CollcohError, ValueError):
    """Frequency grid too narrow to integrate a Lorentzian line."""


class UnknownChannel(CollcohError, KeyError):
    pass


class DivisionByZero(CollcohError, ZeroDivisionError):
    pass


class ConfigError(CollcohError, ValueError):
    pass
