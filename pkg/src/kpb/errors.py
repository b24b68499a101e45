"""Exception hierarchy shared by all kpb modules."""


class KPBError(Exception):
    """Base class for kpb errors."""


class ComputationError(KPBError):
    """A numerical procedure failed (CLI exit code 1)."""


class NonConvergence(ComputationError):
    """Newton iteration for the wave profile did not converge."""


class NoConvergence(ComputationError):
    """Dense eigensolver failed or violated its residual contract."""


class InvalidAmplitude(KPBError, ValueError):
    pass


class SingularSymbol(KPBError, ZeroDivisionError):
    """A retained Fourier mode has n + gamma == 0."""


class NotHermitian(KPBError, ValueError):
    pass


class ParamMismatch(KPBError, ValueError):
    pass


class OutOfRange(KPBError, ValueError):
    pass


class NoSignChange(ComputationError):
    """Bracket does not straddle a change of the stability indicator."""


class BubbleNotFound(ComputationError):
    pass


class ConfigError(KPBError):
    """Invalid CLI configuration (CLI exit code 2)."""

    def __init__(self, key, reason):
        self.key = key
        self.reason = reason
        super().__init__(f"{key}: {reason}")
