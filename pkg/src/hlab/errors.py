"""Exception hierarchy shared by all hlab modules."""


class HlabError(Exception):
    """Base class for every error raised by hlab."""


class PoleError(HlabError, ArithmeticError):
    """A meromorphic function was evaluated at one of its poles."""


class PrecisionError(HlabError):
    """Requested continuation depth exceeds the declared derivative order."""


class DomainError(HlabError, ValueError):
    """Arguments fall outside the regime an operation supports."""


class ResolutionError(HlabError):
    """A finite-difference stencil left the model's working box."""


class TruncationError(HlabError):
    """A series tail could not be pushed below the requested bound."""


class IllConditionedError(HlabError):
    """A fit's amplification of data noise exceeds the allowed limit."""


class NoiseFloorError(HlabError):
    """Richardson extrapolation stopped contracting before reaching tolerance."""


class DegenerateNodesError(HlabError, ValueError):
    """Interpolation nodes coincide."""


class SymbolMismatchError(HlabError):
    """Symbolic Mellin factors failed to cancel in an exact product."""


class MellinZeroError(HlabError):
    """A Mellin value that has to be divided by is (numerically) zero."""


class CutoffZeroError(MellinZeroError):
    """The cutoff's Mellin/Gamma ratio vanishes at a required argument."""


class ConfigError(HlabError, ValueError):
    """Invalid run configuration."""
