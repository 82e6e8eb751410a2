class SymsumError(Exception):
    """Base class for every error raised by the symsum packages."""


class LatticeError(SymsumError):
    pass


class LatticeOverflowError(LatticeError):
    pass


class ModelError(SymsumError):
    pass


class SurfaceError(SymsumError):
    pass


class DescriptorError(SymsumError):
    """A manifold or sum descriptor could not be parsed or validated.

    Attributes:
        path (str): The descriptor file, when known.
        line (int): The 1-based line the problem was found on, when known.
    """

    def __init__(self, message, path=None, line=None):
        self.message = message
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location = f"{location}:{line}"
            location = f"{location}: "
        super().__init__(f"{location}{message}")


class SearchError(SymsumError):
    pass


class ExceptionalError(SymsumError):
    pass


class KnefError(SymsumError):
    pass


class InconsistencyError(SymsumError):
    """An internal consistency check failed; the result cannot be trusted and must not be reported."""


class PossquareViolation(KnefError, InconsistencyError):
    """Raised when a class passing the hypotheses of the positivity lemma has negative square."""


class SumError(SymsumError):
    pass


class ChainError(SumError):
    pass


class BlockError(SymsumError):
    pass


class ConfigError(SymsumError):
    pass
