"""Exception types raised across the package."""


class AbsaError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(AbsaError, ValueError):
    pass


class ContractError(AbsaError, ValueError):
    pass


class StateError(AbsaError, RuntimeError):
    pass


class FormatError(AbsaError, ValueError):
    """Malformed input file; ``lineno`` is 1-based when known."""

    def __init__(self, message, path=None, lineno=None):
        self.path = path
        self.lineno = lineno
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


class VocabularyLookupError(AbsaError, KeyError):
    pass


class ConfigurationError(AbsaError, ValueError):
    pass


class SpanError(AbsaError, ValueError):
    pass


class TaggingError(AbsaError, KeyError):
    pass


class EncodingError(AbsaError, ValueError):
    pass


class ValidityError(AbsaError, ValueError):
    def __init__(self, message, index):
        self.index = index
        super().__init__(message)


class AlignmentError(AbsaError, ValueError):
    pass


class EvaluationError(AbsaError, ValueError):
    pass


class NumericError(AbsaError, FloatingPointError):
    pass
