"""Exception hierarchy shared by every module of the package."""


class TunstallError(Exception):
    """Base class for all errors raised by this package."""


class ModelError(TunstallError, ValueError):
    pass


class ProbabilitySumError(ModelError):
    pass


class NonPositiveProbability(ModelError):
    pass


class BadStateIndex(ModelError):
    pass


class AlphabetTooSmall(ModelError):
    pass


class ModelFormatError(ModelError):
    """Malformed model file text."""


class SchemeError(TunstallError, ValueError):
    """Offset matrix has the wrong shape or non-finite entries."""


class BadLeafTarget(TunstallError, ValueError):
    pass


class FormatError(TunstallError):
    """Base for binary container/codebook decoding failures."""


class BadMagic(FormatError):
    pass


class VersionMismatch(FormatError):
    pass


class TruncatedInput(FormatError):
    pass


class ChecksumMismatch(FormatError):
    pass


class CorruptCodebook(FormatError):
    """Structurally inconsistent node records."""


class CodecError(TunstallError):
    pass


class SymbolOutOfRange(CodecError, ValueError):
    pass


class IndexOutOfRange(CodecError):
    """A block value addresses no leaf: the stream is corrupt."""


class TruncatedPayload(CodecError):
    pass
