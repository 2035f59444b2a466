"""Exception hierarchy shared by all codec modules."""


class CodecError(ValueError):
    """Base class for every error raised by the codec."""


class BadMagic(CodecError):
    pass


class BadHeader(CodecError):
    pass


class Truncated(CodecError):
    pass


class OutOfRange(CodecError):
    pass


class IllegalDecisions(CodecError):
    """A decision set violates the legal per-pair state rule."""


class CorruptPayload(CodecError):
    """An entropy-coded payload (or the container holding it) is damaged.

    ``offset`` is the byte position in the container where the problem was
    detected, when known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class BadVersion(CodecError):
    pass


class IllegalDecisionBits(CodecError):
    pass


class DimensionMismatch(CodecError):
    pass


class UnsupportedMode(CodecError):
    pass


class FilterSetTooSmall(CodecError):
    pass


class TooLarge(CodecError):
    pass


class DynamicRangeError(RuntimeError):
    """Internal error: a transformed sample escaped the headroom bound."""
