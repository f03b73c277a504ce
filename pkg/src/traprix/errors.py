"""Exception types raised across the package."""


class TraprixError(Exception):
    """Base class for every error raised by traprix."""


class XRangeViolation(TraprixError):
    """A point was tested against a segment outside the segment's x-range."""


class DegenerateSegment(TraprixError, ValueError):
    """Zero-length or vertical segment."""


class DegenerateBox(TraprixError, ValueError):
    pass


class OutOfBox(TraprixError):
    pass


class IntersectsExisting(TraprixError):
    """The new segment crosses, overlaps or touches the interior of an inserted one."""

    def __init__(self, segment, other=None):
        self.segment = segment
        self.other = other
        msg = f"{segment} intersects existing segment"
        if other is not None:
            msg += f" {other}"
        super().__init__(msg)


class DuplicateSegment(TraprixError):
    pass


class ValidationFailed(TraprixError):
    def __init__(self, message, pair=None):
        self.pair = pair
        super().__init__(message)


class RebuildLimitExceeded(TraprixError):
    pass


class CycleDetected(TraprixError):
    pass


class UnknownCurve(TraprixError, KeyError):
    pass


class GenerationStalled(TraprixError):
    pass


class ParseError(TraprixError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
