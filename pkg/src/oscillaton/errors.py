"""Exception types raised by the library.

Every domain error derives from :class:`OscillatonError` so the CLI can map
them to exit code 1 without catching programming errors.
"""


class OscillatonError(ValueError):
    """Base class for domain errors."""


class TruncationError(OscillatonError):
    pass


class MixingAngleError(OscillatonError):
    pass


class DimensionMismatch(OscillatonError):
    pass


class ThresholdError(OscillatonError):
    pass


class FitError(OscillatonError):
    pass


class ParameterError(OscillatonError):
    pass


class TraceParseError(OscillatonError):
    def __init__(self, line: int, detail: str):
        self.line = line
        self.detail = detail
        super().__init__(f"trace parse error at line {line}: {detail}")
