"""Exception types raised across the toolkit."""


class SynchrocalError(Exception):
    """Base class for all toolkit errors."""


# -- signal generation ------------------------------------------------------

class InvalidSpec(SynchrocalError):
    """A test-signal specification violates one of its invariants."""


class IndexOutOfRange(SynchrocalError):
    """Report index outside the signal duration."""


# -- estimation / noise injection -------------------------------------------

class WindowSizeMismatch(SynchrocalError):
    """Window segment length does not match the profile's window size."""


class RateMismatch(SynchrocalError):
    """Sample rates or report rates of the inputs are inconsistent."""


class InvalidModel(SynchrocalError):
    """A noise model violates one of its invariants."""


# -- metrics -----------------------------------------------------------------

class TimestampMismatch(SynchrocalError):
    """Paired phasor series do not share report indices."""


class ZeroTruth(SynchrocalError):
    """True magnitude too small to form a relative error."""


# -- statistics --------------------------------------------------------------

class TooFewSamples(SynchrocalError):
    """Not enough samples for the requested statistic."""


class DegenerateSeries(SynchrocalError):
    """Series has zero variance where variation is required."""


class EmptySeries(SynchrocalError):
    """Series contains no samples."""


class ConstantInput(SynchrocalError):
    """All input values identical; test statistic undefined."""


# -- ingestion ---------------------------------------------------------------

class MissingColumn(SynchrocalError):
    """Required CSV column absent."""


class MalformedRow(SynchrocalError):
    def __init__(self, line_number: int, message: str = ""):
        self.line_number = line_number
        super().__init__(f"malformed row at line {line_number}" + (f": {message}" if message else ""))


class InconsistentErrorColumns(SynchrocalError):
    def __init__(self, line_number: int, message: str = ""):
        self.line_number = line_number
        super().__init__(
            f"precomputed error columns disagree with raw columns at line {line_number}"
            + (f": {message}" if message else "")
        )


class BadSync(SynchrocalError):
    """Frame does not start with a valid sync word."""


class BadLength(SynchrocalError):
    """Frame length field disagrees with the byte count, or frame truncated."""


class BadCrc(SynchrocalError):
    """Frame checksum verification failed."""


class IdCodeMismatch(SynchrocalError):
    """Frame ID code does not match the configured stream."""


class ValueOutOfRange(SynchrocalError):
    """Value not representable in the chosen wire format."""


# -- campaign ----------------------------------------------------------------

class TooFewRuns(SynchrocalError):
    """Consistency check needs at least two runs."""


class ConsistencyFailure(SynchrocalError):
    """Repeat runs are statistically inconsistent."""


class IoFailure(SynchrocalError):
    """Report artifacts could not be written."""
