"""Exception types raised across the package."""


class CimkitError(Exception):
    """Base class for all package-specific errors."""


class ParseError(CimkitError):
    """Malformed input file (bad row length, unparseable token)."""


class DataError(CimkitError):
    """Input values violate a data contract (non-finite, too short)."""


class BoundsError(CimkitError):
    """Window or index out of range."""


class DegenerateChannelError(CimkitError):
    """A channel has zero variance where nonzero variance is required."""


class ShapeError(CimkitError):
    """Array shapes or lengths are inconsistent."""


class InsufficientLengthError(CimkitError):
    """Series too short for the requested lags / embedding."""


class DegenerateCloudError(CimkitError):
    """Point cloud too small or collapsed for the requested estimate."""


class NoScalingRegionError(CimkitError):
    """No usable linear scaling region in a log-log curve."""


class NoValidLagError(CimkitError):
    """Every candidate lag failed to produce an estimate."""


class DivergenceError(CimkitError):
    """A generated trajectory left its admissible range."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SizeError(CimkitError):
    """A size limit or size relation was violated."""


class StratificationError(CimkitError):
    """Stratified folds cannot be built (class too small)."""


class SchemaError(CimkitError):
    """Feature schema mismatch between tables or models."""
