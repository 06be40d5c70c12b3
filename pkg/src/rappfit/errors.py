"""Exception types raised by the fitting and signal pipelines."""


class RappfitError(Exception):
    """Base class for all toolkit errors."""


class InsufficientDataError(RappfitError, ValueError):
    """Too few samples for the requested fit."""


class DegenerateDataError(RappfitError, ValueError):
    """Samples carry no usable information (e.g. all inputs equal)."""


class DegenerateGridError(RappfitError, ValueError):
    """Operating points do not span enough distinct supply/frequency values."""


class RankDeficientError(RappfitError, ValueError):
    """Design matrix is numerically rank deficient after column scaling."""


class NonConvergenceError(RappfitError, RuntimeError):
    """Iterative solver hit its iteration limit before meeting tolerance."""


class EmptyFrameError(RappfitError, ValueError):
    """Operation requires a nonempty sample frame."""


class ZeroFrameError(RappfitError, ValueError):
    """Operation requires a frame with nonzero energy."""


class MissingRecordError(RappfitError, ValueError):
    """Campaign is missing a record for a grid operating point."""


class FormatError(RappfitError, ValueError):
    """On-disk file does not match a supported format or version."""


class FitStageError(RappfitError, RuntimeError):
    """A per-operating-point fit failed; message names the operating point."""
