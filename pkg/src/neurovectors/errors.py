"""Exception hierarchy.

Each class maps onto one CLI exit code family: data problems (3) and model
problems (4). Usage errors are left to argparse.
"""

from __future__ import annotations


class NeurovectorError(Exception):
    """Base class for every error raised by this package."""


class DataError(NeurovectorError):
    """Bad input data: missing file, ragged row, unparseable cell, and so on."""


class TokenError(DataError):
    """A feature name or value cannot be turned into a collision-free token."""


class MissingValueError(DataError):
    pass


class SplitError(DataError):
    pass


class ModelError(NeurovectorError):
    """Problems with a trained store or a model file."""


class StoreCorruptionError(ModelError):
    """The store was asked to do something that would break its invariants."""


class NoModelError(ModelError):
    """Prediction was requested but there is nothing to predict with."""


class NoMatchError(NoModelError):
    """No stored neurovector shares a token with the query and fallback is off."""


class TaskMismatchError(ModelError):
    pass


class ModelFormatError(ModelError):
    pass


class VersionMismatchError(ModelFormatError):
    pass


class ChecksumMismatchError(ModelFormatError):
    pass


class MalformedRecordError(ModelFormatError):
    pass
