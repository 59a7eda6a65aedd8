"""Exception types shared across the package."""


class GlovespotError(Exception):
    """Base class for all errors raised by this package."""


class InvalidTopologyError(GlovespotError, ValueError):
    """Network layer layout is unusable (fewer than 3 layers, zero-width layer)."""


class DimensionError(GlovespotError, ValueError):
    """Vector/matrix sizes do not line up with the network or each other."""


class ModelFormatError(GlovespotError, ValueError):
    """A model document is malformed; the message names the offending field."""


class GenerationError(GlovespotError, ValueError):
    """Synthetic template or stream generation could not satisfy its constraints."""


class HarvestError(GlovespotError, ValueError):
    """A requested transition is absent from the stream being harvested."""


class MissingFrameError(GlovespotError, KeyError):
    """The requested frame index is not present in the history."""


class StreamOrderError(GlovespotError, ValueError):
    """Frame timestamps went backwards or repeated within one stream."""


class NoSavedPoseError(GlovespotError, RuntimeError):
    """Return-to-saved-pose was commanded before any pose was saved."""


class ExperimentError(GlovespotError, RuntimeError):
    """An experiment run failed (e.g. training diverged)."""
