"""Exception types raised across the package."""


class OpFreeError(Exception):
    """Base class for errors raised by opfree."""


class SizeLimitError(OpFreeError, ValueError):
    """A combinatorial size guard was exceeded."""


class DimensionError(OpFreeError, ValueError):
    """Matrix or basis dimensions are incompatible."""


class CrossingPartitionError(OpFreeError, ValueError):
    """A crossing partition was passed where a non-crossing one is required."""


class TruncationError(OpFreeError, ValueError):
    """A product is too long for the Fock truncation to be exact."""


class ScenarioError(OpFreeError, ValueError):
    """A scenario file failed validation."""
