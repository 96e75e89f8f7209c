"""Exception hierarchy shared by every module."""


class SinirError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(SinirError, ValueError):
    """A spatial or channel dimension is zero, negative or too small."""


class ShapeError(SinirError, ValueError):
    """Two arrays that must agree in shape do not."""


class ParameterError(SinirError, ValueError):
    """A configuration or call parameter is out of its valid range."""


class StateError(SinirError, RuntimeError):
    """An operation was called before its prerequisite state existed."""


class FormatError(SinirError, IOError):
    """A checkpoint or image file is malformed or unsupported."""
