"""Exception types shared across the toolkit.

Plain I/O failures reuse the builtins (FileNotFoundError, OSError); everything
that is a domain error gets a subclass of StereoBenchError so the CLI can map
it to exit code 1.
"""


class StereoBenchError(Exception):
    """Base class for all stereobench domain errors."""


# image decoding / dataset layout

class DecodeError(StereoBenchError):
    """File exists but its contents cannot be decoded."""


class UnsupportedFormat(StereoBenchError):
    """Decodable, but not an 8-bit RGB image (or not a PNG where one is required)."""


class MissingView(StereoBenchError):
    """A stereo scene lacks its left or right view."""


class MissingScene(StereoBenchError):
    """A submission lacks a scene present in the ground truth."""


class DimensionMismatch(StereoBenchError):
    """Two images that must share dimensions do not."""


class EmptyResult(StereoBenchError):
    """An operation would produce an image with zero pixels."""


# degradation

class InvalidKernelSize(StereoBenchError):
    """Blur kernel size must be an odd integer >= 3."""


class KernelTooLarge(StereoBenchError):
    """Blur kernel does not fit inside the image."""


class NotDivisible(StereoBenchError):
    """Image dimensions are not divisible by the downscaling factor."""


class EncodeError(StereoBenchError):
    """Image cannot be encoded (bad quality setting or malformed input)."""


# metrics

class TooSmall(StereoBenchError):
    """Image is smaller than the SSIM window."""


# budget graphs

class ParseError(StereoBenchError):
    """Graph description is not valid JSON or violates the schema."""


class ShapeError(StereoBenchError):
    """Layer input shape is inconsistent with the propagated tensor shape."""


# reference mechanisms

class ShapeMismatch(StereoBenchError):
    """Feature maps that must agree in shape do not."""


class ParamMismatch(StereoBenchError):
    """Parameter tensor has the wrong shape for the operation."""


class ChannelsNotDivisible(StereoBenchError):
    """Channel count is not divisible as required (e.g. by r^2 for pixel shuffle)."""


class SchemaMismatch(StereoBenchError):
    """Model parameter sets do not share entry names/lengths."""


class BadWeights(StereoBenchError):
    """Ensemble weight vector is malformed or does not sum to one."""


class ScaleMismatch(StereoBenchError):
    """HR/LR dimensions are inconsistent with the declared scale factor."""


class UnknownKind(StereoBenchError):
    """Requested an unknown loss combination."""


class UnsupportedOp(StereoBenchError):
    """Requested an augmentation op outside the supported set."""
