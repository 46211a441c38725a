"""Exception types raised across the toolkit.

Every failure mode callers are expected to branch on gets its own class;
anything else propagates as the underlying OSError/ValueError.
"""


class EmberkitError(Exception):
    """Base class for all toolkit errors."""


# ---- radiometric codec ----

class NotAJpeg(EmberkitError):
    """Input bytes are not a JPEG container (bad magic)."""


class MissingRadiometricPayload(EmberkitError):
    """JPEG has no radiometric payload segment (plain RGB or non-radiometric thermal)."""


class CorruptPayload(EmberkitError):
    """Radiometric payload present but inconsistent (bad length, dims, or chunking)."""


class ValueOutOfEncodableRange(EmberkitError):
    """Raster temperature falls outside the u16-encodable range of the container."""


class IoFailure(EmberkitError):
    """File could not be read or written."""


class UnsupportedTiffLayout(EmberkitError):
    """TIFF is not a single-band 32-bit float raster."""


class NoMetadataInSource(EmberkitError):
    """Source JPEG carries no EXIF metadata block to copy."""


# ---- colormap ----

class DegenerateRange(EmberkitError):
    """Per-image normalization hit max == min.

    normalize() does not raise this; it returns all-zero indices with a
    warning flag instead. The class exists for callers that want to treat
    the flag as an error.
    """


# ---- alignment ----

class CropOutOfBounds(EmberkitError):
    """Crop rectangle extends beyond the source image."""


class InsufficientCorrespondences(EmberkitError):
    """Too few (or degenerate) point correspondences to estimate a transform."""


class EmptyInput(EmberkitError):
    """Operation requires a non-empty input list."""


class DimensionMismatch(EmberkitError):
    """Two rasters/images that must share dimensions do not."""


# ---- labeling ----

class DegenerateRaster(EmberkitError):
    """Raster is constant; no threshold separates it."""


class InvalidThresholdOrder(EmberkitError):
    """Hysteresis low threshold exceeds the high threshold."""


class UnlabeledPair(EmberkitError):
    """A pair reached sorting/export without a label."""


# ---- nadir stacks ----

class MixedDimensions(EmberkitError):
    """Stack frames do not all share the same raster dimensions."""


class EmptyStack(EmberkitError):
    """No frames available to build a stack from."""


class InsufficientGcps(EmberkitError):
    """Fewer than three ground control points supplied."""


class CollinearGcps(EmberkitError):
    """Ground control points are collinear; the affine fit is rank-deficient."""


# ---- review workspace/service ----

class WorkspaceNotFound(EmberkitError):
    """Workspace root or its pairs manifest is missing."""


class UnknownPair(EmberkitError):
    """pair_id not present in the workspace."""


class InvalidLabel(EmberkitError):
    """Label string is not one of the accepted values."""
