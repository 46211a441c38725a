"""emberkit: paired RGB + radiometric thermal UAV fire imagery toolkit.

Decodes radiometric JPEG containers into temperature rasters, pairs RGB and
thermal captures by timestamp, regenerates palette-colored thermal JPEGs,
aligns RGB frames onto the thermal field of view, auto-labels imagery from
radiometric maxima, derives nadir-plot fire-progression products, and serves
a human review loop over HTTP.
"""

from .align import (
    AlignmentParams,
    CameraProfile,
    ErrorMap,
    Rect,
    alignment_error,
    apply_alignment,
    estimate_alignment,
    load_profiles,
    overlay,
)
from .colormap import (
    IndexRaster,
    NormalizationMode,
    Palette,
    inferno,
    normalize,
    render_thermal_jpeg,
)
from .exifio import copy_exif
from .labeling import (
    Label,
    LabelRecord,
    LabelSource,
    LabelStore,
    ThresholdConfig,
    auto_label,
    binary_mask,
    export_ml_dataset,
    hysteresis_mask,
    otsu_threshold,
    sort_pairs,
)
from .nadir import (
    ArrivalTimeMap,
    GroundControlPoint,
    NadirStack,
    arrival_time_map,
    assemble_stack,
    build_stack,
    energy_proxy,
    georeference,
    rate_of_spread,
)
from .pairing import MediaAsset, MediaKind, PairRecord, pair_assets, scan_directory
from .raster import CaptureMetadata, Modality, TemperatureRaster
from .rjpeg import (
    RadiometricDecoder,
    RadiometricPayload,
    decode_rjpeg,
    encode_reference_rjpeg,
    register_decoder,
)
from .tiffio import read_tiff, write_tiff
from .workspace import Workspace

__version__ = "0.1.0"

__all__ = [
    "AlignmentParams",
    "ArrivalTimeMap",
    "CameraProfile",
    "CaptureMetadata",
    "ErrorMap",
    "GroundControlPoint",
    "IndexRaster",
    "Label",
    "LabelRecord",
    "LabelSource",
    "LabelStore",
    "MediaAsset",
    "MediaKind",
    "Modality",
    "NadirStack",
    "NormalizationMode",
    "PairRecord",
    "Palette",
    "RadiometricDecoder",
    "RadiometricPayload",
    "Rect",
    "TemperatureRaster",
    "ThresholdConfig",
    "Workspace",
    "alignment_error",
    "apply_alignment",
    "arrival_time_map",
    "assemble_stack",
    "auto_label",
    "binary_mask",
    "build_stack",
    "copy_exif",
    "decode_rjpeg",
    "encode_reference_rjpeg",
    "energy_proxy",
    "estimate_alignment",
    "export_ml_dataset",
    "georeference",
    "hysteresis_mask",
    "inferno",
    "load_profiles",
    "normalize",
    "otsu_threshold",
    "overlay",
    "pair_assets",
    "rate_of_spread",
    "read_tiff",
    "register_decoder",
    "render_thermal_jpeg",
    "scan_directory",
    "sort_pairs",
    "write_tiff",
    "__version__",
]
