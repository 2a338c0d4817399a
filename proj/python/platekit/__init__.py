"""Python interface to the platekit microscopy pipeline.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its public names. Images are exchanged as numpy arrays: 16-bit
grayscale planes as ``uint16 (H, W)``, composites as ``uint8 (H, W, 3)``,
instance masks as ``uint32 (H, W)``.
"""

from platekit._core import (
    Annotation,
    BBoxPx,
    CellBox,
    ClassSet,
    ConfigError,
    DataError,
    Detection,
    EllipseCell,
    FoldAssignment,
    GfpPattern,
    ImageMeta,
    MatchPair,
    MatchResult,
    NoiseConfig,
    NormBBox,
    PlateRecord,
    Quadrant,
    SynthConfig,
    SynthPlate,
    TileSpec,
    ValidationError,
    VoteOutcome,
    __version__,
    average_precision,
    boxes_to_annotations,
    derive_seed,
    expand_box,
    gen_plate,
    instances_to_boxes,
    iou,
    iou_norm,
    majority_vote,
    make_folds,
    match,
    merge_channels,
    mock_detect,
    pattern_for_class,
    percentile_stretch,
    plate_vote_from_tiles,
    quadrants,
    quantize_confidence,
    read_label_file,
    remap_annotations,
    split_train_valid,
    straddles_cut,
    to_norm,
    to_px,
    write_label_file,
)

__all__ = [
    "Annotation",
    "BBoxPx",
    "CellBox",
    "ClassSet",
    "ConfigError",
    "DataError",
    "Detection",
    "EllipseCell",
    "FoldAssignment",
    "GfpPattern",
    "ImageMeta",
    "MatchPair",
    "MatchResult",
    "NoiseConfig",
    "NormBBox",
    "PlateRecord",
    "Quadrant",
    "SynthConfig",
    "SynthPlate",
    "TileSpec",
    "ValidationError",
    "VoteOutcome",
    "__version__",
    "average_precision",
    "boxes_to_annotations",
    "derive_seed",
    "expand_box",
    "gen_plate",
    "instances_to_boxes",
    "iou",
    "iou_norm",
    "majority_vote",
    "make_folds",
    "match",
    "merge_channels",
    "mock_detect",
    "pattern_for_class",
    "percentile_stretch",
    "plate_vote_from_tiles",
    "quadrants",
    "quantize_confidence",
    "read_label_file",
    "remap_annotations",
    "split_train_valid",
    "straddles_cut",
    "to_norm",
    "to_px",
    "write_label_file",
]
