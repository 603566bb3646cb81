"""attrflower: inspect multi-attribute image classifiers.

Embeds ground-truth label vectors (ACT), prediction vectors (PRD) and deep
feature vectors (FEA) into coordinated 2-D views with a deterministic t-SNE,
computes per-attribute and per-selection confusion metrics, and renders
attribute-flower glyphs that make TP/TN/FP/FN outcomes visually discernible.
"""

from .dataset import (
    AttributeSchema,
    Dataset,
    ImageRecord,
    generate_synthetic,
    load_manifest,
    parse_manifest,
    save_manifest,
)
from .errors import (
    ArgumentError,
    AttrFlowerError,
    DegenerateInput,
    IoError,
    ParseError,
    SchemaError,
)
from .glyph import (
    CenterDot,
    FlowerGlyphSpec,
    FlowerMode,
    PetalSpec,
    layout_flower,
    render_svg,
)
from .metrics import (
    ConfusionSummary,
    DistanceKind,
    MetricsReport,
    Outcome,
    average_precision,
    classify_outcome,
    confusion,
    error_distance,
    mean_average_precision,
    report,
)
from .tsne import (
    EmbeddingResult,
    Space,
    TsneConfig,
    barnes_hut_gradient,
    conditional_affinities,
    default_config,
    embed_all_spaces,
    embed_dataset_space,
    kl_divergence,
    pairwise_affinities,
    pca_reduce,
    tsne_embed,
    tsne_gradient,
)

__version__ = "0.1.0"

__all__ = [
    "AttributeSchema", "Dataset", "ImageRecord", "generate_synthetic",
    "load_manifest", "parse_manifest", "save_manifest",
    "ArgumentError", "AttrFlowerError", "DegenerateInput", "IoError",
    "ParseError", "SchemaError",
    "CenterDot", "FlowerGlyphSpec", "FlowerMode", "PetalSpec",
    "layout_flower", "render_svg",
    "ConfusionSummary", "DistanceKind", "MetricsReport", "Outcome",
    "average_precision", "classify_outcome", "confusion", "error_distance",
    "mean_average_precision", "report",
    "EmbeddingResult", "Space", "TsneConfig", "barnes_hut_gradient",
    "conditional_affinities", "default_config", "embed_all_spaces",
    "embed_dataset_space", "kl_divergence", "pairwise_affinities",
    "pca_reduce", "tsne_embed", "tsne_gradient",
    "__version__",
]
