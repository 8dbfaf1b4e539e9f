from ._gputrace import (
    __version__,
    burstiness,
    classify_ml,
    compress_hostlist,
    detect_events,
    expand_hostlist,
    generate_synth,
    spatial_imbalance,
    spearman,
    temporal_imbalance,
)

__all__ = [
    "__version__",
    "burstiness",
    "classify_ml",
    "compress_hostlist",
    "detect_events",
    "expand_hostlist",
    "generate_synth",
    "spatial_imbalance",
    "spearman",
    "temporal_imbalance",
]
