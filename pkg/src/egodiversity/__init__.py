"""Structural diversity measures for directed ego networks.

Library surface:

- :mod:`egodiversity.graph` -- immutable follow graph, neighborhoods,
  weak/strong components;
- :mod:`egodiversity.diversity` -- per-ego diversity measures;
- :mod:`egodiversity.kclip` -- outdegree clipping decomposition;
- :mod:`egodiversity.bridges` -- followee-similarity bridges;
- :mod:`egodiversity.reputation` -- rank-1 factorization reputation index;
- :mod:`egodiversity.stats` -- OLS, bootstrap, ANOVA, paired t, matching;
- :mod:`egodiversity.synthgen` -- deterministic synthetic data.

The per-ego hot loops run on a compiled backend when available; call
:func:`kernel_backend` to see which one is active.
"""

from .bridges import (
    BridgeConfig,
    ComponentGraph,
    EgoSkipped,
    bridged_components,
    bridged_k_clip_diversity,
    jaccard_similarity,
)
from .diversity import DiversityReport, compute_report, indegree, strong_diversity, weak_diversity
from .graph import (
    FollowGraph,
    Neighborhood,
    Partition,
    SelfLoopError,
    UnknownNodeError,
    ego_neighborhood,
    strong_components,
    weak_components,
)
from .kclip import ClipConfig, ClipStep, ClipTrace, k_clip_decompose, k_clip_diversity
from .kernels import backend as kernel_backend
from .reputation import (
    NmfResult,
    PopularityRecord,
    ensemble_popularity,
    log_transform,
    nmf,
    social_reputation_index,
)
from .stats import (
    MatchResult,
    RegressionResult,
    bootstrap_ci,
    minmax_normalize,
    ols,
    one_way_anova,
    paired_t_test,
    propensity_match,
)
from .synthgen import EgoGenSpec, PopulationGenSpec, gen_ego, gen_population

__version__ = "0.1.0"

__all__ = [
    "BridgeConfig",
    "ClipConfig",
    "ClipStep",
    "ClipTrace",
    "ComponentGraph",
    "DiversityReport",
    "EgoGenSpec",
    "EgoSkipped",
    "FollowGraph",
    "MatchResult",
    "Neighborhood",
    "NmfResult",
    "Partition",
    "PopularityRecord",
    "PopulationGenSpec",
    "RegressionResult",
    "SelfLoopError",
    "UnknownNodeError",
    "bootstrap_ci",
    "bridged_components",
    "bridged_k_clip_diversity",
    "compute_report",
    "ego_neighborhood",
    "ensemble_popularity",
    "gen_ego",
    "gen_population",
    "indegree",
    "jaccard_similarity",
    "k_clip_decompose",
    "k_clip_diversity",
    "kernel_backend",
    "log_transform",
    "minmax_normalize",
    "nmf",
    "ols",
    "one_way_anova",
    "paired_t_test",
    "propensity_match",
    "social_reputation_index",
    "strong_components",
    "strong_diversity",
    "weak_components",
    "weak_diversity",
    "__version__",
]
