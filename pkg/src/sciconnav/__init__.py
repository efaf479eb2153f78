"""SciConNav: knowledge navigation over scientific concept embeddings."""

__version__ = "0.1.0"

from .corpus import TrajectoryCorpus, build_trajectories, corpus_stats
from .embed import EmbeddingSpace, TrainConfig, nearest_neighbors, similarity, train_sgns
from .errors import SciConNavError
from .navgraph import (
    NavigationGraph,
    avg_sd,
    betweenness_centrality,
    build_graph,
    centrality_odds_table,
    closeness_centrality,
    hl_avgsd_report,
    shortest_path,
    step_size_histogram,
)
from .semantics import (
    analogy_expand,
    analogy_infer,
    axis_projection_report,
    build_axis,
    propensity_report,
)
from .taxonomy import (
    ConceptTaxonomy,
    classify_concept,
    count_root_paths,
    load_taxonomy,
    partition_concepts,
)

__all__ = [
    "__version__",
    "SciConNavError",
    "ConceptTaxonomy",
    "load_taxonomy",
    "count_root_paths",
    "classify_concept",
    "partition_concepts",
    "TrajectoryCorpus",
    "build_trajectories",
    "corpus_stats",
    "TrainConfig",
    "EmbeddingSpace",
    "train_sgns",
    "similarity",
    "nearest_neighbors",
    "analogy_infer",
    "analogy_expand",
    "build_axis",
    "axis_projection_report",
    "propensity_report",
    "NavigationGraph",
    "build_graph",
    "shortest_path",
    "step_size_histogram",
    "closeness_centrality",
    "betweenness_centrality",
    "avg_sd",
    "centrality_odds_table",
    "hl_avgsd_report",
]
