"""Social event detection in photo streams.

Photo pairs are scored by a linear SVM over metadata similarities (time, geo,
tags, text) and a random-walk social affinity; a one-pass incremental
clustering then groups the stream into events.
"""

from .clustering import Clustering, IncrementalEventClustering, incremental_cluster
from .config import PipelineConfig
from .data import Interaction, InteractionKind, Photo, PhotoCollection, order_stream
from .features import PairFeatureExtractor
from .graph import GraphConfig, SocialAffinity, build_graph, personalized_pagerank
from .metrics import MetricsReport, bcubed, evaluate, nmi
from .svm import FeatureStandardizer, PegasosSVM, SimilarityModel

__version__ = "0.1.0"

__all__ = [
    "Clustering", "IncrementalEventClustering", "incremental_cluster", "PipelineConfig",
    "Interaction", "InteractionKind", "Photo", "PhotoCollection", "order_stream",
    "PairFeatureExtractor", "GraphConfig", "SocialAffinity", "build_graph",
    "personalized_pagerank", "MetricsReport", "bcubed", "evaluate", "nmi",
    "FeatureStandardizer", "PegasosSVM", "SimilarityModel",
]
