"""End-to-end glue: train θ on labeled photos, cluster streams, sweep μ, ablate."""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .clustering import Clustering, IncrementalEventClustering, incremental_cluster
from .config import PipelineConfig
from .data import Interaction, Photo, order_stream
from .features import PairFeatureExtractor, TfIdfIndex
from .graph import SocialAffinity, build_graph
from .metrics import MetricsReport, evaluate
from .svm import SimilarityModel, sample_pairs, train
from .synth import generate

log = logging.getLogger(__name__)


def make_extractor(config: PipelineConfig) -> PairFeatureExtractor:
    f = config.features
    return PairFeatureExtractor(tau=f.tau, sigma=f.sigma, enable_social=f.enable_social,
                                enable_owner=f.enable_owner)


def _affinity(photos, interactions, config: PipelineConfig):
    if not config.features.enable_social:
        return None
    return SocialAffinity(build_graph(photos, interactions, config.graph), config.graph)


def training_matrix(photos: Sequence[Photo], interactions: Sequence[Interaction], config: PipelineConfig):
    """Sampled pairs, their feature matrix and labels, plus the fitted extractor."""
    photos = list(photos)
    pairs = sample_pairs(photos, config.sampling)
    extractor = make_extractor(config).fit(photos)
    pos = {p.photo_id: k for k, p in enumerate(photos)}
    idx = np.array([[pos[tp.photo_id_i], pos[tp.photo_id_j]] for tp in pairs], dtype=np.intp)
    X = extractor.transform(photos, idx, _affinity(photos, interactions, config))
    y = np.array([tp.label for tp in pairs], dtype=float)
    return pairs, X, y, extractor


def fit_model(photos: Sequence[Photo], interactions: Sequence[Interaction],
              config: PipelineConfig) -> SimilarityModel:
    _, X, y, extractor = training_matrix(photos, interactions, config)
    t = config.training
    model = train(X, y, extractor.feature_names_, lam=t.lam, epochs=t.epochs, seed=t.seed,
                  calibration=t.calibration)
    model.config = config.to_dict(include_paths=False)
    model.config_digest = config.digest()
    model.tag_index = extractor.tag_index_.to_dict()
    model.text_index = extractor.text_index_.to_dict()
    model.stopwords = list(extractor.stopwords_)
    log.info("trained on %d pairs (%d positive)", len(y), int((y > 0).sum()))
    return model


def model_config(model: SimilarityModel) -> PipelineConfig:
    return PipelineConfig.from_dict(model.config)


def verify_model_digest(model: SimilarityModel) -> bool:
    return model_config(model).digest() == model.config_digest


def extractor_from_model(model: SimilarityModel) -> PairFeatureExtractor:
    config = model_config(model)
    extractor = make_extractor(config)
    extractor.tag_index_ = TfIdfIndex.from_dict(model.tag_index)
    extractor.text_index_ = TfIdfIndex.from_dict(model.text_index)
    extractor.stopwords_ = tuple(model.stopwords)
    if tuple(model.feature_names) != extractor.feature_names_:
        raise ValueError(f"model features {model.feature_names} do not match config {extractor.feature_names_}")
    return extractor


def theta_matrix(model: SimilarityModel, stream: Sequence[Photo], interactions: Sequence[Interaction],
                 extractor: PairFeatureExtractor | None = None) -> np.ndarray:
    """Symmetric θ over all stream pairs, rows/columns in stream order (diagonal 1)."""
    stream = list(stream)
    extractor = extractor or extractor_from_model(model)
    config = model_config(model)
    n = len(stream)
    S = np.ones((n, n))
    if n < 2:
        return S
    i, j = np.triu_indices(n, k=1)
    X = extractor.transform(stream, np.column_stack([i, j]), _affinity(stream, interactions, config))
    vals = model.thetas(X)
    S[i, j] = vals
    S[j, i] = vals
    return S


def stream_times(stream: Sequence[Photo], key: str) -> np.ndarray:
    return np.array([getattr(p, key) for p in stream], dtype=float)


def cluster_matrix(stream: Sequence[Photo], S: np.ndarray, mu: float, window=None,
                   order_key="upload_time") -> Clustering:
    est = IncrementalEventClustering(mu=mu, window=window)
    est.fit(S, times=stream_times(stream, order_key) if window is not None else None)
    return Clustering.from_labels([p.photo_id for p in stream], est.labels_.tolist(), float(mu))


def cluster_photos(model: SimilarityModel, photos: Sequence[Photo], interactions: Sequence[Interaction],
                   mu: float) -> Clustering:
    config = model_config(model)
    stream = order_stream(photos, config.clustering.order_key)
    S = theta_matrix(model, stream, interactions)
    return cluster_matrix(stream, S, mu, config.clustering.window, config.clustering.order_key)


def truth_of(photos: Sequence[Photo]) -> dict:
    missing = [p.photo_id for p in photos if p.event_id is None]
    if missing:
        raise ValueError(f"photo {missing[0]!r} has no event_id (ground truth required)")
    return {p.photo_id: p.event_id for p in photos}


def sweep(stream: Sequence[Photo], theta: np.ndarray | Callable, mu_values: Sequence[float],
          window=None, order_key="upload_time") -> list[MetricsReport]:
    """One report per μ, in the given order.

    ``theta`` is either a precomputed matrix in stream order or a callable on
    photo pairs.
    """
    stream = list(stream)
    truth = truth_of(stream)
    reports = []
    for mu in mu_values:
        if callable(theta):
            times = stream_times(stream, order_key) if window is not None else None
            result = incremental_cluster(stream, theta, mu, times, window)
            result = Clustering.from_labels([p.photo_id for p in stream], result.labels, float(mu))
        else:
            result = cluster_matrix(stream, theta, mu, window, order_key)
        reports.append(evaluate(result.assignment, truth, mu=float(mu)))
    return reports


def best_report(reports: Sequence[MetricsReport], key="nmi") -> MetricsReport:
    """Highest ``key``; the smallest μ wins ties (first in list order)."""
    if not reports:
        raise ValueError("no reports to choose from")
    best = reports[0]
    for r in reports[1:]:
        if getattr(r, key) > getattr(best, key):
            best = r
    return best


@dataclass
class AblationRun:
    seed: int
    baseline: list[MetricsReport]
    social: list[MetricsReport]

    def summary(self) -> dict:
        b_nmi, s_nmi = best_report(self.baseline), best_report(self.social)
        b_f1, s_f1 = best_report(self.baseline, "bcubed_f1"), best_report(self.social, "bcubed_f1")
        return {
            "seed": self.seed,
            "baseline": {"best_nmi": b_nmi.nmi, "best_nmi_mu": b_nmi.mu,
                         "best_f1": b_f1.bcubed_f1, "best_f1_mu": b_f1.mu},
            "social": {"best_nmi": s_nmi.nmi, "best_nmi_mu": s_nmi.mu,
                       "best_f1": s_f1.bcubed_f1, "best_f1_mu": s_f1.mu},
            "delta_nmi": s_nmi.nmi - b_nmi.nmi,
            "delta_f1": s_f1.bcubed_f1 - b_f1.bcubed_f1,
        }


def ablation_run(config: PipelineConfig, seed: int) -> AblationRun:
    """Train photo-only and photo+social models on the same pairs and compare.

    The training set is generated with ``seed``, the test stream with
    ``seed + test_seed_offset``. Both models share sampling and training seeds.
    """
    train_photos, train_inter = generate(dataclasses.replace(config.synth, seed=seed))
    test_photos, test_inter = generate(
        dataclasses.replace(config.synth, seed=seed + config.ablation.test_seed_offset))
    cfg = config.replace("sampling", seed=seed).replace("training", seed=seed)
    social_cfg = cfg.replace("features", enable_social=True)
    base_cfg = cfg.replace("features", enable_social=False)

    order_key = cfg.clustering.order_key
    stream = order_stream(test_photos, order_key)
    mus = cfg.clustering.mu_values()
    results = {}
    for name, c in (("baseline", base_cfg), ("social", social_cfg)):
        model = fit_model(train_photos.photos, train_inter, c)
        S = theta_matrix(model, stream, test_inter)
        results[name] = sweep(stream, S, mus, cfg.clustering.window, order_key)
    return AblationRun(seed, results["baseline"], results["social"])


def ablation(config: PipelineConfig, seeds: Sequence[int] | None = None) -> dict:
    seeds = list(config.ablation.seeds if seeds is None else seeds)
    runs = [ablation_run(config, s) for s in seeds]
    summaries = [r.summary() for r in runs]

    def mean(path):
        return float(np.mean([_dig(s, path) for s in summaries]))

    return {
        "seeds": seeds,
        "nmi_normalization": "arithmetic",
        "mu_values": config.clustering.mu_values(),
        "mean_baseline_nmi": mean("baseline.best_nmi"),
        "mean_social_nmi": mean("social.best_nmi"),
        "mean_delta_nmi": mean("delta_nmi"),
        "mean_baseline_f1": mean("baseline.best_f1"),
        "mean_social_f1": mean("social.best_f1"),
        "mean_delta_f1": mean("delta_f1"),
        "runs": [
            {**s, "baseline_sweep": [r.to_dict() for r in run.baseline],
             "social_sweep": [r.to_dict() for r in run.social]}
            for s, run in zip(summaries, runs)
        ],
    }


def _dig(d, path):
    for part in path.split("."):
        d = d[part]
    return d
