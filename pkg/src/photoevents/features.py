"""Pairwise photo similarities and the pair feature vector fed to the SVM.

Scalar functions (``time_similarity``, ``geo_distance_km``, ...) define each
feature; :class:`PairFeatureExtractor` evaluates the same definitions in
vectorized form over arrays of photo pairs.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import ConfigError, check_positive
from .data import Photo

EARTH_RADIUS_KM = 6371.0088

FEATURE_NAMES = ("f_time", "f_geo", "geo_missing", "f_tags", "f_text", "f_social", "f_owner")

STOPWORDS = frozenset("""
a about above after again against all am an and any are as at be because been
before being below between both but by can could did do does doing down during
each few for from further had has have having he her here hers herself him
himself his how i if in into is it its itself just me more most my myself no
nor not now of off on once only or other our ours ourselves out over own same
she should so some such than that the their theirs them themselves then there
these they this those through to too under until up very was we were what when
where which while who whom why will with would you your yours yourself
yourselves
""".split())

_SPLIT = re.compile(r"[\W_]+")


def time_similarity(t1, t2, tau):
    """exp(-|t1 - t2| / tau); 1 for equal times."""
    if not tau > 0:
        raise ConfigError(f"tau must be > 0, got {tau!r}")
    return math.exp(-abs(t1 - t2) / tau)


def _check_coords(lat, lon):
    if not (-90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0):
        raise ValueError(f"coordinates out of range: ({lat}, {lon})")


def geo_distance_km(lat1, lon1, lat2, lon2):
    """Haversine great-circle distance in kilometers."""
    _check_coords(lat1, lon1)
    _check_coords(lat2, lon2)
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    a = (math.sin((phi2 - phi1) / 2.0) ** 2
         + math.cos(phi1) * math.cos(phi2) * math.sin(math.radians(lon2 - lon1) / 2.0) ** 2)
    return 2.0 * EARTH_RADIUS_KM * math.asin(math.sqrt(min(1.0, max(0.0, a))))


def geo_similarity(d, sigma):
    if not sigma > 0:
        raise ConfigError(f"sigma must be > 0, got {sigma!r}")
    if d < 0:
        raise ValueError(f"distance must be >= 0, got {d!r}")
    return math.exp(-d / sigma)


def tokenize(text: str | None, stopwords=STOPWORDS) -> list[str]:
    if not text:
        return []
    return [t for t in _SPLIT.split(text.lower()) if t and t not in stopwords]


@dataclass(frozen=True)
class TfIdfIndex:
    """Smoothed idf over a fixed training corpus.

    Tokens outside the vocabulary get the idf of a token with document
    frequency zero, so unseen tags still match each other.
    """

    vocabulary: Mapping[str, int]
    idf: tuple[float, ...]
    document_count: int

    def idf_of(self, token: str) -> float:
        i = self.vocabulary.get(token)
        if i is None:
            return math.log(1.0 + self.document_count) + 1.0
        return self.idf[i]

    def weights(self, tokens: Iterable[str]) -> dict[str, float]:
        """tf·idf with tf the raw count."""
        return {t: c * self.idf_of(t) for t, c in Counter(tokens).items()}

    def to_dict(self) -> dict:
        tokens = sorted(self.vocabulary, key=self.vocabulary.__getitem__)
        return {"tokens": tokens, "idf": list(self.idf), "document_count": self.document_count}

    @classmethod
    def from_dict(cls, d: Mapping) -> "TfIdfIndex":
        return cls({t: i for i, t in enumerate(d["tokens"])},
                   tuple(float(x) for x in d["idf"]), int(d["document_count"]))


def build_tfidf(documents: Sequence[Sequence[str]]) -> TfIdfIndex:
    df: Counter = Counter()
    for doc in documents:
        df.update(set(doc))
    n = len(documents)
    tokens = sorted(df)
    idf = tuple(math.log((1.0 + n) / (1.0 + df[t])) + 1.0 for t in tokens)
    return TfIdfIndex({t: i for i, t in enumerate(tokens)}, idf, n)


def cosine_similarity(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    """Cosine of two non-negative sparse vectors; 0 if either is all-zero."""
    common = sorted(a.keys() & b.keys())
    dot = math.fsum(a[k] * b[k] for k in common)
    na = math.fsum(v * v for v in a.values())
    nb = math.fsum(v * v for v in b.values())
    if na == 0.0 or nb == 0.0:
        return 0.0
    denom = math.sqrt(na * nb) or math.sqrt(na) * math.sqrt(nb)
    return min(1.0, max(0.0, dot / denom))


@dataclass(frozen=True)
class FeatureVector:
    f_time: float
    f_geo: float
    geo_missing: float
    f_tags: float
    f_text: float
    f_social: float = 0.0
    f_owner: float = 0.0

    def as_array(self, names: Sequence[str]) -> np.ndarray:
        return np.array([getattr(self, n) for n in names], dtype=float)


def pair_feature_vector(p_i: Photo, p_j: Photo, tag_index: TfIdfIndex, text_index: TfIdfIndex,
                        social=None, *, tau=86400.0, sigma=100.0,
                        stopwords=STOPWORDS) -> FeatureVector:
    """Feature vector for one photo pair.

    ``social`` is any object with a ``pair(photo_id_i, photo_id_j)`` method; when
    omitted, ``f_social`` is 0.
    """
    if p_i.has_geo and p_j.has_geo:
        d = geo_distance_km(p_i.latitude, p_i.longitude, p_j.latitude, p_j.longitude)
        f_geo, missing = geo_similarity(d, sigma), 0.0
    else:
        f_geo, missing = 0.0, 1.0
    f_tags = cosine_similarity(tag_index.weights(p_i.tags), tag_index.weights(p_j.tags))
    f_text = cosine_similarity(text_index.weights(tokenize(p_i.text, stopwords)),
                               text_index.weights(tokenize(p_j.text, stopwords)))
    f_social = 0.0 if social is None else float(social.pair(p_i.photo_id, p_j.photo_id))
    return FeatureVector(
        f_time=time_similarity(p_i.taken_time, p_j.taken_time, tau),
        f_geo=f_geo,
        geo_missing=missing,
        f_tags=f_tags,
        f_text=f_text,
        f_social=f_social,
        f_owner=float(p_i.user_id == p_j.user_id),
    )


def _haversine_arrays(lat1, lon1, lat2, lon2):
    phi1, phi2 = np.radians(lat1), np.radians(lat2)
    a = (np.sin((phi2 - phi1) / 2.0) ** 2
         + np.cos(phi1) * np.cos(phi2) * np.sin(np.radians(lon2 - lon1) / 2.0) ** 2)
    return 2.0 * EARTH_RADIUS_KM * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def _tfidf_rows(docs: Sequence[Sequence[str]], index: TfIdfIndex) -> sp.csr_matrix:
    """Rows of tf·idf weights over a vocabulary local to ``docs``."""
    local: dict[str, int] = {}
    rows, cols, vals = [], [], []
    for r, doc in enumerate(docs):
        for tok, w in sorted(index.weights(doc).items()):
            c = local.setdefault(tok, len(local))
            rows.append(r)
            cols.append(c)
            vals.append(w)
    return sp.csr_matrix((vals, (rows, cols)), shape=(len(docs), max(1, len(local))))


def _pair_cosines(X: sp.csr_matrix, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    sq = np.asarray(X.multiply(X).sum(axis=1)).ravel()
    dot = np.asarray(X[i].multiply(X[j]).sum(axis=1)).ravel()
    denom = np.sqrt(sq[i] * sq[j])
    out = np.zeros(len(i))
    nz = denom > 0
    out[nz] = dot[nz] / denom[nz]
    return np.clip(out, 0.0, 1.0)


class PairFeatureExtractor(TransformerMixin, BaseEstimator):
    """Turns photo pairs into similarity feature rows.

    ``fit`` learns the tag and text tf-idf indexes from a training collection.
    ``transform`` takes a photo sequence and an ``(m, 2)`` array of positional
    index pairs (all ``i < j`` pairs when omitted) and returns an ``(m, d)``
    matrix with columns :attr:`feature_names_`.

    Parameters
    ----------
    tau : float
        Time decay scale in seconds.
    sigma : float
        Geo decay scale in kilometers.
    enable_social : bool
        Include the ``f_social`` column; ``transform`` then needs ``affinity``.
    enable_owner : bool
        Include the same-owner indicator ``f_owner``.
    """

    def __init__(self, tau=86400.0, sigma=100.0, enable_social=True, enable_owner=False):
        self.tau = tau
        self.sigma = sigma
        self.enable_social = enable_social
        self.enable_owner = enable_owner

    def _validate_params(self):
        check_positive(self.tau, "tau")
        check_positive(self.sigma, "sigma")

    @property
    def feature_names_(self) -> tuple[str, ...]:
        names = ["f_time", "f_geo", "geo_missing", "f_tags", "f_text"]
        if self.enable_social:
            names.append("f_social")
        if self.enable_owner:
            names.append("f_owner")
        return tuple(names)

    def fit(self, photos: Sequence[Photo], y=None):
        self._validate_params()
        self.stopwords_ = tuple(sorted(STOPWORDS))
        self.tag_index_ = build_tfidf([p.tags for p in photos])
        self.text_index_ = build_tfidf([tokenize(p.text) for p in photos])
        return self

    def transform(self, photos: Sequence[Photo], pairs=None, affinity=None) -> np.ndarray:
        check_is_fitted(self, "tag_index_")
        self._validate_params()
        photos = list(photos)
        n = len(photos)
        if pairs is None:
            i, j = np.triu_indices(n, k=1)
        else:
            pairs = np.asarray(pairs, dtype=np.intp).reshape(-1, 2)
            i, j = pairs[:, 0], pairs[:, 1]
        if self.enable_social and affinity is None:
            raise ValueError("enable_social=True requires an affinity provider")
        stop = frozenset(self.stopwords_)

        taken = np.array([p.taken_time for p in photos], dtype=float)
        has_geo = np.array([p.has_geo for p in photos], dtype=bool)
        lat = np.array([p.latitude if p.has_geo else 0.0 for p in photos], dtype=float)
        lon = np.array([p.longitude if p.has_geo else 0.0 for p in photos], dtype=float)

        cols = {"f_time": np.exp(-np.abs(taken[i] - taken[j]) / self.tau)}
        both = has_geo[i] & has_geo[j]
        f_geo = np.where(both, np.exp(-_haversine_arrays(lat[i], lon[i], lat[j], lon[j]) / self.sigma), 0.0)
        cols["f_geo"] = f_geo
        cols["geo_missing"] = (~both).astype(float)
        cols["f_tags"] = _pair_cosines(_tfidf_rows([p.tags for p in photos], self.tag_index_), i, j)
        cols["f_text"] = _pair_cosines(
            _tfidf_rows([tokenize(p.text, stop) for p in photos], self.text_index_), i, j)
        if self.enable_social:
            ids = np.array([p.photo_id for p in photos], dtype=object)
            cols["f_social"] = np.asarray(affinity.pairs(ids[i], ids[j]), dtype=float)
        if self.enable_owner:
            owners = np.array([p.user_id for p in photos], dtype=object)
            cols["f_owner"] = (owners[i] == owners[j]).astype(float)
        if len(i) == 0:
            return np.zeros((0, len(self.feature_names_)))
        return np.column_stack([cols[name] for name in self.feature_names_])

    def pair_vector(self, p_i: Photo, p_j: Photo, affinity=None) -> FeatureVector:
        check_is_fitted(self, "tag_index_")
        return pair_feature_vector(
            p_i, p_j, self.tag_index_, self.text_index_,
            affinity if self.enable_social else None,
            tau=self.tau, sigma=self.sigma, stopwords=frozenset(self.stopwords_))
