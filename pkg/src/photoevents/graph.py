"""User/photo/tag interaction graph and random-walk-with-restart affinity."""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import asdict, dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from ._validation import ConfigError, check_positive, check_scalar
from .data import Interaction, InteractionKind, Photo


class NodeType(str, enum.Enum):
    USER = "USER"
    PHOTO = "PHOTO"
    TAG = "TAG"


class ConvergenceError(RuntimeError):
    def __init__(self, residual, iterations):
        super().__init__(f"PPR did not converge in {iterations} iterations (L1 residual {residual:.3e})")
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class GraphConfig:
    alpha: float = 0.15
    tol: float = 1e-8
    max_iter: int = 200
    w_auth: float = 1.0
    w_comment: float = 1.0
    w_favorite: float = 1.0
    w_tag: float = 1.0

    def __post_init__(self):
        check_scalar(self.alpha, "alpha", min_val=0.0, max_val=1.0, include_min=False, include_max=False)
        check_positive(self.tol, "tol")
        check_scalar(self.max_iter, "max_iter", min_val=1, integer=True)
        for name in ("w_auth", "w_comment", "w_favorite", "w_tag"):
            check_positive(getattr(self, name), name)

    def to_dict(self):
        return asdict(self)


class SocialGraph:
    """Directed weighted graph over typed nodes.

    ``weights`` is a CSR matrix, ``weights[s, t]`` the summed weight of all
    contributions on edge ``s -> t``.
    """

    def __init__(self, nodes: Sequence[tuple[NodeType, str]], weights: sp.csr_matrix):
        self.nodes = list(nodes)
        self.node_index = {node: k for k, node in enumerate(self.nodes)}
        self.weights = sp.csr_matrix(weights, dtype=float)
        self.weights.sum_duplicates()
        self.weights.sort_indices()
        self.out_weight = np.asarray(self.weights.sum(axis=1)).ravel()
        self.dangling = self.out_weight == 0
        inv = np.zeros_like(self.out_weight)
        inv[~self.dangling] = 1.0 / self.out_weight[~self.dangling]
        # transpose of the row-stochastic transition matrix
        self.transition_T = sp.csr_matrix((sp.diags(inv) @ self.weights).T)

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_edges(self) -> int:
        return self.weights.nnz

    def index(self, kind: NodeType, key: str) -> int:
        return self.node_index[(kind, key)]

    def photo_index(self, photo_id: str) -> int:
        return self.node_index[(NodeType.PHOTO, photo_id)]

    def edge_weight(self, src: tuple[NodeType, str], dst: tuple[NodeType, str]) -> float:
        return float(self.weights[self.node_index[src], self.node_index[dst]])


def build_graph(photos: Iterable[Photo], interactions: Iterable[Interaction],
                config: GraphConfig = GraphConfig()) -> SocialGraph:
    photos = list(photos)
    nodes: list[tuple[NodeType, str]] = []
    index: dict[tuple[NodeType, str], int] = {}

    def node(kind, key):
        k = (kind, key)
        if k not in index:
            index[k] = len(nodes)
            nodes.append(k)
        return index[k]

    edges: dict[tuple[int, int], float] = defaultdict(float)

    def link(a, b, w):
        edges[(a, b)] += w
        edges[(b, a)] += w

    photo_ids = set()
    for p in photos:
        photo_ids.add(p.photo_id)
        pn = node(NodeType.PHOTO, p.photo_id)
        link(node(NodeType.USER, p.user_id), pn, config.w_auth)
        for tag in p.tags:
            link(pn, node(NodeType.TAG, tag), config.w_tag)

    comments: dict[tuple[str, str], int] = defaultdict(int)
    favorites: set[tuple[str, str]] = set()
    for it in interactions:
        if it.photo_id not in photo_ids:
            raise ValueError(f"interaction references unknown photo_id {it.photo_id!r}")
        if it.kind is InteractionKind.COMMENT:
            comments[(it.user_id, it.photo_id)] += 1
        else:
            favorites.add((it.user_id, it.photo_id))
    for (user, pid), c in sorted(comments.items()):
        link(node(NodeType.USER, user), index[(NodeType.PHOTO, pid)], c * config.w_comment)
    for user, pid in sorted(favorites):
        link(node(NodeType.USER, user), index[(NodeType.PHOTO, pid)], config.w_favorite)

    n = len(nodes)
    if edges:
        keys = sorted(edges)
        rows = np.fromiter((k[0] for k in keys), dtype=np.intp, count=len(keys))
        cols = np.fromiter((k[1] for k in keys), dtype=np.intp, count=len(keys))
        vals = np.fromiter((edges[k] for k in keys), dtype=float, count=len(keys))
        W = sp.csr_matrix((vals, (rows, cols)), shape=(n, n))
    else:
        W = sp.csr_matrix((n, n))
    return SocialGraph(nodes, W)


def transition_step(graph: SocialGraph, v: np.ndarray, source: int, alpha: float) -> np.ndarray:
    """One restart-walk update; mass on dangling nodes returns to the source."""
    v = np.asarray(v, dtype=float)
    out = (1.0 - alpha) * (graph.transition_T @ v)
    out[source] += alpha + (1.0 - alpha) * v[graph.dangling].sum()
    return out


def ppr_matrix(graph: SocialGraph, sources: Sequence[int],
               config: GraphConfig = GraphConfig()) -> np.ndarray:
    """PPR vectors for several sources, one column each.

    Each column iterates from its indicator vector and is frozen once its L1
    change drops below ``config.tol``.
    """
    sources = np.asarray(sources, dtype=np.intp)
    n, s = graph.num_nodes, len(sources)
    alpha = config.alpha
    V = np.zeros((n, s))
    V[sources, np.arange(s)] = 1.0
    active = np.arange(s)
    residual = np.zeros(s)
    for _ in range(config.max_iter):
        cur = V[:, active]
        nxt = (1.0 - alpha) * (graph.transition_T @ cur)
        nxt[sources[active], np.arange(len(active))] += alpha + (1.0 - alpha) * cur[graph.dangling].sum(axis=0)
        res = np.abs(nxt - cur).sum(axis=0)
        V[:, active] = nxt
        residual[active] = res
        active = active[res >= config.tol]
        if active.size == 0:
            return V
    raise ConvergenceError(float(residual[active].max()), config.max_iter)


def personalized_pagerank(graph: SocialGraph, source: int,
                          config: GraphConfig = GraphConfig()) -> np.ndarray:
    return ppr_matrix(graph, [source], config)[:, 0]


class SocialAffinity:
    """Symmetrized PPR affinity between photos, with a per-source cache."""

    def __init__(self, graph: SocialGraph, config: GraphConfig = GraphConfig()):
        self.graph = graph
        self.config = config
        self._cache: dict[int, np.ndarray] = {}

    def vector(self, photo_id: str) -> np.ndarray:
        k = self.graph.photo_index(photo_id)
        v = self._cache.get(k)
        if v is None:
            v = self._cache.setdefault(k, personalized_pagerank(self.graph, k, self.config))
        return v

    def precompute(self, photo_ids: Iterable[str]) -> None:
        todo = sorted({self.graph.photo_index(p) for p in photo_ids} - self._cache.keys())
        if todo:
            V = ppr_matrix(self.graph, todo, self.config)
            for col, k in enumerate(todo):
                self._cache.setdefault(k, V[:, col])

    def pair(self, photo_i: str, photo_j: str) -> float:
        gi, gj = self.graph.photo_index(photo_i), self.graph.photo_index(photo_j)
        return (self.vector(photo_i)[gj] + self.vector(photo_j)[gi]) / 2.0

    def pairs(self, ids_i: Sequence[str], ids_j: Sequence[str]) -> np.ndarray:
        self.precompute(list(ids_i) + list(ids_j))
        return np.array([self.pair(a, b) for a, b in zip(ids_i, ids_j)], dtype=float)


def social_affinity(graph: SocialGraph, p_i: str, p_j: str, config: GraphConfig = GraphConfig(),
                    provider: SocialAffinity | None = None) -> float:
    provider = provider or SocialAffinity(graph, config)
    return provider.pair(p_i, p_j)


def top_ppr(graph: SocialGraph, photo_id: str, k: int = 20,
            config: GraphConfig = GraphConfig()) -> list[tuple[NodeType, str, float]]:
    """Highest-scoring nodes of the walk from ``photo_id``, ties by node index."""
    if k < 1:
        raise ConfigError(f"top_k must be >= 1, got {k}")
    v = personalized_pagerank(graph, graph.photo_index(photo_id), config)
    order = np.lexsort((np.arange(len(v)), -v))[:k]
    return [(graph.nodes[i][0], graph.nodes[i][1], float(v[i])) for i in order]
