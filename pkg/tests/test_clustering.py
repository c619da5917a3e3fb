import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import naive_incremental_cluster
from photoevents.clustering import (CountingTheta, IncrementalEventClustering, incremental_cluster,
                                    photo_cluster_similarity)


def table(values):
    def theta(a, b):
        return values[frozenset((a, b))]
    return theta


def random_sim(rng, n, discrete=False):
    S = rng.random((n, n))
    if discrete:
        S = np.round(S * 4) / 4  # forces many exact ties
    S = np.triu(S, 1)
    S = S + S.T
    np.fill_diagonal(S, 1.0)
    return S


def test_photo_cluster_similarity():
    th = table({frozenset(("p", "q")): 0.2, frozenset(("p", "r")): 0.8})
    assert photo_cluster_similarity("p", ["q"], th) == 0.2
    assert photo_cluster_similarity("p", ["q", "r"], th) == 0.5
    assert photo_cluster_similarity("p", ["x", "y", "z"], lambda a, b: 0.37) == pytest.approx(0.37)
    with pytest.raises(ValueError):
        photo_cluster_similarity("p", [], th)


def test_hand_trace():
    th = table({frozenset((1, 2)): 0.9, frozenset((1, 3)): 0.1, frozenset((2, 3)): 0.2})
    result = incremental_cluster([1, 2, 3], th, 0.5)
    assert [c.members for c in result.clusters] == [[1, 2], [3]]
    assert result.assignment == {1: 0, 2: 0, 3: 1}


def test_threshold_boundaries():
    rng = np.random.default_rng(0)
    S = random_sim(rng, 30) * 0.98 + 0.01
    assert IncrementalEventClustering(mu=1.0).fit(S).n_clusters_ == 30
    assert IncrementalEventClustering(mu=-0.01).fit(S).n_clusters_ == 1


def test_equal_to_mu_opens_new_cluster_and_ties_lowest_id():
    th = table({frozenset(("a", "b")): 0.5})
    assert incremental_cluster(["a", "b"], th, 0.5).assignment == {"a": 0, "b": 1}
    th = table({frozenset(("a", "b")): 0.1, frozenset(("a", "c")): 0.9, frozenset(("b", "c")): 0.9})
    assert incremental_cluster(["a", "b", "c"], th, 0.5).labels == [0, 1, 0]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 120), st.floats(-0.1, 1.1), st.booleans())
def test_matches_naive_reference(seed, n, mu, discrete):
    S = random_sim(np.random.default_rng(seed), n, discrete)
    expected = naive_incremental_cluster(n, lambda i, j: S[i, j], mu)
    fast = IncrementalEventClustering(mu=mu).fit(S)
    assert fast.labels_.tolist() == expected
    slow = IncrementalEventClustering(mu=mu, metric=lambda i, j: S[i, j]).fit(list(range(n)))
    assert slow.labels_.tolist() == expected
    assert slow.n_evaluations_ <= n * (n - 1) // 2 + n


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 80), st.floats(0, 1))
def test_partition_invariants(seed, n, mu):
    S = random_sim(np.random.default_rng(seed), n)
    est = IncrementalEventClustering(mu=mu).fit(S)
    c = est.clustering_
    members = [m for cl in c.clusters for m in cl.members]
    assert sorted(members) == list(range(n))
    assert [cl.cluster_id for cl in c.clusters] == list(range(len(c.clusters)))
    for cl in c.clusters:
        assert cl.members == sorted(cl.members)
    again = IncrementalEventClustering(mu=mu).fit(S)
    assert again.labels_.tolist() == est.labels_.tolist()


def test_counting_theta_caches():
    calls = []
    counter = CountingTheta(lambda a, b: calls.append((a, b)) or 0.5)
    counter(1, 2)
    counter(2, 1)
    assert counter.calls == 1 and calls == [(1, 2)]


def test_window_flag():
    S = np.full((3, 3), 0.9)
    times = [0.0, 10.0, 100.0]
    est = IncrementalEventClustering(mu=0.5, window=20.0).fit(S, times=times)
    assert est.labels_.tolist() == [0, 0, 1]
    slow = IncrementalEventClustering(mu=0.5, window=20.0, metric=lambda a, b: 0.9).fit([0, 1, 2], times=times)
    assert slow.labels_.tolist() == [0, 0, 1]
    with pytest.raises(ValueError):
        IncrementalEventClustering(window=5.0).fit(S)


def test_input_validation():
    with pytest.raises(ValueError):
        IncrementalEventClustering().fit(np.ones((2, 3)))
    with pytest.raises(ValueError):
        IncrementalEventClustering(metric="cosine").fit(np.ones((2, 2)))
    assert IncrementalEventClustering().fit(np.zeros((0, 0))).n_clusters_ == 0
