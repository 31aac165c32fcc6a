import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from inetsim.analysis import (LanguageNetwork, SimilarityMatrix, build_language_network, comparison_count,
                              distance_correlation, measure_ranking_correlation, size_value, spearman,
                              strength_centrality, weighted_distance_correlation)
from inetsim.errors import DataError, LengthMismatch, TooShort, VertexSetMismatch


def dcor_oracle(xs, ys):
    """Plain loops over the double-centered distance tables."""
    n = len(xs)

    def table(v):
        d = [[abs(v[k] - v[l]) for l in range(n)] for k in range(n)]
        row = [sum(r) / n for r in d]
        col = [sum(d[k][l] for k in range(n)) / n for l in range(n)]
        grand = sum(row) / n
        return [[d[k][l] - row[k] - col[l] + grand for l in range(n)] for k in range(n)]

    a, b = table(xs), table(ys)
    cov = sum(a[k][l] * b[k][l] for k in range(n) for l in range(n)) / n ** 2
    vx = sum(a[k][l] ** 2 for k in range(n) for l in range(n)) / n ** 2
    vy = sum(b[k][l] ** 2 for k in range(n) for l in range(n)) / n ** 2
    return math.sqrt(cov / math.sqrt(vx * vy))


def test_size_value_examples():
    assert [size_value(10, 40, k) for k in ("min", "max", "sum", "ratio")] == [10, 40, 50, 0.25]
    assert size_value(7, 7, "ratio") == 1
    assert size_value(0, 5, "ratio") == 0
    with pytest.raises(ZeroDivisionError):
        size_value(0, 0, "ratio")
    with pytest.raises(DataError):
        size_value(1, 2, "median")


def test_spearman_examples():
    assert spearman([1, 2, 3, 4], [2, 4, 6, 9]).rho == 1
    assert spearman([1, 2, 3, 4], [4, 3, 2, 1]).rho == -1
    r = spearman([1, 2, 2, 3], [1, 2, 3, 4])
    assert r.rho == pytest.approx(4.5 / math.sqrt(22.5), abs=1e-9)
    assert 0 < r.p < 1


def test_spearman_degenerate_and_errors():
    r = spearman([1, 1, 1], [1, 2, 3])
    assert (r.rho, r.p, r.degenerate) == (0.0, 1.0, True)
    with pytest.raises(LengthMismatch):
        spearman([1, 2, 3], [1, 2])
    with pytest.raises(TooShort):
        spearman([1, 2], [1, 2])


def test_spearman_p_value_oracle():
    # t approximation by hand for rho = 0.8, n = 5
    r = spearman([1, 2, 3, 4, 5], [2, 1, 4, 3, 5])
    assert r.rho == pytest.approx(0.8)
    t = 0.8 * math.sqrt(3 / (1 - 0.64))
    from scipy.stats import t as student
    assert r.p == pytest.approx(2 * student.sf(t, 3))


distinct = st.lists(st.integers(-1000, 1000), min_size=3, max_size=12)


@settings(max_examples=100)
@given(distinct, st.data())
def test_spearman_monotone_invariance(xs, data):
    ys = data.draw(st.lists(st.floats(-100, 100), min_size=len(xs), max_size=len(xs)))
    base = spearman(xs, ys)
    moved = spearman([2 * x ** 3 + x - 5 for x in xs], ys)
    assert moved.rho == pytest.approx(base.rho, abs=1e-12)


def test_measure_ranking_matrix():
    means = {"ges": [0.1, 0.5, 0.3], "neg": [-0.1, -0.5, -0.3], "ejs": [0.2, 0.1, 0.3]}
    names, rho, p = measure_ranking_correlation(means)
    assert names == ["ges", "neg", "ejs"]
    assert rho[0, 0] == 1
    assert rho[0, 1] == pytest.approx(-1)
    # ranks ges (1,3,2) vs ejs (2,1,3): hand Pearson of centered ranks = -0.5
    assert rho[0, 2] == pytest.approx(-0.5)
    assert rho[2, 0] == rho[0, 2]
    assert p[0, 2] == p[2, 0]
    with pytest.raises(DataError):
        measure_ranking_correlation({"ges": [1, 2, 3]})
    with pytest.raises(LengthMismatch):
        measure_ranking_correlation({"a": [1, 2, 3], "b": [1, 2, 3, 4]})


def _matrix(weights, langs=("a", "b", "c")):
    orders = {lang: k + 1 for k, lang in enumerate(langs)}
    rows = [(x, y, w) for (x, y), w in weights.items()] + [(x, x, 1.0) for x in langs]
    return SimilarityMatrix.from_results("A", "ges", rows, orders)


def test_language_network_filter():
    m = _matrix({("a", "b"): 0.9, ("a", "c"): 0.1, ("b", "c"): 0.5})
    net = build_language_network(m, 0.4)
    assert [(a, b) for a, b, _ in net.edges] == [("a", "b"), ("b", "c")]
    assert build_language_network(m, 0.95).edges == []
    tie = _matrix({("a", "b"): 0.4, ("a", "c"): 0.4, ("b", "c"): 0.4})
    assert len(build_language_network(tie, 0.4).edges) == 3


def test_matrix_sorted_by_order():
    m = SimilarityMatrix.from_results("A", "ges", [("x", "y", 0.5)], {"x": 9, "y": 2})
    assert m.languages == ["y", "x"]
    assert m.values[0, 1] == m.values[1, 0] == 0.5
    assert list(m.off_diagonal()) == [0.5]


@settings(max_examples=100)
@given(st.lists(st.floats(0, 1), min_size=3, max_size=3), st.floats(0, 1), st.floats(0, 1))
def test_language_network_monotone(ws, t1, t2):
    lo, hi = sorted((t1, t2))
    m = _matrix(dict(zip([("a", "b"), ("a", "c"), ("b", "c")], ws)))
    assert set(build_language_network(m, hi).edges) <= set(build_language_network(m, lo).edges)


def test_strengths():
    iso = LanguageNetwork({"a": {}, "b": {}, "c": {}}, [("a", "b", 0.2)])
    assert strength_centrality(iso)["c"] == 0
    two = LanguageNetwork({"a": {}, "b": {}, "c": {}}, [("a", "b", 0.2), ("a", "c", 0.3)])
    assert strength_centrality(two)["a"] == pytest.approx(0.5)
    tri = LanguageNetwork({"a": {}, "b": {}, "c": {}}, [("a", "b", 1.0), ("a", "c", 1.0), ("b", "c", 1.0)])
    assert strength_centrality(tri) == {"a": 2.0, "b": 2.0, "c": 2.0}


def test_dcor_examples():
    xs = [0.3, 1.0, 2.5, 4.0, 4.1]
    assert distance_correlation(xs, [3 * x + 1 for x in xs]) == pytest.approx(1.0, abs=1e-9)
    assert distance_correlation([2, 2, 2], [1, 2, 3]) == 0
    oracle = dcor_oracle([1, 2, 3], [1, 3, 2])
    assert oracle == pytest.approx(math.sqrt(0.7), abs=1e-12)
    assert distance_correlation([1, 2, 3], [1, 3, 2]) == pytest.approx(oracle, abs=1e-12)


@settings(max_examples=100)
@given(st.lists(st.floats(-50, 50), min_size=2, max_size=10), st.data())
def test_dcor_properties(xs, data):
    ys = data.draw(st.lists(st.floats(-50, 50), min_size=len(xs), max_size=len(xs)))
    v = distance_correlation(xs, ys)
    assert 0 <= v <= 1
    assert v == pytest.approx(distance_correlation(ys, xs), abs=1e-9)
    if np.ptp(xs) > 1e-6:
        assert distance_correlation(xs, xs) == pytest.approx(1.0, abs=1e-9)
        if np.ptp(ys) > 1e-6:
            assert v == pytest.approx(dcor_oracle(xs, ys), abs=1e-6)


def test_weighted_dcor_boundaries():
    full = [("a", "b", 1.0), ("a", "c", 1.0), ("b", "c", 1.0)]
    v = {"a": {}, "b": {}, "c": {}}
    n = LanguageNetwork(v, full)
    dc = distance_correlation([2, 2, 2], [2, 2, 2])
    assert weighted_distance_correlation(n, n, 1.0) == pytest.approx(1.0 * dc, abs=1e-9)
    empty = LanguageNetwork(v, [])
    assert weighted_distance_correlation(empty, empty, 1.0) == 0
    with pytest.raises(VertexSetMismatch):
        weighted_distance_correlation(n, LanguageNetwork({"a": {}}, []), 1.0)


def test_weighted_dcor_three_languages():
    v = {"a": {}, "b": {}, "c": {}}
    n1 = LanguageNetwork(v, [("a", "b", 0.5), ("b", "c", 0.25)])
    n2 = LanguageNetwork(v, [("a", "b", 1.0), ("a", "c", 0.5)])
    # strengths (0.5, 0.75, 0.25) and (1.5, 1.0, 0.5); weight = 4.5 / (2*3*2*1)
    weight = (1.5 + 3.0) / 12
    assert weight == 0.375
    expected = weight * dcor_oracle([0.5, 0.75, 0.25], [1.5, 1.0, 0.5])
    assert weighted_distance_correlation(n1, n2, 1.0) == pytest.approx(expected, abs=1e-12)


def test_comparison_count_identity():
    assert comparison_count([35] * 25) == 110250
    assert comparison_count([3, 3]) == 84
    assert comparison_count([3, 2, 0]) == 7 * (6 + 3)
