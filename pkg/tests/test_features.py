import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from inetsim.errors import DataError, EmptyText, MissingTopics, MissingVector, OutOfRange
from inetsim.extract import AlignmentSet, alignment_set
from inetsim.features import (QTS_INDICES, VIEW_COLUMNS, FeatureStore, article_vector, gini, h_point,
                              lag_autocorrelation, qts_indices, qts_vector, read_feature_csv,
                              topic_vector, vertex_cosine_similarity, write_feature_csv)
from inetsim.ingest import ArticleRecord, StructureCounts

from conftest import make_net


def article(sentences=(("a", "b", "a"),), topics=None, assoc=None):
    return ArticleRecord("de", "T", "Q1", (), StructureCounts(), tuple(map(tuple, sentences)),
                         topics, assoc)


def test_small_text_indices():
    q = qts_indices([["a", "b", "a"]])
    assert q["type_token_ratio"] == pytest.approx(2 / 3, abs=1e-12)
    assert q["hapax_percentage"] == pytest.approx(1 / 2, abs=1e-12)
    assert q["repeat_rate"] == pytest.approx(5 / 9, abs=1e-12)
    assert q["entropy"] == pytest.approx(0.9182958340544896, abs=1e-12)
    assert q["alpha"] == pytest.approx(2 / 3)
    assert q["average_sentence_length"] == 3
    assert q["unique_trigrams"] == 1.0


def test_h_point_fixed_point():
    assert h_point([3, 2, 1]) == 2
    assert h_point([5]) == 1
    assert h_point([1, 1, 1]) == 1


def test_h_point_interpolates():
    # f(2)=3 above, f(3)=1 below the diagonal
    assert h_point([4, 3, 1]) == pytest.approx((3 * 3 - 1 * 2) / (3 - 2 + 3 - 1))


def test_gini_extremes():
    assert gini([4, 4, 4]) == 0
    assert gini([1]) == 0
    assert gini([0, 0, 9]) == pytest.approx(2 / 3)


def test_difficult_words_threshold():
    text = [["abcdefghij", "abcdefghi", "short"]]
    assert qts_indices(text)["difficult_words"] == 1
    assert qts_indices(text, difficult_length=5)["difficult_words"] == 3


def test_empty_text():
    with pytest.raises(EmptyText):
        qts_indices([[]])


def test_autocorrelation_alternating():
    assert lag_autocorrelation([0.9, 0.1, 0.9, 0.1], 1) == pytest.approx(-1.0)
    assert lag_autocorrelation([0.9, 0.1, 0.9, 0.1], 2) == pytest.approx(1.0)
    assert lag_autocorrelation([0.5, 0.5, 0.5], 1) == 0.0
    assert lag_autocorrelation([0.1, 0.2], 1) == 0.0


def test_qts_vector_layout():
    v = qts_vector(article(assoc=(0.9, 0.1, 0.9, 0.1)))
    assert len(v.values) == 27 == len(VIEW_COLUMNS["sv3"])
    assert v.values[len(QTS_INDICES)] == pytest.approx(-1.0)
    missing = qts_vector(article())
    assert np.all(missing.values[len(QTS_INDICES):] == 0)


def test_topic_vector_errors():
    with pytest.raises(MissingTopics):
        topic_vector(article())
    with pytest.raises(DataError):
        topic_vector(article(topics=(0.5,) * 97))
    bad = [0.0] * 98
    bad[4] = 1.5
    with pytest.raises(OutOfRange) as exc:
        topic_vector(article(topics=tuple(bad)))
    assert exc.value.index == 4
    assert list(topic_vector(article(topics=(0.25,) * 98)).values) == [0.25] * 98


def test_sv1_vector():
    a = ArticleRecord("de", "T", "Q1", (), StructureCounts(characters=10, sections=2), (("x",),))
    vec = article_vector(a, "sv1").values
    assert len(vec) == 11 and vec.sum() == 12


def _store(rows):
    h = FeatureStore()
    for lang, item, vec in rows:
        h.add("sv1", lang, item, vec)
    return h


def test_cosine_examples():
    i, j = make_net(["Q1", "Q2"]), make_net(["Q1", "Q3"], lang="en")
    h = _store([("de", "Q1", [1, 0]), ("de", "Q2", [0, 0]), ("en", "Q1", [1, 0]), ("en", "Q3", [1, 0])])
    assert vertex_cosine_similarity(i, j, alignment_set(i, j), "sv1", h) == pytest.approx(1 / math.sqrt(2))
    empty = make_net([], lang="en")
    assert vertex_cosine_similarity(i, empty, alignment_set(i, empty), "sv1", h) == 0


def test_cosine_identical_is_one():
    i, j = make_net(["Q1", "Q2"]), make_net(["Q1", "Q2"], lang="en")
    h = _store([("de", "Q1", [1, 2]), ("de", "Q2", [3, 1]), ("en", "Q1", [1, 2]), ("en", "Q2", [3, 1])])
    assert vertex_cosine_similarity(i, j, alignment_set(i, j), "sv1", h) == pytest.approx(1.0, abs=1e-12)


def test_cosine_missing_vector():
    i, j = make_net(["Q1"]), make_net(["Q1"], lang="en")
    with pytest.raises(MissingVector):
        vertex_cosine_similarity(i, j, alignment_set(i, j), "sv1", _store([("de", "Q1", [1])]))


def test_cosine_rejects_foreign_pair():
    i, j = make_net(["Q1"]), make_net(["Q1"], lang="en")
    h = _store([("de", "Q1", [1]), ("en", "Q1", [1])])
    with pytest.raises(DataError):
        vertex_cosine_similarity(i, j, AlignmentSet(frozenset({("Q9", "Q1")})), "sv1", h)


vec3 = st.lists(st.floats(0, 10, allow_nan=False), min_size=3, max_size=3)
ivec3 = st.lists(st.integers(0, 10), min_size=3, max_size=3)


@settings(max_examples=100)
@given(st.lists(st.tuples(vec3, vec3), min_size=1, max_size=5), st.floats(0.1, 50))
def test_cosine_scale_invariant_and_bounded(pairs, scale):
    items = [f"Q{k}" for k in range(len(pairs))]
    i, j = make_net(items), make_net(items, lang="en")
    h = _store([("de", q, a) for q, (a, _) in zip(items, pairs)] + [("en", q, b) for q, (_, b) in zip(items, pairs)])
    hs = _store([("de", q, np.array(a) * scale) for q, (a, _) in zip(items, pairs)]
                + [("en", q, b) for q, (_, b) in zip(items, pairs)])
    al = alignment_set(i, j)
    base = vertex_cosine_similarity(i, j, al, "sv1", h)
    assert -1 <= base <= 1
    assert vertex_cosine_similarity(i, j, al, "sv1", hs) == pytest.approx(base, abs=1e-9)
    assert vertex_cosine_similarity(j, i, al.inverse(), "sv1", h) == pytest.approx(base, abs=1e-12)


@settings(max_examples=100)
@given(st.integers(1, 30), st.integers(1, 5))
def test_equifrequent_entropy(types, reps):
    tokens = [f"w{k}" for k in range(types)] * reps
    q = qts_indices([tokens])
    assert q["entropy"] == pytest.approx(math.log2(types), abs=1e-12)
    assert q["gini"] == pytest.approx(0.0, abs=1e-12)


words = st.text("abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=12)


@settings(max_examples=200)
@given(st.lists(st.lists(words, min_size=1, max_size=15), min_size=1, max_size=6))
def test_indices_finite_and_in_range(sentences):
    q = qts_indices(sentences)
    assert all(math.isfinite(v) for v in q.values())
    for name in ("type_token_ratio", "hapax_percentage", "repeat_rate", "alpha", "unique_trigrams",
                 "thematic_concentration", "secondary_thematic_concentration"):
        assert 0 <= q[name] <= 1 + 1e-12, name
    assert 0 <= q["gini"] < 1
    assert q["h_point"] >= 1


@settings(max_examples=100)
@given(st.lists(st.floats(0, 1), min_size=0, max_size=30), st.integers(1, 10))
def test_autocorrelation_bounded(series, lag):
    v = lag_autocorrelation(series, lag)
    assert math.isfinite(v) and -1 - 1e-9 <= v <= 1 + 1e-9


def test_feature_csv_roundtrip(tmp_path):
    h = FeatureStore()
    h.add("sv1", "de", "Q2", [0.1 + 0.2] + [1.0] * 10)
    h.add("sv1", "de", "Q1", [1 / 3] * 11)
    write_feature_csv(h, "sv1", "de", tmp_path / "f.csv")
    back = FeatureStore()
    read_feature_csv(back, "sv1", "de", tmp_path / "f.csv")
    assert [r[0] for r in back.rows("sv1", "de")] == ["Q1", "Q2"]
    assert back.get("sv1", "de", "Q2")[0] == 0.1 + 0.2


def test_cosine_single_node():
    i, j = make_net(["Q1"]), make_net(["Q1"], lang="en")
    h = _store([("de", "Q1", [1, 1]), ("en", "Q1", [1, 0])])
    assert vertex_cosine_similarity(i, j, alignment_set(i, j), "sv1", h) == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_sv1_layout_identity():
    counts = (100, 3, 3, 1, 5, 2, 1, 0, 0, 4, 2)
    s = StructureCounts(*counts)
    a = ArticleRecord("de", "T", "Q1", (), s, (("x",),))
    assert tuple(article_vector(a, "sv1").values) == counts
    assert not article_vector(ArticleRecord("de", "T", "Q1", (), StructureCounts(), (("x",),)), "sv1").values.any()


def test_one_hot_topic():
    e7 = tuple(1.0 if k == 7 else 0.0 for k in range(98))
    assert tuple(topic_vector(article(topics=e7)).values) == e7


def test_assoc_series_must_be_probabilities():
    with pytest.raises(OutOfRange):
        qts_vector(article(assoc=(1.0, -1.0, 1.0, -1.0)))


@settings(max_examples=100)
@given(st.lists(st.tuples(ivec3, ivec3), min_size=1, max_size=4), ivec3)
def test_unaligned_vertex_damps(pairs, extra):
    if sum(extra) == 0:
        extra = [1.0, 0.0, 0.0]
    items = [f"Q{k}" for k in range(len(pairs))]
    rows = [("de", q, a) for q, (a, _) in zip(items, pairs)] + [("en", q, b) for q, (_, b) in zip(items, pairs)]
    i, j = make_net(items), make_net(items, lang="en")
    al = alignment_set(i, j)
    before = vertex_cosine_similarity(i, j, al, "sv1", _store(rows))
    grown = make_net(items + ["Q99"])
    after = vertex_cosine_similarity(grown, j, al, "sv1", _store(rows + [("de", "Q99", extra)]))
    if before > 0:
        assert after < before
    else:
        assert after == before == 0
