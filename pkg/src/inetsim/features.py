"""Per-article feature vectors and the aligned vertex-set cosine.

Three views are supported:

``sv1``  11 structure counts of the article (length, sections, links, ...).
``sv2``  98 topic membership values, read from the input as given.
``sv3``  17 rank-frequency / information indices of the token stream
         followed by the lag 1..10 autocorrelations of the sentence
         association series.
"""
from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DataError, EmptyText, MissingTopics, MissingVector
from .extract import AlignmentSet, ItemNetwork
from .ingest import STRUCTURE_FIELDS, ArticleRecord, StructureCounts, check_probabilities, check_topic_values

VIEWS = ("sv1", "sv2", "sv3")
VIEW_DIMENSIONS = {"sv1": 11, "sv2": 98, "sv3": 27}
DIFFICULT_WORD_LENGTH = 10
MAX_LAG = 10

QTS_INDICES = (
    "adjusted_modulus",
    "alpha",
    "gini",
    "h_point",
    "entropy",
    "hapax_percentage",
    "curve_length",
    "lambda",
    "vocabulary_richness",
    "repeat_rate",
    "relative_repeat_rate",
    "thematic_concentration",
    "secondary_thematic_concentration",
    "type_token_ratio",
    "unique_trigrams",
    "average_sentence_length",
    "difficult_words",
)
QTS_COLUMNS = QTS_INDICES + tuple(f"autocorr_lag{k}" for k in range(1, MAX_LAG + 1))
VIEW_COLUMNS = {
    "sv1": STRUCTURE_FIELDS,
    "sv2": tuple(f"topic{k:02d}" for k in range(1, 99)),
    "sv3": QTS_COLUMNS,
}


@dataclass(frozen=True)
class FeatureVector:
    view: str
    values: np.ndarray

    def __post_init__(self):
        if self.view not in VIEW_DIMENSIONS:
            raise DataError(f"unknown view {self.view!r}")
        if len(self.values) != VIEW_DIMENSIONS[self.view]:
            raise DataError(f"{self.view} vectors have {VIEW_DIMENSIONS[self.view]} entries")


def lds_vector(s: StructureCounts) -> FeatureVector:
    return FeatureVector("sv1", np.array([getattr(s, f) for f in STRUCTURE_FIELDS], dtype=float))


def topic_vector(a: ArticleRecord) -> FeatureVector:
    if a.topic_vector is None:
        raise MissingTopics(f"article {a.title!r} has no topic vector")
    check_topic_values(a.topic_vector, a.title)
    return FeatureVector("sv2", np.array(a.topic_vector, dtype=float))


# -- rank-frequency indices -------------------------------------------------

def rank_frequencies(tokens) -> list[int]:
    return sorted(Counter(tokens).values(), reverse=True)


def h_point(freqs) -> float:
    """Rank at which rank equals frequency on the rank-frequency profile.

    Without an exact fixed point, interpolate linearly between the last rank
    above the diagonal and the first rank below it. A virtual rank V+1 with
    frequency 0 closes the profile.
    """
    if len(freqs) <= 1:
        return 1.0
    profile = list(freqs) + [0]
    for idx in range(len(profile) - 1):
        r1, f1 = idx + 1, profile[idx]
        if f1 == r1:
            return float(r1)
        r2, f2 = r1 + 1, profile[idx + 1]
        if f1 > r1 and f2 < r2:
            return (f1 * r2 - f2 * r1) / (r2 - r1 + f1 - f2)
    return 1.0  # f(1) < 1 cannot happen for real counts


def gini(freqs) -> float:
    x = np.sort(np.asarray(freqs, dtype=float))
    n = len(x)
    if n <= 1 or x.sum() == 0:
        return 0.0
    ranks = np.arange(1, n + 1)
    return float(np.sum((2 * ranks - n - 1) * x) / (n * x.sum()))


def lag_autocorrelation(series, lag: int) -> float:
    x = np.asarray(series, dtype=float)
    if len(x) - lag < 2:
        return 0.0
    a, b = x[:-lag], x[lag:]
    da, db = a - a.mean(), b - b.mean()
    denom = math.sqrt(float(da @ da) * float(db @ db))
    if denom == 0.0:
        return 0.0
    return float(da @ db) / denom


def qts_indices(sentences, difficult_length=DIFFICULT_WORD_LENGTH) -> dict:
    tokens = [tok for sent in sentences for tok in sent]
    if not sentences or not tokens:
        raise EmptyText("no tokens")
    n = len(tokens)
    freqs = rank_frequencies(tokens)
    v = len(freqs)
    p = np.array(freqs, dtype=float) / n
    rr = float(p @ p)
    h = h_point(freqs)
    curve = sum(math.sqrt(1 + (freqs[k] - freqs[k + 1]) ** 2) for k in range(v - 1))
    ranks = np.arange(1, v + 1)
    f = np.array(freqs, dtype=float)
    trigrams = [tuple(tokens[k:k + 3]) for k in range(n - 2)]
    return {
        "adjusted_modulus": math.sqrt(freqs[0] ** 2 + v ** 2) / h,
        "alpha": freqs[0] / n,
        "gini": gini(freqs),
        "h_point": h,
        "entropy": float(-(p * np.log2(p)).sum()),
        "hapax_percentage": sum(1 for x in freqs if x == 1) / v,
        "curve_length": curve,
        "lambda": curve * math.log10(n) / n,
        "vocabulary_richness": v / math.sqrt(n),
        "repeat_rate": rr,
        "relative_repeat_rate": 0.0 if v == 1 else (1 - math.sqrt(rr)) / (1 - 1 / math.sqrt(v)),
        "thematic_concentration": float(f[ranks < h].sum()) / n,
        "secondary_thematic_concentration": float(f[(ranks >= h) & (ranks <= 2 * h)].sum()) / n,
        "type_token_ratio": v / n,
        "unique_trigrams": len(set(trigrams)) / len(trigrams) if trigrams else 0.0,
        "average_sentence_length": n / len(sentences),
        "difficult_words": float(sum(1 for t in tokens if len(t) >= difficult_length)),
    }


def qts_vector(a: ArticleRecord, difficult_length=DIFFICULT_WORD_LENGTH) -> FeatureVector:
    """17 text indices followed by 10 association autocorrelations.

    Articles without an association series get zeros in the last 10 slots.
    """
    idx = qts_indices(a.sentences, difficult_length)
    values = [idx[name] for name in QTS_INDICES]
    if a.assoc_series is None:
        values.extend([0.0] * MAX_LAG)
    else:
        check_probabilities(a.assoc_series)
        values.extend(lag_autocorrelation(a.assoc_series, k) for k in range(1, MAX_LAG + 1))
    return FeatureVector("sv3", np.array(values, dtype=float))


def article_vector(a: ArticleRecord, view: str) -> FeatureVector:
    if view == "sv1":
        return lds_vector(a.structure)
    if view == "sv2":
        return topic_vector(a)
    if view == "sv3":
        return qts_vector(a)
    raise DataError(f"unknown view {view!r}")


class FeatureStore:
    """Vectors keyed by (view, language, item)."""

    def __init__(self):
        self._data = {}

    def add(self, view, lang, item, values):
        self._data[(view, lang, item)] = np.asarray(values, dtype=float)

    def get(self, view, lang, item) -> np.ndarray:
        try:
            return self._data[(view, lang, item)]
        except KeyError:
            raise MissingVector(f"no {view} vector for {item} in {lang}") from None

    def rows(self, view, lang):
        return sorted((item, vec) for (v, l, item), vec in self._data.items() if v == view and l == lang)

    def __contains__(self, key):
        return key in self._data

    def __len__(self):
        return len(self._data)


def vertex_cosine_similarity(i: ItemNetwork, j: ItemNetwork, al: AlignmentSet, view: str,
                             h: FeatureStore) -> float:
    """Cosine of aligned pairs normalized by the mass of *all* vertices.

    Unaligned vertices only enter the denominator, which damps the value.
    Returns 0 when either vertex set is empty.
    """
    if not i.vertices or not j.vertices:
        return 0.0
    vi = {v: h.get(view, i.language, v) for v in sorted(i.vertices)}
    vj = {w: h.get(view, j.language, w) for w in sorted(j.vertices)}
    num = 0.0
    for v, w in sorted(al.pairs):
        if v not in vi or w not in vj:
            raise DataError(f"aligned pair ({v}, {w}) not in the networks")
        num += float(vi[v] @ vj[w])
    ni = math.sqrt(sum(float(x @ x) for x in vi.values()))
    nj = math.sqrt(sum(float(x @ x) for x in vj.values()))
    if ni == 0.0 or nj == 0.0:
        return 0.0
    return max(-1.0, min(1.0, num / (ni * nj)))


def write_feature_csv(store: FeatureStore, view, lang, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("item",) + tuple(VIEW_COLUMNS[view]))
        for item, vec in store.rows(view, lang):
            w.writerow([item] + [repr(float(x)) for x in vec])


def read_feature_csv(store: FeatureStore, view, lang, path):
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        next(r)
        for row in r:
            store.add(view, lang, row[0], [float(x) for x in row[1:]])
