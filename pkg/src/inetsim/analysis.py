"""Correlation analytics over similarity matrices and language networks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy import stats

from .errors import DataError, LengthMismatch, TooShort, VertexSetMismatch

SIZE_KINDS = ("min", "max", "sum", "ratio")


@dataclass
class SimilarityMatrix:
    """Language x language similarities of one measure in one area.

    Languages are sorted by IN order (ties by language code), as in the heatmaps.
    """
    area: str
    measure: str
    languages: list
    values: np.ndarray
    orders: dict
    sizes: dict = field(default_factory=dict)

    @classmethod
    def from_results(cls, area, measure, rows, orders, sizes=None):
        """``rows`` yields (lang_i, lang_j, value); missing mirror entries are filled in."""
        langs = sorted(orders, key=lambda lang: (orders[lang], lang))
        pos = {lang: k for k, lang in enumerate(langs)}
        values = np.full((len(langs), len(langs)), np.nan)
        for li, lj, v in rows:
            values[pos[li], pos[lj]] = v
            values[pos[lj], pos[li]] = v
        return cls(area, measure, langs, values, dict(orders), dict(sizes or {}))

    def off_diagonal(self) -> np.ndarray:
        iu = np.triu_indices(len(self.languages), k=1)
        return self.values[iu]


@dataclass
class LanguageNetwork:
    vertices: dict  # lang -> {"order": int, "size": int}
    edges: list  # (lang, lang, weight), lang < lang

    def to_json(self) -> dict:
        return {
            "nodes": [{"id": lang, **attrs} for lang, attrs in sorted(self.vertices.items())],
            "edges": [{"source": a, "target": b, "weight": w} for a, b, w in self.edges],
        }


@dataclass(frozen=True)
class SpearmanResult:
    rho: float
    p: float
    degenerate: bool = False


def size_value(order_i: int, order_j: int, kind: str) -> float:
    lo, hi = min(order_i, order_j), max(order_i, order_j)
    if kind == "min":
        return float(lo)
    if kind == "max":
        return float(hi)
    if kind == "sum":
        return float(order_i + order_j)
    if kind == "ratio":
        if hi == 0:
            raise ZeroDivisionError("ratio of two empty networks")
        return lo / hi
    raise DataError(f"unknown size kind {kind!r}")


def spearman(xs, ys) -> SpearmanResult:
    """Spearman's rho on mid-ranks; p from the t approximation with n-2 df.

    A constant input gives rho = 0, p = 1 and ``degenerate=True``.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if len(x) != len(y):
        raise LengthMismatch(f"{len(x)} != {len(y)}")
    if len(x) < 3:
        raise TooShort("spearman needs at least 3 observations")
    rx, ry = stats.rankdata(x), stats.rankdata(y)
    dx, dy = rx - rx.mean(), ry - ry.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0.0:
        return SpearmanResult(0.0, 1.0, True)
    rho = max(-1.0, min(1.0, float(dx @ dy) / denom))
    df = len(x) - 2
    if abs(rho) == 1.0:
        return SpearmanResult(rho, 0.0)
    t = rho * math.sqrt(df / (1.0 - rho * rho))
    return SpearmanResult(rho, float(2 * stats.t.sf(abs(t), df)))


def measure_ranking_correlation(area_means: dict):
    """Spearman matrix between measures over their per-area mean similarities.

    ``area_means`` maps measure -> sequence of means, one per area, all in the
    same area order. Returns (measures, rho matrix, p matrix).
    """
    measures = list(area_means)
    if len(measures) < 2:
        raise DataError("need at least two measures")
    lengths = {len(v) for v in area_means.values()}
    if len(lengths) != 1:
        raise LengthMismatch("measures cover different areas")
    if lengths.pop() < 3:
        raise TooShort("need at least 3 areas")
    k = len(measures)
    rho = np.eye(k)
    p = np.zeros((k, k))
    for a, b in combinations(range(k), 2):
        r = spearman(area_means[measures[a]], area_means[measures[b]])
        rho[a, b] = rho[b, a] = r.rho
        p[a, b] = p[b, a] = r.p
    return measures, rho, p


def build_language_network(m: SimilarityMatrix, threshold: float) -> LanguageNetwork:
    """Keep edges whose similarity is at least ``threshold`` (ties survive)."""
    vertices = {lang: {"order": int(m.orders.get(lang, 0)), "size": int(m.sizes.get(lang, 0))}
                for lang in m.languages}
    edges = []
    for a, b in combinations(range(len(m.languages)), 2):
        w = float(m.values[a, b])
        if not np.isnan(w) and w >= threshold:
            la, lb = sorted((m.languages[a], m.languages[b]))
            edges.append((la, lb, w))
    edges.sort()
    return LanguageNetwork(vertices, edges)


def strength_centrality(n: LanguageNetwork) -> dict:
    strength = {lang: 0.0 for lang in n.vertices}
    for a, b, w in n.edges:
        strength[a] += w
        strength[b] += w
    return strength


def _centered_distances(x):
    d = np.abs(x[:, None] - x[None, :])
    return d - d.mean(axis=0) - d.mean(axis=1)[:, None] + d.mean()


def distance_correlation(xs, ys) -> float:
    """Sample distance correlation (V-statistic form); 0 if either input is constant."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if len(x) != len(y):
        raise LengthMismatch(f"{len(x)} != {len(y)}")
    if len(x) < 2:
        raise TooShort("distance correlation needs at least 2 observations")
    a, b = _centered_distances(x), _centered_distances(y)
    dvar_x, dvar_y = (a * a).mean(), (b * b).mean()
    if dvar_x <= 0.0 or dvar_y <= 0.0:
        return 0.0
    denom = math.sqrt(dvar_x) * math.sqrt(dvar_y)  # the plain product can underflow
    if denom == 0.0:
        return 0.0
    dcov2 = max((a * b).mean(), 0.0)
    return float(min(1.0, math.sqrt(dcov2 / denom)))


def weighted_distance_correlation(n1: LanguageNetwork, n2: LanguageNetwork, measure_max: float) -> float:
    """dCor of strengths, scaled by observed over maximal total strength.

    The maximum counts every ordered language pair at weight ``measure_max``.
    """
    if set(n1.vertices) != set(n2.vertices):
        raise VertexSetMismatch("language networks cover different languages")
    if measure_max <= 0:
        raise DataError("measure_max must be positive")
    langs = sorted(n1.vertices)
    n = len(langs)
    if n < 2:
        return 0.0
    s1, s2 = strength_centrality(n1), strength_centrality(n2)
    total = sum(s1.values()) + sum(s2.values())
    weight = total / (2 * n * (n - 1) * measure_max)
    if weight == 0.0:
        return 0.0
    return weight * distance_correlation([s1[l] for l in langs], [s2[l] for l in langs])


def comparison_count(language_counts, n_measures: int = 7) -> int:
    """Pairwise-plus-self comparisons: n_measures * sum over areas of C(L, 2) + L."""
    return n_measures * sum(math.comb(L, 2) + L for L in language_counts)
