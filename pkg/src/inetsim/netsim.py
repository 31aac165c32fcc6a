"""Graph similarity measures over item networks of the same subject area.

``ges``       overlap of vertex and arc sets (edit-distance based, alignment by item id)
``ejs``       Jaccard index of the arc sets of the intersection-induced subgraphs
``deltacon``  DeltaCon with personalized-PageRank affinities, on the same subgraphs
``cgs``       incidence-vector cosine damped by the share of covered area members

``ejs`` and ``deltacon`` ignore unaligned vertices; ``ges`` and ``cgs`` are
penalized by them.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import DataError, NonConvergence, UnknownVertex
from .extract import ItemNetwork, check_same_area

MEASURES = ("ges", "ejs", "deltacon", "cgs")
DEFAULT_ALPHA = 0.85
DEFAULT_EPS = 1e-10
DEFAULT_MAX_ITER = 1000


@dataclass(frozen=True)
class SimilarityResult:
    measure: str
    value: float
    order_i: int
    order_j: int
    size_i: int
    size_j: int
    shared_vertices: int


@dataclass(frozen=True)
class AffinityMatrix:
    index: tuple
    entries: np.ndarray  # column v = PPR distribution restarted at v


def _result(measure, value, i, j):
    return SimilarityResult(measure, float(value), i.order, j.order, i.size, j.size,
                            len(i.vertices & j.vertices))


def induce(n: ItemNetwork, vertices) -> ItemNetwork:
    vertices = frozenset(vertices)
    arcs = frozenset((u, v) for u, v in n.arcs if u in vertices and v in vertices)
    return ItemNetwork(n.language, n.area, n.vertices & vertices, arcs)


def induced_intersection(i: ItemNetwork, j: ItemNetwork):
    check_same_area(i, j)
    shared = i.vertices & j.vertices
    return induce(i, shared), induce(j, shared)


def ges(i: ItemNetwork, j: ItemNetwork) -> SimilarityResult:
    check_same_area(i, j)
    union = len(i.vertices | j.vertices) + len(i.arcs | j.arcs)
    if union == 0:
        return _result("ges", 1.0, i, j)
    diff = len(i.vertices ^ j.vertices) + len(i.arcs ^ j.arcs)
    return _result("ges", 1.0 - diff / union, i, j)


def ejs(i: ItemNetwork, j: ItemNetwork) -> SimilarityResult:
    a, b = induced_intersection(i, j)
    union = a.arcs | b.arcs
    value = len(a.arcs & b.arcs) / len(union) if union else 0.0
    return _result("ejs", value, i, j)


def _csr(index, arcs):
    pos = {v: k for k, v in enumerate(index)}
    n = len(index)
    targets = [[] for _ in range(n)]
    for u, v in arcs:
        targets[pos[u]].append(pos[v])
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(t) for t in targets])
    indices = np.array([t for ts in targets for t in sorted(ts)], dtype=np.int64)
    return indptr, indices


def _check_params(alpha, eps):
    if not 0.0 < alpha < 1.0:
        raise DataError(f"alpha must lie in (0, 1), got {alpha}")
    if eps <= 0:
        raise DataError(f"eps must be positive, got {eps}")


def affinity_matrix(vertices, arcs, alpha=DEFAULT_ALPHA, eps=DEFAULT_EPS,
                    max_iter=DEFAULT_MAX_ITER) -> AffinityMatrix:
    """PPR restarted at every vertex in turn; dangling mass returns to the source."""
    _check_params(alpha, eps)
    index = tuple(sorted(vertices))
    indptr, indices = _csr(index, arcs)
    entries, worst = _backend.ppr_affinity(len(index), indptr, indices, float(alpha), float(eps),
                                           int(max_iter))
    if worst < 0:
        raise NonConvergence(f"PPR did not converge within {max_iter} iterations")
    return AffinityMatrix(index, np.asarray(entries))


def personalized_pagerank(n: ItemNetwork, source, alpha=DEFAULT_ALPHA, eps=DEFAULT_EPS,
                          max_iter=DEFAULT_MAX_ITER) -> dict:
    """Stationary distribution of a walk on ``n`` that restarts at ``source``.

    Each step follows a uniformly chosen out-link with probability ``alpha``
    and jumps back to ``source`` otherwise; from a vertex without out-links the
    walker always jumps back. Iterates until the L1 change drops below ``eps``.
    """
    _check_params(alpha, eps)
    if source not in n.vertices:
        raise UnknownVertex(f"{source!r} is not a vertex of the network")
    index = tuple(sorted(n.vertices))
    indptr, indices = _csr(index, n.arcs)
    s = index.index(source)
    deg = np.diff(indptr)
    p = np.zeros(len(index))
    p[s] = 1.0
    for _ in range(max_iter):
        q = np.zeros_like(p)
        for u in range(len(index)):
            if deg[u]:
                q[indices[indptr[u]:indptr[u + 1]]] += alpha * p[u] / deg[u]
        q[s] += (1.0 - alpha) + alpha * p[deg == 0].sum()
        done = np.abs(q - p).sum() < eps
        p = q
        if done:
            return {v: float(p[k]) for k, v in enumerate(index)}
    raise NonConvergence(f"PPR did not converge within {max_iter} iterations")


def deltacon_distance(i: ItemNetwork, j: ItemNetwork, alpha=DEFAULT_ALPHA, eps=DEFAULT_EPS,
                      max_iter=DEFAULT_MAX_ITER) -> float:
    """Root distance between the PPR affinity matrices of the two union graphs."""
    vertices = i.vertices | j.vertices
    si = affinity_matrix(vertices, i.arcs, alpha, eps, max_iter)
    sj = affinity_matrix(vertices, j.arcs, alpha, eps, max_iter)
    return _backend.root_distance(np.asfortranarray(si.entries), np.asfortranarray(sj.entries))


def deltacon(i: ItemNetwork, j: ItemNetwork, alpha=DEFAULT_ALPHA, eps=DEFAULT_EPS,
             max_iter=DEFAULT_MAX_ITER) -> SimilarityResult:
    a, b = induced_intersection(i, j)
    if not a.vertices:
        return _result("deltacon", 0.0, i, j)
    d = deltacon_distance(a, b, alpha, eps, max_iter)
    return _result("deltacon", 1.0 / (1.0 + d), i, j)


def cgs(i: ItemNetwork, j: ItemNetwork, shareable: int) -> SimilarityResult:
    """Cosine of vertex+arc incidence vectors, times shared vertices / ``shareable``.

    ``shareable`` is the member count of the subject area.
    """
    check_same_area(i, j)
    if shareable <= 0:
        raise DataError("shareable must be positive")
    if shareable < max(i.order, j.order):
        raise DataError(f"shareable={shareable} is smaller than a network order")
    if not i.vertices or not j.vertices:
        return _result("cgs", 0.0, i, j)
    shared = len(i.vertices & j.vertices)
    dot = shared + len(i.arcs & j.arcs)
    base = dot / np.sqrt(float((i.order + i.size) * (j.order + j.size)))
    return _result("cgs", base * shared / shareable, i, j)


def compare(measure: str, i: ItemNetwork, j: ItemNetwork, *, shareable=None,
            alpha=DEFAULT_ALPHA, eps=DEFAULT_EPS, max_iter=DEFAULT_MAX_ITER) -> SimilarityResult:
    if measure == "ges":
        return ges(i, j)
    if measure == "ejs":
        return ejs(i, j)
    if measure == "deltacon":
        return deltacon(i, j, alpha, eps, max_iter)
    if measure == "cgs":
        return cgs(i, j, shareable)
    raise DataError(f"unknown structural measure {measure!r}")
