"""Random lower bounds and the observed upper-bound curve.

Run ``r`` of a bound uses its own generator seeded from ``(seed, r)`` via
BLAKE2b, so results do not depend on run order or on how runs are split
across workers. Generators are numpy PCG64.
"""
from __future__ import annotations

import hashlib
import statistics
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyNetwork, InfeasibleSize, MixedMeasures
from .extract import AlignmentSet, ItemNetwork, alignment_set
from .features import FeatureStore, vertex_cosine_similarity

DEFAULT_RUNS = 100


def derive_seed(seed: int, *parts) -> int:
    key = ":".join(str(p) for p in (seed,) + parts).encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


def rng_for(seed: int, *parts) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(seed, *parts)))


@dataclass(frozen=True)
class BoundsBundle:
    observed: float
    random_samples: tuple
    context: tuple = ()
    seed: int = 0

    @property
    def runs(self) -> int:
        return len(self.random_samples)

    @property
    def random_mean(self) -> float:
        return statistics.fmean(self.random_samples)

    @property
    def random_sd(self) -> float:
        return statistics.pstdev(self.random_samples) if self.runs > 1 else 0.0


@dataclass
class UpperBoundCurve:
    points: dict = field(default_factory=dict)  # min order -> max similarity


def er_randomize(n: ItemNetwork, seed: int) -> ItemNetwork:
    """Uniform random directed graph on the same vertices with the same arc count.

    Self-loops are not allowed. Vertex identities are kept, so the result
    stays aligned with any network the original was aligned with.
    """
    index = sorted(n.vertices)
    k = len(index)
    slots = k * (k - 1)
    if n.size > slots:
        raise InfeasibleSize(f"{n.size} arcs do not fit on {k} vertices without self-loops")
    rng = np.random.Generator(np.random.PCG64(seed))
    picks = rng.choice(slots, size=n.size, replace=False) if n.size else np.empty(0, dtype=np.int64)
    arcs = set()
    for slot in picks.tolist():
        u, r = divmod(slot, k - 1)
        arcs.add((index[u], index[r if r < u else r + 1]))
    return ItemNetwork(n.language, n.area, n.vertices, frozenset(arcs))


def structural_lower_bounds(i: ItemNetwork, j: ItemNetwork, measures: dict, runs: int = DEFAULT_RUNS,
                            seed: int = 0, context=()) -> dict:
    """Like :func:`structural_lower_bound` for several measures on shared randomizations.

    Every measure sees the same ER counterparts in run ``r``. Returns
    name -> :class:`BoundsBundle`; ``context`` is extended by the name.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    observed = {name: fn(i, j).value for name, fn in measures.items()}
    samples = {name: [] for name in measures}
    for r in range(runs):
        ri = er_randomize(i, derive_seed(seed, r, "i"))
        rj = er_randomize(j, derive_seed(seed, r, "j"))
        for name, fn in measures.items():
            samples[name].append(fn(ri, rj).value)
    return {name: BoundsBundle(observed[name], tuple(samples[name]), tuple(context) + (name,), seed)
            for name in measures}


def structural_lower_bound(i: ItemNetwork, j: ItemNetwork, measure, runs: int = DEFAULT_RUNS,
                           seed: int = 0, context=()) -> BoundsBundle:
    """Similarity of ER counterparts of both networks, paired by run.

    ``measure`` maps two networks to a :class:`~inetsim.netsim.SimilarityResult`.
    """
    bundle = structural_lower_bounds(i, j, {"m": measure}, runs, seed)["m"]
    return BoundsBundle(bundle.observed, bundle.random_samples, tuple(context), seed)


def random_alignment(i: ItemNetwork, j: ItemNetwork, k: int, rng) -> AlignmentSet:
    pi = rng.permutation(sorted(i.vertices))
    pj = rng.permutation(sorted(j.vertices))
    return AlignmentSet(frozenset(zip(pi[:k].tolist(), pj[:k].tolist())))


def content_lower_bound(i: ItemNetwork, j: ItemNetwork, view: str, h: FeatureStore,
                        runs: int = DEFAULT_RUNS, seed: int = 0, context=()) -> BoundsBundle:
    """Vertex cosine under random pairings of the same cardinality as the true alignment."""
    if not i.vertices or not j.vertices:
        raise EmptyNetwork("content bounds need two non-empty networks")
    if runs < 1:
        raise ValueError("runs must be >= 1")
    al = alignment_set(i, j)
    observed = vertex_cosine_similarity(i, j, al, view, h)
    samples = []
    for r in range(runs):
        fake = random_alignment(i, j, len(al), rng_for(seed, r))
        samples.append(vertex_cosine_similarity(i, j, fake, view, h))
    return BoundsBundle(observed, tuple(samples), tuple(context), seed)


def upper_bound_curve(results) -> UpperBoundCurve:
    results = list(results)
    if not results:
        raise ValueError("no results")
    if len({r.measure for r in results}) > 1:
        raise MixedMeasures(f"mixed measures: {sorted({r.measure for r in results})}")
    best = defaultdict(lambda: -np.inf)
    for r in results:
        key = min(r.order_i, r.order_j)
        best[key] = max(best[key], r.value)
    return UpperBoundCurve(dict(sorted(best.items())))
