"""Subject areas, item networks and alignment sets.

Subject areas are reached from field-of-science roots: the root's subclass
hierarchy is expanded, ``studies`` targets of all classes in it become area
seeds, and an area's members are the direct instances of its seed. An item
network is one language's article graph restricted to articles about members.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

from .errors import AreaMismatch, DataError, UnknownItem, UnknownLanguage
from .ingest import ArcLabel, Corpus, KnowledgeGraph


@dataclass(frozen=True)
class SubjectArea:
    id: str
    seed: str
    members: frozenset = frozenset()


@dataclass(frozen=True)
class ItemNetwork:
    language: str
    area: str
    vertices: frozenset
    arcs: frozenset

    def __post_init__(self):
        for u, v in self.arcs:
            if u not in self.vertices or v not in self.vertices:
                raise DataError(f"arc ({u}, {v}) leaves the vertex set")

    @property
    def order(self) -> int:
        return len(self.vertices)

    @property
    def size(self) -> int:
        return len(self.arcs)

    def to_json(self) -> dict:
        return {
            "language": self.language,
            "area": self.area,
            "vertices": sorted(self.vertices),
            "arcs": sorted([u, v] for u, v in self.arcs),
        }

    @classmethod
    def from_json(cls, obj) -> "ItemNetwork":
        return cls(obj["language"], obj["area"], frozenset(obj["vertices"]),
                   frozenset((u, v) for u, v in obj["arcs"]))


@dataclass(frozen=True)
class AlignmentSet:
    pairs: frozenset

    def inverse(self) -> "AlignmentSet":
        return AlignmentSet(frozenset((w, v) for v, w in self.pairs))

    def __len__(self):
        return len(self.pairs)


def _require(g: KnowledgeGraph, item):
    if item not in g.items:
        raise UnknownItem(item)


def expand_a_hierarchy(g: KnowledgeGraph, root) -> set:
    """All classes below ``root`` in the subclass-of hierarchy, plus ``root``.

    Wikidata stores ``Q2 subclass-of Q1`` as the arc Q2 -> Q1, so the walk
    from the root downward follows those arcs backwards.
    """
    _require(g, root)
    children = {}
    for sub, sup in g.arcs_with(ArcLabel.SUBCLASS_OF):
        children.setdefault(sup, []).append(sub)
    seen = {root}
    queue = deque([root])
    while queue:
        node = queue.popleft()
        for child in children.get(node, ()):
            if child not in seen:
                seen.add(child)
                queue.append(child)
    return seen


def collect_studies_targets(g: KnowledgeGraph, a_set) -> set:
    a_set = set(a_set)
    if not a_set:
        raise DataError("a_set must be non-empty")
    return {t for s, t in g.arcs_with(ArcLabel.STUDIES) if s in a_set}


def enumerate_candidate_areas(g: KnowledgeGraph, roots) -> list[SubjectArea]:
    """One area seed per item studied anywhere in the expanded root hierarchies.

    Seeds are deduplicated by item id across roots and returned sorted. The
    seeds are not expanded further along their own subclass hierarchy.
    """
    roots = list(roots)
    if not roots:
        raise DataError("at least one root is required")
    seeds = set()
    for root in roots:
        seeds |= collect_studies_targets(g, expand_a_hierarchy(g, root))
    return [SubjectArea(id=s, seed=s) for s in sorted(seeds)]


def resolve_members(g: KnowledgeGraph, seed, area_id=None) -> SubjectArea:
    _require(g, seed)
    members = frozenset(m for m, t in g.arcs_with(ArcLabel.INSTANCE_OF) if t == seed)
    return SubjectArea(id=area_id or seed, seed=seed, members=members)


def induce_item_network(c: Corpus, lang, area: SubjectArea) -> ItemNetwork:
    if lang not in c.articles:
        raise UnknownLanguage(lang)
    table = c.articles[lang]
    kept = {title: rec.item for title, rec in table.items() if rec.item in area.members}
    arcs = frozenset((kept[u], kept[v]) for u, v in c.arcs[lang] if u in kept and v in kept)
    return ItemNetwork(lang, area.id, frozenset(kept.values()), arcs)


def check_same_area(i: ItemNetwork, j: ItemNetwork):
    if i.area != j.area:
        raise AreaMismatch(f"networks belong to different areas: {i.area!r} vs {j.area!r}")


def alignment_set(i: ItemNetwork, j: ItemNetwork) -> AlignmentSet:
    check_same_area(i, j)
    return AlignmentSet(frozenset((q, q) for q in i.vertices & j.vertices))


def areas_to_json(areas) -> list:
    return [{"id": a.id, "seed": a.seed, "member_count": len(a.members)} for a in areas]


def dump_json(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")
