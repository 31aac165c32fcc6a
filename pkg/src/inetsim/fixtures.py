"""Synthetic miniature corpora with controllable overlap.

A fixture has one field-of-science root ``Q1`` with a sub-field ``Q2``;
area seeds are studied either by the root or by the sub-field, so area
discovery needs the hierarchy expansion. Every language covers a subset of
each area's members; arcs are drawn once per area and inherited by every
language that covers both endpoints (``arc_regime="shared"``) or drawn per
language (``"random"``).

Vector regimes per view:

identical     same vector for an item in every language
proportional  language k scales the base vector (sv1 by k+1, sv2 by 1/(k+1));
              sv3 cannot be scaled and falls back to identical text
orthogonal    language k only fills dimensions d with d % L == k
              (sv3 falls back to random text)
random        independent per language
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .baselines import rng_for
from .errors import ConfigError
from .features import VIEWS
from .ingest import STRUCTURE_FIELDS, TOPIC_DIMENSIONS

LANGUAGE_CODES = (
    "en", "de", "fr", "es", "it", "nl", "pl", "ru", "ja", "zh", "pt", "sv", "uk", "ca", "no",
    "fi", "cs", "hu", "ko", "id", "tr", "ro", "fa", "ar", "da", "eo", "sr", "lt", "sk", "he",
    "ms", "bg", "sl", "vo", "hi",
)
REGIMES = ("identical", "proportional", "orthogonal", "random")
ROOT, SUBFIELD = "Q1", "Q2"


@dataclass
class FixtureSpec:
    languages: int = 2
    areas: int = 1
    members_per_area: int = 12
    coverage: float | list = 1.0
    arc_density: float = 0.3
    vectors: dict = field(default_factory=lambda: {v: "identical" for v in VIEWS})
    overlap: str = "shared"  # shared | disjoint | random
    arc_regime: str = "shared"  # shared | random
    empty: list = field(default_factory=list)  # [lang_index, area_index] pairs with no articles
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.languages <= len(LANGUAGE_CODES):
            raise ConfigError(f"languages must be in 1..{len(LANGUAGE_CODES)}")
        if self.areas < 1 or self.members_per_area < 1:
            raise ConfigError("need at least one area with one member")
        for c in self.coverages():
            if not 0.0 <= c <= 1.0:
                raise ConfigError(f"coverage {c} outside [0, 1]")
        if not 0.0 <= self.arc_density <= 1.0:
            raise ConfigError("arc_density outside [0, 1]")
        for view in VIEWS:
            self.vectors.setdefault(view, "identical")
        for view, regime in self.vectors.items():
            if view not in VIEWS or regime not in REGIMES:
                raise ConfigError(f"bad vector regime {view}={regime}")
        if self.overlap not in ("shared", "disjoint", "random"):
            raise ConfigError(f"bad overlap {self.overlap!r}")
        if self.arc_regime not in ("shared", "random"):
            raise ConfigError(f"bad arc_regime {self.arc_regime!r}")
        if self.overlap == "disjoint":
            need = sum(self._block(c) for c in self.coverages())
            if need > self.members_per_area:
                raise ConfigError("disjoint coverage needs more members than the area has")

    def coverages(self) -> list:
        if isinstance(self.coverage, (int, float)):
            return [float(self.coverage)] * self.languages
        if len(self.coverage) != self.languages:
            raise ConfigError("one coverage fraction per language")
        return [float(c) for c in self.coverage]

    def _block(self, c) -> int:
        return int(round(c * self.members_per_area))

    def language_codes(self) -> list:
        return list(LANGUAGE_CODES[: self.languages])


PRESETS = {
    "twins": FixtureSpec(languages=2, members_per_area=10, coverage=1.0, arc_density=0.3),
    "strangers": FixtureSpec(languages=2, members_per_area=10, coverage=0.5, arc_density=0.3,
                             overlap="disjoint"),
    "half_twins": FixtureSpec(languages=2, members_per_area=10, coverage=0.5, arc_density=0.4),
}


def area_seed(a: int) -> str:
    return f"Q{100 + a}"


def member_id(a: int, m: int) -> str:
    return f"Q{10000 + 1000 * a + m}"


def _coverage_sets(spec: FixtureSpec, a: int) -> list:
    members = [member_id(a, m) for m in range(spec.members_per_area)]
    sets = []
    offset = 0
    for k, c in enumerate(spec.coverages()):
        n = spec._block(c)
        if [k, a] in [list(e) for e in spec.empty]:
            sets.append([])
        elif spec.overlap == "shared":
            sets.append(members[:n])
        elif spec.overlap == "disjoint":
            sets.append(members[offset:offset + n])
        else:
            rng = rng_for(spec.seed, "cover", a, k)
            sets.append(sorted(rng.choice(members, size=n, replace=False).tolist()))
        offset += n
    return sets


def _arcs(spec: FixtureSpec, members, *parts) -> set:
    rng = rng_for(spec.seed, "arcs", *parts)
    return {(u, v) for u in members for v in members
            if u != v and rng.random() < spec.arc_density}


def _sv1(spec, item, k, regime):
    rng = rng_for(spec.seed, "sv1", item, k if regime == "random" else -1)
    base = rng.integers(1, 50, size=len(STRUCTURE_FIELDS)) * np.array([100, 1, 1, 1, 5, 2, 1, 1, 1, 3, 1])
    if regime == "proportional":
        base = base * (k + 1)
    elif regime == "orthogonal":
        keep = np.arange(len(base)) % spec.languages == k
        base = np.where(keep, base, 0)
    counts = dict(zip(STRUCTURE_FIELDS, (int(x) for x in base)))
    if counts["toc_depth"] == 0:
        counts["toc_breadth"] = 0
    return counts


def _sv2(spec, item, k, regime):
    rng = rng_for(spec.seed, "sv2", item, k if regime == "random" else -1)
    base = rng.random(TOPIC_DIMENSIONS)
    if regime == "proportional":
        base = base / (k + 1)
    elif regime == "orthogonal":
        base = np.where(np.arange(TOPIC_DIMENSIONS) % spec.languages == k, base, 0.0)
    return [float(x) for x in base]


def _text(spec, item, k, regime):
    rng = rng_for(spec.seed, "sv3", item, k if regime in ("random", "orthogonal") else -1)
    vocab = [f"w{n}" + "x" * int(rng.integers(0, 12)) for n in range(40)]
    weights = 1.0 / np.arange(1, len(vocab) + 1)
    weights /= weights.sum()
    sentences = []
    for _ in range(int(rng.integers(4, 9))):
        length = int(rng.integers(3, 12))
        sentences.append([vocab[t] for t in rng.choice(len(vocab), size=length, p=weights)])
    assoc = [float(x) for x in rng.random(len(sentences) + 8)]
    return sentences, assoc


def build(spec: FixtureSpec):
    """Return (items rows, article rows, expectations) for ``spec``."""
    langs = spec.language_codes()
    items = [
        {"id": ROOT, "claims": []},
        {"id": SUBFIELD, "claims": [{"prop": "P279", "target": ROOT}]},
    ]
    for a in range(spec.areas):
        owner = ROOT if a % 2 == 0 else SUBFIELD
        items[0 if owner == ROOT else 1]["claims"].append({"prop": "P2578", "target": area_seed(a)})
        items.append({"id": area_seed(a), "claims": []})
        for m in range(spec.members_per_area):
            items.append({"id": member_id(a, m), "claims": [{"prop": "P31", "target": area_seed(a)}]})

    articles = []
    cover_by_area = {}
    arcs_by_area = {}
    for a in range(spec.areas):
        covers = _coverage_sets(spec, a)
        cover_by_area[a] = covers
        members = [member_id(a, m) for m in range(spec.members_per_area)]
        master = _arcs(spec, members, a)
        arcs_by_area[a] = []
        for k, lang in enumerate(langs):
            covered = set(covers[k])
            if spec.arc_regime == "shared":
                arcs = {(u, v) for u, v in master if u in covered and v in covered}
            else:
                arcs = _arcs(spec, sorted(covered), a, k)
            arcs_by_area[a].append(arcs)
            for item in covers[k]:
                sentences, assoc = _text(spec, item, k, spec.vectors["sv3"])
                articles.append({
                    "lang": lang,
                    "title": f"{item} ({lang})",
                    "qid": item,
                    "outlinks": sorted(f"{v} ({lang})" for u, v in arcs if u == item),
                    "structure": _sv1(spec, item, k, spec.vectors["sv1"]),
                    "sentences": sentences,
                    "topics": _sv2(spec, item, k, spec.vectors["sv2"]),
                    "assoc": assoc,
                })
    articles.sort(key=lambda r: (r["lang"], r["title"]))
    expected = _expectations(spec, langs, cover_by_area, arcs_by_area)
    return items, articles, expected


def _expectations(spec, langs, cover_by_area, arcs_by_area) -> dict:
    pairs = []
    nonempty = []
    for a in range(spec.areas):
        covers = cover_by_area[a]
        live = [k for k in range(len(langs)) if covers[k]]
        nonempty.append(len(live))
        for x, k in enumerate(live):
            for l in live[x + 1:]:
                vk, vl = set(covers[k]), set(covers[l])
                ak, al = arcs_by_area[a][k], arcs_by_area[a][l]
                forced = {}
                if vk == vl and ak == al:
                    forced.update(ges=1.0, ejs=1.0 if ak else 0.0, deltacon=1.0,
                                  cgs=len(vk) / spec.members_per_area)
                    for view in VIEWS:
                        regime = spec.vectors[view]
                        if regime == "identical" or (regime == "proportional" and view != "sv3"):
                            forced[view] = 1.0
                        elif regime == "orthogonal" and view != "sv3":
                            forced[view] = 0.0
                elif not vk & vl:
                    forced.update(ges=0.0, ejs=0.0, deltacon=0.0, cgs=0.0,
                                  sv1=0.0, sv2=0.0, sv3=0.0)
                for measure, value in sorted(forced.items()):
                    pairs.append({"area": area_seed(a), "measure": measure,
                                  "lang_i": langs[k], "lang_j": langs[l], "value": value})
    return {
        "spec": asdict(spec),
        "languages": langs,
        "areas": [{"id": area_seed(a), "seed": area_seed(a), "member_count": spec.members_per_area}
                  for a in range(spec.areas)],
        "nonempty_ins": nonempty,
        "empty_ins": spec.areas * len(langs) - sum(nonempty),
        "comparisons": 7 * sum(math.comb(L, 2) + L for L in nonempty),
        "pairs": pairs,
    }


def _write_jsonl(rows, path):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def generate(spec: FixtureSpec, out_dir) -> tuple:
    """Write ``items.jsonl``, ``articles.jsonl``, ``expected.json`` and ``config.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    items, articles, expected = build(spec)
    paths = (out / "items.jsonl", out / "articles.jsonl", out / "expected.json")
    _write_jsonl(items, paths[0])
    _write_jsonl(articles, paths[1])
    with open(paths[2], "w", encoding="utf-8") as fh:
        json.dump(expected, fh, sort_keys=True, indent=1)
        fh.write("\n")
    config = {
        "items": "items.jsonl",
        "articles": "articles.jsonl",
        "languages": expected["languages"],
        "roots": [ROOT],
        "seed": spec.seed,
        "out": "out",
    }
    with open(out / "config.json", "w", encoding="utf-8") as fh:
        json.dump(config, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return paths
