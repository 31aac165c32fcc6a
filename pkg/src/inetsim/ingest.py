"""Readers for the desk-scale dump subsets (``items.jsonl`` / ``articles.jsonl``)."""
from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

from .errors import DataError, DimensionMismatch, MalformedLine, MissingItemId, OutOfRange

log = logging.getLogger(__name__)


class ArcLabel(str, Enum):
    SUBCLASS_OF = "SubclassOf"
    STUDIES = "Studies"
    INSTANCE_OF = "InstanceOf"


PROPERTY_LABELS = {
    "P279": ArcLabel.SUBCLASS_OF,
    "P2578": ArcLabel.STUDIES,
    "P31": ArcLabel.INSTANCE_OF,
}
LABEL_PROPERTIES = {label: prop for prop, label in PROPERTY_LABELS.items()}


@dataclass(frozen=True)
class KnowledgeGraph:
    items: frozenset
    arcs: frozenset  # of (source, ArcLabel, target)
    ignored_claims: int = 0

    def __eq__(self, other):
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return self.items == other.items and self.arcs == other.arcs

    def __hash__(self):
        return hash((self.items, self.arcs))

    def arcs_with(self, label: ArcLabel):
        return [(s, t) for s, lab, t in self.arcs if lab == label]


@dataclass(frozen=True)
class StructureCounts:
    characters: int = 0
    sections: int = 0
    toc_breadth: int = 0
    toc_depth: int = 0
    internal_links: int = 0
    external_links: int = 0
    pictures: int = 0
    tables: int = 0
    authority_links: int = 0
    references: int = 0
    categories: int = 0

    def __post_init__(self):
        for name, value in self.as_dict().items():
            if int(value) != value or value < 0:
                raise DataError(f"structure count {name} must be a non-negative integer, got {value!r}")
        if self.toc_depth == 0 and self.toc_breadth != 0:
            raise DataError("toc_breadth must be 0 when toc_depth is 0")

    def as_dict(self):
        return {name: getattr(self, name) for name in STRUCTURE_FIELDS}


STRUCTURE_FIELDS = (
    "characters", "sections", "toc_breadth", "toc_depth", "internal_links",
    "external_links", "pictures", "tables", "authority_links", "references",
    "categories",
)


@dataclass(frozen=True)
class ArticleRecord:
    language: str
    title: str
    item: str
    outlinks: tuple = ()
    structure: StructureCounts = field(default_factory=StructureCounts)
    sentences: tuple = ()
    topic_vector: tuple | None = None
    assoc_series: tuple | None = None

    def __post_init__(self):
        for k, sentence in enumerate(self.sentences):
            if not sentence:
                raise DataError(f"article {self.title!r}: sentence {k} is empty")


@dataclass
class Corpus:
    articles: dict  # lang -> {title: ArticleRecord}
    arcs: dict  # lang -> frozenset of (title, title)
    dropped_links: int = 0

    @property
    def languages(self):
        return sorted(self.articles)

    def __eq__(self, other):
        if not isinstance(other, Corpus):
            return NotImplemented
        return self.articles == other.articles and self.arcs == other.arcs


TOPIC_DIMENSIONS = 98


def check_probabilities(values):
    for k, v in enumerate(values):
        if not 0.0 <= v <= 1.0:
            raise OutOfRange(k, v)


def check_topic_values(values, title=""):
    if len(values) != TOPIC_DIMENSIONS:
        raise DimensionMismatch(
            f"{title!r}: topic vector has {len(values)} entries, expected {TOPIC_DIMENSIONS}")
    check_probabilities(values)


def _read_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLine(line_no, str(exc)) from None
            if not isinstance(obj, dict):
                raise MalformedLine(line_no, "expected a JSON object")
            yield line_no, obj


def parse_knowledge_graph(path) -> KnowledgeGraph:
    """Read ``items.jsonl`` into a :class:`KnowledgeGraph`.

    Claim targets that have no line of their own are added as bare items.
    Claims with property codes other than P279/P2578/P31 are skipped and
    counted in ``ignored_claims``.
    """
    items = set()
    arcs = set()
    ignored = Counter()
    for line_no, obj in _read_jsonl(path):
        qid = obj.get("id")
        if not isinstance(qid, str) or not qid:
            raise MalformedLine(line_no, "missing 'id'")
        items.add(qid)
        for claim in obj.get("claims", ()):
            try:
                prop, target = claim["prop"], claim["target"]
            except (KeyError, TypeError):
                raise MalformedLine(line_no, "claim needs 'prop' and 'target'") from None
            label = PROPERTY_LABELS.get(prop)
            if label is None:
                ignored[prop] += 1
                continue
            items.add(target)
            arcs.add((qid, label, target))
    n_ignored = sum(ignored.values())
    if n_ignored:
        log.warning("ignored %d claims with unknown properties: %s", n_ignored, dict(ignored))
    return KnowledgeGraph(frozenset(items), frozenset(arcs), n_ignored)


def write_knowledge_graph(g: KnowledgeGraph, path) -> None:
    claims = {qid: [] for qid in g.items}
    for source, label, target in g.arcs:
        claims[source].append((LABEL_PROPERTIES[label], target))
    with open(path, "w", encoding="utf-8") as fh:
        for qid in sorted(claims):
            row = {"id": qid, "claims": [{"prop": p, "target": t} for p, t in sorted(claims[qid])]}
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def _floats(values):
    return None if values is None else tuple(float(v) for v in values)


def article_from_json(obj, line_no=None) -> ArticleRecord:
    title = obj.get("title")
    if not isinstance(title, str):
        raise MalformedLine(line_no, "missing 'title'")
    qid = obj.get("qid")
    if not qid:
        raise MissingItemId(title)
    structure = obj.get("structure") or {}
    unknown = set(structure) - set(STRUCTURE_FIELDS)
    if unknown:
        raise MalformedLine(line_no, f"unknown structure fields {sorted(unknown)}")
    lang = obj.get("lang")
    if not isinstance(lang, str):
        raise MalformedLine(line_no, "missing 'lang'")
    rec = ArticleRecord(
        language=lang,
        title=title,
        item=qid,
        outlinks=tuple(obj.get("outlinks", ())),
        structure=StructureCounts(**structure),
        sentences=tuple(tuple(s) for s in obj.get("sentences", ())),
        topic_vector=_floats(obj.get("topics")),
        assoc_series=_floats(obj.get("assoc")),
    )
    if rec.topic_vector is not None:
        check_topic_values(rec.topic_vector, title)
    if rec.assoc_series is not None:
        check_probabilities(rec.assoc_series)
    return rec


def article_to_json(a: ArticleRecord) -> dict:
    row = {
        "lang": a.language,
        "title": a.title,
        "qid": a.item,
        "outlinks": list(a.outlinks),
        "structure": a.structure.as_dict(),
        "sentences": [list(s) for s in a.sentences],
    }
    if a.topic_vector is not None:
        row["topics"] = list(a.topic_vector)
    if a.assoc_series is not None:
        row["assoc"] = list(a.assoc_series)
    return row


def build_corpus(records: Iterable[ArticleRecord], languages) -> Corpus:
    languages = set(languages)
    if not languages:
        raise DataError("at least one language is required")
    tables = {lang: {} for lang in sorted(languages)}
    for rec in records:
        if rec.language not in languages:
            continue
        if rec.title in tables[rec.language]:
            raise DataError(f"duplicate title {rec.title!r} in language {rec.language!r}")
        tables[rec.language][rec.title] = rec
    arcs = {}
    dropped = 0
    for lang, table in tables.items():
        resolved = set()
        for title in table:
            for target in table[title].outlinks:
                if target in table:
                    resolved.add((title, target))
                else:
                    dropped += 1
        arcs[lang] = frozenset(resolved)
    return Corpus(tables, arcs, dropped)


def parse_corpus(path, languages) -> Corpus:
    """Read ``articles.jsonl`` restricted to ``languages``.

    Outlinks are resolved by exact, case-sensitive title match within the
    article's language; unresolved links are dropped and counted.
    """
    if not languages:
        raise DataError("at least one language is required")
    records = (article_from_json(obj, line_no) for line_no, obj in _read_jsonl(path))
    corpus = build_corpus(records, languages)
    if corpus.dropped_links:
        log.info("dropped %d unresolvable outlinks", corpus.dropped_links)
    return corpus


def file_digest(path: Path | str) -> str:
    import hashlib

    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
