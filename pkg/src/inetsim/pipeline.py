"""Batch pipeline: extract -> features -> compare -> baseline -> analyze -> report.

Stages communicate only through files in the output directory. Each stage
is keyed by a digest of the configuration and of its input files; a stage
whose key and outputs match the previous manifest is skipped.

``manifest.json`` holds only deterministic content (digests and counters),
so two runs with the same inputs, config and seed produce identical bytes.
Wall-clock timings and cache hits go to ``run_log.json``.
"""
from __future__ import annotations

import csv
import functools
import hashlib
import json
import logging
import math
import re
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations_with_replacement
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from . import __version__, analysis, baselines, extract, features, netsim
from ._backend import BACKEND
from .errors import ConfigError, DataError, EmptyMatrix
from .ingest import file_digest, parse_corpus, parse_knowledge_graph

log = logging.getLogger(__name__)

STRUCTURAL = ("ges", "ejs", "deltacon", "cgs")
CONTENT = ("sv1", "sv2", "sv3")
ALL_MEASURES = ("sv1", "sv2", "sv3", "ges", "deltacon", "ejs", "cgs")
STAGES = ("extract", "features", "compare", "baseline", "analyze", "report")
UPSTREAM = {
    "extract": (),
    "features": ("extract",),
    "compare": ("extract", "features"),
    "baseline": ("extract", "features"),
    "analyze": ("extract", "compare"),
    "report": ("compare",),
}


class StageError(DataError):
    def __init__(self, stage, failures):
        self.stage = stage
        self.failures = failures  # list of (context, message)
        lines = "; ".join(f"{ctx}: {msg}" for ctx, msg in failures[:10])
        more = f" (+{len(failures) - 10} more)" if len(failures) > 10 else ""
        super().__init__(f"stage {stage!r} failed: {lines}{more}")


@dataclass
class RunConfig:
    items: str
    articles: str
    languages: list
    roots: list = field(default_factory=list)
    areas: list = field(default_factory=list)  # optional explicit seeds: "Q5" or {"id", "seed"}
    measures: list = field(default_factory=lambda: list(ALL_MEASURES))
    alpha: float = netsim.DEFAULT_ALPHA
    eps: float = netsim.DEFAULT_EPS
    max_iter: int = netsim.DEFAULT_MAX_ITER
    runs: int = baselines.DEFAULT_RUNS
    seed: int = 0
    difficult_word_length: int = features.DIFFICULT_WORD_LENGTH
    out: str = "out"
    jobs: int = 1
    base_dir: str = "."

    def __post_init__(self):
        if not self.languages:
            raise ConfigError("at least one language is required")
        if not self.roots and not self.areas:
            raise ConfigError("give OECD roots or explicit areas")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must lie in (0, 1)")
        if self.eps <= 0 or self.max_iter < 1:
            raise ConfigError("eps must be positive and max_iter >= 1")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        bad = set(self.measures) - set(ALL_MEASURES)
        if bad or not self.measures:
            raise ConfigError(f"unknown measures: {sorted(bad)}")
        self.measures = [m for m in ALL_MEASURES if m in self.measures]
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    def path(self, name) -> Path:
        p = Path(name)
        return p if p.is_absolute() else Path(self.base_dir) / p

    @property
    def out_dir(self) -> Path:
        return self.path(self.out)

    def digest(self) -> str:
        keep = asdict(self)
        for key in ("out", "jobs", "base_dir", "items", "articles"):
            keep.pop(key)
        return _hash_json(keep)


def load_config(path, **overrides) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    raw.setdefault("base_dir", str(Path(path).parent))
    raw.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig(**raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


@dataclass
class RunManifest:
    config_hash: str
    version: str
    backend: str
    stages: dict = field(default_factory=dict)  # name -> {input_digest, outputs, counters}
    status: dict = field(default_factory=dict)  # name -> "computed" | "cached"
    timings: dict = field(default_factory=dict)

    @property
    def counters(self) -> dict:
        merged = {}
        for name in STAGES:
            merged.update(self.stages.get(name, {}).get("counters", {}))
        return merged

    def to_json(self) -> dict:
        return {"config_hash": self.config_hash, "version": self.version, "backend": self.backend,
                "stages": {k: self.stages[k] for k in STAGES if k in self.stages}}


def _hash_json(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()


def _dump(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _fmt(x) -> str:
    return repr(float(x))


def safe_name(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", label)


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


# -- stage: extract ---------------------------------------------------------

def _areas(cfg: RunConfig, g):
    if cfg.areas:
        specs = [a if isinstance(a, dict) else {"id": a, "seed": a} for a in cfg.areas]
    else:
        specs = [{"id": a.id, "seed": a.seed} for a in extract.enumerate_candidate_areas(g, cfg.roots)]
    seen = set()
    out = []
    for spec in specs:
        area_id = safe_name(str(spec.get("id", spec["seed"])))
        if area_id in seen:
            raise ConfigError(f"duplicate area id {area_id!r}")
        seen.add(area_id)
        out.append(extract.resolve_members(g, spec["seed"], area_id))
    return out


def stage_extract(cfg: RunConfig, out: Path) -> tuple:
    g = parse_knowledge_graph(cfg.path(cfg.items))
    corpus = parse_corpus(cfg.path(cfg.articles), cfg.languages)
    areas = _areas(cfg, g)
    files = ["areas.json"]
    _dump(extract.areas_to_json(areas), out / "areas.json")
    empty = 0
    for area in areas:
        for lang in sorted(cfg.languages):
            net = extract.induce_item_network(corpus, lang, area)
            empty += net.order == 0
            name = f"in_{lang}_{area.id}.json"
            _dump(net.to_json(), out / name)
            files.append(name)
    counters = {"dropped_links": corpus.dropped_links, "ignored_claims": g.ignored_claims,
                "empty_ins": empty, "areas": len(areas)}
    return files, counters


def load_areas(out: Path) -> list:
    with open(out / "areas.json", encoding="utf-8") as fh:
        return json.load(fh)


def load_networks(out: Path, area_id, languages) -> dict:
    nets = {}
    for lang in sorted(languages):
        with open(out / f"in_{lang}_{area_id}.json", encoding="utf-8") as fh:
            nets[lang] = extract.ItemNetwork.from_json(json.load(fh))
    return nets


# -- stage: features --------------------------------------------------------

def stage_features(cfg: RunConfig, out: Path) -> tuple:
    views = [m for m in cfg.measures if m in CONTENT]
    corpus = parse_corpus(cfg.path(cfg.articles), cfg.languages)
    areas = load_areas(out)
    wanted = defaultdict(set)
    for area in areas:
        for lang, net in load_networks(out, area["id"], cfg.languages).items():
            wanted[lang] |= net.vertices
    store = features.FeatureStore()
    failures = []
    for lang in sorted(cfg.languages):
        for rec in sorted(corpus.articles[lang].values(), key=lambda r: r.title):
            if rec.item not in wanted[lang]:
                continue
            for view in views:
                try:
                    if view == "sv3":
                        vec = features.qts_vector(rec, cfg.difficult_word_length)
                    else:
                        vec = features.article_vector(rec, view)
                except DataError as exc:
                    failures.append(((lang, rec.item, view), str(exc)))
                    continue
                if (view, lang, rec.item) not in store:
                    store.add(view, lang, rec.item, vec.values)
    if failures:
        raise StageError("features", failures)
    files = []
    for lang in sorted(cfg.languages):
        for view in views:
            name = f"features_{lang}_{view}.csv"
            features.write_feature_csv(store, view, lang, out / name)
            files.append(name)
    return files, {"feature_rows": len(store)}


def load_features(cfg: RunConfig, out: Path) -> features.FeatureStore:
    store = features.FeatureStore()
    for lang in sorted(cfg.languages):
        for view in (m for m in cfg.measures if m in CONTENT):
            features.read_feature_csv(store, view, lang, out / f"features_{lang}_{view}.csv")
    return store


# -- stage: compare ---------------------------------------------------------

def _similarity(measure, i, j, store, members, cfg_params):
    if measure in CONTENT:
        value = features.vertex_cosine_similarity(i, j, extract.alignment_set(i, j), measure, store)
        return netsim.SimilarityResult(measure, value, i.order, j.order, i.size, j.size,
                                       len(i.vertices & j.vertices))
    return netsim.compare(measure, i, j, shareable=members, **cfg_params)


def _compare_area(task):
    area, nets, store, measures, params = task
    live = [lang for lang in sorted(nets) if nets[lang].order > 0]
    rows, failures = [], []
    for li, lj in combinations_with_replacement(live, 2):
        for measure in measures:
            try:
                r = _similarity(measure, nets[li], nets[lj], store, area["member_count"], params)
            except DataError as exc:
                failures.append(((area["id"], li, lj, measure), str(exc)))
                continue
            rows.append([area["id"], measure, li, lj, _fmt(r.value), r.order_i, r.order_j,
                         r.size_i, r.size_j, r.shared_vertices])
    return rows, failures, len(live)


SIMILARITY_HEADER = ["area", "measure", "lang_i", "lang_j", "value", "order_i", "order_j",
                     "size_i", "size_j", "shared_vertices"]


def _fan_out(fn, tasks, jobs):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def _params(cfg):
    return {"alpha": cfg.alpha, "eps": cfg.eps, "max_iter": cfg.max_iter}


def stage_compare(cfg: RunConfig, out: Path) -> tuple:
    store = load_features(cfg, out)
    areas = load_areas(out)
    tasks = [(a, load_networks(out, a["id"], cfg.languages), store, cfg.measures, _params(cfg))
             for a in areas]
    rows, failures, live_counts = [], [], []
    for r, f, n_live in _fan_out(_compare_area, tasks, cfg.jobs):
        rows.extend(r)
        failures.extend(f)
        live_counts.append(n_live)
    if failures:
        raise StageError("compare", failures)
    _write_csv(out / "similarities.csv", SIMILARITY_HEADER, rows)
    return ["similarities.csv"], {"comparisons": len(rows),
                                  "expected_comparisons": analysis.comparison_count(
                                      live_counts, len(cfg.measures))}


# -- stage: baseline --------------------------------------------------------

def _baseline_area(task):
    area, nets, store, measures, params, runs, seed = task
    live = [lang for lang in sorted(nets) if nets[lang].order > 0]
    structural = {m: _structural_fn(m, area["member_count"], params)
                  for m in measures if m in STRUCTURAL}
    rows, failures = [], []
    for x, li in enumerate(live):
        for lj in live[x + 1:]:
            bundles = {}
            # one set of ER counterparts per pair, shared by all structural measures
            pair_seed = baselines.derive_seed(seed, area["id"], li, lj)
            try:
                if structural:
                    bundles.update(baselines.structural_lower_bounds(
                        nets[li], nets[lj], structural, runs, pair_seed, (area["id"], li, lj)))
                for view in (m for m in measures if m in CONTENT):
                    bundles[view] = baselines.content_lower_bound(
                        nets[li], nets[lj], view, store, runs,
                        baselines.derive_seed(pair_seed, view))
            except DataError as exc:
                failures.append(((area["id"], li, lj), str(exc)))
                continue
            for measure in measures:
                b = bundles[measure]
                rows.append([area["id"], measure, li, lj, _fmt(b.observed), _fmt(b.random_mean),
                             _fmt(b.random_sd), b.runs,
                             pair_seed if measure in STRUCTURAL else baselines.derive_seed(pair_seed, measure)])
    return rows, failures


def _structural_fn(measure, shareable, params):
    return functools.partial(netsim.compare, measure, shareable=shareable, **params)


def stage_baseline(cfg: RunConfig, out: Path) -> tuple:
    store = load_features(cfg, out)
    tasks = [(a, load_networks(out, a["id"], cfg.languages), store, cfg.measures, _params(cfg),
              cfg.runs, cfg.seed) for a in load_areas(out)]
    rows, failures = [], []
    for r, f in _fan_out(_baseline_area, tasks, cfg.jobs):
        rows.extend(r)
        failures.extend(f)
    if failures:
        raise StageError("baseline", failures)
    _write_csv(out / "bounds.csv", ["area", "measure", "lang_i", "lang_j", "observed", "random_mean",
                                    "random_sd", "runs", "seed"], rows)
    return ["bounds.csv"], {"bounds": len(rows), "random_comparisons": len(rows) * cfg.runs}


# -- stage: analyze ---------------------------------------------------------

def load_results(out: Path) -> list:
    rows = []
    for r in _read_csv(out / "similarities.csv"):
        rows.append((r["area"], r["lang_i"], r["lang_j"], netsim.SimilarityResult(
            r["measure"], float(r["value"]), int(r["order_i"]), int(r["order_j"]),
            int(r["size_i"]), int(r["size_j"]), int(r["shared_vertices"]))))
    return rows


def similarity_matrices(out: Path) -> dict:
    """(measure, area) -> SimilarityMatrix built from ``similarities.csv``."""
    grouped = defaultdict(list)
    orders = defaultdict(dict)
    sizes = defaultdict(dict)
    for area, li, lj, r in load_results(out):
        grouped[(r.measure, area)].append((li, lj, r.value))
        orders[area][li], orders[area][lj] = r.order_i, r.order_j
        sizes[area][li], sizes[area][lj] = r.size_i, r.size_j
    return {key: analysis.SimilarityMatrix.from_results(key[1], key[0], rows, orders[key[1]],
                                                        sizes[key[1]])
            for key, rows in sorted(grouped.items())}


def _extend(net: analysis.LanguageNetwork, languages) -> analysis.LanguageNetwork:
    vertices = {lang: net.vertices.get(lang, {"order": 0, "size": 0}) for lang in languages}
    return analysis.LanguageNetwork(vertices, net.edges)


def stage_analyze(cfg: RunConfig, out: Path) -> tuple:
    results = load_results(out)
    matrices = similarity_matrices(out)
    area_ids = [a["id"] for a in load_areas(out)]
    measures = [m for m in cfg.measures if any(k[0] == m for k in matrices)]
    files = []

    off = defaultdict(list)  # (measure, area) -> [(lang_i, lang_j, result)]
    for area, li, lj, r in results:
        if li != lj:
            off[(r.measure, area)].append((li, lj, r))

    for measure in measures:
        curve_rows = []
        for area in area_ids:
            pts = sorted((min(r.order_i, r.order_j), r.value, li, lj) for li, lj, r in off[(measure, area)])
            name = f"curves_{measure}_{area}.csv"
            _write_csv(out / name, ["min_order", "similarity", "lang_i", "lang_j"],
                       [[m, _fmt(v), li, lj] for m, v, li, lj in pts])
            files.append(name)
            curve_rows.extend(r for _, _, r in off[(measure, area)])
        name = f"upper_{measure}.csv"
        points = baselines.upper_bound_curve(curve_rows).points if curve_rows else {}
        _write_csv(out / name, ["min_order", "max_similarity"],
                   [[k, _fmt(v)] for k, v in points.items()])
        files.append(name)

    size_rows = []
    for measure in measures:
        for area in area_ids:
            pairs = off[(measure, area)]
            if len(pairs) < 3:
                continue
            sims = [r.value for _, _, r in pairs]
            for kind in analysis.SIZE_KINDS:
                sizes = [analysis.size_value(r.order_i, r.order_j, kind) for _, _, r in pairs]
                s = analysis.spearman(sizes, sims)
                size_rows.append([area, measure, kind, _fmt(s.rho), _fmt(s.p), int(s.degenerate),
                                  len(pairs), "t-approximation"])
    _write_csv(out / "sizecorr.csv", ["area", "measure", "size", "rho", "p", "degenerate", "n",
                                      "p_method"], size_rows)
    files.append("sizecorr.csv")

    usable = [a for a in area_ids if all(off[(m, a)] for m in measures)]
    rank_rows = []
    if len(usable) >= 3 and len(measures) >= 2:
        means = {m: [float(np.mean([r.value for _, _, r in off[(m, a)]])) for a in usable]
                 for m in measures}
        names, rho, p = analysis.measure_ranking_correlation(means)
        for a, ma in enumerate(names):
            for b, mb in enumerate(names):
                rank_rows.append([ma, mb, _fmt(rho[a, b]), _fmt(p[a, b]), len(usable), "t-approximation"])
    _write_csv(out / "rankcorr.csv", ["measure_a", "measure_b", "rho", "p", "areas", "p_method"],
               rank_rows)
    files.append("rankcorr.csv")

    roster = sorted(cfg.languages)
    dcor_counts = 0
    for measure in measures:
        all_off = [r.value for a in area_ids for _, _, r in off[(measure, a)]]
        if not all_off:
            continue
        threshold = float(np.mean(all_off))
        measure_max = max(all_off)
        nets = {}
        for area in area_ids:
            m = matrices.get((measure, area))
            if m is None:
                continue
            net = analysis.build_language_network(m, threshold)
            name = f"langnet_{measure}_{area}.json"
            doc = net.to_json()
            doc.update(area=area, measure=measure, threshold=threshold,
                       strength=analysis.strength_centrality(net))
            _dump(doc, out / name)
            files.append(name)
            nets[area] = _extend(net, roster)
        keys = sorted(nets)
        plain, weighted = [], []
        for a in keys:
            sa = analysis.strength_centrality(nets[a])
            row_p, row_w = [a], [a]
            for b in keys:
                sb = analysis.strength_centrality(nets[b])
                row_p.append(_fmt(analysis.distance_correlation([sa[l] for l in roster],
                                                                [sb[l] for l in roster])
                                  if len(roster) >= 2 else 0.0))
                row_w.append(_fmt(analysis.weighted_distance_correlation(nets[a], nets[b], measure_max)
                                  if measure_max > 0 else 0.0))
                dcor_counts += 1
            plain.append(row_p)
            weighted.append(row_w)
        for name, rows in ((f"dcor_{measure}.csv", plain), (f"dcor_weighted_{measure}.csv", weighted)):
            _write_csv(out / name, ["area"] + keys, rows)
            files.append(name)
    return files, {"distance_correlations": dcor_counts}


# -- stage: report ----------------------------------------------------------

def _green(v: float) -> str:
    v = 0.0 if math.isnan(v) else min(1.0, max(0.0, v))
    r = round(255 * (1 - v))
    g = round(255 - 127 * v)
    return f"#{r:02x}{g:02x}{r:02x}"


def render_heatmap(m: analysis.SimilarityMatrix, path) -> None:
    """Standalone SVG heatmap: white (0) to green (1), axes sorted by IN order."""
    n = len(m.languages)
    if n == 0:
        raise EmptyMatrix(f"no languages for {m.measure}/{m.area}")
    cell, margin = 24, 48
    width = height = margin + n * cell + 8
    meta = {"area": m.area, "measure": m.measure, "languages": m.languages,
            "orders": [m.orders[lang] for lang in m.languages],
            "values": [[None if math.isnan(x) else float(x) for x in row] for row in m.values]}
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>{escape(m.measure)} / {escape(m.area)}</title>",
        f"<metadata>{escape(json.dumps(meta, sort_keys=True))}</metadata>",
        '<g font-family="sans-serif" font-size="10">',
    ]
    for k, lang in enumerate(m.languages):
        pos = margin + k * cell + cell // 2
        out.append(f'<text x="{margin - 4}" y="{pos + 3}" text-anchor="end">{escape(lang)}</text>')
        out.append(f'<text x="{pos}" y="{margin - 6}" text-anchor="middle">{escape(lang)}</text>')
    for a in range(n):
        for b in range(n):
            v = float(m.values[a, b])
            label = "nan" if math.isnan(v) else repr(v)
            out.append(f'<rect x="{margin + b * cell}" y="{margin + a * cell}" width="{cell}" '
                       f'height="{cell}" fill="{_green(v)}" data-value="{label}"/>')
    out.append("</g>")
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def stage_report(cfg: RunConfig, out: Path) -> tuple:
    files = []
    for (measure, area), m in similarity_matrices(out).items():
        name = f"heatmap_{measure}_{area}.svg"
        render_heatmap(m, out / name)
        files.append(name)
    return files, {"heatmaps": len(files)}


STAGE_FUNCS = {
    "extract": stage_extract,
    "features": stage_features,
    "compare": stage_compare,
    "baseline": stage_baseline,
    "analyze": stage_analyze,
    "report": stage_report,
}


# -- driver -----------------------------------------------------------------

def _load_manifest(out: Path) -> dict:
    try:
        with open(out / "manifest.json", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError):
        return {}


def _input_digest(cfg: RunConfig, stage: str, manifest: RunManifest) -> str:
    payload = {"stage": stage, "config": manifest.config_hash, "version": manifest.version,
               "backend": manifest.backend, "upstream": {}}
    if stage in ("extract", "features"):
        payload["articles"] = file_digest(cfg.path(cfg.articles))
    if stage == "extract":
        payload["items"] = file_digest(cfg.path(cfg.items))
    for up in UPSTREAM[stage]:
        entry = manifest.stages.get(up)
        if entry is None:
            raise DataError(f"stage {stage!r} needs {up!r} outputs; run it first")
        payload["upstream"][up] = entry["outputs"]
    return _hash_json(payload)


def _outputs_intact(out: Path, outputs: dict) -> bool:
    return all((out / name).is_file() and file_digest(out / name) == digest
               for name, digest in outputs.items())


def run(cfg: RunConfig, stages=STAGES) -> RunManifest:
    """Run ``stages`` in order, reusing cached stage outputs where digests match."""
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    previous = _load_manifest(out)
    manifest = RunManifest(cfg.digest(), __version__, BACKEND)
    if previous.get("config_hash") == manifest.config_hash and previous.get("backend") == BACKEND:
        manifest.stages = dict(previous.get("stages", {}))
    for stage in stages:
        key = _input_digest(cfg, stage, manifest)
        prior = manifest.stages.get(stage)
        if prior and prior.get("input_digest") == key and _outputs_intact(out, prior["outputs"]):
            manifest.status[stage] = "cached"
            manifest.timings[stage] = 0.0
            log.info("stage %s: cached", stage)
            continue
        started = time.perf_counter()
        try:
            files, counters = STAGE_FUNCS[stage](cfg, out)
        except StageError:
            raise
        except DataError as exc:
            raise StageError(stage, [((), str(exc))]) from exc
        manifest.timings[stage] = time.perf_counter() - started
        manifest.status[stage] = "computed"
        manifest.stages[stage] = {
            "input_digest": key,
            "outputs": {name: file_digest(out / name) for name in sorted(files)},
            "counters": counters,
        }
        log.info("stage %s: computed in %.2fs", stage, manifest.timings[stage])
    _dump(manifest.to_json(), out / "manifest.json")
    _dump({"status": manifest.status, "timings": manifest.timings}, out / "run_log.json")
    return manifest
