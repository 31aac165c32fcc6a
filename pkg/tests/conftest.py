import json

import numpy as np
import pytest

from inetsim.extract import ItemNetwork


def make_net(vertices, arcs=(), lang="de", area="A"):
    return ItemNetwork(lang, area, frozenset(vertices), frozenset(arcs))


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write((row if isinstance(row, str) else json.dumps(row)) + "\n")
    return path


def dense_ppr(index, arcs, alpha):
    """Solve (I - alpha M_s) p = (1 - alpha) e_s for every source s directly."""
    n = len(index)
    pos = {v: k for k, v in enumerate(index)}
    out = np.zeros((n, n))
    deg = np.zeros(n)
    for u, _ in arcs:
        deg[pos[u]] += 1
    W = np.zeros((n, n))
    for u, v in arcs:
        W[pos[v], pos[u]] += 1.0 / deg[pos[u]]
    for s in range(n):
        M = W.copy()
        M[s, deg == 0] += 1.0
        e = np.zeros(n)
        e[s] = 1.0
        out[:, s] = np.linalg.solve(np.eye(n) - alpha * M, (1 - alpha) * e)
    return out


def random_digraph(rng, order, density, lang="de"):
    vertices = [f"Q{k}" for k in range(order)]
    arcs = {(u, v) for u in vertices for v in vertices if u != v and rng.random() < density}
    return make_net(vertices, arcs, lang=lang)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def run_fixture(spec, root, **overrides):
    """Generate ``spec`` under ``root`` and run the whole pipeline on it."""
    from inetsim import fixtures, pipeline

    fixtures.generate(spec, root)
    overrides.setdefault("runs", 5)
    cfg = pipeline.load_config(root / "config.json", **overrides)
    return cfg, pipeline.run(cfg)


def read_similarities(out):
    import csv

    with open(out / "similarities.csv", newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))
