"""numpy implementations of the compiled kernels, used when the extension is absent."""
import numpy as np


def ppr_affinity(n, indptr, indices, alpha, eps, max_iter):
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    deg = np.diff(indptr)
    src = np.repeat(np.arange(n), deg)
    # column-stochastic transition over non-dangling sources
    W = np.zeros((n, n))
    np.add.at(W, (indices, src), 1.0 / deg[src])
    dangling = deg == 0
    eye = np.eye(n)
    P = eye.copy()
    active = np.ones(n, dtype=bool)
    iters = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        cols = np.flatnonzero(active)
        if not len(cols):
            break
        Pa = P[:, cols]
        Q = alpha * (W @ Pa)
        Q[cols, np.arange(len(cols))] += (1.0 - alpha) + alpha * Pa[dangling].sum(axis=0)
        diff = np.abs(Q - Pa).sum(axis=0)
        P[:, cols] = Q
        iters[cols] += 1
        active[cols[diff < eps]] = False
    worst = -1 if active.any() else int(iters.max(initial=0))
    return np.asfortranarray(P), worst


def root_distance(a, b):
    return float(np.sqrt(((np.sqrt(a) - np.sqrt(b)) ** 2).sum()))
