# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: all-sources personalized PageRank and the DeltaCon root distance."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


def ppr_affinity(Py_ssize_t n, const long[::1] indptr, const long[::1] indices,
                 double alpha, double eps, long max_iter):
    """Column s of the result is the PPR distribution restarted at vertex s.

    Returns (matrix, worst iteration count); the count is -1 when some column
    did not reach an L1 change below ``eps`` within ``max_iter`` sweeps.
    """
    cdef cnp.ndarray[double, ndim=2, mode="fortran"] out = np.zeros((n, n), dtype=np.float64, order="F")
    cdef double[::1, :] S = out
    cdef double[::1] p = np.zeros(n)
    cdef double[::1] q = np.zeros(n)
    cdef Py_ssize_t s, u, k, it, deg
    cdef double dangling, share, diff
    cdef long worst = 0
    for s in range(n):
        for u in range(n):
            p[u] = 0.0
        p[s] = 1.0
        it = 0
        while True:
            if it >= max_iter:
                worst = -1
                break
            it += 1
            for u in range(n):
                q[u] = 0.0
            dangling = 0.0
            for u in range(n):
                deg = indptr[u + 1] - indptr[u]
                if deg == 0:
                    dangling += p[u]
                else:
                    share = alpha * p[u] / deg
                    for k in range(indptr[u], indptr[u + 1]):
                        q[indices[k]] += share
            q[s] += (1.0 - alpha) + alpha * dangling
            diff = 0.0
            for u in range(n):
                diff += fabs(q[u] - p[u])
                p[u] = q[u]
            if diff < eps:
                break
        if worst >= 0 and it > worst:
            worst = it
        for u in range(n):
            S[u, s] = p[u]
    return out, worst


def root_distance(const double[::1, :] a, const double[::1, :] b):
    """sqrt of the summed squared differences of element-wise square roots."""
    cdef Py_ssize_t n = a.shape[0], m = a.shape[1], i, j
    cdef double acc = 0.0, d
    for j in range(m):
        for i in range(n):
            d = sqrt(a[i, j]) - sqrt(b[i, j])
            acc += d * d
    return sqrt(acc)
