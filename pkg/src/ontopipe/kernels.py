"""Hot numeric kernels with two interchangeable backends.

Everything here works on CSR adjacency (indptr/indices int64 arrays) or plain
float64 matrices, so the same kernel serves directed and undirected traversals:
the caller decides by handing in the CSR it built.

Backends:
  * numba  - @njit(cache=True) compiled loops, the default when numba imports.
  * numpy  - vectorized fallback, no compilation.

Set ONTOPIPE_DISABLE_NUMBA=1 to force the numpy path (useful on platforms
where numba wheels lag, and for the benchmark in benchmarks/bench_kernels.py).
Both backends return identical integer results; float results (logreg_fit)
agree to rounding because the summation order differs.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "BACKEND",
    "IMPLEMENTATIONS",
    "bfs_dists",
    "build_csr",
    "logreg_fit",
    "reachable_pair_count",
]

_Z_CLIP = 500.0  # sigmoid argument clip; exp(500) already saturates float64


def build_csr(n_nodes: int, edges) -> tuple[np.ndarray, np.ndarray]:
    """Build sorted CSR arrays from an iterable of (src, dst) int pairs.

    Neighbor lists come out sorted, so traversal order is deterministic
    regardless of the order edges were collected in.
    """
    e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
    counts = np.zeros(n_nodes + 1, dtype=np.int64)
    if e.shape[0]:
        order = np.lexsort((e[:, 1], e[:, 0]))
        e = e[order]
        np.add.at(counts, e[:, 0] + 1, 1)
    indptr = np.cumsum(counts)
    indices = e[:, 1].copy() if e.shape[0] else np.empty(0, dtype=np.int64)
    return indptr, indices


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------


def _gather_neighbors(indptr, indices, frontier):
    """Concatenate the CSR neighbor slices of every frontier node."""
    starts = indptr[frontier]
    counts = indptr[frontier + 1] - starts
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    cum = np.concatenate((np.zeros(1, dtype=np.int64), np.cumsum(counts)[:-1]))
    pos = np.arange(total, dtype=np.int64) - np.repeat(cum, counts) + np.repeat(starts, counts)
    return indices[pos]


def _bfs_dists_np(indptr, indices, sources, blocked):
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    dist[sources] = 0
    # sources always expand, even when blocked; blocked nodes reached later
    # receive a distance but are never expanded.
    frontier = np.unique(np.asarray(sources, dtype=np.int64))
    d = 0
    while frontier.size:
        neigh = np.unique(_gather_neighbors(indptr, indices, frontier))
        new = neigh[dist[neigh] == -1]
        dist[new] = d + 1
        frontier = new[blocked[new] == 0]
        d += 1
    return dist


def _reachable_pair_count_np(indptr, indices):
    n = indptr.shape[0] - 1
    no_block = np.zeros(n, dtype=np.uint8)
    total = 0
    for s in range(n):
        dist = _bfs_dists_np(indptr, indices, np.array([s], dtype=np.int64), no_block)
        total += int((dist > 0).sum())
    return total


def _logreg_fit_np(X, y, lr, l2, epochs):
    n = X.shape[0]
    w = np.zeros(X.shape[1], dtype=np.float64)
    b = 0.0
    for _ in range(epochs):
        z = np.clip(X @ w + b, -_Z_CLIP, _Z_CLIP)
        err = 1.0 / (1.0 + np.exp(-z)) - y
        w -= lr * (X.T @ err / n + l2 * w)
        b -= lr * (err.sum() / n)
    return w, b


_NUMPY_IMPL = {
    "bfs_dists": _bfs_dists_np,
    "reachable_pair_count": _reachable_pair_count_np,
    "logreg_fit": _logreg_fit_np,
}


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

_DISABLED = os.environ.get("ONTOPIPE_DISABLE_NUMBA", "").strip().lower() in {
    "1",
    "true",
    "yes",
    "on",
}

_NUMBA_IMPL = None
if not _DISABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - exercised only without numba
        njit = None

    if njit is not None:

        @njit(cache=True)
        def _bfs_dists_nb(indptr, indices, sources, blocked):  # pragma: no cover
            n = indptr.shape[0] - 1
            dist = np.full(n, -1, dtype=np.int64)
            queue = np.empty(n, dtype=np.int64)
            tail = 0
            for s in sources:
                if dist[s] != 0:
                    dist[s] = 0
                    queue[tail] = s
                    tail += 1
            head = 0
            while head < tail:
                u = queue[head]
                head += 1
                du = dist[u]
                for k in range(indptr[u], indptr[u + 1]):
                    v = indices[k]
                    if dist[v] == -1:
                        dist[v] = du + 1
                        if blocked[v] == 0:
                            queue[tail] = v
                            tail += 1
            return dist

        @njit(cache=True)
        def _reachable_pair_count_nb(indptr, indices):  # pragma: no cover
            n = indptr.shape[0] - 1
            stamp = np.full(n, -1, dtype=np.int64)
            queue = np.empty(n, dtype=np.int64)
            total = 0
            for s in range(n):
                stamp[s] = s
                queue[0] = s
                head = 0
                tail = 1
                while head < tail:
                    u = queue[head]
                    head += 1
                    for k in range(indptr[u], indptr[u + 1]):
                        v = indices[k]
                        if stamp[v] != s:
                            stamp[v] = s
                            queue[tail] = v
                            tail += 1
                            total += 1
            return total

        @njit(cache=True)
        def _logreg_fit_nb(X, y, lr, l2, epochs):  # pragma: no cover
            n, d = X.shape
            w = np.zeros(d, dtype=np.float64)
            grad = np.zeros(d, dtype=np.float64)
            b = 0.0
            for _ in range(epochs):
                for j in range(d):
                    grad[j] = 0.0
                gb = 0.0
                for i in range(n):
                    z = b
                    for j in range(d):
                        z += X[i, j] * w[j]
                    if z > _Z_CLIP:
                        z = _Z_CLIP
                    elif z < -_Z_CLIP:
                        z = -_Z_CLIP
                    err = 1.0 / (1.0 + np.exp(-z)) - y[i]
                    for j in range(d):
                        grad[j] += X[i, j] * err
                    gb += err
                for j in range(d):
                    w[j] -= lr * (grad[j] / n + l2 * w[j])
                b -= lr * (gb / n)
            return w, b

        _NUMBA_IMPL = {
            "bfs_dists": _bfs_dists_nb,
            "reachable_pair_count": _reachable_pair_count_nb,
            "logreg_fit": _logreg_fit_nb,
        }

IMPLEMENTATIONS: dict[str, dict | None] = {"numpy": _NUMPY_IMPL, "numba": _NUMBA_IMPL}
BACKEND = "numba" if _NUMBA_IMPL is not None else "numpy"
_ACTIVE = _NUMBA_IMPL if _NUMBA_IMPL is not None else _NUMPY_IMPL


def bfs_dists(
    indptr: np.ndarray,
    indices: np.ndarray,
    sources: np.ndarray,
    blocked: np.ndarray | None = None,
) -> np.ndarray:
    """Multi-source BFS distances over a CSR graph; -1 marks unreachable nodes.

    `blocked` nodes can be reached (they get a distance) but are never expanded,
    except when they are sources. Used to route paths around a node layer.
    """
    n = indptr.shape[0] - 1
    sources = np.asarray(sources, dtype=np.int64)
    if blocked is None:
        blocked = np.zeros(n, dtype=np.uint8)
    return _ACTIVE["bfs_dists"](indptr, indices, sources, np.asarray(blocked, dtype=np.uint8))


def reachable_pair_count(indptr: np.ndarray, indices: np.ndarray) -> int:
    """Number of ordered pairs (u, v), u != v, with v reachable from u."""
    return int(_ACTIVE["reachable_pair_count"](indptr, indices))


def logreg_fit(
    X: np.ndarray,
    y: np.ndarray,
    lr: float = 0.1,
    l2: float = 0.01,
    epochs: int = 1000,
) -> tuple[np.ndarray, float]:
    """Full-batch gradient descent for L2-regularized logistic regression.

    Zero-initialized, deterministic. Loss is mean cross-entropy plus
    (l2/2)*||w||^2; the bias is not regularized.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    w, b = _ACTIVE["logreg_fit"](X, y, float(lr), float(l2), int(epochs))
    return np.asarray(w), float(b)
