"""Exact triangle enumeration.

Each edge is oriented from the lower to the higher vertex in the total
order (degree, id); a triangle is then reported once, from its lowest
vertex, by intersecting two oriented neighbor lists. Triangles reach the
caller in batches so very large counts never have to be materialized.
"""

from __future__ import annotations

import queue
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numba
import numpy as np

from .graph import Graph

DEFAULT_BATCH = 1 << 20

TriangleSink = Callable[[np.ndarray, np.ndarray], None]


class DegreeLabeledTriangle(NamedTuple):
    d_min: int
    d_mid: int
    d_max: int


class TriangleLimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class TriangleCounts:
    total: int
    per_node: np.ndarray


@numba.njit(cache=True, nogil=True)
def _orient(indptr, indices, degrees):
    n = indptr.size - 1
    optr = np.zeros(n + 1, dtype=np.int64)
    for u in range(n):
        du = degrees[u]
        c = 0
        for i in range(indptr[u], indptr[u + 1]):
            v = indices[i]
            dv = degrees[v]
            if dv > du or (dv == du and v > u):
                c += 1
        optr[u + 1] = optr[u] + c
    oidx = np.empty(optr[n], dtype=indices.dtype)
    for u in range(n):
        du = degrees[u]
        k = optr[u]
        for i in range(indptr[u], indptr[u + 1]):
            v = indices[i]
            dv = degrees[v]
            if dv > du or (dv == du and v > u):
                oidx[k] = v
                k += 1
    return optr, oidx


@numba.njit(cache=True, nogil=True)
def _fill(optr, oidx, start, stop, buf):
    """Write triangles anchored at start, start+1, ... into ``buf``.

    Stops before a vertex whose worst-case output would overflow the buffer;
    returns (rows written, next vertex to process).
    """
    cap = buf.shape[0]
    k = 0
    u = start
    while u < stop:
        lo = optr[u]
        hi = optr[u + 1]
        d = hi - lo
        if k + d * (d - 1) // 2 > cap:
            break
        for i in range(lo, hi):
            v = oidx[i]
            a = lo
            b = optr[v]
            be = optr[v + 1]
            while a < hi and b < be:
                x = oidx[a]
                y = oidx[b]
                if x < y:
                    a += 1
                elif y < x:
                    b += 1
                else:
                    buf[k, 0] = u
                    buf[k, 1] = v
                    buf[k, 2] = x
                    k += 1
                    a += 1
                    b += 1
        u += 1
    return k, u


@numba.njit(cache=True, nogil=True)
def _count(optr, oidx, start, stop, per_node):
    total = 0
    for u in range(start, stop):
        lo = optr[u]
        hi = optr[u + 1]
        for i in range(lo, hi):
            v = oidx[i]
            a = lo
            b = optr[v]
            be = optr[v + 1]
            while a < hi and b < be:
                x = oidx[a]
                y = oidx[b]
                if x < y:
                    a += 1
                elif y < x:
                    b += 1
                else:
                    per_node[u] += 1
                    per_node[v] += 1
                    per_node[x] += 1
                    total += 1
                    a += 1
                    b += 1
    return total


def oriented(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Degree-ordered forward adjacency (each edge kept at its lower endpoint)."""
    return _orient(g.indptr, g.indices, g.degrees)


def _partition(optr: np.ndarray, parts: int) -> list[tuple[int, int]]:
    n = optr.size - 1
    if n == 0:
        return []
    out_deg = np.diff(optr).astype(np.float64)
    work = np.cumsum(out_deg * out_deg + 1.0)
    cuts = np.searchsorted(work, work[-1] * np.arange(1, parts) / parts)
    bounds = np.unique(np.concatenate([[0], cuts, [n]]))
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _ranges_batches(optr, oidx, start, stop, capacity):
    buf = np.empty((capacity, 3), dtype=oidx.dtype)
    u = start
    while u < stop:
        k, u = _fill(optr, oidx, u, stop, buf)
        if k:
            yield buf[:k].copy()


def count_triangles(g: Graph, workers: int = 1) -> TriangleCounts:
    """T and per-node counts without materializing triangles."""
    optr, oidx = oriented(g)
    n = g.node_count
    parts = _partition(optr, max(1, workers) * 4)
    if workers <= 1 or len(parts) <= 1:
        per_node = np.zeros(n, dtype=np.int64)
        total = _count(optr, oidx, 0, n, per_node)
        return TriangleCounts(int(total), per_node)

    def job(rng):
        local = np.zeros(n, dtype=np.int64)
        return _count(optr, oidx, rng[0], rng[1], local), local

    per_node = np.zeros(n, dtype=np.int64)
    total = 0
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for t, local in pool.map(job, parts):
            total += t
            per_node += local
    return TriangleCounts(int(total), per_node)


def enumerate_triangles(g: Graph, sink: TriangleSink | None = None, *,
                        workers: int = 1, batch_size: int = DEFAULT_BATCH,
                        max_triangles: int | None = None) -> TriangleCounts:
    """Deliver every triangle of ``g`` exactly once to ``sink``.

    ``sink(nodes, degrees)`` receives two ``(k, 3)`` arrays per batch: node
    ids and the matching degree triples sorted ascending. Batches are handed
    to the sink from the calling thread only, so the sink need not be
    thread-safe. Batch order depends on ``workers``; the multiset of
    triangles does not.
    """
    optr, oidx = oriented(g)
    n = g.node_count
    deg = g.degrees
    out_deg = np.diff(optr)
    worst = int(out_deg.max()) if n else 0
    capacity = max(batch_size, worst * (worst - 1) // 2, 1)
    per_node = np.zeros(n, dtype=np.int64)
    total = 0

    def deliver(tri):
        nonlocal total
        total += tri.shape[0]
        if max_triangles is not None and total > max_triangles:
            raise TriangleLimitExceeded(
                f"more than {max_triangles} triangles; raise --max-triangles to continue")
        per_node[:] += np.bincount(tri.ravel(), minlength=n)
        if sink is not None:
            sink(tri, np.sort(deg[tri], axis=1))

    parts = _partition(optr, max(1, workers) * 4)
    if workers <= 1 or len(parts) <= 1:
        for tri in _ranges_batches(optr, oidx, 0, n, capacity):
            deliver(tri)
        return TriangleCounts(total, per_node)

    q: queue.Queue = queue.Queue(maxsize=2 * workers)
    done = object()
    stop = threading.Event()
    cursor = iter(parts)
    lock = threading.Lock()

    def worker():
        try:
            while not stop.is_set():
                with lock:
                    rng = next(cursor, None)
                if rng is None:
                    break
                for tri in _ranges_batches(optr, oidx, rng[0], rng[1], capacity):
                    if stop.is_set():
                        break
                    q.put(tri)
        except BaseException as exc:  # surfaced on the consumer side
            q.put(exc)
        finally:
            q.put(done)

    threads = [threading.Thread(target=worker, daemon=True) for _ in range(workers)]
    for t in threads:
        t.start()
    finished = 0
    try:
        while finished < workers:
            item = q.get()
            if item is done:
                finished += 1
            elif isinstance(item, BaseException):
                raise item
            else:
                deliver(item)
    finally:
        stop.set()
        # drain so blocked producers can exit
        while any(t.is_alive() for t in threads):
            try:
                q.get(timeout=0.05)
            except queue.Empty:
                pass
        for t in threads:
            t.join()
    return TriangleCounts(total, per_node)


def count_wedges(g: Graph) -> int:
    d = g.degrees
    return int((d * (d - 1) // 2).sum())


def list_triangles(g: Graph) -> np.ndarray:
    """All triangles as a ``(T, 3)`` array; for small graphs and tests."""
    chunks: list[np.ndarray] = []
    enumerate_triangles(g, lambda nodes, _deg: chunks.append(nodes))
    if not chunks:
        return np.empty((0, 3), dtype=np.int64)
    return np.concatenate(chunks).astype(np.int64)
