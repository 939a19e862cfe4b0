"""Simple undirected graphs in compressed sorted-adjacency form.

Graphs are built once from an edge list (symmetrized, self-loops and
parallel edges dropped) and never mutated afterwards, so a single instance
can be shared freely between worker threads.
"""

from __future__ import annotations

import gzip
import io
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, TextIO

import numpy as np
import pandas as pd


class EdgeListError(ValueError):
    """Raised for unreadable or empty edge-list input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphInvariantError(AssertionError):
    pass


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph.

    ``indptr``/``indices`` hold the CSR adjacency; every neighbor list is
    strictly increasing. ``labels`` maps dense node ids back to the ids of
    the source file.
    """

    indptr: np.ndarray
    indices: np.ndarray
    labels: np.ndarray
    degrees: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("indptr", "indices", "labels"):
            getattr(self, name).flags.writeable = False
        deg = np.diff(self.indptr).astype(np.int64)
        deg.flags.writeable = False
        object.__setattr__(self, "degrees", deg)

    @classmethod
    def from_edges(cls, n: int, src, dst, labels=None) -> "Graph":
        """Build from arc arrays over dense ids ``0..n-1``.

        Every arc becomes an undirected edge; loops and repeats are dropped.
        """
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError("node id out of range")
        keep = src != dst
        a = np.concatenate([src[keep], dst[keep]])
        b = np.concatenate([dst[keep], src[keep]])
        codes = np.unique(a * np.int64(n) + b) if a.size else np.empty(0, np.int64)
        rows = codes // n if n else codes
        cols = codes - rows * n
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        index_dtype = np.int32 if n < 2**31 else np.int64
        if labels is None:
            labels = np.arange(n, dtype=np.int64)
        else:
            labels = np.array(labels, dtype=np.int64)
            if labels.shape != (n,):
                raise ValueError("labels must have one entry per node")
        return cls(indptr, cols.astype(index_dtype), labels)

    @property
    def node_count(self) -> int:
        return int(self.indptr.size - 1)

    @property
    def edge_count(self) -> int:
        return int(self.indices.size // 2)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.node_count else 0

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < nbrs.size and nbrs[i] == v)

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Each undirected edge once, as ``(u, v)`` arrays with ``u < v``."""
        rows = np.repeat(np.arange(self.node_count, dtype=np.int64), self.degrees)
        cols = self.indices.astype(np.int64)
        upper = rows < cols
        return rows[upper], cols[upper]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Graph(N={self.node_count}, E={self.edge_count})"


def validate(g: Graph) -> None:
    """Check every structural invariant; raise GraphInvariantError on failure."""
    n = g.node_count
    if g.indptr[0] != 0 or np.any(np.diff(g.indptr) < 0):
        raise GraphInvariantError("indptr is not a valid offset array")
    if g.indices.size != g.indptr[-1]:
        raise GraphInvariantError("indices length does not match indptr")
    if g.indices.size % 2:
        raise GraphInvariantError("odd number of adjacency entries")
    if g.indices.size == 0:
        return
    if g.indices.min() < 0 or g.indices.max() >= n:
        raise GraphInvariantError("neighbor id out of range")
    rows = np.repeat(np.arange(n, dtype=np.int64), g.degrees)
    cols = g.indices.astype(np.int64)
    if np.any(rows == cols):
        raise GraphInvariantError("self-loop present")
    # strictly increasing within each row <=> codes strictly increasing overall
    codes = rows * n + cols
    if np.any(np.diff(codes) <= 0):
        raise GraphInvariantError("neighbor lists not strictly increasing")
    mirrored = np.sort(cols * n + rows)
    if not np.array_equal(codes, mirrored):
        raise GraphInvariantError("adjacency is not symmetric")
    if int(g.degrees.sum()) != 2 * g.edge_count:
        raise GraphInvariantError("degree sum differs from 2E")


def _open_text(source) -> tuple[TextIO, bool]:
    if isinstance(source, (str, os.PathLike)):
        path = Path(source)
        if path.suffix == ".gz":
            return gzip.open(path, "rt", encoding="utf-8"), True
        return open(path, "r", encoding="utf-8"), True
    if isinstance(source, io.TextIOBase):
        return source, False
    # assume a binary stream
    return io.TextIOWrapper(source, encoding="utf-8"), False


def _find_bad_line(lines: Iterable[str]) -> tuple[int, str]:
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 2:
            return lineno, f"expected two node ids, got {line!r}"
        for tok in parts[:2]:
            if not tok.isdigit():
                return lineno, f"invalid node id {tok!r}"
    return 0, ""


def load_edge_list(source: str | os.PathLike | BinaryIO | TextIO,
                   directed_input: bool = False) -> Graph:
    """Read a SNAP-style edge list.

    Lines starting with ``#`` are comments; data lines hold two
    non-negative integer ids (further columns are ignored). Arcs are always
    symmetrized, so ``directed_input`` only documents the source; node ids
    are compacted to ``0..N-1`` in ascending label order.
    """
    del directed_input  # both flavours reduce to the same undirected graph
    stream, owned = _open_text(source)
    try:
        text = stream.read()
    finally:
        if owned:
            stream.close()
    try:
        frame = pd.read_csv(io.StringIO(text), sep=r"\s+", comment="#", header=None,
                            usecols=[0, 1], dtype=np.int64, engine="c")
    except pd.errors.EmptyDataError:
        raise EdgeListError("no edges in input") from None
    except (ValueError, pd.errors.ParserError, OverflowError):
        lineno, msg = _find_bad_line(text.splitlines())
        if lineno:
            raise EdgeListError(msg, lineno) from None
        raise EdgeListError("unparseable edge list") from None
    if frame.empty:
        raise EdgeListError("no edges in input")
    src = frame[0].to_numpy()
    dst = frame[1].to_numpy()
    if src.min() < 0 or dst.min() < 0:
        lineno, msg = _find_bad_line(text.splitlines())
        raise EdgeListError(msg or "negative node id", lineno or None)
    labels, inverse = np.unique(np.concatenate([src, dst]), return_inverse=True)
    m = src.size
    return Graph.from_edges(labels.size, inverse[:m], inverse[m:], labels=labels)


def write_edge_list(g: Graph, target: str | os.PathLike | TextIO) -> None:
    """Write ``g`` in SNAP form using the original labels.

    Degree-0 nodes are written as ``u u`` so a reload keeps them (the loader
    retains nodes that only appear in self-loops).
    """
    u, v = g.edges()
    isolated = np.flatnonzero(g.degrees == 0)
    lab = g.labels
    lines = [f"# Undirected graph\n# Nodes: {g.node_count} Edges: {g.edge_count}\n"]
    body = np.empty((u.size + isolated.size, 2), dtype=np.int64)
    body[:u.size, 0] = lab[u]
    body[:u.size, 1] = lab[v]
    body[u.size:, 0] = lab[isolated]
    body[u.size:, 1] = lab[isolated]
    buf = io.StringIO()
    np.savetxt(buf, body, fmt="%d", delimiter=" ")
    lines.append(buf.getvalue())
    data = "".join(lines)
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
    else:
        target.write(data)


@dataclass(frozen=True)
class DegreeHistogram:
    degrees: np.ndarray
    counts: np.ndarray

    def __iter__(self):
        return iter(zip(self.degrees.tolist(), self.counts.tolist()))

    def as_dict(self) -> dict[int, int]:
        return dict(self)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def degree_histogram(g: Graph) -> DegreeHistogram:
    degrees, counts = np.unique(g.degrees, return_counts=True)
    return DegreeHistogram(degrees.astype(np.int64), counts.astype(np.int64))


def density(g: Graph) -> float:
    if g.node_count == 0:
        raise ValueError("density of an empty graph is undefined")
    return g.edge_count / g.node_count
