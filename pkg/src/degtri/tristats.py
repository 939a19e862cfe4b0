"""Statistics over degree-labeled triangles.

Everything here is derived from three exact pair-count tables of the
stream of sorted degree triples: (d_min, d_mid), (d_min, d_max) and
(d_mid, d_max). The tables hold integer counts only, so merging partial
tables in any order gives identical results, and bucket medians stay exact
at a memory cost bounded by the number of distinct degree pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .graph import Graph

_SHIFT = np.int64(32)
_LOW = np.int64((1 << 32) - 1)


class EmptyTriangleStream(ValueError):
    pass


class PairCounts:
    """Multiset of integer pairs (a, b), stored as sorted unique codes."""

    def __init__(self):
        self._codes = np.empty(0, dtype=np.int64)
        self._counts = np.empty(0, dtype=np.int64)
        self._pending: list[tuple[np.ndarray, np.ndarray]] = []
        self._pending_rows = 0

    def add(self, a: np.ndarray, b: np.ndarray) -> None:
        codes = (a.astype(np.int64) << _SHIFT) | b.astype(np.int64)
        uniq, cnt = np.unique(codes, return_counts=True)
        self._pending.append((uniq, cnt.astype(np.int64)))
        self._pending_rows += uniq.size
        if self._pending_rows > 4 * max(self._codes.size, 1 << 18):
            self._consolidate()

    def add_counts(self, codes: np.ndarray, counts: np.ndarray) -> None:
        self._pending.append((codes, counts))
        self._pending_rows += codes.size

    def _consolidate(self) -> None:
        if not self._pending:
            return
        codes = np.concatenate([self._codes] + [c for c, _ in self._pending])
        counts = np.concatenate([self._counts] + [k for _, k in self._pending])
        uniq, inv = np.unique(codes, return_inverse=True)
        self._codes = uniq
        # float64 sums of integer counts are exact below 2**53
        self._counts = np.bincount(inv, weights=counts, minlength=uniq.size).astype(np.int64)
        self._pending = []
        self._pending_rows = 0

    def merge(self, other: "PairCounts") -> None:
        other._consolidate()
        self.add_counts(other._codes, other._counts)

    def table(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(a, b, count) arrays sorted by a then b."""
        self._consolidate()
        return self._codes >> _SHIFT, self._codes & _LOW, self._counts.copy()


class TriangleDegreeCounts:
    """Aggregates batches of degree triples; usable directly as a triangle sink."""

    def __init__(self):
        self.min_mid = PairCounts()
        self.min_max = PairCounts()
        self.mid_max = PairCounts()
        self.total = 0

    def add(self, triples) -> None:
        triples = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
        if triples.size == 0:
            return
        triples = np.sort(triples, axis=1)
        lo, mid, hi = triples[:, 0], triples[:, 1], triples[:, 2]
        self.min_mid.add(lo, mid)
        self.min_max.add(lo, hi)
        self.mid_max.add(mid, hi)
        self.total += triples.shape[0]

    def __call__(self, nodes: np.ndarray, degrees: np.ndarray) -> None:
        self.add(degrees)

    def merge(self, other: "TriangleDegreeCounts") -> None:
        self.min_mid.merge(other.min_mid)
        self.min_max.merge(other.min_max)
        self.mid_max.merge(other.mid_max)
        self.total += other.total

    @classmethod
    def from_triples(cls, triples) -> "TriangleDegreeCounts":
        acc = cls()
        if isinstance(triples, np.ndarray):
            acc.add(triples)
            return acc
        batch: list = []
        for t in triples:
            batch.append(tuple(t))
            if len(batch) >= 1 << 16:
                acc.add(batch)
                batch = []
        acc.add(batch)
        return acc


def _as_counts(triangles) -> TriangleDegreeCounts:
    if isinstance(triangles, TriangleDegreeCounts):
        return triangles
    return TriangleDegreeCounts.from_triples(triangles)


@dataclass(frozen=True)
class BucketStats:
    i: int
    size: int
    D1: int
    D2: int
    D3: int


@dataclass(frozen=True)
class RatioAggregate:
    r21_avg: float
    r31_avg: float
    r32_avg: float


def _grouped_lower_median(a, b, cnt):
    """Per distinct ``a``: total count and lower median of ``b`` (rank ceil(k/2))."""
    starts = np.flatnonzero(np.r_[True, a[1:] != a[:-1]])
    keys = a[starts]
    sizes = np.add.reduceat(cnt, starts)
    cum = np.cumsum(cnt)
    before = np.r_[0, cum[starts[1:] - 1]]
    target = before + (sizes + 1) // 2
    pos = np.searchsorted(cum, target, side="left")
    return keys, sizes, b[pos]


def bucket_triangles(triangles) -> list[BucketStats]:
    """Group triangles by minimum degree and take medians of each position.

    Even-sized buckets use the lower median so D2/D3 stay integral degrees.
    """
    acc = _as_counts(triangles)
    if acc.total == 0:
        return []
    a, b, c = acc.min_mid.table()
    keys, sizes, d2 = _grouped_lower_median(a, b, c)
    a3, b3, c3 = acc.min_max.table()
    keys3, _, d3 = _grouped_lower_median(a3, b3, c3)
    assert np.array_equal(keys, keys3)
    return [BucketStats(int(i), int(s), int(i), int(m2), int(m3))
            for i, s, m2, m3 in zip(keys, sizes, d2, d3)]


def _mean_ratio(num, den, cnt, total: int) -> float:
    # exact rational mean: group by denominator, then one Fraction per group
    order = np.argsort(den, kind="stable")
    den, num, cnt = den[order], num[order], cnt[order]
    starts = np.flatnonzero(np.r_[True, den[1:] != den[:-1]])
    weighted = [int(x) for x in np.add.reduceat(num * cnt, starts)] if starts.size else []
    acc = Fraction(0)
    for d, s in zip(den[starts].tolist(), weighted):
        acc += Fraction(s, d)
    return float(acc / total)


def ratio_averages(triangles) -> RatioAggregate:
    acc = _as_counts(triangles)
    if acc.total == 0:
        raise EmptyTriangleStream("ratio averages need at least one triangle")
    a, b, c = acc.min_mid.table()
    r21 = _mean_ratio(b, a, c, acc.total)
    a, b, c = acc.min_max.table()
    r31 = _mean_ratio(b, a, c, acc.total)
    a, b, c = acc.mid_max.table()
    r32 = _mean_ratio(b, a, c, acc.total)
    return RatioAggregate(r21, r31, r32)


def homogeneous_fraction(triangles, threshold: float = 10.0) -> float:
    """Share of triangles with d_max / d_min <= threshold."""
    acc = _as_counts(triangles)
    if acc.total == 0:
        raise EmptyTriangleStream("homogeneous fraction needs at least one triangle")
    a, b, c = acc.min_max.table()
    ok = (b / a) <= threshold
    return int(c[ok].sum()) / acc.total


def top_percentile_participation(g: Graph | None, counts, triangles,
                                 kappa: int | None = None) -> float:
    """Share of triangles containing a vertex of degree above ``kappa``.

    ``kappa`` defaults to the 99th percentile of triangle-participant degrees.
    """
    acc = _as_counts(triangles)
    if acc.total == 0:
        raise EmptyTriangleStream("participation needs at least one triangle")
    if kappa is None:
        from .metrics import triangle_degree_percentiles
        kappa = triangle_degree_percentiles(g, counts, 99)
    _, b, c = acc.min_max.table()
    return int(c[b > kappa].sum()) / acc.total


def cumulative_triangles_by_dmin(buckets: Iterable[BucketStats]) -> list[tuple[int, int]]:
    out = []
    running = 0
    for bk in sorted(buckets, key=lambda s: s.i):
        running += bk.size
        out.append((bk.i, running))
    return out


@dataclass(frozen=True)
class BinnedSeries:
    lo: np.ndarray
    hi: np.ndarray
    center: np.ndarray
    values: np.ndarray
    weight: np.ndarray

    def __len__(self) -> int:
        return int(self.lo.size)


def exp_bin(x, y, weights=None, base: float = 2.0) -> BinnedSeries:
    """Exponential binning of an integer-keyed series.

    Points fall into bins ``[base**k, base**(k+1))``; each bin is placed at
    the geometric mean of its edges and carries the weighted mean of ``y``
    (``y`` may have several columns).
    """
    if base <= 1:
        raise ValueError("bin base must exceed 1")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    squeeze = y.ndim == 1
    if squeeze:
        y = y[:, None]
    w = np.ones(x.size) if weights is None else np.asarray(weights, dtype=np.float64)
    if x.size == 0:
        e = np.empty(0)
        return BinnedSeries(e, e, e, np.empty((0,) if squeeze else (0, y.shape[1])), e)
    if np.any(x < 1):
        raise ValueError("binning keys must be >= 1")
    k = np.floor(np.log(x) / np.log(base)).astype(np.int64)
    # guard against rounding at exact powers
    k[base ** (k + 1) <= x] += 1
    k[base ** k > x] -= 1
    bins, inv = np.unique(k, return_inverse=True)
    wsum = np.bincount(inv, weights=w, minlength=bins.size)
    vals = np.column_stack([np.bincount(inv, weights=w * y[:, j], minlength=bins.size)
                            for j in range(y.shape[1])])
    with np.errstate(invalid="ignore", divide="ignore"):
        vals = vals / wsum[:, None]
    lo = base ** bins.astype(np.float64)
    hi = lo * base
    return BinnedSeries(lo, hi, np.sqrt(lo * hi), vals[:, 0] if squeeze else vals, wsum)


@dataclass
class TriangleReport:
    total: int
    buckets: list[BucketStats]
    ratios: RatioAggregate | None
    homogeneous_fraction: float | None
    top1_participation: float | None
    kappa99: int | None
    cumulative_by_dmin: list[tuple[int, int]]
    binned_curves: BinnedSeries
    notes: list[str] = field(default_factory=list)


def triangle_report(g: Graph, counts, triangles, *, homog_threshold: float = 10.0,
                    bin_base: float = 2.0) -> TriangleReport:
    from .metrics import triangle_degree_percentiles

    acc = _as_counts(triangles)
    buckets = bucket_triangles(acc)
    cumulative = cumulative_triangles_by_dmin(buckets)
    if buckets:
        binned = exp_bin([b.i for b in buckets], [[b.D1, b.D2, b.D3] for b in buckets],
                         weights=[b.size for b in buckets], base=bin_base)
    else:
        binned = exp_bin([], np.empty((0, 3)), base=bin_base)
    if acc.total == 0:
        return TriangleReport(0, buckets, None, None, None, None, cumulative, binned,
                              ["graph has no triangles; ratio statistics omitted"])
    kappa99 = triangle_degree_percentiles(g, counts, 99)
    return TriangleReport(
        total=acc.total,
        buckets=buckets,
        ratios=ratio_averages(acc),
        homogeneous_fraction=homogeneous_fraction(acc, homog_threshold),
        top1_participation=top_percentile_participation(g, counts, acc, kappa99),
        kappa99=kappa99,
        cumulative_by_dmin=cumulative,
        binned_curves=binned,
    )
