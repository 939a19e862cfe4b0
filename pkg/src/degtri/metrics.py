"""Scalar graph statistics: clustering, assortativity, power-law tail, percentiles."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import zeta

from .graph import DegreeHistogram, Graph, degree_histogram
from .triangles import TriangleCounts, count_wedges

SUMMARY_FIELDS = ("name", "N", "E", "rho", "C", "Cbar", "T", "alpha",
                  "kappa90", "kappa99", "dmax", "r")


def _per_node(counts) -> np.ndarray:
    if isinstance(counts, TriangleCounts):
        return counts.per_node
    return np.asarray(counts, dtype=np.int64)


def local_cc(degree: int, triangles: int) -> float:
    if degree < 2:
        if triangles:
            raise ValueError(f"{triangles} triangles at a node of degree {degree}")
        return 0.0
    wedges = degree * (degree - 1) // 2
    if triangles > wedges:
        raise ValueError(f"{triangles} triangles exceed {wedges} wedges")
    return triangles / wedges


def _local_ccs(counts, g: Graph) -> np.ndarray:
    t = _per_node(counts).astype(np.float64)
    d = g.degrees
    wedges = (d * (d - 1) // 2).astype(np.float64)
    out = np.zeros(g.node_count)
    ok = d >= 2
    out[ok] = t[ok] / wedges[ok]
    if np.any(out > 1.0) or np.any(t[~ok] > 0):
        raise ValueError("triangle counts inconsistent with degrees")
    return out


def global_cc(g: Graph, triangles: int) -> float:
    wedges = count_wedges(g)
    if wedges == 0:
        return 0.0
    return 3 * triangles / wedges


def avg_local_cc(counts, g: Graph) -> float:
    """Mean of C_j over all nodes; nodes of degree < 2 contribute 0."""
    if g.node_count == 0:
        return 0.0
    return math.fsum(_local_ccs(counts, g)) / g.node_count


@dataclass(frozen=True)
class ClusteringProfile:
    degrees: np.ndarray
    values: np.ndarray

    def __iter__(self):
        return iter(zip(self.degrees.tolist(), self.values.tolist()))

    def __len__(self) -> int:
        return int(self.degrees.size)

    def as_dict(self) -> dict[int, float]:
        return dict(self)

    def lookup(self, degree: int) -> float:
        """C_d, falling back to the nearest listed degree (ties go lower)."""
        if self.degrees.size == 0:
            return 0.0
        i = int(np.searchsorted(self.degrees, degree))
        if i < self.degrees.size and self.degrees[i] == degree:
            return float(self.values[i])
        if i == 0:
            return float(self.values[0])
        if i == self.degrees.size:
            return float(self.values[-1])
        lo, hi = self.degrees[i - 1], self.degrees[i]
        return float(self.values[i - 1] if degree - lo <= hi - degree else self.values[i])


def cc_by_degree(counts, g: Graph) -> ClusteringProfile:
    cc = _local_ccs(counts, g)
    d = g.degrees
    keep = d >= 2
    degrees, inv = np.unique(d[keep], return_inverse=True)
    sums = np.bincount(inv, weights=cc[keep], minlength=degrees.size)
    sizes = np.bincount(inv, minlength=degrees.size)
    return ClusteringProfile(degrees.astype(np.int64), sums / np.maximum(sizes, 1))


class Assortativity(NamedTuple):
    r: float
    degenerate: bool


def assortativity(g: Graph) -> Assortativity:
    """Degree Pearson correlation over edge endpoints, both orientations per edge.

    Returns ``r = 0`` with ``degenerate=True`` when the endpoint degrees have
    no variance (regular graphs).
    """
    if g.edge_count == 0:
        raise ValueError("assortativity needs at least one edge")
    d = g.degrees
    rows = np.repeat(d, d)
    cols = d[g.indices]
    arcs = 2 * g.edge_count
    s_jk = int(np.sum((rows * cols).astype(object)))
    s_j = int(np.sum((d * d).astype(object)))
    s_jj = int(np.sum((d * d * d).astype(object)))
    num = arcs * s_jk - s_j * s_j
    den = arcs * s_jj - s_j * s_j
    if den == 0:
        return Assortativity(0.0, True)
    return Assortativity(float(Fraction(num, den)), False)


class PowerLawFit(NamedTuple):
    alpha: float
    xmin: int
    ks: float
    n_tail: int


def _nll_factory(n: int, log_sum: float, xmin: int):
    def nll(a: float) -> float:
        return n * math.log(zeta(a, xmin)) + a * log_sum
    return nll


def powerlaw_alpha(hist: DegreeHistogram | Graph, min_tail: int = 10) -> PowerLawFit:
    """Discrete power-law MLE with xmin chosen by minimum KS distance.

    Every observed degree is tried as xmin provided the tail keeps at least
    ``min_tail`` nodes and two distinct degrees.
    """
    if isinstance(hist, Graph):
        hist = degree_histogram(hist)
    keep = hist.degrees >= 1
    vals = hist.degrees[keep].astype(np.int64)
    cnts = hist.counts[keep].astype(np.int64)
    if vals.size < 2:
        raise ValueError("power-law fit needs at least two distinct positive degrees")
    logs = np.log(vals.astype(np.float64))
    suffix_n = np.cumsum(cnts[::-1])[::-1]
    suffix_log = np.cumsum((cnts * logs)[::-1])[::-1]
    best: PowerLawFit | None = None
    fvals = vals.astype(np.float64)
    for j in range(vals.size - 1):
        n = int(suffix_n[j])
        if n < min_tail:
            break
        xmin = int(vals[j])
        nll = _nll_factory(n, float(suffix_log[j]), xmin)
        res = minimize_scalar(nll, bounds=(1.0 + 1e-6, 30.0), method="bounded",
                              options={"xatol": 1e-7})
        a = float(res.x)
        tail = fvals[j:]
        z0 = zeta(a, xmin)
        fit_lt = 1.0 - zeta(a, tail) / z0
        fit_le = 1.0 - zeta(a, tail + 1.0) / z0
        cum = np.cumsum(cnts[j:])
        emp_le = cum / n
        emp_lt = (cum - cnts[j:]) / n
        ks = float(max(np.max(np.abs(emp_lt - fit_lt)), np.max(np.abs(emp_le - fit_le))))
        if best is None or ks < best.ks:
            best = PowerLawFit(a, xmin, ks, n)
    if best is None:
        raise ValueError("no xmin candidate leaves a tail large enough to fit")
    return best


def triangle_degree_percentiles(g: Graph, counts, q: float) -> int:
    """Nearest-rank q-th percentile of degrees of nodes in at least one triangle."""
    t = _per_node(counts)
    degs = np.sort(g.degrees[t >= 1])
    if degs.size == 0:
        raise ValueError("graph has no triangles")
    if not 0 < q <= 100:
        raise ValueError("percentile must be in (0, 100]")
    rank = math.ceil(Fraction(q) * degs.size / 100)
    return int(degs[max(rank, 1) - 1])


@dataclass(frozen=True)
class GraphSummary:
    name: str
    N: int
    E: int
    rho: float
    C: float
    Cbar: float
    T: int
    alpha: float | None
    kappa90: int | None
    kappa99: int | None
    dmax: int
    r: float

    def to_dict(self) -> dict:
        return asdict(self)


def summarize(g: Graph, counts: TriangleCounts, name: str = "graph") -> tuple[GraphSummary, dict]:
    """One summary row plus side information (fitted xmin, flags)."""
    from .graph import density

    info: dict = {}
    try:
        fit = powerlaw_alpha(degree_histogram(g))
        alpha = fit.alpha
        info["alpha_xmin"] = fit.xmin
        info["alpha_ks"] = fit.ks
        info["alpha_tail_nodes"] = fit.n_tail
    except ValueError as exc:
        alpha = None
        info["alpha_error"] = str(exc)
    if counts.total:
        k90 = triangle_degree_percentiles(g, counts, 90)
        k99 = triangle_degree_percentiles(g, counts, 99)
    else:
        k90 = k99 = None
    if g.edge_count:
        r, degenerate = assortativity(g)
        info["assortativity_degenerate"] = degenerate
    else:
        r = 0.0
        info["assortativity_degenerate"] = True
    summary = GraphSummary(
        name=name,
        N=g.node_count,
        E=g.edge_count,
        rho=density(g),
        C=global_cc(g, counts.total),
        Cbar=avg_local_cc(counts, g),
        T=counts.total,
        alpha=alpha,
        kappa90=k90,
        kappa99=k99,
        dmax=g.max_degree,
        r=r,
    )
    return summary, info
