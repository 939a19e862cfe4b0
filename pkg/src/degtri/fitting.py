"""Derive model parameters from a target graph."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .generators import (BTERSpec, CLSpec, ECSpec, EdgeBudgetExceeded, FFSpec, PASpec,
                         SKGSpec, gen_ff)
from .graph import Graph, degree_histogram, density
from .metrics import cc_by_degree, powerlaw_alpha
from .triangles import TriangleCounts, count_triangles

log = logging.getLogger(__name__)

DEFAULT_SKG_SKEW = 9.0


def derive_seed(seed: int, *keys: int) -> int:
    """Independent 64-bit child seed for (seed, keys)."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class FitConfig:
    ff_p_step: float = 0.001
    ff_p_range: tuple[float, float] = (0.0, 1.0)
    seeds_per_probe: int = 1
    edge_tolerance: float = 0.05

    def __post_init__(self):
        if not 0 < self.ff_p_step < 1:
            raise ValueError("ff_p_step must lie in (0, 1)")
        lo, hi = self.ff_p_range
        if not 0.0 <= lo < hi <= 1.0:
            raise ValueError("ff_p_range must satisfy 0 <= lo < hi <= 1")
        if self.seeds_per_probe < 1:
            raise ValueError("seeds_per_probe must be >= 1")
        if self.edge_tolerance <= 0:
            raise ValueError("edge_tolerance must be positive")


def fit_pa(g: Graph) -> PASpec:
    k = max(1, math.floor(density(g) + 0.5))
    return PASpec(n=g.node_count, k=min(k, g.node_count - 1))


def fit_cl(g: Graph) -> CLSpec:
    return CLSpec(tuple(g.degrees.tolist()))


def fit_bter(g: Graph, counts: TriangleCounts | None = None) -> BTERSpec:
    if counts is None:
        counts = count_triangles(g)
    return BTERSpec(tuple(g.degrees.tolist()), cc_by_degree(counts, g))


def fit_ec(g: Graph, alpha: float | None = None) -> ECSpec:
    """EC parameters: k = ceil(density), p_copy from a degree slope of 1/(1-p)."""
    if alpha is None:
        alpha = powerlaw_alpha(degree_histogram(g)).alpha
    if alpha <= 1:
        raise ValueError(f"power-law exponent must exceed 1, got {alpha}")
    p = min(max(1.0 - 1.0 / alpha, 0.0), math.nextafter(1.0, 0.0))
    k = max(1, math.ceil(density(g)))
    return ECSpec(n=g.node_count, k=min(k, g.node_count - 1), p_copy=p)


def skg_initiator(edges: int, scale: int, skew: float = DEFAULT_SKG_SKEW
                  ) -> tuple[tuple[tuple[float, float], tuple[float, float]], float]:
    """Initiator [[a, b], [b, c]] with a/c = skew, b = sqrt(a c), (sum)^scale = edges.

    When the normalization would push ``a`` above 1 the skew is lowered
    until ``a == 1``. Returns the initiator and the skew actually used.
    """
    if skew < 1:
        raise ValueError("skew must be >= 1")
    s = float(edges) ** (1.0 / scale)
    if s >= 4.0:
        return ((1.0, 1.0), (1.0, 1.0)), 1.0
    x = math.sqrt(skew)
    if s * x * x > (x + 1) ** 2:
        x = 1.0 / (math.sqrt(s) - 1.0)
        skew = x * x
    c = s / (x + 1) ** 2
    a = min(x * x * c, 1.0)
    b = x * c
    return ((a, b), (b, c)), skew


def fit_skg(g: Graph, initiator=None, skew: float = DEFAULT_SKG_SKEW) -> SKGSpec:
    """SKG parameters at scale ceil(log2 N) with 2E arcs.

    A user initiator is passed through unchanged; otherwise a skewed
    initiator is normalized to the arc count (no likelihood fitting).
    """
    n = max(g.node_count, 2)
    scale = max(1, math.ceil(math.log2(n)))
    edges = max(1, 2 * g.edge_count)
    if initiator is None:
        initiator, used = skg_initiator(edges, scale, skew)
        if used != skew:
            log.warning("SKG skew lowered from %g to %.3g to keep initiator entries <= 1",
                        skew, used)
    return SKGSpec(initiator=initiator, scale=scale, edges=edges)


@dataclass
class FFFit:
    spec: FFSpec
    target_edges: int
    achieved_edges: float
    probes: dict[float, float] = field(default_factory=dict)
    warning: str | None = None

    @property
    def edge_error(self) -> float:
        if self.target_edges == 0:
            return 0.0 if self.achieved_edges == 0 else math.inf
        return abs(self.achieved_edges - self.target_edges) / self.target_edges


def ff_edges(n: int, p: float, seed: int, runs: int = 1, budget: int | None = None) -> float:
    """Mean edge count of FF(n, p) over ``runs`` seeds; inf once ``budget`` is exceeded."""
    total = 0
    for j in range(runs):
        try:
            total += gen_ff(FFSpec(n, p), derive_seed(seed, j), max_edges=budget).edge_count
        except EdgeBudgetExceeded:
            return math.inf
    return total / runs


def fit_ff(g: Graph, config: FitConfig | None = None, seed: int = 0) -> FFFit:
    """Forward-burning probability matching the target edge count.

    Probes lie on the grid lo + i * ff_p_step. Expected edges grow with p,
    so the grid is bisected to the step resolution; the probe with the
    smallest edge error wins, ties going to the smaller p. Each probe reuses
    the same run seeds so probes are comparable.
    """
    config = config or FitConfig()
    n = g.node_count
    target = g.edge_count
    lo_p, hi_p = config.ff_p_range
    steps = int(round((hi_p - lo_p) / config.ff_p_step))
    budget = max(4 * target, target + n)
    probes: dict[float, float] = {}

    def p_at(i: int) -> float:
        return round(min(lo_p + i * config.ff_p_step, hi_p), 12)

    def probe(i: int) -> float:
        p = p_at(i)
        if p not in probes:
            probes[p] = ff_edges(n, p, seed, config.seeds_per_probe, budget)
            log.debug("ff probe p=%g edges=%s", p, probes[p])
        return probes[p]

    warning = None
    lo, hi = 0, steps
    if probe(lo) >= target:
        hi = lo
    elif probe(hi) < target:
        lo = hi
        warning = (f"target E={target} not reached even at p={p_at(hi)} "
                   f"(got {probes[p_at(hi)]:.0f}); returning the upper end")
    else:
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if probe(mid) < target:
                lo = mid
            else:
                hi = mid
    best_p = min(probes, key=lambda p: (abs(probes[p] - target), p))
    fit = FFFit(FFSpec(n, best_p), target, probes[best_p], dict(sorted(probes.items())),
                warning)
    if fit.warning:
        log.warning(fit.warning)
    elif fit.edge_error > config.edge_tolerance:
        fit.warning = (f"best FF edge error {fit.edge_error:.3f} exceeds tolerance "
                       f"{config.edge_tolerance}")
        log.warning(fit.warning)
    return fit
