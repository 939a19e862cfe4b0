"""Random graph models: PA, CL, SKG, BTER, EC and FF.

Every generator takes a parameter object and a seed and returns a simple
undirected :class:`~degtri.graph.Graph`; the same (spec, seed) pair always
yields the same graph.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import ClassVar, Union

import numpy as np

from .graph import Graph
from .metrics import ClusteringProfile


class SpecError(ValueError):
    pass


class EdgeBudgetExceeded(RuntimeError):
    def __init__(self, edges: int):
        super().__init__(f"edge budget exceeded after {edges} edges")
        self.edges = edges


def _check_prob(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0) or math.isnan(value):
        raise SpecError(f"{name} must be a probability, got {value}")


@dataclass(frozen=True)
class PASpec:
    n: int
    k: int
    model: ClassVar[str] = "pa"

    def __post_init__(self):
        if self.k < 1:
            raise SpecError("k must be >= 1")
        if self.n <= self.k:
            raise SpecError("PA needs n > k")


@dataclass(frozen=True)
class CLSpec:
    target_degrees: tuple[int, ...]
    model: ClassVar[str] = "cl"

    def __post_init__(self):
        object.__setattr__(self, "target_degrees", tuple(int(d) for d in self.target_degrees))
        if not self.target_degrees:
            raise SpecError("CL needs a nonempty degree list")
        if min(self.target_degrees) < 0:
            raise SpecError("degrees must be non-negative")


@dataclass(frozen=True)
class SKGSpec:
    initiator: tuple[tuple[float, float], tuple[float, float]]
    scale: int
    edges: int
    model: ClassVar[str] = "skg"

    def __post_init__(self):
        init = tuple(tuple(float(x) for x in row) for row in self.initiator)
        if len(init) != 2 or any(len(row) != 2 for row in init):
            raise SpecError("initiator must be 2x2")
        for row in init:
            for x in row:
                _check_prob("initiator entry", x)
        object.__setattr__(self, "initiator", init)
        if self.scale < 1:
            raise SpecError("scale must be >= 1")
        if self.edges < 1:
            raise SpecError("edges must be >= 1")


@dataclass(frozen=True)
class BTERSpec:
    target_degrees: tuple[int, ...]
    cc_profile: ClusteringProfile = field(compare=False)
    model: ClassVar[str] = "bter"

    def __post_init__(self):
        object.__setattr__(self, "target_degrees", tuple(int(d) for d in self.target_degrees))
        if not self.target_degrees:
            raise SpecError("BTER needs a nonempty degree list")
        if min(self.target_degrees) < 0:
            raise SpecError("degrees must be non-negative")


@dataclass(frozen=True)
class ECSpec:
    n: int
    k: int
    p_copy: float
    model: ClassVar[str] = "ec"

    def __post_init__(self):
        if self.k < 1:
            raise SpecError("k must be >= 1")
        if self.n <= self.k:
            raise SpecError("EC needs n > k")
        _check_prob("p_copy", self.p_copy)


@dataclass(frozen=True)
class FFSpec:
    n: int
    p_forward: float
    model: ClassVar[str] = "ff"

    def __post_init__(self):
        if self.n < 1:
            raise SpecError("FF needs n >= 1")
        _check_prob("p_forward", self.p_forward)


ModelSpec = Union[PASpec, CLSpec, SKGSpec, BTERSpec, ECSpec, FFSpec]
MODELS = {cls.model: cls for cls in (PASpec, CLSpec, SKGSpec, BTERSpec, ECSpec, FFSpec)}


def spec_to_dict(spec: ModelSpec) -> dict:
    if isinstance(spec, PASpec):
        body = {"n": spec.n, "k": spec.k}
    elif isinstance(spec, CLSpec):
        body = {"target_degrees": list(spec.target_degrees)}
    elif isinstance(spec, SKGSpec):
        body = {"initiator": [list(r) for r in spec.initiator], "scale": spec.scale,
                "edges": spec.edges}
    elif isinstance(spec, BTERSpec):
        body = {"target_degrees": list(spec.target_degrees),
                "cc_profile": {"degrees": spec.cc_profile.degrees.tolist(),
                               "values": spec.cc_profile.values.tolist()}}
    elif isinstance(spec, ECSpec):
        body = {"n": spec.n, "k": spec.k, "p_copy": spec.p_copy}
    elif isinstance(spec, FFSpec):
        body = {"n": spec.n, "p_forward": spec.p_forward}
    else:
        raise SpecError(f"not a model spec: {spec!r}")
    return {"model": spec.model, **body}


def spec_from_dict(doc: dict) -> ModelSpec:
    if not isinstance(doc, dict) or "model" not in doc:
        raise SpecError("spec document needs a 'model' field")
    body = {k: v for k, v in doc.items() if k != "model"}
    tag = doc["model"]
    if tag not in MODELS:
        raise SpecError(f"unknown model {tag!r}; expected one of {sorted(MODELS)}")
    try:
        if tag == "bter":
            prof = body.pop("cc_profile")
            degrees = np.asarray(prof["degrees"], dtype=np.int64)
            values = np.asarray(prof["values"], dtype=np.float64)
            if degrees.shape != values.shape:
                raise SpecError("cc_profile degrees and values differ in length")
            return BTERSpec(body.pop("target_degrees"), ClusteringProfile(degrees, values),
                            **body)
        return MODELS[tag](**body)
    except (TypeError, KeyError) as exc:
        raise SpecError(f"invalid {tag} spec: {exc}") from None


def save_spec(spec: ModelSpec, path, extra: dict | None = None) -> None:
    doc = spec_to_dict(spec)
    if extra:
        doc["fit"] = extra
    Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


def load_spec(path) -> ModelSpec:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: not valid JSON ({exc})") from None
    doc.pop("fit", None)
    return spec_from_dict(doc)


class _Uniforms:
    """Buffered scalar draws from a numpy Generator."""

    def __init__(self, rng: np.random.Generator, block: int = 1 << 16):
        self._rng = rng
        self._block = block
        self._buf: list[float] = []
        self._pos = 0

    def __call__(self) -> float:
        if self._pos >= len(self._buf):
            self._buf = self._rng.random(self._block).tolist()
            self._pos = 0
        x = self._buf[self._pos]
        self._pos += 1
        return x

    def below(self, n: int) -> int:
        return min(int(self() * n), n - 1)


def _clique(k1: int) -> tuple[list[int], list[int]]:
    src, dst = [], []
    for a in range(k1):
        for b in range(a + 1, k1):
            src.append(a)
            dst.append(b)
    return src, dst


def gen_pa(spec: PASpec, seed: int) -> Graph:
    """Preferential attachment grown from a (k+1)-clique."""
    n, k = spec.n, spec.k
    draw = _Uniforms(np.random.default_rng(seed))
    src, dst = _clique(k + 1)
    ends: list[int] = []
    for a in range(k + 1):
        ends.extend([a] * k)
    for v in range(k + 1, n):
        targets: list[int] = []
        seen = set()
        while len(targets) < k:
            t = ends[draw.below(len(ends))]
            if t not in seen:
                seen.add(t)
                targets.append(t)
        for t in targets:
            src.append(v)
            dst.append(t)
            ends.append(t)
            ends.append(v)
    return Graph.from_edges(n, src, dst)


def _chung_lu_arcs(degrees, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    d = np.asarray(degrees, dtype=np.float64)
    total = float(d.sum())
    m = int(total // 2)
    if m == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    w = np.minimum(d, math.sqrt(total))
    ends = rng.choice(d.size, size=2 * m, p=w / w.sum())
    return ends[:m], ends[m:]


def gen_cl(spec: CLSpec, seed: int) -> Graph:
    """Chung-Lu by endpoint sampling: m draws, collisions and loops discarded."""
    rng = np.random.default_rng(seed)
    src, dst = _chung_lu_arcs(spec.target_degrees, rng)
    return Graph.from_edges(len(spec.target_degrees), src, dst)


def skg_arcs(spec: SKGSpec, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Raw SKG arcs (with repeats and loops): one quadrant descent per arc."""
    theta = np.asarray(spec.initiator, dtype=np.float64)
    if theta.sum() <= 0:
        raise SpecError("initiator must have a positive entry")
    probs = theta.ravel() / theta.sum()
    rng = np.random.default_rng(seed)
    rows = np.zeros(spec.edges, dtype=np.int64)
    cols = np.zeros(spec.edges, dtype=np.int64)
    for _ in range(spec.scale):
        q = rng.choice(4, size=spec.edges, p=probs)
        rows = rows * 2 + q // 2
        cols = cols * 2 + q % 2
    return rows, cols


def gen_skg(spec: SKGSpec, seed: int) -> Graph:
    """Stochastic Kronecker graph over 2**scale nodes, symmetrized and simplified."""
    rows, cols = skg_arcs(spec, seed)
    return Graph.from_edges(2 ** spec.scale, rows, cols)


def bter_blocks(degrees) -> list[np.ndarray]:
    """Affinity blocks: ascending degree order, each of size (smallest degree + 1).

    Nodes of degree < 2 cannot close a triangle and are left to the CL phase.
    """
    d = np.asarray(degrees, dtype=np.int64)
    order = np.argsort(d, kind="stable")
    order = order[d[order] >= 2]
    blocks = []
    pos = 0
    while pos < order.size:
        size = int(d[order[pos]]) + 1
        blocks.append(order[pos:pos + size])
        pos += size
    return blocks


def gen_bter(spec: BTERSpec, seed: int) -> Graph:
    """Dense ER affinity blocks, then Chung-Lu on the residual degrees."""
    rng = np.random.default_rng(seed)
    d = np.asarray(spec.target_degrees, dtype=np.int64)
    n = d.size
    src_parts, dst_parts = [], []
    for block in bter_blocks(d):
        if block.size < 2:
            continue
        cd = min(max(spec.cc_profile.lookup(int(d[block[0]])), 0.0), 1.0)
        p = cd ** (1.0 / 3.0)
        iu, ju = np.triu_indices(block.size, 1)
        hit = rng.random(iu.size) < p
        src_parts.append(block[iu[hit]])
        dst_parts.append(block[ju[hit]])
    src = np.concatenate(src_parts) if src_parts else np.empty(0, np.int64)
    dst = np.concatenate(dst_parts) if dst_parts else np.empty(0, np.int64)
    realized = np.bincount(src, minlength=n) + np.bincount(dst, minlength=n)
    residual = np.maximum(d - realized, 0)
    cl_src, cl_dst = _chung_lu_arcs(residual, rng)
    return Graph.from_edges(n, np.concatenate([src, cl_src]), np.concatenate([dst, cl_dst]))


def gen_ec(spec: ECSpec, seed: int) -> Graph:
    """Edge copying grown from a (k+1)-clique.

    Each newcomer picks a uniform prototype; each of its k links copies a
    not-yet-copied out-link of the prototype with probability p_copy and
    otherwise targets a uniform existing node.
    """
    n, k, p = spec.n, spec.k, spec.p_copy
    draw = _Uniforms(np.random.default_rng(seed))
    src, dst = _clique(k + 1)
    out: list[list[int]] = [[b for b in range(k + 1) if b != a] for a in range(k + 1)]
    for v in range(k + 1, n):
        proto = draw.below(v)
        avail = list(out[proto])
        links = []
        for _ in range(k):
            if draw() < p and avail:
                t = avail.pop(draw.below(len(avail)))
            else:
                t = draw.below(v)
            links.append(t)
            src.append(v)
            dst.append(t)
        out.append(links)
    return Graph.from_edges(n, src, dst)


def gen_ff(spec: FFSpec, seed: int, max_edges: int | None = None) -> Graph:
    """Forest fire with per-neighbor Bernoulli burning.

    A newcomer links a uniform ambassador, then every node it has linked
    offers each of its not-yet-considered neighbors a link with probability
    p_forward. ``max_edges`` aborts with EdgeBudgetExceeded once exceeded.
    """
    n, p = spec.n, spec.p_forward
    rng = np.random.default_rng(seed)
    draw = _Uniforms(rng)
    adj: list[list[int]] = [[] for _ in range(n)]
    src: list[int] = []
    dst: list[int] = []
    for v in range(1, n):
        w = draw.below(v)
        linked = [w]
        if p > 0.0:
            seen = {w}
            frontier = deque([w])
            while frontier:
                x = frontier.popleft()
                cand = [y for y in adj[x] if y not in seen]
                if not cand:
                    continue
                seen.update(cand)
                if p >= 1.0:
                    chosen = cand
                else:
                    coins = rng.random(len(cand))
                    chosen = [y for y, c in zip(cand, coins.tolist()) if c < p]
                linked.extend(chosen)
                frontier.extend(chosen)
        for y in linked:
            adj[y].append(v)
        adj[v].extend(linked)
        src.extend([v] * len(linked))
        dst.extend(linked)
        if max_edges is not None and len(src) > max_edges:
            raise EdgeBudgetExceeded(len(src))
    return Graph.from_edges(n, src, dst)


_DISPATCH = {PASpec: gen_pa, CLSpec: gen_cl, SKGSpec: gen_skg, BTERSpec: gen_bter,
             ECSpec: gen_ec, FFSpec: gen_ff}


def generate(spec: ModelSpec, seed: int, max_edges: int | None = None) -> Graph:
    """Sample ``spec`` with ``seed``. ``max_edges`` only bounds FF, whose burn can cascade."""
    try:
        fn = _DISPATCH[type(spec)]
    except KeyError:
        raise SpecError(f"not a model spec: {spec!r}") from None
    if isinstance(spec, FFSpec):
        return gen_ff(spec, seed, max_edges=max_edges)
    return fn(spec, seed)
