"""Analysis pipeline and CSV/JSON emission for the CLI."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .generators import ModelSpec, generate
from .graph import Graph
from .metrics import ClusteringProfile, GraphSummary, SUMMARY_FIELDS, cc_by_degree, summarize
from .triangles import TriangleCounts, enumerate_triangles
from .tristats import TriangleDegreeCounts, TriangleReport, triangle_report

log = logging.getLogger(__name__)


@dataclass
class Analysis:
    name: str
    graph: Graph
    counts: TriangleCounts
    summary: GraphSummary
    info: dict
    triangles: TriangleReport
    cc_profile: ClusteringProfile


def analyze(g: Graph, name: str = "graph", *, workers: int = 1,
            homog_threshold: float = 10.0, bin_base: float = 2.0,
            max_triangles: int | None = None,
            extra_sink: Callable[[np.ndarray, np.ndarray], None] | None = None) -> Analysis:
    acc = TriangleDegreeCounts()
    sink = acc
    if extra_sink is not None:
        def sink(nodes, degrees):
            acc(nodes, degrees)
            extra_sink(nodes, degrees)
    counts = enumerate_triangles(g, sink, workers=workers, max_triangles=max_triangles)
    summary, info = summarize(g, counts, name)
    tri = triangle_report(g, counts, acc, homog_threshold=homog_threshold, bin_base=bin_base)
    info["homog_threshold"] = homog_threshold
    info["homogeneous_fraction"] = tri.homogeneous_fraction
    info["top1_participation"] = tri.top1_participation
    info["bin_base"] = bin_base
    if tri.ratios is not None:
        info["ratios"] = {"r21_avg": tri.ratios.r21_avg, "r31_avg": tri.ratios.r31_avg,
                          "r32_avg": tri.ratios.r32_avg}
    info["notes"] = list(tri.notes)
    return Analysis(name, g, counts, summary, info, tri, cc_by_degree(counts, g))


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return ""
        return repr(x)
    return str(x)


def atomic_write(path: Path | str, data: str) -> None:
    """Write via a sibling temp file and rename, so readers never see partial files."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def write_csv(path: Path | str, header: Sequence[str], rows) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    n = 0
    for row in rows:
        w.writerow([_fmt(v) for v in row])
        n += 1
    atomic_write(path, buf.getvalue())
    return n


def _json_clean(obj):
    if isinstance(obj, float) and (math.isnan(obj) or math.isinf(obj)):
        return None
    if isinstance(obj, dict):
        return {k: _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_json(path: Path | str, obj) -> None:
    atomic_write(path, json.dumps(_json_clean(obj), indent=2) + "\n")


def summary_dict(s: GraphSummary) -> dict:
    d = s.to_dict()
    return {k: d[k] for k in SUMMARY_FIELDS}


def write_analysis(a: Analysis, out_dir: Path | str) -> list[str]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    write_json(out / "summary.json", summary_dict(a.summary))
    write_json(out / "details.json", a.info)
    written += ["summary.json", "details.json"]
    tri = a.triangles
    write_csv(out / "buckets.csv", ["i", "size", "D1", "D2", "D3"],
              ((b.i, b.size, b.D1, b.D2, b.D3) for b in tri.buckets))
    bc = tri.binned_curves
    write_csv(out / "buckets_binned.csv", ["bin_lo", "bin_hi", "x", "D1", "D2", "D3", "weight"],
              ((bc.lo[j], bc.hi[j], bc.center[j], *bc.values[j], bc.weight[j])
               for j in range(len(bc))))
    write_csv(out / "cumulative.csv", ["i", "cumulative"], tri.cumulative_by_dmin)
    write_csv(out / "cc_by_degree.csv", ["degree", "C_d"], iter(a.cc_profile))
    written += ["buckets.csv", "buckets_binned.csv", "cumulative.csv", "cc_by_degree.csv"]
    if tri.ratios is not None:
        write_csv(out / "ratios.csv", ["r21_avg", "r31_avg", "r32_avg"],
                  [(tri.ratios.r21_avg, tri.ratios.r31_avg, tri.ratios.r32_avg)])
        written.append("ratios.csv")
    else:
        stale = out / "ratios.csv"
        if stale.exists():
            stale.unlink()
    return written


@dataclass
class ModelRun:
    label: str
    seed: int | None
    analysis: Analysis | None
    error: str | None = None


@dataclass
class ComparisonReport:
    original: ModelRun
    runs: list[ModelRun] = field(default_factory=list)

    def all_runs(self) -> list[ModelRun]:
        return [self.original] + self.runs

    def ok_runs(self) -> list[ModelRun]:
        return [r for r in self.all_runs() if r.analysis is not None]


def compare(original: Graph, models: Sequence[tuple[str, ModelSpec]], seeds: Sequence[int], *,
            name: str = "original", workers: int = 1, threads: int = 1,
            homog_threshold: float = 10.0, bin_base: float = 2.0,
            max_triangles: int | None = None,
            max_edges: int | None = None) -> ComparisonReport:
    """Analyze the original graph and every (model, seed) sample of it."""
    opts = dict(workers=workers, homog_threshold=homog_threshold, bin_base=bin_base,
                max_triangles=max_triangles)
    report = ComparisonReport(ModelRun("original", None, analyze(original, name, **opts)))

    def run(job):
        label, spec, seed = job
        try:
            g = generate(spec, seed, max_edges)
            return ModelRun(label, seed, analyze(g, f"{label}-{seed}", **opts))
        except Exception as exc:  # one failed model must not sink the rest
            log.error("model %s seed %s failed: %s", label, seed, exc)
            return ModelRun(label, seed, None, f"{type(exc).__name__}: {exc}")

    jobs = [(label, spec, seed) for label, spec in models for seed in seeds]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            report.runs = list(pool.map(run, jobs))
    else:
        report.runs = [run(j) for j in jobs]
    return report


def write_comparison(rep: ComparisonReport, out_dir: Path | str) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def seed_of(r: ModelRun):
        return "" if r.seed is None else r.seed

    rows = []
    for r in rep.all_runs():
        if r.analysis is None:
            continue
        s = r.analysis.summary
        rows.append((r.label, seed_of(r), s.N, s.E, s.T, s.C, s.Cbar))
    write_csv(out / "triangle_counts.csv", ["model", "seed", "N", "E", "T", "C", "Cbar"], rows)

    def binned_rows(col: int):
        for r in rep.ok_runs():
            bc = r.analysis.triangles.binned_curves
            for j in range(len(bc)):
                yield (r.label, seed_of(r), bc.lo[j], bc.hi[j], bc.values[j][0],
                       bc.values[j][col], bc.weight[j])

    write_csv(out / "d1_vs_d2.csv", ["model", "seed", "bin_lo", "bin_hi", "D1", "D2", "weight"],
              binned_rows(1))
    write_csv(out / "d1_vs_d3.csv", ["model", "seed", "bin_lo", "bin_hi", "D1", "D3", "weight"],
              binned_rows(2))
    write_csv(out / "cumulative_compare.csv", ["model", "seed", "i", "cumulative"],
              ((r.label, seed_of(r), i, c) for r in rep.ok_runs()
               for i, c in r.analysis.triangles.cumulative_by_dmin))
    write_csv(out / "ccd_compare.csv", ["model", "seed", "degree", "C_d"],
              ((r.label, seed_of(r), d, c) for r in rep.ok_runs() for d, c in r.analysis.cc_profile))
    failures = [{"model": r.label, "seed": r.seed, "error": r.error}
                for r in rep.runs if r.analysis is None]
    write_json(out / "failures.json", failures)

