"""Degree-labeled triangle statistics for large graphs and random graph models."""

from .graph import (DegreeHistogram, EdgeListError, Graph, GraphInvariantError, degree_histogram,
                    density, load_edge_list, validate, write_edge_list)
from .triangles import (DegreeLabeledTriangle, TriangleCounts, count_triangles, count_wedges,
                        enumerate_triangles, list_triangles)
from .metrics import (ClusteringProfile, GraphSummary, assortativity, avg_local_cc,
                      cc_by_degree, global_cc, local_cc, powerlaw_alpha, summarize,
                      triangle_degree_percentiles)
from .tristats import (BucketStats, RatioAggregate, TriangleDegreeCounts, TriangleReport,
                       bucket_triangles, cumulative_triangles_by_dmin, exp_bin,
                       homogeneous_fraction, ratio_averages, top_percentile_participation,
                       triangle_report)
from .generators import (BTERSpec, CLSpec, ECSpec, FFSpec, PASpec, SKGSpec, SpecError,
                         gen_bter, gen_cl, gen_ec, gen_ff, gen_pa, gen_skg, generate,
                         load_spec, save_spec, spec_from_dict, spec_to_dict)
from .fitting import FitConfig, fit_bter, fit_cl, fit_ec, fit_ff, fit_pa, fit_skg
from .report import analyze, compare

__version__ = "0.1.0"
