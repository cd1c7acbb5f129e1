"""Estimating target-graph characteristics through a second, easier-to-sample graph."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .errors import (EstimationError, IngestionError, NumericalError, ParameterError,
                     StructureError, TwoLayerError)
from .estimators import (CharacteristicFn, EstimateReport, degree_ccdf, degree_pdf,
                         estimate_degree_distribution, estimate_path, estimate_ratio,
                         estimate_vsa1, estimate_vsa2, ground_truth, ground_truth_curve,
                         tabulated, vsa1_path)
from .evaluation import NrmseTable, TrialConfig, nrmse, run_estimates, run_trials
from .generators import (PRESETS, SyntheticSpec, build_barbell_target, generate_ba,
                         generate_two_layer, wire_bipartite)
from .graph import (BipartiteGraph, Graph, TwoLayerNetwork, build_bipartite, build_graph,
                    validate_two_layer)
from .oracles import build_modified_transition_matrix
from .rng import make_rng
from .vertex_samplers import (NYC_REGION, GeoVenue, Region, RRZISampler, UniformSampler,
                              WeightedSampler, WeightedVertexSample, rrzi_inclusion_oracle,
                              rrzi_sample, uni_sampler)
from .walkers import (RwtRwaState, SamplePath, VsaIISampleGroup, compute_wu_rwtvsa, rwt_rwa_walk,
                      rwt_vsa_walk, rwwj, simple_rw, vsa1_sample, vsa2_sample)
from .weights import compute_rwtrwa_weights, solve_fixed_point_weights
