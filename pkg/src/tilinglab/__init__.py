"""Laboratory for clique factors in k-partite graphs.

Exact tiling solver, connector/absorbing-family machinery, extremal
structure detection and seeded generators, all at desk scale.
"""

from .graph import (PartiteGraph, Vertex, density, nonedge_density,
                    nonedge_count_between, typical_vertices)
from .params import LabParams, alpha_for_delta
from .partition import GridPartition
from .generators import (BlowupSpec, complete_partite, perturb,
                         random_min_degree, random_partite, split_sizes,
                         theta, theta_blowup, uniform_blowup)
from .solver import (FactorResult, MatchingResult, enumerate_crossing_cliques,
                     count_crossing_cliques, factor_on_subset, find_factor,
                     max_matching, verify_matching)
from .absorber import (AbsorberState, absorb, absorbing_sets_for,
                       build_absorber, enumerate_connectors, full_pipeline,
                       is_connector, prune_family, reachability_report,
                       sample_family)
from .extremal import (ApproximationCertificate, ExtremalityCertificate,
                       approximate_to_theta, deficiency_profile,
                       is_delta_extremal, kk_count_check, lemma3_dichotomy,
                       minimize_edges)

__version__ = "0.1.0"
