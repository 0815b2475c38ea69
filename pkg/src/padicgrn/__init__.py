"""p-adic hierarchical stability analysis of Boolean and multi-valued gene regulatory networks."""

__version__ = "0.1.0"

from .padic_core import (EmptyInputError, EncodingRangeError, InvalidConfigurationError, PadicError,
                         PadicScalar, PrecisionExhaustedError, common_prefix_length, decode, distance,
                         encode, padic_abs, truncate, valuation)
from .network import (DatasetMissingError, NetworkDefinition, NetworkFormatError, TransitionMap,
                      build_transition_map, builtin_dataset, load_network, parse_network)
from .stability import (BallClass, BallStats, Ordering, StabilityScores, ball_stats, expanding_set,
                        level_counts, scores_via_haar, stability_scores)
from .fixed_points import (FixedPointReport, NotAFixedPointError, classification_sequence,
                           find_fixed_points, fixed_point_report, periodic_orbits)
from .search import (GAConfig, SearchResult, branch_and_bound_minimize, exhaustive_minimize,
                     ga_minimize, minimizer_symmetry, partial_order_summary)
from .affine import AffineLocalMap, build_affine_model, verify_mapping_property
