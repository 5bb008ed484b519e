"""Sampled checks of continuity, convexity and order postulates on convex domains."""
__version__ = "0.1.0"

from .core import CheckConfig, PropertyReport, Reason, Robustness, Verdict, Witness, rng_for
from .geometry import (Ball, Box, Domain, Halfspace, OracleDomain, Polyhedron, PositiveOrthant,
                       Simplex, classify_set_properties, rockafellar_probe, sample_segments,
                       sample_smooth_arcs)
from .functions import (RealFunction, check_function_continuity, check_function_convexity,
                        crosscheck_linear_joint, function_profile, genocchi_peano, min_affine)
from .relations import (Relation, UtilityInduced, PredicatePair, Tabulated, compare, restrict,
                        check_order_property, check_convexity, check_monotonicity, check_algebraic,
                        check_order_density)
from .continuity import (check_section_kinds, check_section_continuity, check_graph_continuity,
                         check_linear_continuity, check_mixture_continuity, check_archimedean,
                         check_wold, check_arc_and_strong)
from .deduction import (ImplicationEdge, ImplicationGraph, DerivedProfile, Status, audit,
                        build_graph, closure, applicable_edges, replay)
from .corpus import CORPUS_IDS, load_example, run_corpus, run_entry, emit_report, check_property
