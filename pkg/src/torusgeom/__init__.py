"""Geodesic graphs on flat tori.

Spring (equilibrium) embeddings, stress covariance analysis, reciprocal dual
embeddings and force diagrams, and weighted Delaunay structure recovered by
polyhedral lifting.
"""

from . import errors, fixtures
from .linalg import (J, LinearSystem, TorusShape, mat_perp, perp,
                     reduce_to_fundamental, solve_dense)
from .graph import Dart, DualMap, EssentialReport, Face, PlanePatch, TorusGraph
from .homology import (boundary_cocirculations, circulation_class, cycle_basis,
                       cycle_homology, random_circulation, verify_harmonic)
from .equilibrium import (EquilibriumReport, Stress, affine_transfer,
                          embedding_check, equilibrium_residual, tutte_embed)
from .reciprocal import (ForceDiagram, ReciprocalPair, StressAnalysis,
                         build_reciprocal, covariance, force_diagram,
                         is_reciprocal_on, normalize_stress, reciprocal_torus)
from .coherence import (DelaunayReport, LiftingResult, VertexWeights,
                        fix_translation, is_weighted_delaunay, lift,
                        lifted_delaunay_det, local_delaunay_det,
                        oracle_weighted_delaunay, voronoi_dual,
                        weights_from_reciprocal)
from .document import GraphDocument, parse, parse_sites, serialize, serialize_sites
from .svg import render_svg

__all__ = [
    "errors", "fixtures",
    "J", "LinearSystem", "TorusShape", "mat_perp", "perp",
    "reduce_to_fundamental", "solve_dense",
    "Dart", "DualMap", "EssentialReport", "Face", "PlanePatch", "TorusGraph",
    "boundary_cocirculations", "circulation_class", "cycle_basis",
    "cycle_homology", "random_circulation", "verify_harmonic",
    "EquilibriumReport", "Stress", "affine_transfer", "embedding_check",
    "equilibrium_residual", "tutte_embed",
    "ForceDiagram", "ReciprocalPair", "StressAnalysis", "build_reciprocal",
    "covariance", "force_diagram", "is_reciprocal_on", "normalize_stress",
    "reciprocal_torus",
    "DelaunayReport", "LiftingResult", "VertexWeights", "fix_translation",
    "is_weighted_delaunay", "lift", "lifted_delaunay_det",
    "local_delaunay_det", "oracle_weighted_delaunay", "voronoi_dual",
    "weights_from_reciprocal",
    "GraphDocument", "parse", "parse_sites", "serialize", "serialize_sites",
    "render_svg",
]
