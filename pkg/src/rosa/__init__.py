"""Rhombus substitution tilings with 2n-fold symmetry for odd n."""

from .billiard import billiard_word, candidate_edgeword, find_planar_candidate, tracking_distance
from .circulant import eigenvalues, elementary_matrix, expansion_matrix
from .edgeword import Edgeword, abelianize, check_k1_counting, is_almost_balanced, parse_edgeword, subrosa_edgeword
from .errors import BudgetExceeded, NotFound, RosaError, ValidationError
from .kenyon import metatile_polygon, tile_polygon
from .lattice import Patch, PolygonBoundary, Tile, rotate_patch, star_patch, validate_patch
from .multigrid import MultigridSpec, dual_tiling, regularity_check, vertical_ray_word
from .planarity import eperp_diameter, planarity_report, spectral_coords
from .substitution import SubstitutionRule, apply, build_substitution, check_primitivity, iterate_from_star

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "Edgeword",
    "MultigridSpec",
    "NotFound",
    "Patch",
    "PolygonBoundary",
    "RosaError",
    "SubstitutionRule",
    "Tile",
    "ValidationError",
    "abelianize",
    "apply",
    "billiard_word",
    "build_substitution",
    "candidate_edgeword",
    "check_k1_counting",
    "check_primitivity",
    "dual_tiling",
    "eigenvalues",
    "elementary_matrix",
    "eperp_diameter",
    "expansion_matrix",
    "find_planar_candidate",
    "is_almost_balanced",
    "iterate_from_star",
    "metatile_polygon",
    "parse_edgeword",
    "planarity_report",
    "regularity_check",
    "rotate_patch",
    "spectral_coords",
    "star_patch",
    "subrosa_edgeword",
    "tile_polygon",
    "tracking_distance",
    "validate_patch",
    "vertical_ray_word",
]
