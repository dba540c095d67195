"""Convex position of k-flats in R^d: exact deciders and certificates,
Erdos-Szekeres extraction pipelines, Grassmannian eps-nets, and certified
non-convex families."""

from .convexpos import (
    CellWitness,
    ConvexityCertificate,
    general_position_flats,
    hyperplanes_convex_position,
    lines_convex_position_2d,
    points_convex_position,
    verify_certificate,
)
from .eskit import (
    ExtractionError,
    ExtractionResult,
    extract_convex_flats,
    generic_projection,
    hyperplane_pipeline,
    largest_convex_subset_2d,
)
from .flats import Flat, GeometryError, Hyperplane, Meet, flat_contains, intersect_flat_hyperplane
from .grassmann import (
    EpsNet,
    Subspace,
    build_eps_net,
    gr_distance,
    nearest_in_net,
    near_orthogonal_pick,
    principal_angles,
)
from .lp import LPStatus, lp_feasible, lp_maximize, vertex_enumeration
from .nonconvex import (
    Cone,
    EarlyRefutation,
    OctaFamily,
    RefutationCertificate,
    det_bound_check,
    eps_threshold,
    octa_family,
    refute_cone,
    section_to_affine,
    verify_octa_nonconvex,
)

__version__ = "0.1.0"
