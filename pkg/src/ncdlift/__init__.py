"""Quadric-bounded domain construction, sphere-bundle lifting, verification.

Pipeline: interval data ``(t_1 < ... < t_l, labels)`` -> an explicit domain
D in R^n cut out by degree <= 2 inequalities (lines, hyperbola cylinders,
ellipsoids) -> the manifold M = {(x, y) : f_j(x) = ||y_j||^2} together with
the coordinate function f = x1, whose level sets are compact exactly over
the label-0 intervals -> a verification suite for every claimed property.
"""

from .poly import Polynomial, parse_polynomial
from .geom import (
    ComponentDescriptor,
    Primitive,
    ellipsoid,
    embed_plane_primitive,
    half_plane,
    hyperbola_region,
    pad_primitive,
    region_R,
)
from .arrangement import Arrangement, check_ncd, check_transversality_at, membership
from .construct import ConstructionInput, build, predicted_profile
from .lift import LiftedManifold, fiber_at, lift, project, sample_manifold
from .verify import (
    classify_slice,
    detect_singular_values,
    run_suite,
    verify_image_interval,
    verify_nonsingular,
)

__all__ = [
    "Polynomial",
    "parse_polynomial",
    "ComponentDescriptor",
    "Primitive",
    "half_plane",
    "hyperbola_region",
    "ellipsoid",
    "embed_plane_primitive",
    "pad_primitive",
    "region_R",
    "Arrangement",
    "membership",
    "check_transversality_at",
    "check_ncd",
    "ConstructionInput",
    "build",
    "predicted_profile",
    "LiftedManifold",
    "lift",
    "fiber_at",
    "sample_manifold",
    "project",
    "verify_nonsingular",
    "classify_slice",
    "detect_singular_values",
    "verify_image_interval",
    "run_suite",
]
