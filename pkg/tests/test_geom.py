from fractions import Fraction

import numpy as np
import pytest
from scipy import ndimage

from ncdlift.errors import InputError
from ncdlift.geom import (
    ComponentDescriptor,
    ellipsoid,
    embed_plane_primitive,
    half_plane,
    hyperbola_region,
    pad_primitive,
    region_R,
)
from ncdlift.poly import parse_polynomial


class TestHalfPlane:
    def test_vertical_line(self):
        prim = half_plane((0, 0), (0, 1), "+")
        assert prim.f == parse_polynomial("x1", 2)

    def test_horizontal_axis(self):
        prim = half_plane((0, 0), (1, 0), "+")
        assert prim.f == parse_polynomial("x2", 2)

    def test_complement_of_top(self):
        prim = half_plane((0, 1), (1, 1), "-")
        assert prim.f == parse_polynomial("1 - x2", 2)

    def test_coincident_points_rejected(self):
        with pytest.raises(InputError):
            half_plane((1, 1), (1, 1), "+")

    def test_witness_strictly_inside(self):
        for side in "+-":
            prim = half_plane((0, 0), (2, 1), side)
            assert prim.f.eval(prim.witness) > 0

    def test_component_descriptor_empty(self):
        assert half_plane((0, 0), (0, 1), "+").component.is_empty


class TestHyperbolaRegion:
    def test_left_variant_polynomial(self):
        prim = hyperbola_region("left", 2, 0, 1)
        assert prim.f == parse_polynomial("1 - (x1 - 2)*x2", 2)
        assert prim.f.eval([2, 0]) == 1  # interior
        assert prim.f.eval([3, 1]) == 0  # on the selected branch

    def test_branch_conditions_at_boundary_point(self):
        prim = hyperbola_region("left", 2, 0, 1)
        assert prim.component.satisfied((3, 1))  # x1 > 2, x2 > 0
        assert not prim.component.satisfied((1, -1))

    def test_excluded_convex_side(self):
        prim = hyperbola_region("left", 2, 0, 1)
        assert prim.f.eval([4, 1]) == -1

    def test_right_variant_center(self):
        prim = hyperbola_region("right", 0, 0, -1)
        assert prim.f == parse_polynomial("x1*x2 + 1", 2)
        assert prim.f.eval([0, 0]) == 1

    def test_wrong_sign_rejected(self):
        with pytest.raises(InputError):
            hyperbola_region("left", 2, 0, -1)
        with pytest.raises(InputError):
            hyperbola_region("right", 0, 0, 1)

    def test_positive_region_is_one_component_touching_both_branches(self):
        # grid oracle over [-10, 10]^2 at step 0.05
        prim = hyperbola_region("left", 2, 0, 1)
        axis = np.arange(-10, 10 + 1e-9, 0.05)
        U, V = np.meshgrid(axis, axis, indexing="ij")
        pts = np.column_stack([U.ravel(), V.ravel()])
        mask = (prim.f.eval_batch(pts) > 0).reshape(U.shape)
        labels, ncomp = ndimage.label(mask)
        assert ncomp == 1
        # the closure reaches both branches: points just inside near each branch
        plus_side = prim.f.eval_float([3, 1 - 0.01])
        minus_side = prim.f.eval_float([1, -1 + 0.01])
        assert plus_side > 0 and minus_side > 0

    def test_branches_nonempty_and_disjoint(self):
        prim = hyperbola_region("left", 2, 0, 1)
        plus, minus = prim.branches["plus"], prim.branches["minus"]
        # solve for x2 given x1 on each side of the pole
        for x1 in (Fraction(5, 2), 3, 5):
            x2 = Fraction(1) / (x1 - 2)
            assert prim.f.eval([x1, x2]) == 0
            assert plus.satisfied((x1, x2)) and not minus.satisfied((x1, x2))
        for x1 in (Fraction(3, 2), 1, -2):
            x2 = Fraction(1) / (x1 - 2)
            assert prim.f.eval([x1, x2]) == 0
            assert minus.satisfied((x1, x2)) and not plus.satisfied((x1, x2))


class TestEllipsoid:
    def test_body_values(self):
        prim = ellipsoid((0, 0), (4, 1), "body")
        assert prim.f.eval([0, 0]) == 1
        assert prim.f.eval([2, 0]) == 0  # semi-axis sqrt(4) = 2

    def test_hole_pole_positions(self):
        eps2 = Fraction(1, 64)
        prim = ellipsoid((Fraction(3, 2), Fraction(1, 2), 0), (Fraction(1, 4), eps2, eps2), "hole")
        assert prim.f.eval([1, Fraction(1, 2), 0]) == 0
        assert prim.f.eval([2, Fraction(1, 2), 0]) == 0
        # hole is outside-positive; its center sits at the minimum -1
        assert prim.f.eval([10, 0, 0]) > 0
        assert prim.f.eval([Fraction(3, 2), Fraction(1, 2), 0]) == -1

    def test_one_dimensional_interval(self):
        prim = ellipsoid((0,), (1,), "body")
        assert prim.f == parse_polynomial("1 - x1^2", 1)
        assert prim.f.eval([1]) == 0 and prim.f.eval([-1]) == 0

    def test_nonpositive_semi_axis_rejected(self):
        with pytest.raises(InputError):
            ellipsoid((0, 0), (1, 0), "body")

    def test_witnesses(self):
        body = ellipsoid((1, 2), (4, 9), "body")
        hole = ellipsoid((1, 2), (4, 9), "hole")
        assert body.f.eval(body.witness) > 0
        assert hole.f.eval(hole.witness) > 0


class TestEmbed:
    def test_hyperbola_cylinder(self):
        prim = embed_plane_primitive(hyperbola_region("left", 2, 0, 1), 5, 4)
        assert prim.f == parse_polynomial("1 - (x1 - 2)*x4", 5)
        assert prim.kind == "cylinder"
        assert prim.base_kind == "hyperbola_region"

    def test_half_plane_cylinder(self):
        prim = embed_plane_primitive(half_plane((0, 0), (1, 0), "+"), 5, 4)
        assert prim.f == parse_polynomial("x4", 5)

    def test_identity_embed(self):
        base = hyperbola_region("left", 2, 0, 1)
        assert embed_plane_primitive(base, 2, 2) is base

    def test_function_coordinate_never_remapped(self):
        with pytest.raises(InputError):
            embed_plane_primitive(half_plane((0, 0), (1, 0), "+"), 5, 1)

    def test_eval_commutes_with_embedding(self):
        base = hyperbola_region("left", 2, 0, 1)
        emb = embed_plane_primitive(base, 5, 4)
        rng = np.random.default_rng(7)
        for _ in range(50):
            x = rng.uniform(-3, 3, size=5)
            assert emb.f.eval_float(x) == pytest.approx(base.f.eval_float([x[0], x[3]]))

    def test_pad_one_dimensional_body(self):
        prim = pad_primitive(ellipsoid((0,), (1,), "body"), 2)
        assert prim.f == parse_polynomial("1 - x1^2", 2)
        assert prim.kind == "cylinder"


class TestRegionR:
    def test_flat_region_primitives(self):
        prims = region_R("flat", (0, 1), 0, 1)
        texts = {p.f for p in prims}
        assert texts == {
            parse_polynomial("x2", 2),
            parse_polynomial("x1*x2 + 1", 2),
            parse_polynomial("1 - (x1 - 1)*x2", 2),
        }

    def test_flat_slice_unbounded_inside_gap(self):
        prims = region_R("flat", (0, 1), 0, 1)
        # members (1/2, K) exist for K up to 10^3
        for K in (1, 10, 100, 1000):
            assert all(p.f.eval([Fraction(1, 2), K]) >= 0 for p in prims)

    def test_flat_slice_bounded_outside_gap(self):
        prims = region_R("flat", (0, 1), 0, 1)
        # at x1 = -1 the constraint x1*x2 + 1 >= 0 forces x2 <= 1
        assert all(p.f.eval([-1, 1]) >= 0 for p in prims)
        assert any(p.f.eval([-1, Fraction(11, 10)]) < 0 for p in prims)
        assert all(p.f.eval([-1, Fraction(1, 2)]) >= 0 for p in prims)

    def test_plus_region_incidence_checked(self):
        with pytest.raises(InputError, match="not on the hyperbola"):
            region_R("plus", (0, 1, 2), 2, 1)  # residual (2-1)*2 - 1 = 1
        with pytest.raises(InputError):
            region_R("plus", (0, 1, 2), 0, 1)  # s2 must be positive
        # exact incidence (s13 - s12) * s2 = s
        prims = region_R("plus", (0, 1, 2), 1, 1)
        assert len(prims) == 4
        corner = (2, 1)
        hyp = prims[3]
        assert hyp.f.eval(corner) == 0

    def test_minus_region_incidence_checked(self):
        with pytest.raises(InputError):
            region_R("minus", (0, 1, 2), 7, 1)
        prims = region_R("minus", (0, 1, 2), 1, 1)
        assert len(prims) == 4
        assert prims[3].f.eval((0, 1)) == 0

    def test_all_primitives_degree_at_most_two(self):
        prims = (
            region_R("flat", (0, 1), 0, 1)
            + region_R("plus", (0, 1, 2), 1, 1)
            + region_R("minus", (0, 1, 2), 1, 1)
            + [half_plane((0, 0), (1, 2), "+"), ellipsoid((0, 0, 0), (1, 2, 3), "hole")]
        )
        assert all(p.f.degree() <= 2 for p in prims)

    def test_witnesses_strictly_positive(self):
        for prims in (region_R("plus", (0, 1, 2), 1, 1), region_R("minus", (0, 1, 2), 1, 1)):
            for p in prims:
                assert p.f.eval(p.witness) > 0


def test_descriptor_membership_is_strict():
    prim = hyperbola_region("left", 0, 0, 1)
    boundary_case = (Fraction(1), Fraction(0))  # x2 - b = 0 exactly
    assert not prim.branches["plus"].satisfied(boundary_case)
    assert ComponentDescriptor().satisfied((1, 2))
