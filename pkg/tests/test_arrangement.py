from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncdlift.arrangement import (
    Arrangement,
    NcdBudget,
    check_ncd,
    check_transversality_at,
    exact_min_on_box,
    membership,
    pair_intersection,
    sample_boundary,
    sample_region,
)
from ncdlift.construct import ConstructionInput, build
from ncdlift.errors import InputError
from ncdlift.geom import ellipsoid, hyperbola_region
from ncdlift.linalg import AffineMap
from ncdlift.poly import parse_polynomial
from ncdlift.serialize import canonical_dumps


@pytest.fixture(scope="module")
def rectangle():
    return build(ConstructionInput(t=(0, 1), labels=(0,), variant="mt2"))


@pytest.fixture(scope="module")
def strip():
    return build(ConstructionInput(t=(0, 1), labels=(1,), variant="mt2"))


@pytest.fixture(scope="module")
def tangent_circles():
    c1 = ellipsoid((0, 0), (1, 1), "body")
    c2 = ellipsoid((2, 0), (1, 1), "body")
    return Arrangement(
        n=2, primitives=(c1, c2), seed_point=(0, 0), provenance="adversarial:tangent"
    )


@pytest.fixture(scope="module")
def dangling_branch():
    # a flat corridor with the x2 >= 0 half-plane dropped: the far branch of
    # the first hyperbola now meets the closed region
    f1 = hyperbola_region("right", 0, 0, -1, branch="plus")
    f2 = hyperbola_region("left", 1, 0, 1, branch="plus")
    return Arrangement(
        n=2,
        primitives=(f1, f2),
        seed_point=(Fraction(1, 2), Fraction(1, 2)),
        provenance="adversarial:dangling",
    )


class TestMembership:
    def test_interior(self, rectangle):
        assert membership(rectangle, (Fraction(1, 2), Fraction(1, 2)))[0] == "interior"

    def test_corner_active_set(self, rectangle):
        status, active = membership(rectangle, (0, 0))
        assert status == "boundary"
        assert set(active) == {0, 1}  # x1 and x2 faces

    def test_exterior(self, rectangle):
        assert membership(rectangle, (2, 0))[0] == "exterior"

    def test_dimension_mismatch(self, rectangle):
        with pytest.raises(InputError):
            membership(rectangle, (0, 0, 0))

    def test_float_tolerance(self, rectangle):
        status, active = membership(rectangle, (1e-12, 0.5))
        assert status == "boundary" and active == (0,)

    def test_seed_points_interior_for_constructions(self):
        for labels, variant in [((0,), "mt2"), ((1,), "mt3"), ((0, 1), "mt2")]:
            t = tuple(range(len(labels) + 1))
            arr = build(ConstructionInput(t=t, labels=labels, variant=variant))
            assert membership(arr, arr.seed_point)[0] == "interior"


class TestTransversality:
    def test_rectangle_corner(self, rectangle):
        report = check_transversality_at(rectangle, (Fraction(0), Fraction(0)))
        assert report["passed"] and report["rank"] == 2 and report["exact"]

    def test_plus_region_corner_determinant(self):
        # slanted edge meets the hyperbola at (s13, s2); symbolic 2x2 check
        s11, s12, s13 = Fraction(0), Fraction(1), Fraction(2)
        s = Fraction(1)
        s2 = s / (s13 - s12)
        arr = build(ConstructionInput(t=(s11, s12, s13), labels=(1, 0), variant="mt2"))
        corner = (s13, s2)
        status, active = membership(arr, corner)
        assert status == "boundary" and len(active) == 2
        g_line = [g.eval(corner) for g in arr.primitives[active[0]].f.gradient()]
        g_hyp = [g.eval(corner) for g in arr.primitives[active[1]].f.gradient()]
        det = g_line[0] * g_hyp[1] - g_line[1] * g_hyp[0]
        assert det == 2 * s2  # nonzero, computed symbolically
        report = check_transversality_at(arr, corner, active)
        assert report["passed"] and report["exact"]

    def test_single_active_hole_boundary(self):
        arr = build(ConstructionInput(t=(0, 1, 2, 3), labels=(0, 0, 0), variant="mt2"))
        pole = (Fraction(1), Fraction(1, 2), Fraction(0))
        status, active = membership(arr, pole)
        assert status == "boundary" and len(active) == 1
        report = check_transversality_at(arr, pole, active)
        assert report["passed"] and report["rank"] == 1

    def test_tangent_circles_fail_exact(self, tangent_circles):
        report = check_transversality_at(tangent_circles, (Fraction(1), Fraction(0)), (0, 1))
        assert not report["passed"]
        assert report["rank"] == 1 and report["exact"]


class TestCheckNcd:
    def test_rectangle_passes(self, rectangle):
        report = check_ncd(rectangle, NcdBudget(), seed=0)
        assert report["passed"]

    def test_tangent_circles_fail_transversality(self, tangent_circles):
        report = check_ncd(tangent_circles, NcdBudget(), seed=0)
        trans = next(c for c in report["checks"] if c["id"] == "transversality")
        assert not trans["passed"]
        witness = trans["failures"][0]["point"]
        assert witness[0] == pytest.approx(1.0) and witness[1] == pytest.approx(0.0)

    def test_dangling_branch_fails_separation(self, dangling_branch):
        report = check_ncd(dangling_branch, NcdBudget(), seed=0)
        sep = next(c for c in report["checks"] if c["id"] == "off_component_separation")
        assert not sep["passed"]
        point = sep["failures"][0]["point"]
        assert point[1] < 0  # a far-branch witness below the axis

    def test_determinism(self, rectangle):
        r1 = check_ncd(rectangle, NcdBudget(), seed=5)
        r2 = check_ncd(rectangle, NcdBudget(), seed=5)
        assert canonical_dumps(r1) == canonical_dumps(r2)

    def test_missed_intersections_reported_not_empty(self, rectangle):
        report = check_ncd(rectangle, NcdBudget(), seed=0)
        trans = next(c for c in report["checks"] if c["id"] == "transversality")
        for pair in trans["pairs"]:
            assert pair["status"] in ("found", "empty", "not_found")
            if pair["status"] == "empty":
                assert pair["detail"]


class TestPairIntersection:
    def test_adjacent_faces_found_exactly(self, rectangle):
        res = pair_intersection(rectangle, 0, 1)
        assert res["status"] == "found"
        assert any(tuple(map(float, p)) == (0.0, 0.0) for p in res["points"])

    def test_parallel_faces_certified_empty(self, rectangle):
        res = pair_intersection(rectangle, 0, 2)  # x1 = 0 vs x1 = 1
        assert res["status"] == "empty" and res["certified"]

    def test_same_corridor_hyperbolas_certified_empty(self):
        arr = build(ConstructionInput(t=(0, 1, 2, 3), labels=(1, 0, 0), variant="mt2"))
        hyps = [
            j
            for j, p in enumerate(arr.primitives)
            if p.base_kind == "hyperbola_region"
        ]
        res = pair_intersection(arr, hyps[0], hyps[1])
        assert res["status"] == "empty" and res["certified"]

    def test_tangency_located(self, tangent_circles):
        res = pair_intersection(tangent_circles, 0, 1)
        assert res["status"] == "found"
        p = res["points"][0]
        assert float(p[0]) == pytest.approx(1.0) and float(p[1]) == pytest.approx(0.0)


class TestSampling:
    def test_interior_samples_are_interior(self, rectangle):
        pts, info = sample_region(rectangle, 50, seed=1)
        assert pts.shape == (50, 2)
        for p in pts:
            assert membership(rectangle, p)[0] == "interior"
        assert info["method"].startswith("rejection")

    def test_determinism(self, rectangle):
        a, _ = sample_region(rectangle, 30, seed=9)
        b, _ = sample_region(rectangle, 30, seed=9)
        assert np.array_equal(a, b)

    def test_boundary_samples(self, rectangle):
        out = sample_boundary(rectangle, 40, seed=2)
        assert len(out) == 40
        for point, active in out:
            assert active
            vals = [prim.f.eval_float(point) for prim in rectangle.primitives]
            assert min(vals) > -1e-9
            assert min(abs(v) for v in vals) < 1e-9

    def test_boundary_samples_transverse(self, rectangle):
        for point, active in sample_boundary(rectangle, 30, seed=3):
            report = check_transversality_at(rectangle, point, active, tol=1e-7)
            assert report["passed"]

    def test_strip_reaches_high_x2(self, strip):
        pts, _ = sample_region(strip, 400, seed=4)
        assert (pts[:, 1] > 10).any()  # unboundedness witness inside the window

    def test_high_dimensional_fallback_reported(self):
        arr = build(ConstructionInput(t=(0, 1, 2, 3, 4, 5), labels=(1, 1, 1, 1, 1), variant="mt2"))
        pts, info = sample_region(arr, 64, seed=5)
        assert pts.shape[0] == 64
        assert "method" in info  # fallback, if used, is reported


class TestAffineEquivariance:
    @settings(max_examples=15, deadline=None)
    @given(
        st.tuples(
            st.tuples(*[st.fractions(min_value=-2, max_value=2, max_denominator=3) for _ in range(2)]),
            st.tuples(*[st.fractions(min_value=-2, max_value=2, max_denominator=3) for _ in range(2)]),
        ),
        st.tuples(*[st.fractions(min_value=-2, max_value=2, max_denominator=3) for _ in range(2)]),
        st.tuples(
            st.fractions(min_value=-1, max_value=2, max_denominator=4),
            st.fractions(min_value=-1, max_value=2, max_denominator=4),
        ),
    )
    def test_membership_commutes_with_affine_maps(self, mat, off, x):
        T = AffineMap.create(mat, off)
        if not T.is_invertible():
            return
        arr = build(ConstructionInput(t=(0, 1), labels=(0,), variant="mt2"))
        Tinv = T.inverse()
        moved = Arrangement(
            n=2,
            primitives=tuple(
                type(p)(p.kind, p.f.affine_substitute(Tinv), p.component, p.metadata, T.apply(p.witness))
                for p in arr.primitives
            ),
            seed_point=T.apply(arr.seed_point),
        )
        assert membership(arr, x)[0] == membership(moved, T.apply(x))[0]


class TestExactMinOnBox:
    def test_affine(self):
        f = parse_polynomial("x1 - 2*x2 + 1", 2)
        assert exact_min_on_box(f, [0, 0], [1, 1]) == -1

    def test_separable_quadratic(self):
        f = parse_polynomial("x1^2 + x2^2 - 1", 2)
        assert exact_min_on_box(f, [Fraction(1, 2), -1], [2, 1]) == Fraction(-3, 4)

    def test_bilinear_minimum_at_corner(self):
        f = parse_polynomial("1 - x1*x2", 2)
        assert exact_min_on_box(f, [1, 1], [2, 3]) == -5

    def test_concave_quadratic_at_endpoints(self):
        f = parse_polynomial("1 - x1^2", 1)
        assert exact_min_on_box(f, [-3], [2]) == -8
