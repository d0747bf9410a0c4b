from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncdlift.errors import InputError
from ncdlift.linalg import AffineMap
from ncdlift.poly import Polynomial, parse_polynomial


def P(text, num_vars=None):
    return parse_polynomial(text, num_vars)


x1 = Polynomial.variable(2, 1)
x2 = Polynomial.variable(2, 2)


class TestEval:
    def test_both_factors_vanish(self):
        p = 1 - (x1 - 2) * x2
        assert p.eval([2, 0]) == 1

    def test_point_on_hyperbola(self):
        p = 1 - (x1 - 2) * x2
        assert p.eval([3, 1]) == 0

    def test_pythagorean_point_on_circle(self):
        p = 1 - x1 * x1 - x2 * x2
        assert p.eval([Fraction(3, 5), Fraction(4, 5)]) == 0

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(InputError):
            x1.eval([1, 2, 3])

    def test_float_twin_matches(self):
        p = 1 - (x1 - 2) * x2
        assert p.eval_float([0.5, 0.25]) == pytest.approx(float(p.eval([Fraction(1, 2), Fraction(1, 4)])))

    def test_eval_batch_matches_pointwise(self):
        p = (x1 - 1) * (x2 + 2) * 3 - x2 * x2
        pts = np.array([[0.0, 0.0], [1.5, -2.0], [0.25, 0.75]])
        got = p.eval_batch(pts)
        for row, value in zip(pts, got):
            assert value == pytest.approx(p.eval_float(row))


class TestPartial:
    def test_slack_block_derivative(self):
        # partial of -y^2 with respect to y is -2y
        y = Polynomial.variable(3, 3)
        p = Polynomial.variable(3, 1) - y * y
        assert p.partial(3) == -2 * y

    def test_absent_variable(self):
        p = x1 * x1
        assert p.partial(2).is_zero

    def test_gradient_on_circle(self):
        p = 1 - x1 * x1 - x2 * x2
        g = p.gradient()
        assert [gi.eval([1, 0]) for gi in g] == [-2, 0]

    def test_index_out_of_range(self):
        with pytest.raises(InputError):
            x1.partial(3)


class TestAffineSubstitute:
    def test_identity(self):
        p = 1 - (x1 - 2) * x2
        assert p.affine_substitute(AffineMap.identity(2)) == p

    def test_swap(self):
        swap = AffineMap.create([[0, 1], [1, 0]], [0, 0])
        assert x2.affine_substitute(swap) == x1

    def test_coordinate_permutation_in_five_vars(self):
        # x2 -> x4 while x1 stays put
        p = parse_polynomial("1 - (x1 - 2)*x2", 5)
        mat = [[0] * 5 for _ in range(5)]
        mat[0][0] = 1
        mat[1][3] = 1  # the image's second component reads x4
        mat[2][1] = 1
        mat[3][2] = 1
        mat[4][4] = 1
        sigma = AffineMap.create(mat, [0] * 5)
        assert p.affine_substitute(sigma) == parse_polynomial("1 - (x1 - 2)*x4", 5)

    def test_singular_map_rejected(self):
        bad = AffineMap.create([[1, 1], [2, 2]], [0, 0])
        with pytest.raises(InputError):
            x1.affine_substitute(bad)


small_fracs = st.fractions(min_value=-4, max_value=4, max_denominator=8)


def poly_strategy(num_vars=3, max_terms=5, max_exp=2):
    exps = st.tuples(*[st.integers(0, max_exp) for _ in range(num_vars)])
    return st.dictionaries(exps, small_fracs, max_size=max_terms).map(
        lambda d: Polynomial(num_vars, d)
    )


class TestRingAxioms:
    @settings(max_examples=60, deadline=None)
    @given(poly_strategy(), poly_strategy(), poly_strategy())
    def test_distributivity(self, p, q, r):
        assert (p + q) * r == p * r + q * r

    @settings(max_examples=60, deadline=None)
    @given(poly_strategy(), poly_strategy(),
           st.tuples(small_fracs, small_fracs, small_fracs))
    def test_eval_is_a_homomorphism(self, p, q, point):
        assert (p * q).eval(point) == p.eval(point) * q.eval(point)
        assert (p + q).eval(point) == p.eval(point) + q.eval(point)

    @settings(max_examples=40, deadline=None)
    @given(poly_strategy())
    def test_additive_inverse(self, p):
        assert (p - p).is_zero


def test_derivative_matches_finite_differences():
    # 1000 random points across random polynomials of degree <= 4 in <= 6 vars
    rng = np.random.default_rng(20240817)
    h = 1e-5
    checked = 0
    while checked < 1000:
        nv = int(rng.integers(1, 7))
        terms = {}
        for _ in range(int(rng.integers(1, 6))):
            exps = tuple(int(e) for e in rng.integers(0, 3, size=nv))
            if sum(exps) > 4:
                continue
            terms[exps] = Fraction(int(rng.integers(-3, 4)))
        p = Polynomial(nv, terms)
        if p.is_zero:
            continue
        i = int(rng.integers(1, nv + 1))
        dp = p.partial(i)
        for _ in range(5):
            x = rng.uniform(-1, 1, size=nv)
            xp, xm = x.copy(), x.copy()
            xp[i - 1] += h
            xm[i - 1] -= h
            fd = (p.eval_float(xp) - p.eval_float(xm)) / (2 * h)
            exact = dp.eval_float(x)
            assert abs(fd - exact) / max(1.0, abs(exact)) < 1e-6
            checked += 1


def affine_strategy(dim=2):
    entry = st.fractions(min_value=-3, max_value=3, max_denominator=4)
    return st.tuples(
        st.tuples(*[st.tuples(*[entry for _ in range(dim)]) for _ in range(dim)]),
        st.tuples(*[entry for _ in range(dim)]),
    ).map(lambda mb: AffineMap.create(mb[0], mb[1]))


class TestAffineComposition:
    @settings(max_examples=40, deadline=None)
    @given(poly_strategy(num_vars=2), affine_strategy(), affine_strategy())
    def test_composition_law(self, p, t1, t2):
        if not (t1.is_invertible() and t2.is_invertible()):
            return
        lhs = p.affine_substitute(t1).affine_substitute(t2)
        rhs = p.affine_substitute(t1.compose(t2))
        assert lhs == rhs

    @settings(max_examples=30, deadline=None)
    @given(affine_strategy(), st.tuples(small_fracs, small_fracs))
    def test_inverse_round_trip(self, t, point):
        if not t.is_invertible():
            return
        assert t.inverse().apply(t.apply(point)) == tuple(Fraction(v) for v in point)


class TestTextForm:
    @pytest.mark.parametrize(
        "text",
        ["0", "1", "-x1", "x1^2*x2 - 2/3*x1 + 1", "1 - (x1 - 2)*x2", "3/4*x2^2 + x1*x2"],
    )
    def test_parse_round_trip(self, text):
        p = parse_polynomial(text, 2)
        assert parse_polynomial(p.to_text(), 2) == p

    @settings(max_examples=60, deadline=None)
    @given(poly_strategy())
    def test_canonical_round_trip(self, p):
        assert parse_polynomial(p.to_text(), p.num_vars) == p

    def test_rejects_garbage(self):
        with pytest.raises(InputError):
            parse_polynomial("x1 +")
        with pytest.raises(InputError):
            parse_polynomial("x1 $ x2")

    def test_zero_polynomial(self):
        assert Polynomial.zero(3).to_text() == "0"
        assert parse_polynomial("0", 3).is_zero


class TestStructure:
    def test_degree_and_invariants(self):
        p = 1 - (x1 - 2) * x2
        assert p.degree() == 2
        assert all(c != 0 for _, c in p.terms_grlex())

    def test_grlex_order_is_descending(self):
        p = x1 * x1 + x2 + 1 + x1 * x2
        degrees = [sum(e) for e, _ in p.terms_grlex()]
        assert degrees == sorted(degrees, reverse=True)

    def test_substitute(self):
        p = 1 - (x1 - 2) * x2
        assert p.substitute(1, Fraction(3)) == parse_polynomial("1 - x2", 2)

    def test_as_quadratic(self):
        p = 2 - 3 * x1 + x1 * x2
        const, lin, quad = p.as_quadratic()
        assert const == 2 and lin == {1: -3} and quad == {(1, 2): 1}

    def test_support(self):
        p = parse_polynomial("x1*x4 + 1", 5)
        assert p.support() == (1, 4)
