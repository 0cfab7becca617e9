import random
from fractions import Fraction

import pytest

from crsegre.gaussrat import GaussRat
from crsegre.series import (
    TruncatedSeries, SeriesVector, solve_implicit, multiindices,
    ArityMismatchError, NonUnitError, SingularLinearPartError,
)

I = GaussRat(0, 1)


def var(i, nvars=2, order=8):
    return TruncatedSeries.variable(i, nvars, order)


def const(c, nvars=2, order=8):
    return TruncatedSeries.constant(c, nvars, order)


def random_series(rng, nvars, order, terms=5, max_deg=4):
    coeffs = {}
    mis = [a for a in multiindices(nvars, max_deg)]
    for _ in range(terms):
        alpha = rng.choice(mis)
        coeffs[alpha] = GaussRat(Fraction(rng.randint(-4, 4), rng.randint(1, 3)),
                                 Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
    return TruncatedSeries(nvars, order, coeffs)


class TestBasics:
    def test_add_cancellation(self):
        z = var(0)
        assert (1 + z) + (-z) == const(1)

    def test_add_assembles_example_3_2_13(self):
        # z^5 zbar + zbar^5 z, assembled from the two summands
        z, zb = var(0), var(1)
        lhs = z ** 5 * zb + zb ** 5 * z
        assert lhs.coefficient((5, 1)) == GaussRat(1)
        assert lhs.coefficient((1, 5)) == GaussRat(1)

    def test_additive_identity(self):
        f = var(0) * var(1)
        assert TruncatedSeries.zero(2, 8) + f == f

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatchError):
            var(0, nvars=2) + var(0, nvars=3)

    def test_mul(self):
        z = var(0)
        assert (1 + z) * (1 - z) == 1 - z * z
        assert (var(0) * var(0)) * (var(1) * var(1)) == \
            TruncatedSeries(2, 8, {(2, 2): GaussRat(1)})

    def test_mul_truncates_to_min_order(self):
        a = var(0, order=5)
        b = var(0, order=3)
        assert (a * b).order == 3

    def test_unit_inverse_cancels(self):
        f = 1 + var(0) * var(1)
        assert f * f.invert_unit() == const(1)

    def test_invert_constants_and_nonunits(self):
        two = const(2)
        assert two.invert_unit() == const(Fraction(1, 2))
        geom = (1 + var(0)).invert_unit()
        assert geom.coefficient((3, 0)) == GaussRat(-1)
        with pytest.raises(NonUnitError):
            var(0).invert_unit()

    def test_partial_derivative(self):
        z, w = var(0), var(1)
        assert (z * z * w).partial_derivative(0) == (z * w).scale(2).truncate(7)
        assert const(5).partial_derivative(0).is_zero()
        with pytest.raises(ArityMismatchError):
            z.partial_derivative(5)

    def test_heisenberg_tangent_coefficient(self):
        # d/dzbar (w - 2 i z zbar) = -2 i z in the (zbar, z, w) variables
        zb = TruncatedSeries.variable(0, 3, 8)
        z = TruncatedSeries.variable(1, 3, 8)
        w = TruncatedSeries.variable(2, 3, 8)
        theta = w - (z * zb).scale(2 * I)
        assert theta.partial_derivative(0) == (-z.scale(2 * I)).truncate(7)

    def test_conjugate_coeffs(self):
        z = var(0)
        f = z.scale(I)
        assert f.conjugate_coeffs() == z.scale(-I)
        g = random_series(random.Random(7), 2, 8)
        assert g.conjugate_coeffs().conjugate_coeffs() == g

    def test_evaluate(self):
        z = var(0, 1)
        f = z * z - 1
        assert f.evaluate([GaussRat(2)]) == GaussRat(3)
        assert TruncatedSeries.zero(3, 5).evaluate(
            [GaussRat(1)] * 3) == GaussRat(0)
        # (w - 2 i z zbar) at (zbar, z, w) = (1, 1, 0) -> -2i
        zb = TruncatedSeries.variable(0, 3, 8)
        zz = TruncatedSeries.variable(1, 3, 8)
        w = TruncatedSeries.variable(2, 3, 8)
        theta = w - (zz * zb).scale(2 * I)
        assert theta.evaluate([GaussRat(1), GaussRat(1), GaussRat(0)]) == -2 * I


class TestCompose:
    def test_hand_expansion(self):
        y = TruncatedSeries.variable(0, 1, 8)
        f = y * y
        w = TruncatedSeries.variable(0, 1, 8)
        out = f.compose([w + w * w])
        expect = w ** 2 + (w ** 3).scale(2) + w ** 4
        assert out == expect

    def test_identity(self):
        rng = random.Random(3)
        f = random_series(rng, 2, 8)
        ident = [var(0), var(1)]
        assert f.compose(ident) == f

    def test_rejects_constant_terms(self):
        f = var(0, 1)
        with pytest.raises(ArityMismatchError):
            f.compose([1 + TruncatedSeries.variable(0, 1, 8)])

    def test_shift_mode(self):
        f = TruncatedSeries.variable(0, 1, 8) ** 2
        shifted = f.shift([GaussRat(1)])
        z = TruncatedSeries.variable(0, 1, 8)
        assert shifted == 1 + z.scale(2) + z * z
        # compose_at matches shift-then-compose
        g = f.compose_at([1 + z])
        assert g == shifted

    def test_heisenberg_functional_equation(self):
        # Thetabar(z, zbar, Theta(zbar, z, w)) == w for Theta = w - 2 i z zbar
        zb = TruncatedSeries.variable(0, 3, 8)
        z = TruncatedSeries.variable(1, 3, 8)
        w = TruncatedSeries.variable(2, 3, 8)
        theta = w - (z * zb).scale(2 * I)
        theta_bar = theta.conjugate_coeffs()
        out = theta_bar.compose([z, zb, theta])
        assert out == w


class TestRingProperties:
    def test_ring_axioms(self):
        rng = random.Random(11)
        for _ in range(10):
            a = random_series(rng, 2, 6)
            b = random_series(rng, 2, 6)
            c = random_series(rng, 2, 6)
            assert (a + b) + c == a + (b + c)
            assert a * (b + c) == a * b + a * c
            assert a * b == b * a

    def test_leibniz(self):
        rng = random.Random(12)
        for _ in range(8):
            a = random_series(rng, 2, 6)
            b = random_series(rng, 2, 6)
            lhs = (a * b).partial_derivative(0)
            rhs = a.partial_derivative(0) * b.truncate(5) + \
                a.truncate(5) * b.partial_derivative(0)
            assert lhs == rhs

    def test_chain_rule(self):
        rng = random.Random(13)
        for _ in range(5):
            f = random_series(rng, 2, 6)
            g0 = random_series(rng, 2, 6) - \
                const(random_series(rng, 2, 6).constant_term(), 2, 6)
            g1 = random_series(rng, 2, 6) - \
                const(random_series(rng, 2, 6).constant_term(), 2, 6)
            g0 = g0 - const(g0.constant_term(), 2, 6)
            g1 = g1 - const(g1.constant_term(), 2, 6)
            lhs = f.compose([g0, g1]).partial_derivative(0)
            rhs = (f.partial_derivative(0).compose([g0.truncate(5), g1.truncate(5)])
                   * g0.partial_derivative(0)
                   + f.partial_derivative(1).compose([g0.truncate(5), g1.truncate(5)])
                   * g1.partial_derivative(0))
            assert lhs == rhs

    def test_conjugation_is_ring_homomorphism(self):
        rng = random.Random(14)
        a = random_series(rng, 2, 6)
        b = random_series(rng, 2, 6)
        assert (a + b).conjugate_coeffs() == \
            a.conjugate_coeffs() + b.conjugate_coeffs()
        assert (a * b).conjugate_coeffs() == \
            a.conjugate_coeffs() * b.conjugate_coeffs()


def brute_force_implicit(H, n_x, n_y, order):
    """Independent oracle: Newton-style fixed point phi <- phi - A^-1 H,
    which gains one correct degree per sweep."""
    from crsegre.series import _invert_matrix, _unit_index

    A = [[h.coefficient(_unit_index(n_x + n_y, n_x + l)) for l in range(n_y)]
         for h in H]
    A_inv = _invert_matrix(A)
    x_args = [TruncatedSeries.variable(i, n_x, order) for i in range(n_x)]
    phi = [TruncatedSeries.zero(n_x, order) for _ in range(n_y)]
    for _ in range(order + 1):
        values = [h.compose(x_args + phi) for h in H]
        new = []
        for j in range(n_y):
            corr = TruncatedSeries.zero(n_x, order)
            for l in range(n_y):
                corr = corr + values[l].scale(A_inv[j][l])
            new.append(phi[j] - corr)
        phi = new
    return phi


class TestSolveImplicit:
    def test_catalan(self):
        x = TruncatedSeries.variable(0, 2, 8)
        y = TruncatedSeries.variable(1, 2, 8)
        phi = solve_implicit([y - x - y * y], 1, 1)
        catalan = [1, 1, 2, 5, 14, 42, 132, 429]
        for k, c in enumerate(catalan, start=1):
            assert phi[0].coefficient((k,)) == GaussRat(c)

    def test_trivial(self):
        x = TruncatedSeries.variable(0, 2, 6)
        y = TruncatedSeries.variable(1, 2, 6)
        phi = solve_implicit([y - x], 1, 1)
        assert phi[0] == TruncatedSeries.variable(0, 1, 6)

    def test_singular_part_rejected(self):
        x = TruncatedSeries.variable(0, 2, 6)
        y = TruncatedSeries.variable(1, 2, 6)
        with pytest.raises(SingularLinearPartError):
            solve_implicit([y * y - x], 1, 1)

    def test_residual_vanishes(self):
        rng = random.Random(15)
        x = TruncatedSeries.variable(0, 3, 6)
        y1 = TruncatedSeries.variable(1, 3, 6)
        y2 = TruncatedSeries.variable(2, 3, 6)
        H = [y1 - x + (y2 * y2).scale(GaussRat(Fraction(1, 2))),
             y2 - x * x + y1 * y2]
        phi = solve_implicit(H, 1, 2)
        args = [TruncatedSeries.variable(0, 1, 6)] + list(phi)
        for h in H:
            assert h.compose(args).is_zero()

    def test_matches_brute_force_oracle(self):
        rng = random.Random(16)
        for trial in range(20):
            n_x = rng.randint(1, 2)
            n_y = rng.randint(1, 2)
            nv = n_x + n_y
            order = 8
            H = []
            for j in range(n_y):
                s = random_series(rng, nv, order, terms=4, max_deg=3)
                s = s - const(s.constant_term(), nv, order)
                # force an invertible, in fact triangular, linear y-part
                y_unit = tuple(1 if i == n_x + j else 0 for i in range(nv))
                s = s + TruncatedSeries(nv, order, {y_unit: GaussRat(3)})
                H.append(s)
            try:
                phi = solve_implicit(H, n_x, n_y)
            except SingularLinearPartError:
                continue
            oracle = brute_force_implicit(H, n_x, n_y, order)
            assert list(phi) == oracle


class TestSeriesVector:
    def test_mixed_orders_rejected(self):
        with pytest.raises(ArityMismatchError):
            SeriesVector([var(0, order=8), var(0, order=6)])

    def test_properties(self):
        v = SeriesVector([var(0), var(1)])
        assert v.nvars == 2 and v.order == 8
