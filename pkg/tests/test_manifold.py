from fractions import Fraction

import pytest

from crsegre.gaussrat import GaussRat
from crsegre.series import TruncatedSeries, SeriesVector
from crsegre.frontend import load_manifest, load_manifold_spec
from crsegre.manifold import (
    GenericManifold, ManifoldError, RealityError, build_from_spec,
    from_real_equations, to_normal_coordinates, transform_linear,
    transform_triangular, build_with_linear_change,
)
from conftest import manifold_from_text

from randman import random_real_graph_spec, random_rigid_manifold, \
    transformed_copy

I = GaussRat(0, 1)
HALF = GaussRat(Fraction(1, 2))


class TestConstruction:
    def test_heisenberg_valid(self, corpus):
        M = corpus["heisenberg"]
        assert (M.m, M.d, M.n) == (1, 1, 2)
        assert M.check_reality().ok

    def test_levi_flat_valid(self, corpus):
        assert corpus["levi_flat"].check_reality().ok

    def test_reality_failure_witness(self):
        with pytest.raises(RealityError) as err:
            manifold_from_text("""
            manifold b { m=1; d=1; order=8; style=complex_defining;
              eq: w + z*zbar; }""")
        tag, j, alpha, coeff = err.value.witness
        assert j == 1 and alpha == (1, 1, 0)

    def test_nonzero_constant_rejected(self):
        with pytest.raises(ManifoldError):
            manifold_from_text("""
            manifold b { m=1; d=1; order=8; style=complex_defining;
              eq: w + 1; }""")

    def test_singular_w_part_rejected(self):
        with pytest.raises(ManifoldError) as err:
            manifold_from_text("""
            manifold b { m=1; d=1; order=8; style=complex_defining;
              eq: z + zbar; }""")
        assert "generic position" in str(err.value)


class TestRealToComplex:
    def test_heisenberg(self, corpus):
        M = corpus["heisenberg_real"]
        assert M.theta[0] == corpus["heisenberg"].theta[0]

    def test_zero_graph(self):
        M = manifold_from_text("""
        manifold f { m=1; d=1; order=8; style=real_graph; eq: 0*x; }""")
        names = M.variable_names()
        assert M.theta_strings() == ["w_1"]

    def test_tilted_parabola(self, corpus):
        # v = (Re z)^2  ->  Theta = w - (i/2)(z + zbar)^2
        T = corpus["tilted"]
        t = T.theta[0]
        assert t.coefficient((0, 2, 0)) == -HALF * I
        assert t.coefficient((1, 1, 0)) == -I
        assert t.coefficient((2, 0, 0)) == -HALF * I

    def test_reality_automatic(self):
        for seed in range(6):
            spec = random_real_graph_spec(seed, m=seed % 2 + 1, d=1, order=6)
            M = from_real_equations(spec)
            assert M.check_reality().ok


class TestNormalCoordinates:
    def test_tilted_to_heisenberg(self, corpus):
        T = corpus["tilted"]
        TN, h = to_normal_coordinates(T)
        z = TruncatedSeries.variable(1, 3, 10)
        zb = TruncatedSeries.variable(0, 3, 10)
        w = TruncatedSeries.variable(2, 3, 10)
        assert TN.theta[0] == w - (z * zb).scale(I)
        # h = (z, w - (i/2) z^2)
        zz = TruncatedSeries.variable(0, 2, 10)
        ww = TruncatedSeries.variable(1, 2, 10)
        assert list(h) == [zz, ww - (zz * zz).scale(HALF * I)]

    def test_already_normal_is_identity(self, corpus):
        H = corpus["heisenberg"]
        HN, h = to_normal_coordinates(H)
        assert HN.theta[0] == H.theta[0]
        assert [s.first_nonzero()[0] for s in h] == [(1, 0), (0, 1)]

    def test_levi_flat_unchanged(self, corpus):
        F = corpus["levi_flat"]
        FN, _ = to_normal_coordinates(F)
        assert FN.theta[0] == F.theta[0]

    def test_idempotent(self, corpus):
        for name in ("tilted", "m3239", "codim2"):
            M1, _ = to_normal_coordinates(corpus[name])
            M2, h2 = to_normal_coordinates(M1)
            assert M1.theta == M2.theta

    def test_normalization_conditions_2_1_34(self):
        for seed in range(5):
            spec = random_real_graph_spec(seed + 50, m=1, d=1, order=6)
            M = from_real_equations(spec)
            MN, _ = to_normal_coordinates(M)
            assert MN.is_normal()
            assert MN.check_reality().ok

    def test_after_linear_change(self, corpus):
        M, _ = transformed_copy(corpus["heisenberg"], seed=3)
        MN, _ = to_normal_coordinates(M)
        assert MN.is_normal()
        assert MN.check_reality().ok


class TestThetaCoefficients:
    def test_heisenberg(self, corpus):
        fam = corpus["heisenberg"].theta_coefficients(max_beta=2)
        w = TruncatedSeries.variable(1, 2, 10)
        z = TruncatedSeries.variable(0, 2, 10)
        assert fam[(0, (0,))] == w
        assert fam[(0, (1,))] == z.scale(-2 * I).truncate(9)
        assert fam[(0, (2,))].is_zero()

    def test_levi_flat(self, corpus):
        fam = corpus["levi_flat"].theta_coefficients(max_beta=3)
        assert not fam[(0, (0,))].is_zero()
        assert all(fam[(0, (k,))].is_zero() for k in (1, 2, 3))

    def test_cubic_matches_3_5_18(self, corpus):
        # (w, 2 i z_1, i z_1^2) for the cubic of Example 3.5.17
        fam = corpus["cubic3517"].theta_coefficients(max_beta=1)
        z1 = TruncatedSeries.variable(0, 3, 8)
        w = TruncatedSeries.variable(2, 3, 8)
        assert fam[(0, (0, 0))] == w
        assert fam[(0, (1, 0))] == z1.scale(2 * I).truncate(7)
        assert fam[(0, (0, 1))] == (z1 * z1).scale(I).truncate(7)


class TestSegreVarieties:
    def test_heisenberg_through_origin(self, corpus):
        graph = corpus["heisenberg"].segre_variety_graph(
            [GaussRat(0), GaussRat(0)])
        assert graph[0].is_zero()

    def test_heisenberg_through_point(self, corpus):
        graph = corpus["heisenberg"].segre_variety_graph(
            [GaussRat(1), GaussRat(0)])
        z = TruncatedSeries.variable(0, 1, 10)
        assert graph[0] == z.scale(2 * I)

    def test_levi_flat(self, corpus):
        graph = corpus["levi_flat"].segre_variety_graph(
            [GaussRat(3), GaussRat(Fraction(1, 2))])
        assert graph[0] == TruncatedSeries.constant(Fraction(1, 2), 1, 10)

    def test_conjugation_symmetry(self, corpus):
        # graph of the conjugate variety at t_p equals the conjugate of the
        # graph at tau_p = conj(t_p): realized through Theta vs Thetabar
        M = corpus["cubic3517"]
        p = M.surface_point([GaussRat(Fraction(1, 3)), GaussRat(0, 1)])
        tau_p = list(p.zbar) + list(p.wbar)
        graph = M.segre_variety_graph(tau_p)
        # conjugate graphing function: z -> Theta_j(conj basepoint args)
        z = [TruncatedSeries.variable(i, M.m, M.order) for i in range(M.m)]
        consts = [TruncatedSeries.constant(c, M.m, M.order)
                  for c in list(p.z) + list(p.w)]
        under = [s.compose_at(z + consts) for s in M.theta]
        for a, b in zip(graph, under):
            assert a.conjugate_coeffs() == b


class TestCRFrame:
    def test_heisenberg(self, corpus):
        frame = corpus["heisenberg"].cr_frame()
        z = TruncatedSeries.variable(1, 3, 10)
        assert frame.lbar_coeffs[0][0] == z.scale(-2 * I).truncate(9)

    def test_levi_flat(self, corpus):
        frame = corpus["levi_flat"].cr_frame()
        assert frame.lbar_coeffs[0][0].is_zero()

    def test_m0_coefficient_matches_3_2_22(self, corpus):
        # i (2 z_1 + 2 zbar_1 z_2) / (1 - z_2 zbar_2), complexified
        M = corpus["m0_3220"]
        got = M.cr_frame().lbar_coeffs[0][0]
        nv, N = 5, 8
        zb1 = TruncatedSeries.variable(0, nv, N)
        zb2 = TruncatedSeries.variable(1, nv, N)
        z1 = TruncatedSeries.variable(2, nv, N)
        z2 = TruncatedSeries.variable(3, nv, N)
        expect = (z1.scale(2) + (zb1 * z2).scale(2)).scale(I) * \
            (TruncatedSeries.constant(1, nv, N) - z2 * zb2).invert_unit()
        assert got == expect.truncate(got.order)

    def test_tangency(self, corpus):
        # Lbar_k (xi_j - Theta_j) == 0, by direct assembly
        for name in ("heisenberg", "m0_3220", "codim2"):
            M = corpus[name]
            frame = M.cr_frame()
            for k in range(M.m):
                for j in range(M.d):
                    # coefficient calculus: d(xi_j)/dzeta_k contribution is
                    # exactly the frame coefficient
                    lhs = frame.lbar_coeffs[k][j] - \
                        M.theta[j].partial_derivative(k)
                    assert lhs.is_zero()

    def test_commutation(self, corpus):
        # [Lbar_{k1}, Lbar_{k2}] = 0 up to order N-2
        M = corpus["m0_3220"]
        frame = M.cr_frame()
        for k1 in range(M.m):
            for k2 in range(M.m):
                for j in range(M.d):
                    a = frame.lbar_coeffs[k1][j].partial_derivative(k2)
                    b = frame.lbar_coeffs[k2][j].partial_derivative(k1)
                    assert a == b


class TestSurfacePoints:
    def test_heisenberg_point(self, corpus):
        H = corpus["heisenberg"]
        p = H.surface_point([GaussRat(1, 1)])
        # v = |z|^2 = 2 at z = 1 + i
        assert p.w[0] == GaussRat(0, 2)
        assert H.contains(p)

    def test_cubic_point(self, corpus):
        C = corpus["cubic3517"]
        p = C.surface_point([GaussRat(Fraction(1, 2)), GaussRat(0)])
        assert p.w[0] == GaussRat(0, Fraction(-1, 4))

    def test_real_phi_used_when_available(self, corpus):
        T = corpus["tilted"]
        p = T.surface_point([GaussRat(2)])
        # v = x^2 = 4
        assert p.w[0] == GaussRat(0, 4)


class TestTransforms:
    def test_triangular_on_heisenberg(self, corpus):
        H = corpus["heisenberg"]
        n, N = 2, 10
        z = TruncatedSeries.variable(0, n, N)
        w = TruncatedSeries.variable(1, n, N)
        g = SeriesVector([w + (z * z).scale(HALF * I)])
        M2, G = transform_triangular(H, g)
        assert M2.check_reality().ok
        # inverting again returns the original theta
        g_inv = SeriesVector([w - (z * z).scale(HALF * I)])
        M3, _ = transform_triangular(M2, g_inv)
        assert M3.theta == H.theta

    def test_linear_preserves_reality(self):
        # explicit reality re-verification on transformed copies (the
        # transform constructors themselves only run basic validation)
        small = {
            "h": manifold_from_text("""
                manifold h { m=1; d=1; order=6; style=complex_defining;
                  eq: w - 2*I*z*zbar; }"""),
            "c2": manifold_from_text("""
                manifold c2 { m=1; d=2; order=5; style=complex_defining;
                  eq: w_1 - 2*I*z*zbar;
                  eq: w_2 - 2*I*z^2*zbar^2; }"""),
        }
        for i, M in enumerate(small.values()):
            Mp, A = transformed_copy(M, seed=100 + i)
            assert Mp.check_reality().ok

    def test_linear_change_build_path(self, corpus):
        # building after t' = A t agrees with transforming the built manifold
        text = """
        manifold h { m=1; d=1; order=8; style=complex_defining;
          eq: w - 2*I*z*zbar; }
        """
        man = load_manifest(text)
        spec = man.manifolds["h"]
        A = [[GaussRat(1), GaussRat(Fraction(1, 2))],
             [GaussRat(0), GaussRat(1)]]
        M1 = build_with_linear_change(spec, A)
        M2 = transform_linear(build_from_spec(spec), A)
        assert M1.theta == M2.theta
        assert M1.check_reality().ok

    def test_linear_change_singular_rejected(self):
        man = load_manifest("""
        manifold h { m=1; d=1; order=8; style=complex_defining;
          eq: w - 2*I*z*zbar; }""")
        A = [[GaussRat(1), GaussRat(1)], [GaussRat(1), GaussRat(1)]]
        with pytest.raises(ManifoldError):
            build_with_linear_change(man.manifolds["h"], A)
