import random
from fractions import Fraction

import pytest

from crsegre.gaussrat import GaussRat
from crsegre.series import TruncatedSeries
from crsegre.frontend import (
    tokenize, parse_expr, parse_expr_text, pretty, expand_ast, FrontendError,
    load_manifest, load_manifold_spec, complex_variable_table,
    real_variable_table, constant_value,
)


class TestTokenize:
    def test_simple(self):
        kinds = [t.kind for t in tokenize("w + I*z*zbar")]
        assert kinds == ["ident", "plus", "I", "star", "ident", "star", "ident"]

    def test_subscripts_and_caret(self):
        toks = tokenize("z_1^2*zbar_2")
        assert [t.kind for t in toks] == ["ident", "caret", "number", "star",
                                          "ident"]
        assert toks[0].text == "z_1" and toks[4].text == "zbar_2"

    def test_malformed_number(self):
        with pytest.raises(FrontendError) as err:
            tokenize("3..5")
        assert err.value.column == 2

    def test_illegal_character(self):
        with pytest.raises(FrontendError) as err:
            tokenize("z @ w")
        assert err.value.line == 1 and err.value.column == 3

    def test_positions_increase(self):
        toks = tokenize("a + b\n c*d")
        pos = [(t.line, t.column) for t in toks]
        assert pos == sorted(pos)

    def test_comments_skipped(self):
        assert [t.text for t in tokenize("a # hello\n b")] == ["a", "b"]


class TestParse:
    def test_precedence(self):
        ast = parse_expr_text("w + I*(z*zbar)")
        assert pretty(ast) == "(w + (I * (z * zbar)))"

    def test_power_beats_unary_minus(self):
        assert pretty(parse_expr_text("-z^2")) == "(-(z ^ 2))"

    def test_left_associativity(self):
        assert pretty(parse_expr_text("a - b - c")) == "((a + (-b)) + (-c))"
        assert pretty(parse_expr_text("a/b/c")) == "((a / b) / c)"

    def test_eq_3_2_39_tail(self):
        ast = parse_expr_text("w*(1+z_1*zbar_2)/(1+zbar_1*z_2)")
        # topmost node is the division by the unit denominator
        from crsegre.frontend import Div
        assert isinstance(ast, Div)

    def test_unbalanced_parenthesis(self):
        with pytest.raises(FrontendError):
            parse_expr_text("(z")

    def test_fractional_exponent_rejected(self):
        with pytest.raises(FrontendError):
            parse_expr_text("z^2.5")

    def test_unknown_function(self):
        with pytest.raises(FrontendError):
            parse_expr_text("exp(z)")

    def test_round_trip(self):
        samples = [
            "w + I*z*zbar",
            "w*(1+z_1*zbar_2)/(1+zbar_1*z_2)",
            "-(z_1 - 2/3*w)^3 + sqrt1p(z_1*zbar_1)",
            "0.25*z + 1/4*zbar",
        ]
        for text in samples:
            ast = parse_expr_text(text)
            assert parse_expr_text(pretty(ast)) == ast

    def test_fuzz_never_crashes(self):
        rng = random.Random(21)
        alphabet = "zw_12+-*/^() .Ib#\n"
        for _ in range(300):
            text = "".join(rng.choice(alphabet)
                           for _ in range(rng.randint(1, 25)))
            try:
                parse_expr_text(text)
            except FrontendError:
                pass


class TestExpand:
    def test_heisenberg(self):
        tbl = complex_variable_table(1, 1)
        ast = parse_expr_text("w + I*z*zbar")
        s = expand_ast(ast, tbl, 3, 8)
        assert s.coefficient((0, 0, 1)) == GaussRat(1)
        assert s.coefficient((1, 1, 0)) == GaussRat(0, 1)

    def test_real_graph(self):
        tbl = real_variable_table(1, 1)
        s = expand_ast(parse_expr_text("x_1^2 + y_1^2"), tbl, 3, 8)
        assert s.coefficient((2, 0, 0)) == GaussRat(1)
        assert s.coefficient((0, 2, 0)) == GaussRat(1)

    def test_sqrt1p_binomial(self):
        x = {"x": 0}
        s = expand_ast(parse_expr_text("sqrt1p(x)"), x, 1, 6)
        # binomial series oracle: coefficients C(1/2, k)
        from math import comb
        expect = [Fraction(1), Fraction(1, 2), Fraction(-1, 8), Fraction(1, 16),
                  Fraction(-5, 128), Fraction(7, 256), Fraction(-21, 1024)]
        for k, c in enumerate(expect):
            assert s.coefficient((k,)) == GaussRat(c)

    def test_sqrt1p_rejects_units(self):
        with pytest.raises(FrontendError):
            expand_ast(parse_expr_text("sqrt1p(1+x)"), {"x": 0}, 1, 6)

    def test_division_by_nonunit(self):
        with pytest.raises(FrontendError):
            expand_ast(parse_expr_text("1/x"), {"x": 0}, 1, 6)

    def test_decimal_exact(self):
        assert constant_value(parse_expr_text("0.125")) == \
            GaussRat(Fraction(1, 8))

    def test_homomorphism(self):
        rng = random.Random(22)
        tbl = complex_variable_table(1, 1)
        pool = ["z", "zbar", "w", "2", "I", "1/3"]

        def rand_expr(depth=0):
            if depth > 2 or rng.random() < 0.4:
                return rng.choice(pool)
            op = rng.choice(["+", "*", "-"])
            return "(%s %s %s)" % (rand_expr(depth + 1), op,
                                   rand_expr(depth + 1))

        for _ in range(20):
            a, b = rand_expr(), rand_expr()
            ea = expand_ast(parse_expr_text(a), tbl, 3, 6)
            eb = expand_ast(parse_expr_text(b), tbl, 3, 6)
            assert expand_ast(parse_expr_text("(%s)+(%s)" % (a, b)),
                              tbl, 3, 6) == ea + eb
            assert expand_ast(parse_expr_text("(%s)*(%s)" % (a, b)),
                              tbl, 3, 6) == ea * eb


HEISENBERG = """
manifold heis { m = 1; d = 1; order = 8;
  style = complex_defining;
  eq: w - 2*I*z*zbar;
}
"""


class TestManifest:
    def test_heisenberg(self):
        spec = load_manifold_spec(HEISENBERG)
        assert (spec.m, spec.d, spec.order) == (1, 1, 8)
        assert spec.style == "complex_defining"
        assert len(spec.equations) == 1

    def test_equation_count_mismatch(self):
        bad = HEISENBERG.replace("d = 1", "d = 2")
        with pytest.raises(FrontendError):
            load_manifold_spec(bad)

    def test_real_graph_rejects_zbar(self):
        text = """
        manifold b { m = 1; d = 1; order = 8; style = real_graph;
          eq: zbar*z; }
        """
        with pytest.raises(FrontendError) as err:
            load_manifold_spec(text)
        assert "unknown variable" in str(err.value)

    def test_map_block(self):
        text = HEISENBERG + """
        map ident { source = heis; target = heis; h: z; h: w; }
        """
        man = load_manifest(text)
        assert list(man.maps) == ["ident"]
        assert man.maps["ident"].source == "heis"

    def test_map_unknown_manifold(self):
        text = HEISENBERG + """
        map bad { source = heis; target = nope; h: z; h: w; }
        """
        with pytest.raises(FrontendError):
            load_manifest(text)

    def test_points(self):
        text = """
        manifold c { m = 2; d = 1; order = 8; style = complex_defining;
          eq: w + I*z_1*zbar_1;
          point: 1/2, 0; }
        """
        spec = load_manifold_spec(text)
        assert len(spec.points) == 1
        assert [str(constant_value(a)) for a in spec.points[0]] == ["1/2", "0"]

    def test_order_too_small(self):
        with pytest.raises(FrontendError):
            load_manifold_spec(HEISENBERG.replace("order = 8", "order = 2"))
