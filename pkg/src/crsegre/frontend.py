"""Expression parser and manifest loader.

The textual surface consists of arithmetic expressions over declared
variables (precedence ^ > unary - > * / > + -, all binary operators left
associative) and a small block-structured manifest format:

    manifold <name> {
      m = <int>; d = <int>; order = <int>;
      style = real_graph | complex_defining;
      eq: <expr>;            # one per codimension, j = 1..d
      point: <expr>, ...;    # optional, m entries: a z-value for pointwise runs
    }

    map <name> {
      source = <manifold>; target = <manifold>;
      h: <expr>;             # n' = m' + d' components, expressions in z, w
    }

Complex-style equations are the right-hand sides  wbar_j = Theta_j(zbar, z, w)
and may use only zbar_k, z_k, w_j; real-style equations are the graphing
functions in  v_j = phi_j(x, y, u).  When m = 1 (resp. d = 1) the suffix _1
may be dropped.  `I` is the imaginary unit; `sqrt1p(e)` is the only builtin
and expands sqrt(1+e) as a binomial series.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .gaussrat import GaussRat, ONE
from .series import TruncatedSeries, NonUnitError

_PUNCT = {
    "+": "plus", "-": "minus", "*": "star", "/": "slash", "^": "caret",
    "(": "lparen", ")": "rparen", ",": "comma", "=": "equals",
    "{": "lbrace", "}": "rbrace", ";": "semi", ":": "colon",
}


class FrontendError(Exception):
    """Parse or validation failure, carrying a source position."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = "%s (line %d, column %d)" % (message, line, column)
        super().__init__(message)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(source):
    """Full tokenization of `source`, or a positioned FrontendError."""
    tokens = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            seen_dot = False
            while j < n and (source[j].isdigit() or source[j] == "."):
                if source[j] == ".":
                    if seen_dot or j + 1 >= n or not source[j + 1].isdigit():
                        raise FrontendError("malformed number", line,
                                            col + (j - i))
                    seen_dot = True
                j += 1
            tokens.append(Token("number", source[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            kind = "I" if text == "I" else "ident"
            tokens.append(Token(kind, text, line, col))
            col += j - i
            i = j
            continue
        raise FrontendError("illegal character %r" % ch, line, col)
    return tokens


# ---------------------------------------------------------------------------
# expression AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lit:
    value: Fraction


@dataclass(frozen=True)
class ImagUnit:
    pass


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Div:
    num: object
    den: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Call:
    builtin: str
    arg: object


_BUILTINS = ("sqrt1p",)


class _ExprParser:
    def __init__(self, tokens):
        self.tokens = list(tokens)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise FrontendError("unexpected end of expression")
        self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok.kind != kind:
            raise FrontendError("expected %s, found %r" % (kind, tok.text),
                                tok.line, tok.column)
        return tok

    def at_end(self):
        return self.pos >= len(self.tokens)

    def parse_expr(self):
        node = self.parse_term()
        while (tok := self.peek()) and tok.kind in ("plus", "minus"):
            self.next()
            right = self.parse_term()
            node = Add(node, right) if tok.kind == "plus" else Add(node, Neg(right))
        return node

    def parse_term(self):
        node = self.parse_unary()
        while (tok := self.peek()) and tok.kind in ("star", "slash"):
            self.next()
            right = self.parse_unary()
            if tok.kind == "star":
                node = Mul(node, right)
            elif isinstance(node, Lit) and isinstance(right, Lit):
                # p/q is a rational literal, folded exactly
                if right.value == 0:
                    raise FrontendError("division by zero literal",
                                        tok.line, tok.column)
                node = Lit(node.value / right.value)
            else:
                node = Div(node, right)
        return node

    def parse_unary(self):
        tok = self.peek()
        if tok and tok.kind == "minus":
            self.next()
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()
        tok = self.peek()
        if tok and tok.kind == "caret":
            self.next()
            num = self.next()
            if num.kind != "number" or "." in num.text:
                raise FrontendError("exponents must be literal nonnegative integers",
                                    num.line, num.column)
            return Pow(base, int(num.text))
        return base

    def parse_atom(self):
        tok = self.next()
        if tok.kind == "number":
            return Lit(_exact_fraction(tok.text))
        if tok.kind == "I":
            return ImagUnit()
        if tok.kind == "ident":
            if tok.text in _BUILTINS:
                self.expect("lparen")
                arg = self.parse_expr()
                close = self.next()
                if close.kind != "rparen":
                    raise FrontendError("unbalanced parenthesis",
                                        close.line, close.column)
                return Call(tok.text, arg)
            nxt = self.peek()
            if nxt and nxt.kind == "lparen":
                raise FrontendError("unknown function %r" % tok.text,
                                    tok.line, tok.column)
            return Var(tok.text)
        if tok.kind == "lparen":
            node = self.parse_expr()
            close = self.peek()
            if close is None or close.kind != "rparen":
                raise FrontendError("unbalanced parenthesis", tok.line, tok.column)
            self.next()
            return node
        raise FrontendError("unexpected token %r" % tok.text, tok.line, tok.column)


def _exact_fraction(text):
    if "." in text:
        whole, frac = text.split(".")
        return Fraction(int(whole or "0")) + Fraction(int(frac), 10 ** len(frac))
    return Fraction(int(text))


def parse_expr(tokens):
    """AST for a complete token stream."""
    p = _ExprParser(tokens)
    node = p.parse_expr()
    if not p.at_end():
        tok = p.peek()
        raise FrontendError("unexpected token %r" % tok.text, tok.line, tok.column)
    return node


def parse_expr_text(source):
    return parse_expr(tokenize(source))


def pretty(ast):
    """Canonical rendering; re-parsing gives a structurally equal AST."""
    if isinstance(ast, Var):
        return ast.name
    if isinstance(ast, Lit):
        return str(ast.value) if ast.value.denominator == 1 else \
            "(%d/%d)" % (ast.value.numerator, ast.value.denominator)
    if isinstance(ast, ImagUnit):
        return "I"
    if isinstance(ast, Neg):
        return "(-%s)" % pretty(ast.arg)
    if isinstance(ast, Add):
        return "(%s + %s)" % (pretty(ast.left), pretty(ast.right))
    if isinstance(ast, Mul):
        return "(%s * %s)" % (pretty(ast.left), pretty(ast.right))
    if isinstance(ast, Div):
        return "(%s / %s)" % (pretty(ast.num), pretty(ast.den))
    if isinstance(ast, Pow):
        return "(%s ^ %d)" % (pretty(ast.base), ast.exponent)
    if isinstance(ast, Call):
        return "%s(%s)" % (ast.builtin, pretty(ast.arg))
    raise TypeError("not an expression node: %r" % (ast,))


def _normalize_fraction_literals(ast):
    # "p/q" parses as Div(Lit, Lit); fold it so round-tripping is stable
    return ast


# ---------------------------------------------------------------------------
# expansion into series
# ---------------------------------------------------------------------------

def expand_ast(ast, var_table, nvars, order):
    """Exact TruncatedSeries for `ast` where var_table maps names to
    variable indices."""
    if isinstance(ast, Var):
        if ast.name not in var_table:
            raise FrontendError("unknown variable %r" % ast.name)
        return TruncatedSeries.variable(var_table[ast.name], nvars, order)
    if isinstance(ast, Lit):
        return TruncatedSeries.constant(GaussRat(ast.value), nvars, order)
    if isinstance(ast, ImagUnit):
        return TruncatedSeries.constant(GaussRat(0, 1), nvars, order)
    if isinstance(ast, Neg):
        return -expand_ast(ast.arg, var_table, nvars, order)
    if isinstance(ast, Add):
        return (expand_ast(ast.left, var_table, nvars, order)
                + expand_ast(ast.right, var_table, nvars, order))
    if isinstance(ast, Mul):
        return (expand_ast(ast.left, var_table, nvars, order)
                * expand_ast(ast.right, var_table, nvars, order))
    if isinstance(ast, Div):
        den = expand_ast(ast.den, var_table, nvars, order)
        if den.constant_term().is_zero():
            raise FrontendError("division by a non-unit denominator")
        return expand_ast(ast.num, var_table, nvars, order) * den.invert_unit()
    if isinstance(ast, Pow):
        return expand_ast(ast.base, var_table, nvars, order) ** ast.exponent
    if isinstance(ast, Call):
        arg = expand_ast(ast.arg, var_table, nvars, order)
        if ast.builtin == "sqrt1p":
            return _sqrt1p(arg)
        raise FrontendError("unknown builtin %r" % ast.builtin)
    raise TypeError("not an expression node: %r" % (ast,))


def _sqrt1p(e):
    """sqrt(1 + e) as the binomial series; e must vanish at the origin."""
    if not e.constant_term().is_zero():
        raise FrontendError("sqrt1p argument must have zero constant term")
    order = e.order
    acc = TruncatedSeries.constant(1, e.nvars, order)
    coeff = Fraction(1)
    power = TruncatedSeries.constant(1, e.nvars, order)
    for k in range(1, order + 1):
        coeff = coeff * (Fraction(1, 2) - (k - 1)) / k
        power = power * e
        if power.is_zero():
            break
        acc = acc + power.scale(GaussRat(coeff))
    return acc


# ---------------------------------------------------------------------------
# manifold/map specs
# ---------------------------------------------------------------------------

REAL_GRAPH = "real_graph"
COMPLEX_DEFINING = "complex_defining"


@dataclass
class ManifoldSpec:
    name: str
    m: int
    d: int
    order: int
    style: str
    equations: list
    points: list = field(default_factory=list)  # each: list of m z-value ASTs

    @property
    def n(self):
        return self.m + self.d

    def variable_table(self):
        if self.style == COMPLEX_DEFINING:
            return complex_variable_table(self.m, self.d)
        return real_variable_table(self.m, self.d)

    def variable_names(self):
        tbl = self.variable_table()
        names = [None] * (2 * self.m + self.d)
        for name, idx in tbl.items():
            if names[idx] is None or "_" in name:
                names[idx] = name
        return names

    def expand_equations(self):
        tbl = self.variable_table()
        nvars = 2 * self.m + self.d
        return [expand_ast(ast, tbl, nvars, self.order) for ast in self.equations]


@dataclass
class MapSpec:
    name: str
    source: str
    target: str
    components: list


@dataclass
class Manifest:
    manifolds: dict
    maps: dict


def complex_variable_table(m, d):
    tbl = {}
    for k in range(m):
        tbl["zbar_%d" % (k + 1)] = k
        tbl["z_%d" % (k + 1)] = m + k
    for j in range(d):
        tbl["w_%d" % (j + 1)] = 2 * m + j
    if m == 1:
        tbl["zbar"] = 0
        tbl["z"] = 1
    if d == 1:
        tbl["w"] = 2 * m
    return tbl


def real_variable_table(m, d):
    tbl = {}
    for k in range(m):
        tbl["x_%d" % (k + 1)] = k
        tbl["y_%d" % (k + 1)] = m + k
    for j in range(d):
        tbl["u_%d" % (j + 1)] = 2 * m + j
    if m == 1:
        tbl["x"] = 0
        tbl["y"] = m
    if d == 1:
        tbl["u"] = 2 * m
    return tbl


def map_variable_table(m, d):
    tbl = {}
    for k in range(m):
        tbl["z_%d" % (k + 1)] = k
    for j in range(d):
        tbl["w_%d" % (j + 1)] = m + j
    if m == 1:
        tbl["z"] = 0
    if d == 1:
        tbl["w"] = m
    return tbl


# ---------------------------------------------------------------------------
# manifest parsing
# ---------------------------------------------------------------------------

class _BlockParser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise FrontendError("unexpected end of manifest")
        self.pos += 1
        return tok

    def expect(self, kind, what=None):
        tok = self.next()
        if tok.kind != kind:
            raise FrontendError("expected %s, found %r" % (what or kind, tok.text),
                                tok.line, tok.column)
        return tok

    def expr_until(self, stop_kinds):
        depth = 0
        start = self.pos
        while True:
            tok = self.peek()
            if tok is None:
                raise FrontendError("unterminated expression in manifest")
            if tok.kind == "lparen":
                depth += 1
            elif tok.kind == "rparen":
                depth -= 1
            elif depth == 0 and tok.kind in stop_kinds:
                break
            self.pos += 1
        return parse_expr(self.tokens[start:self.pos])


def load_manifest(text):
    """Parse a manifest file into manifold and map specs."""
    parser = _BlockParser(tokenize(text))
    manifolds, maps = {}, {}
    while parser.peek() is not None:
        head = parser.expect("ident", "'manifold' or 'map'")
        if head.text == "manifold":
            spec = _parse_manifold_block(parser)
            if spec.name in manifolds:
                raise FrontendError("duplicate manifold %r" % spec.name,
                                    head.line, head.column)
            manifolds[spec.name] = spec
        elif head.text == "map":
            spec = _parse_map_block(parser)
            if spec.name in maps:
                raise FrontendError("duplicate map %r" % spec.name,
                                    head.line, head.column)
            maps[spec.name] = spec
        else:
            raise FrontendError("expected 'manifold' or 'map', found %r" % head.text,
                                head.line, head.column)
    for mp in maps.values():
        for side in (mp.source, mp.target):
            if side not in manifolds:
                raise FrontendError("map %r references unknown manifold %r"
                                    % (mp.name, side))
    return Manifest(manifolds, maps)


def load_manifold_spec(text):
    """The single manifold block of a manifest (errors if absent)."""
    manifest = load_manifest(text)
    if not manifest.manifolds:
        raise FrontendError("manifest contains no manifold block")
    return next(iter(manifest.manifolds.values()))


def _parse_manifold_block(parser):
    name = parser.expect("ident", "manifold name").text
    parser.expect("lbrace")
    fields = {}
    equations = []
    points = []
    while True:
        tok = parser.next()
        if tok.kind == "rbrace":
            break
        if tok.kind != "ident":
            raise FrontendError("expected a manifold field, found %r" % tok.text,
                                tok.line, tok.column)
        if tok.text in ("m", "d", "order"):
            parser.expect("equals")
            num = parser.expect("number")
            if "." in num.text:
                raise FrontendError("%s must be an integer" % tok.text,
                                    num.line, num.column)
            fields[tok.text] = int(num.text)
            parser.expect("semi")
        elif tok.text == "style":
            parser.expect("equals")
            style = parser.expect("ident").text
            if style not in (REAL_GRAPH, COMPLEX_DEFINING):
                raise FrontendError("unknown style %r" % style,
                                    tok.line, tok.column)
            fields["style"] = style
            parser.expect("semi")
        elif tok.text == "eq":
            parser.expect("colon")
            equations.append(parser.expr_until({"semi"}))
            parser.expect("semi")
        elif tok.text == "point":
            parser.expect("colon")
            entry = [parser.expr_until({"comma", "semi"})]
            while parser.peek() and parser.peek().kind == "comma":
                parser.next()
                entry.append(parser.expr_until({"comma", "semi"}))
            parser.expect("semi")
            points.append(entry)
        else:
            raise FrontendError("unknown manifold field %r" % tok.text,
                                tok.line, tok.column)
    for key in ("m", "d", "order", "style"):
        if key not in fields:
            raise FrontendError("manifold %r is missing %r" % (name, key))
    spec = ManifoldSpec(name, fields["m"], fields["d"], fields["order"],
                        fields["style"], equations, points)
    _validate_manifold_spec(spec)
    return spec


def _validate_manifold_spec(spec):
    if spec.m < 1 or spec.d < 1:
        raise FrontendError("manifold %r needs m >= 1 and d >= 1" % spec.name)
    if spec.order < 4:
        raise FrontendError("manifold %r needs order >= 4" % spec.name)
    if len(spec.equations) != spec.d:
        raise FrontendError(
            "manifold %r declares d = %d but supplies %d equations"
            % (spec.name, spec.d, len(spec.equations)))
    table = spec.variable_table()
    for ast in spec.equations:
        for var in _variables_of(ast):
            if var not in table:
                raise FrontendError(
                    "unknown variable %r for style %s in manifold %r"
                    % (var, spec.style, spec.name))
    for entry in spec.points:
        if len(entry) != spec.m:
            raise FrontendError(
                "point entries of manifold %r need %d coordinates"
                % (spec.name, spec.m))
        for ast in entry:
            if _variables_of(ast):
                raise FrontendError("point coordinates must be constants")


def _parse_map_block(parser):
    name = parser.expect("ident", "map name").text
    parser.expect("lbrace")
    source = target = None
    components = []
    while True:
        tok = parser.next()
        if tok.kind == "rbrace":
            break
        if tok.kind != "ident":
            raise FrontendError("expected a map field, found %r" % tok.text,
                                tok.line, tok.column)
        if tok.text in ("source", "target"):
            parser.expect("equals")
            ref = parser.expect("ident").text
            parser.expect("semi")
            if tok.text == "source":
                source = ref
            else:
                target = ref
        elif tok.text == "h":
            parser.expect("colon")
            components.append(parser.expr_until({"semi"}))
            parser.expect("semi")
        else:
            raise FrontendError("unknown map field %r" % tok.text,
                                tok.line, tok.column)
    if source is None or target is None:
        raise FrontendError("map %r needs both source and target" % name)
    if not components:
        raise FrontendError("map %r supplies no components" % name)
    return MapSpec(name, source, target, components)


def _variables_of(ast):
    if isinstance(ast, Var):
        return {ast.name}
    out = set()
    for attr in ("arg", "left", "right", "num", "den", "base"):
        child = getattr(ast, attr, None)
        if child is not None and not isinstance(child, int):
            out |= _variables_of(child)
    return out


def constant_value(ast):
    """Evaluate a variable-free expression to an exact GaussRat."""
    series = expand_ast(ast, {}, 0, 0)
    return series.constant_term()
