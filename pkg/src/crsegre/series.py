"""Truncated multivariate formal power series over the Gaussian rationals.

A TruncatedSeries stores the coefficients of a formal power series up to a
total degree `order`; coefficients beyond the order are unknown, not zero.
Every operation tracks the order on which its result can be trusted (the
minimum of its inputs), so that downstream rank and ideal computations can
honestly report "at truncation order N".

Multiindices are plain tuples of nonnegative ints; the canonical ordering
everywhere is graded lexicographic (`grlex_key`).
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .gaussrat import GaussRat, ZERO, ONE


class SeriesError(Exception):
    """Base class for series-level failures."""


class ArityMismatchError(SeriesError):
    pass


class OrderExhaustedError(SeriesError):
    pass


class NonUnitError(SeriesError):
    pass


class SingularLinearPartError(SeriesError):
    pass


# ---------------------------------------------------------------------------
# multiindex helpers
# ---------------------------------------------------------------------------

def grlex_key(alpha):
    """Sort key realizing the graded-lexicographic total order."""
    return (sum(alpha), alpha)


def multiindices(nvars, max_degree):
    """All multiindices in `nvars` variables with |alpha| <= max_degree,
    in graded-lex order."""
    out = []
    for deg in range(max_degree + 1):
        out.extend(_compositions(deg, nvars))
    return out


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _binomial(n, k):
    if k < 0 or k > n:
        return 0
    out = 1
    for j in range(k):
        out = out * (n - j) // (j + 1)
    return out


# ---------------------------------------------------------------------------
# TruncatedSeries
# ---------------------------------------------------------------------------

class TruncatedSeries:
    """Sparse truncated power series: dict multiindex -> GaussRat.

    Invariants: every stored multiindex has length `nvars` and total degree
    <= `order`; zero coefficients are never stored.  Instances are treated
    as immutable after construction.
    """

    __slots__ = ("nvars", "order", "coeffs")

    def __init__(self, nvars, order, coeffs=None):
        if order < 0:
            raise OrderExhaustedError("series order fell below zero")
        self.nvars = nvars
        self.order = order
        clean = {}
        if coeffs:
            for alpha, c in coeffs.items():
                if len(alpha) != nvars:
                    raise ArityMismatchError(
                        "multiindex %r has wrong length for arity %d" % (alpha, nvars))
                if sum(alpha) <= order and not c.is_zero():
                    clean[alpha] = c
        self.coeffs = clean

    # -- constructors -----------------------------------------------------

    @staticmethod
    def zero(nvars, order):
        return TruncatedSeries(nvars, order)

    @staticmethod
    def constant(value, nvars, order):
        if isinstance(value, (int, Fraction)):
            value = GaussRat(value)
        return TruncatedSeries(nvars, order, {(0,) * nvars: value})

    @staticmethod
    def variable(index, nvars, order):
        if not 0 <= index < nvars:
            raise ArityMismatchError("variable index %d out of range" % index)
        alpha = tuple(1 if i == index else 0 for i in range(nvars))
        return TruncatedSeries(nvars, order, {alpha: ONE})

    # -- basic queries ------------------------------------------------------

    def coefficient(self, alpha):
        return self.coeffs.get(tuple(alpha), ZERO)

    def constant_term(self):
        return self.coeffs.get((0,) * self.nvars, ZERO)

    def is_zero(self):
        return not self.coeffs

    def valuation(self):
        """Smallest total degree with a nonzero coefficient; None if zero."""
        if not self.coeffs:
            return None
        return min(sum(a) for a in self.coeffs)

    def first_nonzero(self):
        """(multiindex, coefficient) of the graded-lex first nonzero term."""
        if not self.coeffs:
            return None
        alpha = min(self.coeffs, key=grlex_key)
        return alpha, self.coeffs[alpha]

    def total_degree(self):
        if not self.coeffs:
            return 0
        return max(sum(a) for a in self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.nvars == other.nvars and self.order == other.order
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.nvars, self.order, frozenset(self.coeffs.items())))

    # -- ring operations ----------------------------------------------------

    def _check_same_arity(self, other):
        if self.nvars != other.nvars:
            raise ArityMismatchError(
                "arity mismatch: %d vs %d" % (self.nvars, other.nvars))

    def __add__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            other = TruncatedSeries.constant(other, self.nvars, self.order)
        self._check_same_arity(other)
        order = min(self.order, other.order)
        coeffs = dict(self.coeffs)
        for alpha, c in other.coeffs.items():
            s = coeffs.get(alpha, ZERO) + c
            if s.is_zero():
                coeffs.pop(alpha, None)
            else:
                coeffs[alpha] = s
        return TruncatedSeries(self.nvars, order, coeffs)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(
            self.nvars, self.order, {a: -c for a, c in self.coeffs.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            other = TruncatedSeries.constant(other, self.nvars, self.order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        if isinstance(c, (int, Fraction)):
            c = GaussRat(c)
        if c.is_zero():
            return TruncatedSeries(self.nvars, self.order)
        return TruncatedSeries(
            self.nvars, self.order, {a: c * v for a, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussRat)):
            return self.scale(other)
        self._check_same_arity(other)
        order = min(self.order, other.order)
        out = {}
        for a1, c1 in self.coeffs.items():
            d1 = sum(a1)
            if d1 > order:
                continue
            for a2, c2 in other.coeffs.items():
                if d1 + sum(a2) > order:
                    continue
                key = tuple(x + y for x, y in zip(a1, a2))
                s = out.get(key, ZERO) + c1 * c2
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        return TruncatedSeries(self.nvars, order, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("series powers must be nonnegative integers")
        out = TruncatedSeries.constant(1, self.nvars, self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def truncate(self, order):
        if order >= self.order:
            return self
        return TruncatedSeries(self.nvars, order, self.coeffs)

    # -- calculus -------------------------------------------------------------

    def partial_derivative(self, var_index):
        if not 0 <= var_index < self.nvars:
            raise ArityMismatchError(
                "derivative index %d out of range for arity %d"
                % (var_index, self.nvars))
        if self.order < 1:
            raise OrderExhaustedError("cannot differentiate an order-0 series")
        out = {}
        for alpha, c in self.coeffs.items():
            e = alpha[var_index]
            if e == 0:
                continue
            beta = alpha[:var_index] + (e - 1,) + alpha[var_index + 1:]
            out[beta] = c * e
        return TruncatedSeries(self.nvars, self.order - 1, out)

    def conjugate_coeffs(self):
        """Conjugate every coefficient, leaving the variables untouched."""
        return TruncatedSeries(
            self.nvars, self.order,
            {a: c.conjugate() for a, c in self.coeffs.items()})

    # -- substitution -----------------------------------------------------------

    def compose(self, args):
        """Substitute args[i] for variable i.  Every argument must have zero
        constant term (use `shift` / `compose_at` for exact constant shifts)."""
        args = list(args)
        if len(args) != self.nvars:
            raise ArityMismatchError(
                "compose needs %d arguments, got %d" % (self.nvars, len(args)))
        if not args:
            return self  # zero-variable series is a constant
        inner_nvars = args[0].nvars
        order = min([self.order] + [g.order for g in args])
        for g in args:
            if g.nvars != inner_nvars:
                raise ArityMismatchError("compose arguments have mixed arities")
            if not g.constant_term().is_zero():
                raise ArityMismatchError(
                    "compose argument has nonzero constant term; use compose_at")
        vals = [g.valuation() for g in args]
        truncated = [g.truncate(order) for g in args]
        pow_cache = [{0: TruncatedSeries.constant(1, inner_nvars, order)}
                     for _ in range(self.nvars)]

        def power(i, e):
            cache = pow_cache[i]
            if e not in cache:
                cache[e] = power(i, e - 1) * truncated[i]
            return cache[e]

        out = {}
        for alpha, c in self.coeffs.items():
            v = 0
            dead = False
            for i, e in enumerate(alpha):
                if e == 0:
                    continue
                if vals[i] is None:
                    dead = True
                    break
                v += e * vals[i]
            if dead or v > order:
                continue
            term = None
            for i, e in enumerate(alpha):
                if e:
                    term = power(i, e) if term is None else term * power(i, e)
            if term is None:
                key = (0,) * inner_nvars
                s = out.get(key, ZERO) + c
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
                continue
            for key, tc in term.coeffs.items():
                s = out.get(key, ZERO) + c * tc
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        return TruncatedSeries(inner_nvars, order, out)

    def shift(self, consts):
        """Exact polynomial re-expansion around the point `consts`:
        returns the series of x -> f(x + c).  Exact on the truncated model."""
        consts = list(consts)
        if len(consts) != self.nvars:
            raise ArityMismatchError("shift needs %d constants" % self.nvars)
        out = self
        for i, c in enumerate(consts):
            if isinstance(c, (int, Fraction)):
                c = GaussRat(c)
            if c.is_zero():
                continue
            out = _shift_one_var(out, i, c)
        return out

    def compose_at(self, args):
        """Composition in shift mode: arguments may carry constant terms,
        which are substituted exactly before composing the vanishing parts."""
        args = list(args)
        if len(args) != self.nvars:
            raise ArityMismatchError(
                "compose_at needs %d arguments, got %d" % (self.nvars, len(args)))
        consts = [g.constant_term() for g in args]
        reduced = [g - TruncatedSeries.constant(consts[i], g.nvars, g.order)
                   for i, g in enumerate(args)]
        return self.shift(consts).compose(reduced)

    def evaluate(self, point):
        """Exact value of the truncated polynomial at a rational point."""
        point = [GaussRat(p) if isinstance(p, (int, Fraction)) else p
                 for p in point]
        if len(point) != self.nvars:
            raise ArityMismatchError(
                "evaluate needs %d coordinates, got %d" % (self.nvars, len(point)))
        total = ZERO
        pow_cache = [{0: ONE} for _ in range(self.nvars)]

        def power(i, e):
            cache = pow_cache[i]
            if e not in cache:
                cache[e] = power(i, e - 1) * point[i]
            return cache[e]

        for alpha, c in self.coeffs.items():
            term = c
            for i, e in enumerate(alpha):
                if e:
                    term = term * power(i, e)
            total = total + term
        return total

    def invert_unit(self):
        """Multiplicative inverse up to the order; the constant term must be
        nonzero."""
        c0 = self.constant_term()
        if c0.is_zero():
            raise NonUnitError("cannot invert a series with zero constant term")
        u = TruncatedSeries.constant(1, self.nvars, self.order) - self.scale(c0.inverse())
        acc = TruncatedSeries.constant(1, self.nvars, self.order)
        for _ in range(self.order):
            acc = TruncatedSeries.constant(1, self.nvars, self.order) + u * acc
        return acc.scale(c0.inverse())

    # -- variable management -------------------------------------------------

    def embed(self, new_nvars, positions):
        """Reinterpret in a larger variable space; variable i becomes
        variable positions[i]."""
        if len(positions) != self.nvars:
            raise ArityMismatchError("embed needs one position per variable")
        out = {}
        for alpha, c in self.coeffs.items():
            beta = [0] * new_nvars
            for i, e in enumerate(alpha):
                beta[positions[i]] += e
            out[tuple(beta)] = c
        return TruncatedSeries(new_nvars, self.order, out)

    # -- formatting -------------------------------------------------------------

    def to_str(self, names=None):
        if names is None:
            names = ["x%d" % i for i in range(self.nvars)]
        if not self.coeffs:
            return "0"
        parts = []
        for alpha in sorted(self.coeffs, key=grlex_key):
            c = self.coeffs[alpha]
            mono = "*".join(
                names[i] if e == 1 else "%s^%d" % (names[i], e)
                for i, e in enumerate(alpha) if e)
            cs = str(c)
            if "+" in cs[1:] or "-" in cs[1:]:
                cs = "(%s)" % cs
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-%s" % mono)
            else:
                parts.append("%s*%s" % (cs, mono))
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return "<series %d vars, order %d: %s>" % (self.nvars, self.order, self.to_str())


def _shift_one_var(f, i, c):
    out = {}
    for alpha, coeff in f.coeffs.items():
        e = alpha[i]
        if e == 0:
            key = alpha
            s = out.get(key, ZERO) + coeff
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
            continue
        cp = ONE
        for j in range(e, -1, -1):
            # coefficient of x^j in (x + c)^e is C(e, j) c^(e-j)
            term = coeff * GaussRat(_binomial(e, j)) * cp
            key = alpha[:i] + (j,) + alpha[i + 1:]
            s = out.get(key, ZERO) + term
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
            cp = cp * c
    return TruncatedSeries(f.nvars, f.order, out)


# ---------------------------------------------------------------------------
# SeriesVector
# ---------------------------------------------------------------------------

class SeriesVector(tuple):
    """An ordered tuple of series sharing arity and order."""

    def __new__(cls, entries):
        entries = tuple(entries)
        if entries:
            nvars, order = entries[0].nvars, entries[0].order
            for s in entries[1:]:
                if s.nvars != nvars or s.order != order:
                    raise ArityMismatchError(
                        "series vector entries must share arity and order")
        return super().__new__(cls, entries)

    @property
    def nvars(self):
        return self[0].nvars

    @property
    def order(self):
        return self[0].order


def identity_vector(nvars, order):
    return SeriesVector(
        TruncatedSeries.variable(i, nvars, order) for i in range(nvars))


# ---------------------------------------------------------------------------
# implicit function theorem
# ---------------------------------------------------------------------------

def solve_implicit(H, n_x, n_y):
    """Solve H(x, phi(x)) = 0 for phi, degree by degree.

    H is a vector of n_y series in n_x + n_y variables (x first, then y)
    with H(0,0) = 0 and invertible constant matrix dH/dy(0).  Returns the
    unique vanishing phi as a vector of n_y series in the x variables, at
    the order of H.

    The solver is triangular: the degree-k part of phi is read off from the
    degree-k residual of H evaluated at the partial solution, which only
    involves parts of phi of degree < k.
    """
    H = list(H)
    if len(H) != n_y:
        raise ArityMismatchError("solve_implicit needs n_y equations")
    for h in H:
        if h.nvars != n_x + n_y:
            raise ArityMismatchError("equations must live in n_x + n_y variables")
        if not h.constant_term().is_zero():
            raise SingularLinearPartError("H(0,0) != 0")
    order = min(h.order for h in H)

    # constant matrix dH/dy(0) and its exact inverse
    A = [[h.coefficient(_unit_index(n_x + n_y, n_x + l)) for l in range(n_y)]
         for h in H]
    A_inv = _invert_matrix(A)
    if A_inv is None:
        raise SingularLinearPartError(
            "implicit function theorem hypothesis fails: dH/dy(0) is singular")

    phi = [TruncatedSeries(n_x, order) for _ in range(n_y)]
    x_args = [TruncatedSeries.variable(i, n_x, order) for i in range(n_x)]
    for k in range(1, order + 1):
        args = x_args + phi
        residual = [h.truncate(k).compose([a.truncate(k) for a in args]) for h in H]
        corrections = [dict() for _ in range(n_y)]
        for alpha in {a for r in residual for a in r.coeffs if sum(a) == k}:
            r_alpha = [r.coefficient(alpha) for r in residual]
            for j in range(n_y):
                c = ZERO
                for l in range(n_y):
                    c = c + A_inv[j][l] * r_alpha[l]
                c = -c
                if not c.is_zero():
                    corrections[j][alpha] = c
        phi = [phi[j] + TruncatedSeries(n_x, order, corrections[j])
               for j in range(n_y)]

    # paranoia: the defining property must hold on the whole truncation
    full_args = x_args + phi
    for h in H:
        if not h.compose(full_args).is_zero():
            raise SeriesError("implicit solver left a nonzero residual")
    return SeriesVector(phi)


def _unit_index(nvars, position):
    return tuple(1 if i == position else 0 for i in range(nvars))


def _invert_matrix(A):
    """Exact inverse of a small GaussRat matrix, or None if singular."""
    n = len(A)
    M = [row[:] + [ONE if i == j else ZERO for j in range(n)]
         for i, row in enumerate(A)]
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if not M[r][col].is_zero():
                pivot = r
                break
        if pivot is None:
            return None
        M[col], M[pivot] = M[pivot], M[col]
        inv = M[col][col].inverse()
        M[col] = [v * inv for v in M[col]]
        for r in range(n):
            if r != col and not M[r][col].is_zero():
                f = M[r][col]
                M[r] = [v - f * w for v, w in zip(M[r], M[col])]
    return [row[n:] for row in M]
