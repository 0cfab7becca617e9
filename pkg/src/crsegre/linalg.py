"""Exact rank computations over Gaussian rationals and truncated series.

Three facilities live here:

* `exact_rank` -- rank of a constant matrix by exact elimination;
* `generic_rank` -- generic rank of a matrix of truncated series, decided
  symbolically when the minor enumeration is affordable and otherwise by
  exact evaluation at seeded random rational points (two disjoint sample
  sets must agree before the verdict is promoted);
* `ideal_codimension` -- dimension of the truncated quotient of the local
  ring by an ideal, with stabilization across two degree levels deciding
  finite vs lower-bound.

Everything is deterministic for a fixed seed.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .gaussrat import GaussRat, ZERO, ONE
from .series import TruncatedSeries, grlex_key, multiindices

EXACT_SYMBOLIC = "exact-symbolic"
SAMPLED_AGREEMENT = "sampled-agreement"
LOWER_BOUND = "lower-bound"

# symbolic phase gives up beyond these; sampling takes over
_MAX_MINOR_SIZE = 6
_MAX_COLUMNS = 20
_MINOR_BUDGET = 20000

DEFAULT_TRIALS = 8


@dataclass(frozen=True)
class RankVerdict:
    value: int
    confidence: str
    samples: int = 0

    @property
    def certified(self):
        return self.confidence in (EXACT_SYMBOLIC, SAMPLED_AGREEMENT)

    def to_dict(self):
        return {"value": self.value, "confidence": self.confidence,
                "samples": self.samples}


class SeriesMatrix:
    """Rectangular matrix of truncated series sharing arity and order."""

    def __init__(self, rows):
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        for r in self.rows:
            if len(r) != self.ncols:
                raise ValueError("ragged series matrix")
        if self.nrows and self.ncols:
            self.nvars = self.rows[0][0].nvars
            self.order = min(min(s.order for s in r) for r in self.rows)
        else:
            self.nvars = 0
            self.order = 0

    def evaluate(self, point):
        """Exact evaluation with a power table shared across all entries."""
        cache = [{0: ONE} for _ in range(self.nvars)]

        def power(i, e):
            c = cache[i]
            while e not in c:
                top = max(c)
                c[top + 1] = c[top] * point[i]
            return c[e]

        out = []
        for r in self.rows:
            row = []
            for s in r:
                total = ZERO
                for alpha, coeff in s.coeffs.items():
                    term = coeff
                    for i, e in enumerate(alpha):
                        if e:
                            term = term * power(i, e)
                    total = total + term
                row.append(total)
            out.append(row)
        return out


def jacobian(entries, var_indices=None):
    """SeriesMatrix of partial derivatives: rows follow `entries`, columns
    the selected variables (all of them by default)."""
    entries = list(entries)
    if var_indices is None:
        var_indices = range(entries[0].nvars)
    return SeriesMatrix(
        [[f.partial_derivative(i) for i in var_indices] for f in entries])


# ---------------------------------------------------------------------------
# constant matrices
# ---------------------------------------------------------------------------

def exact_rank(matrix):
    """Rank of a constant GaussRat matrix, by exact Gaussian elimination."""
    M = [list(row) for row in matrix]
    if not M or not M[0]:
        return 0
    nrows, ncols = len(M), len(M[0])
    rank = 0
    for col in range(ncols):
        pivot = None
        for r in range(rank, nrows):
            if not M[r][col].is_zero():
                pivot = r
                break
        if pivot is None:
            continue
        M[rank], M[pivot] = M[pivot], M[rank]
        inv = M[rank][col].inverse()
        M[rank] = [v * inv for v in M[rank]]
        for r in range(nrows):
            if r != rank and not M[r][col].is_zero():
                f = M[r][col]
                M[r] = [v - f * w for v, w in zip(M[r], M[rank])]
        rank += 1
        if rank == nrows:
            break
    return rank


def _pivot_positions(matrix):
    """Row and column indices of an echelon pivot set (rank-many of each)."""
    M = [list(row) for row in matrix]
    if not M or not M[0]:
        return [], []
    nrows, ncols = len(M), len(M[0])
    row_order = list(range(nrows))
    prow = 0
    pivot_rows, pivot_cols = [], []
    for col in range(ncols):
        pivot = None
        for r in range(prow, nrows):
            if not M[r][col].is_zero():
                pivot = r
                break
        if pivot is None:
            continue
        M[prow], M[pivot] = M[pivot], M[prow]
        row_order[prow], row_order[pivot] = row_order[pivot], row_order[prow]
        pivot_rows.append(row_order[prow])
        pivot_cols.append(col)
        inv = M[prow][col].inverse()
        M[prow] = [v * inv for v in M[prow]]
        for r in range(prow + 1, nrows):
            if not M[r][col].is_zero():
                f = M[r][col]
                M[r] = [v - f * w for v, w in zip(M[r], M[prow])]
        prow += 1
        if prow == nrows:
            break
    return pivot_rows, pivot_cols


# ---------------------------------------------------------------------------
# symbolic minors
# ---------------------------------------------------------------------------

def series_minor(mat, rows, cols):
    """Determinant, in the truncated ring, of the submatrix rows x cols."""
    entries = [[mat.rows[r][c] for c in cols] for r in rows]
    return _det(entries)


def _det(entries):
    n = len(entries)
    if n == 1:
        return entries[0][0]
    memo = {}

    def rec(row, cols):
        if len(cols) == 1:
            return entries[row][cols[0]]
        key = (row, cols)
        if key in memo:
            return memo[key]
        acc = None
        sign = 1
        for k, c in enumerate(cols):
            e = entries[row][c]
            if not e.is_zero():
                sub = rec(row + 1, cols[:k] + cols[k + 1:])
                term = e * sub
                if sign < 0:
                    term = -term
                acc = term if acc is None else acc + term
            sign = -sign
        if acc is None:
            acc = TruncatedSeries(entries[0][0].nvars, entries[0][0].order)
        memo[key] = acc
        return acc

    return rec(0, tuple(range(n)))


# ---------------------------------------------------------------------------
# random sampling
# ---------------------------------------------------------------------------

def random_rational(rng):
    """Small-height rational: numerator in [-7, 7], denominator in [1, 5]."""
    return Fraction(rng.randint(-7, 7), rng.randint(1, 5))


def random_point(rng, nvars):
    return [GaussRat(random_rational(rng), random_rational(rng))
            for _ in range(nvars)]


def _trial_rng(seed, tag, index):
    return random.Random("%s/%s/%d" % (seed, tag, index))


def _sample_ranks(mat, seed, tag, trials, bound):
    """Max evaluated rank over the trial set; stops early when the maximal
    possible rank is reached (a nonzero full-size numeric minor already
    certifies the symbolic generic rank)."""
    best_rank = -1
    best_matrix = None
    for t in range(trials):
        rng = _trial_rng(seed, tag, t)
        value = mat.evaluate(random_point(rng, mat.nvars))
        r = exact_rank(value)
        if r > best_rank:
            best_rank = r
            best_matrix = value
        if best_rank >= bound:
            break
    return best_rank, best_matrix


# ---------------------------------------------------------------------------
# generic rank
# ---------------------------------------------------------------------------

def generic_rank(mat, seed=0, trials=DEFAULT_TRIALS):
    """Generic rank of a series matrix; see the module docstring for the
    two-phase protocol."""
    if isinstance(mat, list):
        mat = SeriesMatrix(mat)
    live_rows = [i for i, row in enumerate(mat.rows)
                 if any(not s.is_zero() for s in row)]
    if not live_rows or mat.ncols == 0:
        return RankVerdict(0, EXACT_SYMBOLIC)
    bound = min(len(live_rows), mat.ncols)
    r1, best1 = _sample_ranks(mat, seed, "a", trials, bound)
    if r1 == bound:
        return RankVerdict(bound, EXACT_SYMBOLIC, trials)
    r2, _ = _sample_ranks(mat, seed, "b", trials, bound)
    if r2 == bound:
        return RankVerdict(bound, EXACT_SYMBOLIC, trials * 2)
    sampled = max(r1, r2)

    certified = 0
    if sampled > 0 and best1 is not None:
        # a nonzero numeric minor pins down a symbolically nonzero minor
        certified = sampled

    rank = max(sampled, certified)
    while rank < bound:
        found = _find_nonzero_minor(mat, live_rows, rank + 1)
        if found is None:
            break
        if not found:
            # enumeration proved every (rank+1)-minor zero in the truncated ring
            return RankVerdict(rank, EXACT_SYMBOLIC, trials * 2)
        rank += 1
    if rank == bound:
        return RankVerdict(rank, EXACT_SYMBOLIC, trials * 2)
    if rank == sampled and r1 == r2:
        return RankVerdict(rank, SAMPLED_AGREEMENT, trials * 2)
    return RankVerdict(rank, LOWER_BOUND, trials * 2)


def _find_nonzero_minor(mat, live_rows, size):
    """True if some size x size minor is nonzero in the truncated ring,
    False if all vanish, None when the enumeration exceeds the budget."""
    ncols = mat.ncols
    if size > _MAX_MINOR_SIZE or ncols > _MAX_COLUMNS:
        return None
    count = _ncr(len(live_rows), size) * _ncr(ncols, size)
    if count > _MINOR_BUDGET:
        return None
    for rows in itertools.combinations(live_rows, size):
        for cols in itertools.combinations(range(ncols), size):
            if not series_minor(mat, rows, cols).is_zero():
                return True
    return False


def _ncr(n, k):
    if k > n:
        return 0
    out = 1
    for j in range(k):
        out = out * (n - j) // (j + 1)
    return out


# ---------------------------------------------------------------------------
# ideal codimension
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdealCodim:
    """Result of a truncated-quotient codimension computation.

    `value` is the quotient dimension at degree level K; `stable` reports
    whether the levels K-1 and K agreed (finite codimension confirmed).
    When not stable, `value` is only a lower bound for the codimension.
    """
    value: int
    stable: bool
    value_prev: int

    @property
    def finite(self):
        return self.stable

    def to_dict(self):
        return {"value": self.value, "stable": self.stable,
                "value_prev": self.value_prev}


def ideal_codimension(generators, K, nvars=None):
    """Codimension of the ideal spanned by `generators` in the local ring,
    measured on the truncated quotient at degree levels K-1 and K.

    `nvars` is only needed when the generator list is empty (zero ideal);
    the zero ideal always reports an unstable, growing quotient."""
    generators = [g for g in generators if not g.is_zero()]
    if not generators:
        if nvars is None:
            raise ValueError("nvars is required for an empty generator list")
        return IdealCodim(len(multiindices(nvars, K - 1)), False,
                          len(multiindices(nvars, K - 2)))
    nvars = generators[0].nvars
    for g in generators:
        if g.nvars != nvars:
            raise ValueError("ideal generators have mixed arities")
        if not g.constant_term().is_zero():
            raise ValueError("ideal generators must vanish at the origin")
        if K > g.order:
            raise ValueError("codimension level exceeds the series order")
    generators = _dedupe(generators)
    prev = _quotient_dimension(generators, nvars, K - 1)
    cur = _quotient_dimension(generators, nvars, K)
    return IdealCodim(cur, cur == prev, prev)


def _dedupe(series_list):
    seen = set()
    out = []
    for s in series_list:
        key = frozenset(s.coeffs.items())
        if key not in seen:
            seen.add(key)
            out.append(s)
    return out


def _quotient_dimension(generators, nvars, K):
    """dim of {polys of degree < K} modulo the span of all truncated
    generator multiples g * monomial."""
    basis = multiindices(nvars, K - 1)
    index = {alpha: i for i, alpha in enumerate(basis)}
    pivots = {}  # leading column -> reduced row (dict col -> GaussRat)
    for g in generators:
        val = g.valuation()
        for mu in multiindices(nvars, K - 1 - val):
            row = {}
            for alpha, c in g.coeffs.items():
                shifted = tuple(a + b for a, b in zip(alpha, mu))
                if sum(shifted) < K:
                    row[index[shifted]] = c
            _reduce_row_into(pivots, row)
    return len(basis) - len(pivots)


def _reduce_row_into(pivots, row):
    while row:
        lead = min(row)
        if lead not in pivots:
            inv = row[lead].inverse()
            pivots[lead] = {c: v * inv for c, v in row.items()}
            return
        factor = row[lead]
        for c, v in pivots[lead].items():
            s = row.get(c, ZERO) - factor * v
            if s.is_zero():
                row.pop(c, None)
            else:
                row[c] = s
