"""Deterministic random manifolds, graphs and coordinate changes for the
property suites.  Everything is driven by explicit integer seeds."""

import random
from fractions import Fraction

from crsegre.gaussrat import GaussRat
from crsegre.series import TruncatedSeries, SeriesVector, multiindices
from crsegre.manifold import GenericManifold, ManifoldError, transform_linear
from crsegre.frontend import ManifoldSpec, REAL_GRAPH


def rng_for(seed, tag):
    return random.Random("randman/%s/%s" % (seed, tag))


def small_rational(rng, num=5, den=3):
    return Fraction(rng.randint(-num, num), rng.randint(1, den))


def small_gauss(rng, num=5, den=3):
    return GaussRat(small_rational(rng, num, den), small_rational(rng, num, den))


def random_rigid_manifold(seed, m=1, d=1, order=8, terms=3, max_deg=4):
    """A rigid manifold wbar_j = w_j + psi_j(zbar, z) whose Hermitian
    coefficient symmetry makes the reality identities hold exactly."""
    rng = rng_for(seed, "rigid/%d/%d" % (m, d))
    nv = 2 * m + d
    betas = [b for b in multiindices(m, max_deg - 1) if 0 < sum(b) < max_deg]
    theta = []
    for j in range(d):
        coeffs = {}

        def add(alpha, c):
            key = alpha
            coeffs[key] = coeffs.get(key, GaussRat(0)) + c

        for _ in range(terms):
            beta = rng.choice(betas)
            alphas = [a for a in betas if sum(a) + sum(beta) <= max_deg]
            if not alphas:
                continue
            alpha = rng.choice(alphas)
            c = small_gauss(rng)
            if c.is_zero():
                c = GaussRat(1)
            add(beta + alpha + (0,) * d, c)
            add(alpha + beta + (0,) * d, c.conjugate())
        w_j = tuple(0 for _ in range(2 * m)) + \
            tuple(1 if l == j else 0 for l in range(d))
        coeffs[w_j] = coeffs.get(w_j, GaussRat(0)) + GaussRat(1)
        theta.append(TruncatedSeries(nv, order, coeffs))
    return GenericManifold(m, d, order, theta)


def random_real_graph_spec(seed, m=1, d=1, order=8, terms=3, max_deg=3):
    """A ManifoldSpec-shaped random real graph v_j = phi_j(x, y, u) with
    rational coefficients and dphi(0) = 0."""
    from crsegre.frontend import Lit, Var, Mul, Add, Pow

    rng = rng_for(seed, "graph/%d/%d" % (m, d))
    names = ["x_%d" % (k + 1) for k in range(m)] + \
            ["y_%d" % (k + 1) for k in range(m)] + \
            ["u_%d" % (j + 1) for j in range(d)]
    equations = []
    for j in range(d):
        expr = None
        for _ in range(terms):
            deg = rng.randint(2, max_deg)
            factors = [Var(rng.choice(names)) for _ in range(deg)]
            term = Lit(small_rational(rng))
            for f in factors:
                term = Mul(term, f)
            expr = term if expr is None else Add(expr, term)
        equations.append(expr)
    return ManifoldSpec("random", m, d, order, REAL_GRAPH, equations)


def random_invertible_linear(seed, n, attempt=0):
    """I + small perturbation, resampled until exactly invertible."""
    from crsegre.series import _invert_matrix

    rng = rng_for(seed, "linear/%d/%d" % (n, attempt))
    for _ in range(32):
        A = [[(GaussRat(1) if i == j else GaussRat(0))
              + GaussRat(Fraction(rng.randint(-2, 2), rng.randint(2, 4)),
                         Fraction(rng.randint(-2, 2), rng.randint(2, 4)))
              for j in range(n)] for i in range(n)]
        if _invert_matrix(A) is not None:
            return A
    raise RuntimeError("could not sample an invertible matrix")


def transformed_copy(M, seed, attempt=0):
    """(M', A): the image of M under a random invertible linear change;
    resamples when the change leaves generic position."""
    for extra in range(12):
        A = random_invertible_linear((seed, extra), M.n, attempt)
        try:
            return transform_linear(M, A), A
        except ManifoldError:
            continue
    raise RuntimeError("no usable linear change found")
