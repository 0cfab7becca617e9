"""Local generic submanifolds of C^n through complex defining equations.

A manifold of CR dimension m and codimension d is stored through the d
series Theta_j in the 2m+d variables (zbar_1..zbar_m, z_1..z_m, w_1..w_d),
modeling the equations  wbar_j = Theta_j(zbar, z, w).  Validity means
Theta(0) = 0, the d x d matrix dTheta/dw(0) is invertible, and the two
conjugate reality identities

    w  == Thetabar(z, zbar, Theta(zbar, z, w))
    xi == Theta(zbar, z, Thetabar(z, zbar, xi))

hold on the whole truncation.  The complexification replaces zbar by the
independent variable zeta throughout; all internal computations live on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .gaussrat import GaussRat, ZERO, ONE
from .series import (
    TruncatedSeries, SeriesVector, solve_implicit, grlex_key,
    SingularLinearPartError, SeriesError, _invert_matrix,
)
from . import frontend
from .frontend import ManifoldSpec, REAL_GRAPH, COMPLEX_DEFINING


class ManifoldError(Exception):
    pass


class RealityError(ManifoldError):
    """Raised when the reality identities fail; carries the witness."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__(
            "reality identity %s fails first at j=%d, multiindex %s, "
            "coefficient %s" % witness)


@dataclass(frozen=True)
class RealityVerdict:
    ok: bool
    # (identity tag, j, multiindex, coefficient) of the first failure
    witness: tuple = None

    def to_dict(self):
        if self.ok:
            return {"ok": True}
        tag, j, alpha, coeff = self.witness
        return {"ok": False, "identity": tag, "j": j,
                "multiindex": list(alpha), "coefficient": str(coeff)}


@dataclass(frozen=True)
class SurfacePoint:
    """A rational point of M; z and w are tuples of GaussRat."""
    z: tuple
    w: tuple

    @property
    def t(self):
        return self.z + self.w

    @property
    def zbar(self):
        return tuple(c.conjugate() for c in self.z)

    @property
    def wbar(self):
        return tuple(c.conjugate() for c in self.w)

    def to_dict(self):
        return {"z": [str(c) for c in self.z], "w": [str(c) for c in self.w]}


class GenericManifold:
    """Immutable after construction; see the module docstring.

    `check` selects the validation level: "full" (the default) verifies the
    reality identities; "basic" only checks the vanishing constant terms and
    the solvability matrix, which is enough for manifolds produced by exact
    coordinate changes of already-validated ones (those transport the
    reality residual)."""

    def __init__(self, m, d, order, theta, real_phi=None, check="full"):
        if m < 1 or d < 1:
            raise ManifoldError("need m >= 1 and d >= 1")
        theta = SeriesVector(theta)
        if len(theta) != d or theta.nvars != 2 * m + d:
            raise ManifoldError("theta must hold d series in 2m+d variables")
        self.m = m
        self.d = d
        self.n = m + d
        self.order = order
        self.theta = theta
        self.theta_bar = SeriesVector(s.conjugate_coeffs() for s in theta)
        self.real_phi = real_phi
        self._phi_cache = real_phi
        if check:
            self._validate(full=(check != "basic"))

    # -- variable bookkeeping: zeta 0..m-1, z m..2m-1, w 2m..2m+d-1 -----

    def zeta_vars(self, nvars=None, order=None):
        return self._vars(0, self.m, nvars, order)

    def z_vars(self, nvars=None, order=None):
        return self._vars(self.m, 2 * self.m, nvars, order)

    def w_vars(self, nvars=None, order=None):
        return self._vars(2 * self.m, 2 * self.m + self.d, nvars, order)

    def _vars(self, lo, hi, nvars, order):
        nv = nvars if nvars is not None else 2 * self.m + self.d
        od = order if order is not None else self.order
        return [TruncatedSeries.variable(i, nv, od) for i in range(lo, hi)]

    def variable_names(self):
        names = ["zbar_%d" % (k + 1) for k in range(self.m)]
        names += ["z_%d" % (k + 1) for k in range(self.m)]
        names += ["w_%d" % (j + 1) for j in range(self.d)]
        return names

    # -- validation -----------------------------------------------------------

    def w_linear_part(self):
        """The d x d matrix dTheta/dw(0)."""
        nv = 2 * self.m + self.d
        out = []
        for j in range(self.d):
            row = []
            for l in range(self.d):
                alpha = tuple(1 if i == 2 * self.m + l else 0 for i in range(nv))
                row.append(self.theta[j].coefficient(alpha))
            out.append(row)
        return out

    def _validate(self, full=True):
        for j, s in enumerate(self.theta):
            if not s.constant_term().is_zero():
                raise ManifoldError(
                    "Theta_%d has a nonzero constant term" % (j + 1))
        if _invert_matrix(self.w_linear_part()) is None:
            raise ManifoldError(
                "dTheta/dw(0) is singular: the coordinates are not in generic "
                "position (T_0^c M meets the w-axis); supply a linear change")
        if full:
            verdict = self.check_reality()
            if not verdict.ok:
                raise RealityError(verdict.witness)

    def check_reality(self):
        """Verify both functional equations up to the truncation order."""
        zeta, z, w = self.zeta_vars(), self.z_vars(), self.w_vars()
        theta_of = [s for s in self.theta]
        # identity 2:  w - Thetabar(z, zeta, Theta(zeta, z, w))
        inner = list(theta_of)
        for j in range(self.d):
            lhs = w[j] - self.theta_bar[j].compose(z + zeta + inner)
            if not lhs.is_zero():
                alpha, coeff = lhs.first_nonzero()
                return RealityVerdict(False, ("w-identity", j + 1, alpha, coeff))
        # identity 1:  xi - Theta(zeta, z, Thetabar(z, zeta, xi)); same
        # variable space read as (zeta, z, xi)
        xi = self.w_vars()
        tb = [self.theta_bar[j].compose(z + zeta + xi) for j in range(self.d)]
        for j in range(self.d):
            lhs = xi[j] - self.theta[j].compose(zeta + z + tb)
            if not lhs.is_zero():
                alpha, coeff = lhs.first_nonzero()
                return RealityVerdict(False, ("xi-identity", j + 1, alpha, coeff))
        return RealityVerdict(True)

    # -- derived objects -----------------------------------------------------

    def theta_coefficients(self, max_beta=None):
        """The family Theta_{j,beta}(t): dict (j, beta) -> series in the n
        variables t = (z, w), regrouping Theta_j by powers of zeta."""
        if max_beta is None:
            max_beta = self.order
        out = {}
        for j in range(self.d):
            for alpha, c in self.theta[j].coeffs.items():
                beta = alpha[:self.m]
                if sum(beta) > max_beta:
                    continue
                rest = alpha[self.m:]
                key = (j, beta)
                if key not in out:
                    out[key] = {}
                out[key][rest] = c
        family = {}
        for j in range(self.d):
            for beta in _betas_up_to(self.m, max_beta):
                key = (j, beta)
                order = self.order - sum(beta)
                family[key] = TruncatedSeries(self.n, order, out.get(key, {}))
        return family

    def segre_variety_graph(self, tau_p):
        """Graphing series z -> Thetabar_j(z, tau_p) of the complexified
        Segre variety attached to the frozen point tau_p = (zeta_p, xi_p)."""
        tau_p = [GaussRat(c) if not isinstance(c, GaussRat) else c for c in tau_p]
        if len(tau_p) != self.n:
            raise ManifoldError("tau_p needs %d coordinates" % self.n)
        z = [TruncatedSeries.variable(i, self.m, self.order) for i in range(self.m)]
        consts = [TruncatedSeries.constant(c, self.m, self.order) for c in tau_p]
        args = z + consts
        return SeriesVector(tb.compose_at(args) for tb in self.theta_bar)

    def cr_frame(self):
        return CRFrame(
            lbar_coeffs=[SeriesVector(s.partial_derivative(k) for s in self.theta)
                         for k in range(self.m)],
            l_coeffs=[SeriesVector(s.conjugate_coeffs().partial_derivative(k)
                                   for s in self.theta)
                      for k in range(self.m)])

    def is_normal(self):
        """Theta(0, z, w) == w and Theta(zeta, 0, w) == w on the truncation."""
        for j in range(self.d):
            for alpha, c in self.theta[j].coeffs.items():
                zeta_deg = sum(alpha[:self.m])
                z_deg = sum(alpha[self.m:2 * self.m])
                if zeta_deg == 0 or z_deg == 0:
                    if _is_w_unit(alpha, self.m, self.d, j) and c == ONE:
                        continue
                    return False
        return True

    # -- surface points ---------------------------------------------------------

    def graphing_phi(self):
        """The real graphing functions v = phi(x, y, u), recovered from the
        complex equations when the manifold was not built from real input."""
        if self._phi_cache is not None:
            return self._phi_cache
        m, d, N = self.m, self.d, self.order
        nv = 2 * m + 2 * d  # (x, y, u, v)
        i_unit = GaussRat(0, 1)
        x = [TruncatedSeries.variable(i, nv, N) for i in range(m)]
        y = [TruncatedSeries.variable(m + i, nv, N) for i in range(m)]
        u = [TruncatedSeries.variable(2 * m + j, nv, N) for j in range(d)]
        v = [TruncatedSeries.variable(2 * m + d + j, nv, N) for j in range(d)]
        zbar = [x[k] - y[k].scale(i_unit) for k in range(m)]
        z = [x[k] + y[k].scale(i_unit) for k in range(m)]
        w = [u[j] + v[j].scale(i_unit) for j in range(d)]
        H = [(u[j] - v[j].scale(i_unit)) - self.theta[j].compose(zbar + z + w)
             for j in range(d)]
        phi = solve_implicit(H, 2 * m + d, d)
        self._phi_cache = phi
        return phi

    def surface_point(self, z_p, u_p=None):
        """Exact point of M over the fiber z = z_p, with Re w = u_p
        (defaults to 0); v is read off the graphing functions."""
        z_p = [c if isinstance(c, GaussRat) else GaussRat(c) for c in z_p]
        if len(z_p) != self.m:
            raise ManifoldError("z_p needs %d coordinates" % self.m)
        if u_p is None:
            u_p = [GaussRat(0)] * self.d
        u_p = [c if isinstance(c, GaussRat) else GaussRat(c) for c in u_p]
        phi = self.graphing_phi()
        coords = [c.re for c in z_p] + [c.im for c in z_p] + \
                 [c.re for c in u_p]
        v_p = [p.evaluate(coords) for p in phi]
        for v in v_p:
            if not v.is_real():
                raise ManifoldError("graphing functions returned a non-real v")
        w_p = [GaussRat(u.re, v.re) for u, v in zip(u_p, v_p)]
        pt = SurfacePoint(tuple(z_p), tuple(w_p))
        if not self.contains(pt):
            raise ManifoldError(
                "surface point is not exactly on the truncated model "
                "(the graphing functions are only known to order %d)" % self.order)
        return pt

    def contains(self, pt):
        """Exact membership in the truncated model."""
        point = list(pt.zbar) + list(pt.z) + list(pt.w)
        return all((self.theta[j].evaluate(point) - pt.wbar[j]).is_zero()
                   for j in range(self.d))

    # -- formatting ---------------------------------------------------------------

    def theta_strings(self):
        names = self.variable_names()
        return [s.to_str(names) for s in self.theta]

    def __repr__(self):
        return "<GenericManifold m=%d d=%d order=%d>" % (self.m, self.d, self.order)


@dataclass(frozen=True)
class CRFrame:
    """Coefficient series of the complexified CR vector fields: the field
    Lbar_k is  d/dzeta_k + sum_j lbar_coeffs[k][j] d/dxi_j  and L_k is its
    conjugate, with coefficients read in the (z, zeta, xi) chart."""
    lbar_coeffs: list
    l_coeffs: list


def _betas_up_to(m, k):
    from .series import multiindices
    return multiindices(m, k)


def _is_w_unit(alpha, m, d, j):
    if any(alpha[i] for i in range(2 * m)):
        return False
    return all(alpha[2 * m + l] == (1 if l == j else 0) for l in range(d))


# ---------------------------------------------------------------------------
# constructors from parsed specs
# ---------------------------------------------------------------------------

def from_complex_equations(spec: ManifoldSpec):
    if spec.style != COMPLEX_DEFINING:
        raise ManifoldError("spec style must be complex_defining")
    theta = spec.expand_equations()
    return GenericManifold(spec.m, spec.d, spec.order, theta)


def from_real_equations(spec: ManifoldSpec):
    """Solve the graph equations (w - wbar)/2i = phi for wbar, then verify
    that the resulting complex equations satisfy the reality identities."""
    if spec.style != REAL_GRAPH:
        raise ManifoldError("spec style must be real_graph")
    phi = spec.expand_equations()
    for j, p in enumerate(phi):
        if not p.constant_term().is_zero():
            raise ManifoldError("phi_%d(0) != 0" % (j + 1))
    theta = _solve_for_wbar(phi, spec.m, spec.d, spec.order)
    M = GenericManifold(spec.m, spec.d, spec.order, theta, real_phi=phi)
    return M


def _solve_for_wbar(phi, m, d, N):
    nv = 2 * m + 2 * d  # (zeta, z, w, y=wbar)
    i_unit = GaussRat(0, 1)
    half = GaussRat(Fraction(1, 2))
    zeta = [TruncatedSeries.variable(i, nv, N) for i in range(m)]
    z = [TruncatedSeries.variable(m + i, nv, N) for i in range(m)]
    w = [TruncatedSeries.variable(2 * m + j, nv, N) for j in range(d)]
    y = [TruncatedSeries.variable(2 * m + d + j, nv, N) for j in range(d)]
    x_args = [(z[k] + zeta[k]).scale(half) for k in range(m)]
    y_args = [(z[k] - zeta[k]).scale(half * i_unit.inverse()) for k in range(m)]
    u_args = [(w[j] + y[j]).scale(half) for j in range(d)]
    H = []
    for j in range(d):
        graph = phi[j].compose(x_args + y_args + u_args)
        H.append((w[j] - y[j]).scale((2 * i_unit).inverse()) - graph)
    try:
        return solve_implicit(H, 2 * m + d, d)
    except SingularLinearPartError as exc:
        raise ManifoldError(
            "cannot solve for wbar: %s; supply a linear change" % exc) from exc


def build_from_spec(spec: ManifoldSpec):
    if spec.style == COMPLEX_DEFINING:
        return from_complex_equations(spec)
    return from_real_equations(spec)


def defining_series(spec: ManifoldSpec):
    """The d defining series r_j in the 2n variables (zeta, xi, z, w):
    xi_j - Theta_j for complex style, (w_j - xi_j)/2i - phi_j(...) for real
    graphs (xi complexifies wbar)."""
    m, d, N = spec.m, spec.d, spec.order
    n = m + d
    nv = 2 * n
    i_unit = GaussRat(0, 1)
    half = GaussRat(Fraction(1, 2))
    zeta = [TruncatedSeries.variable(i, nv, N) for i in range(m)]
    xi = [TruncatedSeries.variable(m + j, nv, N) for j in range(d)]
    z = [TruncatedSeries.variable(n + i, nv, N) for i in range(m)]
    w = [TruncatedSeries.variable(n + m + j, nv, N) for j in range(d)]
    eqs = spec.expand_equations()
    if spec.style == COMPLEX_DEFINING:
        theta = [s.embed(nv, list(range(m)) + list(range(n, nv))) for s in eqs]
        return [xi[j] - theta[j] for j in range(d)]
    x_args = [(z[k] + zeta[k]).scale(half) for k in range(m)]
    y_args = [(z[k] - zeta[k]).scale(half * i_unit.inverse()) for k in range(m)]
    u_args = [(w[j] + xi[j]).scale(half) for j in range(d)]
    out = []
    for j in range(d):
        graph = eqs[j].compose(x_args + y_args + u_args)
        out.append((w[j] - xi[j]).scale((2 * i_unit).inverse()) - graph)
    return out


def build_with_linear_change(spec: ManifoldSpec, A):
    """Build the manifold after the invertible linear change t' = A t of
    the ambient coordinates (the conjugate variables transform by Abar).
    This is the CLI hook for inputs whose given coordinates are not in
    generic position."""
    m, d, N = spec.m, spec.d, spec.order
    n = m + d
    nv = 2 * n
    A = [[c if isinstance(c, GaussRat) else GaussRat(c) for c in row]
         for row in A]
    if len(A) != n or any(len(r) != n for r in A):
        raise ManifoldError("the linear change must be an n x n matrix")
    A_inv = _invert_matrix(A)
    if A_inv is None:
        raise ManifoldError("the linear change is singular")
    A_inv_bar = [[c.conjugate() for c in row] for row in A_inv]
    r = defining_series(spec)
    tau_new = [TruncatedSeries.variable(i, nv, N) for i in range(n)]
    t_new = [TruncatedSeries.variable(n + i, nv, N) for i in range(n)]
    tau_old = [_linear_combo(A_inv_bar[i], tau_new) for i in range(n)]
    t_old = [_linear_combo(A_inv[i], t_new) for i in range(n)]
    r_new = [s.compose(tau_old + t_old) for s in r]
    # reorder to (zeta', z', w', xi') and solve for xi'
    perm = list(range(m)) + list(range(n, 2 * n)) + list(range(m, n))
    H = [s.embed(nv, _inverse_permutation(perm)) for s in r_new]
    try:
        theta = solve_implicit(H, 2 * m + d, d)
    except SingularLinearPartError as exc:
        raise ManifoldError(
            "coordinates are still outside generic position after the "
            "linear change: %s" % exc) from exc
    return GenericManifold(m, d, N, theta)


def _inverse_permutation(perm):
    out = [0] * len(perm)
    for i, p in enumerate(perm):
        out[p] = i
    return out


# ---------------------------------------------------------------------------
# coordinate changes
# ---------------------------------------------------------------------------

def transform_triangular(M, g):
    """Image of M under (z, w) -> (z, g(z, w)) with g(0) = 0 and
    dg/dw(0) invertible; g holds d series in the n variables (z, w).
    Returns (M', G) where G inverts g in w:  g(z, G(z, w')) = w'."""
    m, d, N = M.m, M.d, M.order
    n = m + d
    g = SeriesVector(g)
    if len(g) != d or g.nvars != n:
        raise ManifoldError("g must hold d series in the n variables (z, w)")
    # invert in w:  variables (z, w', y)
    nv = n + d
    z = [TruncatedSeries.variable(i, nv, N) for i in range(m)]
    wp = [TruncatedSeries.variable(m + j, nv, N) for j in range(d)]
    y = [TruncatedSeries.variable(n + j, nv, N) for j in range(d)]
    H = [g[j].compose(z + y) - wp[j] for j in range(d)]
    G = solve_implicit(H, n, d)  # d series in (z, w')

    # Theta' = gbar(zeta, Theta(zeta, z, G(z, w'))) in the (zeta, z, w') space
    nv2 = 2 * m + d
    zeta2 = [TruncatedSeries.variable(i, nv2, N) for i in range(m)]
    z2 = [TruncatedSeries.variable(m + i, nv2, N) for i in range(m)]
    wp2 = [TruncatedSeries.variable(2 * m + j, nv2, N) for j in range(d)]
    G2 = [s.embed(nv2, list(range(m, 2 * m + d))) for s in G]
    theta_inner = [s.compose(zeta2 + z2 + G2) for s in M.theta]
    gbar = [s.conjugate_coeffs() for s in g]
    theta_new = [s.compose(zeta2 + theta_inner) for s in gbar]
    return GenericManifold(m, d, N, theta_new, check="basic"), G


def transform_linear(M, A):
    """Image of M under the invertible linear change t' = A t.

    Raises ManifoldError when the new coordinates are not in generic
    position (the transformed equations cannot be solved for wbar')."""
    m, d, N = M.m, M.d, M.order
    n = m + d
    if len(A) != n or any(len(r) != n for r in A):
        raise ManifoldError("A must be n x n")
    A = [[c if isinstance(c, GaussRat) else GaussRat(c) for c in row] for row in A]
    A_inv = _invert_matrix(A)
    if A_inv is None:
        raise ManifoldError("linear change is singular")
    A_bar = [[c.conjugate() for c in row] for row in A]

    # working space (zeta', z', w', y=zeta): solve zeta = W(zeta', t')
    nv = 2 * m + d + m
    zp = [TruncatedSeries.variable(i, nv, N) for i in range(m)]
    tp = [TruncatedSeries.variable(m + i, nv, N) for i in range(n)]
    y = [TruncatedSeries.variable(2 * m + d + i, nv, N) for i in range(m)]
    t_old = [_linear_combo(A_inv[r], tp) for r in range(n)]
    theta_old = [s.compose(y + t_old) for s in M.theta]
    tau_old = y + theta_old
    F = [_linear_combo(A_bar[r], tau_old) for r in range(m)]
    H = [F[k] - zp[k] for k in range(m)]
    try:
        W = solve_implicit(H, 2 * m + d, m)  # m series in (zeta', t')
    except SingularLinearPartError as exc:
        raise ManifoldError(
            "linear change leaves the coordinates outside generic position: "
            "%s" % exc) from exc

    # Theta' = (Abar theta-block) evaluated at zeta = W
    nv2 = 2 * m + d
    t2 = [TruncatedSeries.variable(m + i, nv2, N) for i in range(n)]
    t_old2 = [_linear_combo(A_inv[r], t2) for r in range(n)]
    W2 = list(W)
    theta_at = [s.compose(W2 + t_old2) for s in M.theta]
    tau2 = W2 + theta_at
    theta_new = [_linear_combo(A_bar[m + r], tau2) for r in range(d)]
    return GenericManifold(m, d, N, theta_new, check="basic")


def _linear_combo(row, series_list):
    acc = None
    for c, s in zip(row, series_list):
        if c.is_zero():
            continue
        term = s.scale(c)
        acc = term if acc is None else acc + term
    if acc is None:
        return TruncatedSeries(series_list[0].nvars, series_list[0].order)
    return acc


# ---------------------------------------------------------------------------
# normal coordinates
# ---------------------------------------------------------------------------

def to_normal_coordinates(M):
    """Normal coordinates (Theta'(0,z,w) = Theta'(zbar,0,w) = w) via three
    triangular steps: a linear w-change making dTheta/dw(0) the identity, a
    midpoint change straightening M over {z = 0}, and the substitution
    w' = Theta(0, z, w).  Returns (M', h) with h = (z, g(z, w)) the composite
    change of coordinates as n series in (z, w)."""
    m, d, N = M.m, M.d, M.order
    n = m + d
    if M.is_normal():
        return M, _identity_map(n, N)

    cur = M
    g_total = None  # d series in (z, w): the accumulated w-component

    # step 1: P = cI + cbar B with P invertible; w -> P w
    B = cur.w_linear_part()
    if not _is_identity(B):
        P = _pick_p_matrix(B)
        g1 = _linear_w_map(P, m, d, N)
        cur, _ = transform_triangular(cur, g1)
        g_total = g1

    # step 2: s(w) = (w + q(w))/2 with q(w) = Theta(0, 0, w)
    q = _restrict_to_w(cur)
    if not _is_identity_map(q, m, d):
        half = GaussRat(Fraction(1, 2))
        n_vars_w = [TruncatedSeries.variable(m + j, n, N) for j in range(d)]
        s_map = SeriesVector((n_vars_w[j] + q[j]).scale(half) for j in range(d))
        cur, _ = transform_triangular(cur, s_map)
        g_total = s_map if g_total is None else _compose_w_maps(s_map, g_total, m, d, N)

    # step 3: w' = Theta(0, z, w)
    g3 = _restrict_to_zw(cur)
    if not _is_identity_map(g3, m, d):
        cur, _ = transform_triangular(cur, g3)
        g_total = g3 if g_total is None else _compose_w_maps(g3, g_total, m, d, N)

    if not cur.is_normal():
        raise ManifoldError("normalization failed to reach normal form")
    if g_total is None:
        return cur, _identity_map(n, N)
    z_part = [TruncatedSeries.variable(i, n, N) for i in range(m)]
    return cur, SeriesVector(z_part + list(g_total))


def _identity_map(n, N):
    return SeriesVector(TruncatedSeries.variable(i, n, N) for i in range(n))


def _is_identity(B):
    d = len(B)
    for i in range(d):
        for j in range(d):
            want = ONE if i == j else ZERO
            if B[i][j] != want:
                return False
    return True


def _pick_p_matrix(B):
    candidates = [GaussRat(1), GaussRat(0, 1), GaussRat(1, 0) + GaussRat(0, 1),
                  GaussRat(2) + GaussRat(0, 1), GaussRat(1) + GaussRat(0, 2),
                  GaussRat(3) + GaussRat(0, 1)]
    d = len(B)
    for c in candidates:
        cb = c.conjugate()
        P = [[(c if i == j else ZERO) + cb * B[i][j] for j in range(d)]
             for i in range(d)]
        if _invert_matrix(P) is not None:
            return P
    raise ManifoldError("could not find an invertible matrix c I + cbar B")


def _linear_w_map(P, m, d, N):
    n = m + d
    w = [TruncatedSeries.variable(m + j, n, N) for j in range(d)]
    return SeriesVector(_linear_combo(P[j], w) for j in range(d))


def _restrict_to_w(M):
    """q_j(w) = Theta_j(0, 0, w) as d series in the n variables (z, w)."""
    m, d, N = M.m, M.d, M.order
    n = m + d
    out = []
    for j in range(d):
        coeffs = {}
        for alpha, c in M.theta[j].coeffs.items():
            if any(alpha[i] for i in range(2 * m)):
                continue
            key = (0,) * m + alpha[2 * m:]
            coeffs[key] = c
        out.append(TruncatedSeries(n, N, coeffs))
    return SeriesVector(out)


def _restrict_to_zw(M):
    """g_j(z, w) = Theta_j(0, z, w) as d series in the n variables (z, w)."""
    m, d, N = M.m, M.d, M.order
    n = m + d
    out = []
    for j in range(d):
        coeffs = {}
        for alpha, c in M.theta[j].coeffs.items():
            if any(alpha[i] for i in range(m)):
                continue
            coeffs[alpha[m:]] = c
        out.append(TruncatedSeries(n, N, coeffs))
    return SeriesVector(out)


def _is_identity_map(g, m, d):
    n = m + d
    for j in range(d):
        expect = TruncatedSeries.variable(m + j, n, g.order)
        if g[j] != expect:
            return False
    return True


def _compose_w_maps(outer, inner, m, d, N):
    """(z, w) -> outer(z, inner(z, w)) for two d-component w-maps."""
    n = m + d
    z = [TruncatedSeries.variable(i, n, N) for i in range(m)]
    return SeriesVector(s.compose(z + list(inner)) for s in outer)
