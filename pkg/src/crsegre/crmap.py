"""Power-series CR mappings between two generic manifolds.

A mapping h = (f, g) from M (dimensions m, d) into M' (dimensions m', d')
is accepted when the fundamental identity

    gbar_j'(zeta, Theta(zeta, t)) == Theta'_j'(fbar(zeta, Theta(zeta, t)), h(t))

holds on the whole truncation.  Two independent batteries of nondegeneracy
conditions are computed:

* the CR-horizontal conditions of the induced map between Segre varieties
  z -> f(z, Thetabar(z, 0)): invertible / submersive / finite / dominating /
  transversal (the last by a bounded-degree annihilator search);
* the Segre-type conditions read off the reflection family
  R'_{j',beta}(zeta, t : t') = d_zeta^beta [ gbar_j' - Theta'_j'(fbar, t') ]
  evaluated along the complexification: ranks, local finiteness and generic
  ranks of the family in the t' slot.

Both manifolds are put in normal coordinates before the Segre-type
classification, with the mapping conjugated accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .gaussrat import GaussRat, ZERO, ONE
from .series import (
    TruncatedSeries, SeriesVector, multiindices, grlex_key, solve_implicit,
)
from .linalg import (
    SeriesMatrix, RankVerdict, exact_rank, generic_rank, ideal_codimension,
    DEFAULT_TRIALS, EXACT_SYMBOLIC,
)
from .manifold import GenericManifold, ManifoldError, to_normal_coordinates
from .nondegen import Condition, YES, NO, INCONCLUSIVE, _lift_order, _rank_sweep
from .frontend import MapSpec, map_variable_table, expand_ast


class CRMapError(Exception):
    pass


@dataclass(frozen=True)
class MapVerdict:
    ok: bool
    witness: tuple = None       # (j', multiindex, coefficient)

    def to_dict(self):
        if self.ok:
            return {"ok": True}
        j, alpha, coeff = self.witness
        return {"ok": False, "j": j, "multiindex": list(alpha),
                "coefficient": str(coeff)}


class CRMapping:
    """h holds n' series in the n source variables t = (z, w), h(0) = 0."""

    def __init__(self, source, target, h):
        self.source = source
        self.target = target
        h = SeriesVector(s.truncate(min(source.order, target.order)) for s in h)
        if h.nvars != source.n:
            raise CRMapError("map components must live in the %d source "
                             "variables" % source.n)
        if len(h) != target.n:
            raise CRMapError("map needs %d components" % target.n)
        for s in h:
            if not s.constant_term().is_zero():
                raise CRMapError("map components must vanish at 0")
        self.h = h
        self.f = SeriesVector(h[:target.m])
        self.g = SeriesVector(h[target.m:])
        self.order = h.order

    def split(self):
        return self.f, self.g


def mapping_from_spec(spec: MapSpec, source, target):
    tbl = map_variable_table(source.m, source.d)
    order = min(source.order, target.order)
    comps = [expand_ast(ast, tbl, source.n, order) for ast in spec.components]
    return CRMapping(source, target, comps)


# ---------------------------------------------------------------------------
# the fundamental identity
# ---------------------------------------------------------------------------

def _on_complexification(mapping):
    """(fbar, gbar, h) with the barred components composed along the source
    complexification, everything as series in (zeta, t)."""
    M = mapping.source
    nv = 2 * M.m + M.d
    N = mapping.order
    zeta = [TruncatedSeries.variable(i, nv, N) for i in range(M.m)]
    t = [TruncatedSeries.variable(M.m + i, nv, N) for i in range(M.n)]
    theta = [s.truncate(N) for s in M.theta]
    tau = zeta + theta
    fbar = [s.conjugate_coeffs().compose(tau) for s in mapping.f]
    gbar = [s.conjugate_coeffs().compose(tau) for s in mapping.g]
    h_here = [s.embed(nv, list(range(M.m, nv))).truncate(N) for s in mapping.h]
    return fbar, gbar, h_here


def verify_cr_map(mapping):
    """Residual of the fundamental identity; pass iff identically zero."""
    Mp = mapping.target
    fbar, gbar, h_here = _on_complexification(mapping)
    for j in range(Mp.d):
        rhs = Mp.theta[j].truncate(mapping.order).compose(fbar + h_here)
        residual = gbar[j] - rhs
        if not residual.is_zero():
            alpha, coeff = residual.first_nonzero()
            return MapVerdict(False, (j + 1, alpha, coeff))
    return MapVerdict(True)


# ---------------------------------------------------------------------------
# CR-horizontal part and its five conditions
# ---------------------------------------------------------------------------

def cr_horizontal_part(mapping):
    """The m' series z -> f(z, Thetabar(z, 0))."""
    M = mapping.source
    N = mapping.order
    z = [TruncatedSeries.variable(i, M.m, N) for i in range(M.m)]
    zeros = [TruncatedSeries(M.m, N) for _ in range(M.m + M.d)]
    graph = [tb.truncate(N).compose(z + zeros) for tb in M.theta_bar]
    return SeriesVector(s.compose(z + graph) for s in mapping.f)


@dataclass
class AnnihilatorResult:
    found: bool
    witness: dict = None        # monomial tuple -> GaussRat
    degree_bound: int = 0
    exact: bool = False         # witness complete as a polynomial identity

    def witness_str(self, names):
        if not self.witness:
            return None
        parts = []
        for mu in sorted(self.witness, key=grlex_key):
            c = self.witness[mu]
            mono = "*".join(names[i] if e == 1 else "%s^%d" % (names[i], e)
                            for i, e in enumerate(mu) if e)
            parts.append("(%s)*%s" % (c, mono))
        return " + ".join(parts)


def annihilator_search(components, degree_bound, order):
    """Look for a nonzero polynomial G of total degree <= degree_bound with
    G(components) == 0 on the truncation, by exact linear algebra on the
    coefficients of the composed monomials."""
    comps = list(components)
    ncomp = len(comps)
    nv = comps[0].nvars
    mus = [mu for mu in multiindices(ncomp, degree_bound) if sum(mu) > 0]
    # column vectors: coefficients of components^mu
    power_cache = {}

    def comp_power(mu):
        if mu in power_cache:
            return power_cache[mu]
        if sum(mu) == 1:
            i = mu.index(1)
            out = comps[i]
        else:
            i = next(i for i, e in enumerate(mu) if e)
            prev = mu[:i] + (mu[i] - 1,) + mu[i + 1:]
            out = comp_power(prev) * comps[i]
        power_cache[mu] = out
        return out

    columns = [comp_power(mu) for mu in mus]
    row_keys = sorted({a for col in columns for a in col.coeffs}, key=grlex_key)
    row_index = {a: i for i, a in enumerate(row_keys)}
    matrix = [[ZERO] * len(mus) for _ in row_keys]
    for cidx, col in enumerate(columns):
        for a, c in col.coeffs.items():
            matrix[row_index[a]][cidx] = c
    kernel = _nullspace_vector(matrix, len(mus))
    if kernel is None:
        return AnnihilatorResult(False, degree_bound=degree_bound)
    witness = {mus[i]: kernel[i] for i in range(len(mus))
               if not kernel[i].is_zero()}
    max_deg = max((s.total_degree() for s in comps), default=0)
    exact = degree_bound * max_deg <= order
    return AnnihilatorResult(True, witness, degree_bound, exact)


def _nullspace_vector(matrix, ncols):
    """One nonzero kernel vector of the column space, or None."""
    pivots = {}                 # col -> reduced row
    pivot_of_col = {}
    rows = [dict((c, v) for c, v in enumerate(r) if not v.is_zero())
            for r in matrix]
    for row in rows:
        while row:
            lead = min(row)
            if lead not in pivots:
                inv = row[lead].inverse()
                pivots[lead] = {c: v * inv for c, v in row.items()}
                break
            factor = row[lead]
            for c, v in pivots[lead].items():
                s = row.get(c, ZERO) - factor * v
                if s.is_zero():
                    row.pop(c, None)
                else:
                    row[c] = s
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        return None
    fc = free[0]
    vec = [ZERO] * ncols
    vec[fc] = ONE
    # back substitution on the echelon rows, processed right to left
    for lead in sorted(pivots, reverse=True):
        row = pivots[lead]
        s = ZERO
        for c, v in row.items():
            if c != lead:
                s = s + v * vec[c]
        vec[lead] = -s
    return vec


@dataclass
class HorizontalReport:
    invertible: Condition
    submersive: Condition
    finite: Condition
    dominating: Condition
    transversal: Condition
    annihilator: str = None
    degree_bound: int = 0

    def to_dict(self):
        out = {
            "invertible": self.invertible.to_dict(),
            "submersive": self.submersive.to_dict(),
            "finite": self.finite.to_dict(),
            "dominating": self.dominating.to_dict(),
            "transversal": self.transversal.to_dict(),
            "degree_bound": self.degree_bound,
        }
        if self.annihilator:
            out["annihilator"] = self.annihilator
        return out


def horizontal_conditions(mapping, degree_bound=None, seed=0,
                          trials=DEFAULT_TRIALS):
    M, Mp = mapping.source, mapping.target
    N = mapping.order
    phi = cr_horizontal_part(mapping)
    m, mp = M.m, Mp.m
    if degree_bound is None:
        degree_bound = max(2, N // 2)

    jac0 = [[phi[r].coefficient(_unit(m, i)) for i in range(m)]
            for r in range(mp)]
    rank0 = exact_rank(jac0)
    invertible = Condition(YES if (m == mp and rank0 == m) else NO)
    submersive = Condition(YES if (m >= mp and rank0 == mp) else NO)

    live = [_lift_order(s, N) for s in phi if not s.is_zero()]
    if not live:
        finite = Condition(NO, note="the horizontal part vanishes")
    else:
        res = ideal_codimension(live, N, nvars=m)
        if res.stable:
            finite = Condition(YES, note="ideal codimension %d" % res.value)
        else:
            finite = Condition(NO, note="horizontal ideal codimension still "
                                        "growing at levels %d/%d" % (N - 1, N))

    if m >= mp:
        rows = [[phi[r].partial_derivative(i) for i in range(m)]
                for r in range(mp)]
        v = generic_rank(SeriesMatrix(rows), seed=("horiz", seed), trials=trials)
        dominating = Condition(YES if v.value == mp else
                               (NO if v.certified else INCONCLUSIVE),
                               confidence=v.confidence)
    else:
        dominating = Condition(NO, note="m < m'")

    ann = annihilator_search(phi, degree_bound, N)
    names = ["z_%d" % (k + 1) for k in range(mp)] if mp > 1 else ["z"]
    if ann.found:
        transversal = Condition(
            NO, note="annihilator of degree <= %d found%s"
                     % (degree_bound, "" if ann.exact else
                        " (vanishing verified at order %d)" % N))
        witness = ann.witness_str(names)
    else:
        transversal = Condition(
            YES, note="no annihilator of degree <= %d; transversal up to "
                      "degree %d at order %d" % (degree_bound, degree_bound, N))
        witness = None
    return HorizontalReport(invertible, submersive, finite, dominating,
                            transversal, witness, degree_bound)


def _unit(nvars, i):
    return tuple(1 if j == i else 0 for j in range(nvars))


# ---------------------------------------------------------------------------
# reflection identities and their jet family
# ---------------------------------------------------------------------------

@dataclass
class ReflectionJetFamily:
    """R'_{j',beta}(zeta, t : t') and its center values Psi'_{j',beta}(t').

    `r_family` are series in the (zeta, t, t') variables (2m + d + n' of
    them), `psi` their restrictions to (zeta, t) = 0 as series in t'.  The
    driving derivatives d_zeta^beta (gbar on M) and d_zeta^beta (fbar^gamma'
    on M) are kept so that the defining assembly (4.2-style) can be checked
    structurally."""
    k_max: int
    r_family: dict              # (j', beta) -> series in (zeta, t, t')
    psi: dict                   # (j', beta) -> series in t'
    lbar_g: dict                # (j', beta) -> series in (zeta, t)
    lbar_fpow: dict             # (gamma', beta) -> series in (zeta, t)

    def psi_sorted(self):
        return sorted(self.psi, key=lambda kb: (kb[0], grlex_key(kb[1])))


def build_reflection_jets(mapping, k_max=None):
    """Apply the tangent derivations (plain d/dzeta in the (zeta, t) chart
    of the complexification) to the fundamental identity with h(t) replaced
    by the free variable t', and record the whole family."""
    M, Mp = mapping.source, mapping.target
    N = mapping.order
    if k_max is None:
        k_max = N - 1
    if k_max > N - 1:
        raise CRMapError("k_max exhausts the truncation order")
    m, d, np_ = M.m, M.d, Mp.n
    nv = 2 * m + d + np_
    src_pos = list(range(2 * m + d))
    fbar, gbar, _ = _on_complexification(mapping)
    fbar_b = [s.embed(nv, src_pos) for s in fbar]
    gbar_b = [s.embed(nv, src_pos) for s in gbar]
    tprime = [TruncatedSeries.variable(2 * m + d + i, nv, N) for i in range(np_)]
    E = []
    for j in range(Mp.d):
        comp = Mp.theta[j].truncate(N).compose(fbar_b + tprime)
        E.append(gbar_b[j] - comp)

    r_family, psi = {}, {}
    lbar_g, lbar_fpow = {}, {}
    cur = {(j, (0,) * m): E[j] for j in range(Mp.d)}
    cur_g = {(j, (0,) * m): gbar[j] for j in range(Mp.d)}
    fpow0 = {}
    for gamma in multiindices(Mp.m, k_max):
        p = TruncatedSeries.constant(1, 2 * m + d, N)
        for i, e in enumerate(gamma):
            for _ in range(e):
                p = p * fbar[i]
        fpow0[gamma] = p
    cur_f = {(gamma, (0,) * m): fpow0[gamma] for gamma in fpow0}

    def record(level_map, store):
        for key, s in level_map.items():
            store[key] = s

    record(cur, r_family)
    record(cur_g, lbar_g)
    for (gamma, beta), s in cur_f.items():
        lbar_fpow[(gamma, beta)] = s
    for level in range(1, k_max + 1):
        nxt, nxt_g, nxt_f = {}, {}, {}
        for beta in multiindices(m, level):
            if sum(beta) != level:
                continue
            kv = next(i for i, e in enumerate(beta) if e)
            prev = beta[:kv] + (beta[kv] - 1,) + beta[kv + 1:]
            for j in range(Mp.d):
                nxt[(j, beta)] = r_family[(j, prev)].partial_derivative(kv)
                nxt_g[(j, beta)] = lbar_g[(j, prev)].partial_derivative(kv)
            for gamma in fpow0:
                nxt_f[(gamma, beta)] = \
                    lbar_fpow[(gamma, prev)].partial_derivative(kv)
        record(nxt, r_family)
        record(nxt_g, lbar_g)
        for key, s in nxt_f.items():
            lbar_fpow[key] = s

    for (j, beta), s in r_family.items():
        psi[(j, beta)] = _restrict_to_tprime(s, 2 * m + d, np_)
    return ReflectionJetFamily(k_max, r_family, psi, lbar_g, lbar_fpow)


def _restrict_to_tprime(s, n_src, np_):
    out = {}
    for alpha, c in s.coeffs.items():
        if any(alpha[i] for i in range(n_src)):
            continue
        out[alpha[n_src:]] = c
    return TruncatedSeries(np_, s.order, out)


def identity_psi_formula_failures(M, k_max=3):
    """(4.2-style sanity) For the identity map, Psi_{j,beta}(T) must equal
    beta! [Theta_{j,beta}(0) - Theta_{j,beta}(T)] coefficient-exactly.
    Returns the offending (j, beta) keys."""
    from math import prod, factorial
    ident = CRMapping(M, M, [TruncatedSeries.variable(i, M.n, M.order)
                             for i in range(M.n)])
    jets = build_reflection_jets(ident, k_max=k_max)
    fam = M.theta_coefficients(max_beta=k_max)
    bad = []
    for (j, beta), psi in jets.psi.items():
        fact = prod(factorial(b) for b in beta)
        theta_jb = fam[(j, beta)]
        expect = (TruncatedSeries.constant(theta_jb.constant_term(), M.n,
                                           theta_jb.order)
                  - theta_jb).scale(GaussRat(fact))
        if psi.truncate(expect.order) != expect.truncate(psi.order):
            bad.append((j, beta))
    return bad


def residual_check(mapping, jets):
    """Substituting t' = h(t) must kill every member of the family."""
    M = mapping.source
    nv = 2 * M.m + M.d
    zeta_t = [TruncatedSeries.variable(i, nv, mapping.order) for i in range(nv)]
    h_here = [s.embed(nv, list(range(M.m, nv))).truncate(mapping.order)
              for s in mapping.h]
    bad = []
    for (j, beta), s in jets.r_family.items():
        value = s.compose(zeta_t + h_here)
        if not value.is_zero():
            bad.append((j, beta))
    return bad


# ---------------------------------------------------------------------------
# the five Segre-type map conditions
# ---------------------------------------------------------------------------

@dataclass
class SegreMapReport:
    levi: Condition
    finitely_nondegenerate: Condition
    segre_finite: Condition
    segre_nondegenerate: Condition
    holomorphically_nondegenerate: Condition
    dimensional_warning: str = None

    def to_dict(self):
        out = {
            "levi": self.levi.to_dict(),
            "finitely_nondegenerate": self.finitely_nondegenerate.to_dict(),
            "segre_finite": self.segre_finite.to_dict(),
            "segre_nondegenerate": self.segre_nondegenerate.to_dict(),
            "holomorphically_nondegenerate":
                self.holomorphically_nondegenerate.to_dict(),
        }
        if self.dimensional_warning:
            out["dimensional_warning"] = self.dimensional_warning
        return out


def map_five_conditions(mapping, jets=None, seed=0, trials=DEFAULT_TRIALS):
    """Rank / finiteness / generic-rank conditions on the reflection family,
    in normal coordinates on both sides (the caller normalizes)."""
    M, Mp = mapping.source, mapping.target
    if not (M.is_normal() and Mp.is_normal()):
        raise CRMapError("map_five_conditions expects normalized manifolds; "
                         "use classify_map")
    N = mapping.order
    if jets is None:
        jets = build_reflection_jets(mapping)
    k_max = jets.k_max
    np_ = Mp.n
    keys = jets.psi_sorted()

    warning = None
    if Mp.d * (M.m + 1) > np_:
        warning = ("rank n' at 0 needs d'(m+1) <= n' "
                   "(%d > %d)" % (Mp.d * (M.m + 1), np_))

    # (1)/(2): rank at t' = 0 of the Psi family
    rows = []
    rank_by_level = {}
    for k in range(0, k_max + 1):
        for (j, beta) in keys:
            if sum(beta) != k:
                continue
            s = jets.psi[(j, beta)]
            rows.append([s.partial_derivative(i).constant_term()
                         for i in range(np_)])
        rank_by_level[k] = exact_rank(rows)
    finite = Condition(NO, note="rank at 0 below n' for every k <= %d" % k_max)
    for k in range(1, k_max + 1):
        if rank_by_level[k] == np_:
            finite = Condition(YES, l0=k)
            break
    levi = Condition(YES, l0=1) if finite.verdict == YES and finite.l0 == 1 \
        else Condition(NO)

    # (3): local finiteness of the Psi family
    gens_all = [_lift_order(jets.psi[key], N) for key in keys
                if not jets.psi[key].is_zero()]
    for g in gens_all:
        if not g.constant_term().is_zero():
            raise CRMapError("Psi family does not vanish at 0")
    full = ideal_codimension(gens_all, N, nvars=np_) if gens_all else None
    if full is not None and full.stable:
        l1 = None
        acc = []
        for k in range(0, k_max + 1):
            acc.extend(_lift_order(jets.psi[key], N) for key in keys
                       if sum(key[1]) == k and not jets.psi[key].is_zero())
            if not acc:
                continue
            res = ideal_codimension(acc, N, nvars=np_)
            if res.stable:
                l1 = k
                break
        segre_finite = Condition(YES, l0=l1,
                                 note="ideal codimension %d" % full.value)
    else:
        segre_finite = Condition(NO, note="Psi ideal codimension still "
                                          "growing at levels %d/%d"
                                          % (N - 1, N))

    # (4)/(5): generic ranks of the t'-gradient of the R' family, composed
    # along the source Segre variety (4) or along the source itself (5)
    segre = _gradient_sweep(mapping, jets, along_segre=True, seed=("mseg", seed),
                            trials=trials)
    holo = _gradient_sweep(mapping, jets, along_segre=False,
                           seed=("mholo", seed), trials=trials)

    return SegreMapReport(levi, finite, segre_finite, segre, holo, warning)


def _gradient_sweep(mapping, jets, along_segre, seed, trials):
    M, Mp = mapping.source, mapping.target
    N = mapping.order
    m, d, np_ = M.m, M.d, Mp.n
    n_src = 2 * m + d
    if along_segre:
        # (zeta, t, t') -> (0, (z, 0), h(z, 0)): series in z
        inner_n = m
        z = [TruncatedSeries.variable(i, inner_n, N) for i in range(m)]
        zeros_m = [TruncatedSeries(inner_n, N) for _ in range(m)]
        zeros_d = [TruncatedSeries(inner_n, N) for _ in range(d)]
        h_at = [s.compose(z + zeros_d) for s in mapping.h]
        args = zeros_m + z + zeros_d + h_at
        target = np_
    else:
        # (zeta, t, t') -> (0, 0, h(t)): series in t
        inner_n = M.n
        t = [TruncatedSeries.variable(i, inner_n, N) for i in range(M.n)]
        zeros = [TruncatedSeries(inner_n, N) for _ in range(n_src)]
        h_at = [s.truncate(N) for s in mapping.h]
        args = zeros + h_at
        target = np_
    rows_by_level = {}
    for (j, beta), r in jets.r_family.items():
        if r.order < 1:
            continue
        row = []
        for i in range(np_):
            w = r.partial_derivative(n_src + i)
            row.append(w.compose(args))
        if any(not s.is_zero() for s in row):
            rows_by_level.setdefault(max(sum(beta), 1), []).append(row)
    what = "Segre-restricted reflection rank" if along_segre \
        else "reflection generic rank"
    return _rank_sweep(rows_by_level, target, jets.k_max, seed, trials, what)


# ---------------------------------------------------------------------------
# normalization of a mapping and the full classification
# ---------------------------------------------------------------------------

def normalize_mapping(mapping):
    """Conjugate the mapping by the normalizations of both sides:
    h_new = hT o h o hS^{-1}, between the normalized manifolds."""
    M, Mp = mapping.source, mapping.target
    Mn_src, h_src = to_normal_coordinates(M)
    Mn_dst, h_dst = to_normal_coordinates(Mp)
    inv_src = _invert_triangular(h_src, M.m, M.d)
    h1 = [s.compose(list(inv_src)) for s in mapping.h]   # h o hS^-1
    h2 = [s.compose(h1) for s in h_dst]                  # hT o (h o hS^-1)
    return CRMapping(Mn_src, Mn_dst, h2)


def _invert_triangular(h_map, m, d):
    """Inverse of a change (z, w) -> (z, g(z, w)) as n series in (z, w)."""
    n = m + d
    N = h_map.order
    g = list(h_map[m:])
    nv = n + d   # (z, w', y)
    z = [TruncatedSeries.variable(i, nv, N) for i in range(m)]
    wp = [TruncatedSeries.variable(m + j, nv, N) for j in range(d)]
    y = [TruncatedSeries.variable(n + j, nv, N) for j in range(d)]
    H = [g[j].compose(z + y) - wp[j] for j in range(d)]
    G = solve_implicit(H, n, d)
    z_part = [TruncatedSeries.variable(i, n, N) for i in range(m)]
    return SeriesVector(z_part + list(G))


@dataclass
class MapClassification:
    horizontal: HorizontalReport
    segre: SegreMapReport
    verified: MapVerdict
    order: int

    def to_dict(self):
        return {
            "order": self.order,
            "fundamental_identity": self.verified.to_dict(),
            "cr_horizontal": self.horizontal.to_dict(),
            "segre_conditions": self.segre.to_dict(),
        }


def classify_map(mapping, degree_bound=None, seed=0, trials=DEFAULT_TRIALS):
    verdict = verify_cr_map(mapping)
    if not verdict.ok:
        raise CRMapError("the mapping does not send M into M': first "
                         "residual coefficient %s at %s"
                         % (verdict.witness[2], verdict.witness[1]))
    horizontal = horizontal_conditions(mapping, degree_bound=degree_bound,
                                       seed=seed, trials=trials)
    norm = normalize_mapping(mapping)
    check = verify_cr_map(norm)
    if not check.ok:
        raise CRMapError("normalization broke the fundamental identity")
    segre = map_five_conditions(norm, seed=seed, trials=trials)
    return MapClassification(horizontal, segre, verdict, mapping.order)


# ---------------------------------------------------------------------------
# necessary conditions and CR-transversal transfer
# ---------------------------------------------------------------------------

@dataclass
class ConsistencyReport:
    failures: list
    checked: list
    skipped: list
    cr_transversal: bool
    plain_transversal: bool

    def ok(self):
        return not self.failures

    def to_dict(self):
        return {"failures": list(self.failures), "checked": list(self.checked),
                "skipped": list(self.skipped),
                "cr_transversal": self.cr_transversal,
                "plain_transversal": self.plain_transversal}


def necessary_and_transfer_checks(mapping, map_report=None, target_report=None,
                                  degree_bound=None, seed=0,
                                  trials=DEFAULT_TRIALS):
    """Every implication of the necessary-condition lemma (map condition
    forces the target condition with l0' <= l1) and, when the map is
    CR-transversal, of the transfer theorem (target condition forces the map
    condition with l1 >= l0').  Violations are bug detectors."""
    from .nondegen import classify_at_origin

    if map_report is None:
        map_report = classify_map(mapping, degree_bound=degree_bound,
                                  seed=seed, trials=trials)
    if target_report is None:
        target_report = classify_at_origin(mapping.target, seed=seed,
                                           trials=trials,
                                           with_holo_dimension=False)
    failures, checked, skipped = [], [], []
    seg = map_report.segre
    pairs = [
        ("levi", seg.levi, target_report.levi),
        ("finite", seg.finitely_nondegenerate, target_report.finite),
        ("segre-finite/ess-finite", seg.segre_finite,
         target_report.essentially_finite),
        ("segre", seg.segre_nondegenerate, target_report.segre_nondegenerate),
        ("holo", seg.holomorphically_nondegenerate,
         target_report.holomorphically_nondegenerate),
    ]

    for name, map_cond, tgt_cond in pairs:
        if map_cond.verdict == INCONCLUSIVE or tgt_cond.verdict == INCONCLUSIVE:
            skipped.append("necessary:" + name)
            continue
        checked.append("necessary:" + name)
        if map_cond.verdict == YES:
            if tgt_cond.verdict != YES:
                failures.append("map %s holds but target %s fails" % (name, name))
            elif (map_cond.l0 is not None and tgt_cond.l0 is not None
                  and tgt_cond.l0 > map_cond.l0):
                failures.append("target %s type %d exceeds map type %d"
                                % (name, tgt_cond.l0, map_cond.l0))

    cr_trans = map_report.horizontal.transversal.verdict == YES
    plain_trans = False
    if cr_trans:
        db = map_report.horizontal.degree_bound
        ann = annihilator_search(list(mapping.h), db, mapping.order)
        plain_trans = not ann.found
        transfer = [
            ("levi=>finite", target_report.levi, seg.finitely_nondegenerate, 1),
            ("finite", target_report.finite, seg.finitely_nondegenerate, None),
            ("ess-finite=>segre-finite", target_report.essentially_finite,
             seg.segre_finite, None),
            ("segre", target_report.segre_nondegenerate,
             seg.segre_nondegenerate, None),
        ]
        if plain_trans:
            transfer.append(("holo", target_report.holomorphically_nondegenerate,
                             seg.holomorphically_nondegenerate, None))
        for name, tgt_cond, map_cond, min_l1 in transfer:
            if tgt_cond.verdict == INCONCLUSIVE or map_cond.verdict == INCONCLUSIVE:
                skipped.append("transfer:" + name)
                continue
            if tgt_cond.verdict != YES:
                continue
            checked.append("transfer:" + name)
            if map_cond.verdict != YES:
                failures.append("target %s holds, map is CR-transversal, but "
                                "the map condition fails" % name)
                continue
            lower = tgt_cond.l0 if min_l1 is None else min_l1
            if (lower is not None and map_cond.l0 is not None
                    and map_cond.l0 < lower):
                failures.append("map %s type %d below target type %d"
                                % (name, map_cond.l0, lower))
    return ConsistencyReport(failures, checked, skipped, cr_trans, plain_trans)
