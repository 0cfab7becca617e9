"""The five pointwise nondegeneracy conditions and their numeric types.

Everything is driven by the coefficient family Theta_{j,beta}(t) of the
defining equations expanded in powers of zbar, i.e. by the Segre mappings
Q_k : t -> (Theta_{j,beta}(t))_{|beta| <= k}, and by the jet maps of the
conjugate Segre varieties

    J^k : (zeta, t) -> (zeta, d_zeta^beta Theta_j(zeta, t) / beta!).

At the origin the tests run in internally normalized coordinates, where the
beta = 0 block degenerates to w and every criterion reduces to ranks of the
z-gradient of the beta >= 1 components (finite nondegeneracy: rank at 0;
Segre: generic rank along {w = 0}; holomorphic: generic rank everywhere;
essential finiteness: ideal codimension of the restrictions to {w = 0}).
At other points the same conditions are decided from the translated family
Theta_{1,j,beta}(t_1) = d_zeta^beta Theta_j(zbar_p, t_1 + t_p) / beta! and
from jet-map ranks, without re-centering the series.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .gaussrat import GaussRat, ZERO, ONE
from .series import TruncatedSeries, SeriesVector, multiindices, grlex_key
from .linalg import (
    SeriesMatrix, RankVerdict, exact_rank, generic_rank, ideal_codimension,
    jacobian, random_point, _trial_rng, _pivot_positions, series_minor,
    DEFAULT_TRIALS, EXACT_SYMBOLIC,
)
from .manifold import GenericManifold, SurfacePoint, to_normal_coordinates, \
    ManifoldError

YES = "yes"
NO = "no"
INCONCLUSIVE = "inconclusive"


@dataclass
class Condition:
    verdict: str
    l0: int = None              # the integer type when the verdict is yes
    note: str = ""
    confidence: str = ""

    def to_dict(self):
        out = {"verdict": self.verdict}
        if self.l0 is not None:
            out["l0"] = self.l0
        if self.note:
            out["note"] = self.note
        if self.confidence:
            out["confidence"] = self.confidence
        return out


@dataclass
class ClassificationReport:
    order: int
    at_point: dict = None
    levi: Condition = None
    finite: Condition = None
    essentially_finite: Condition = None
    segre_nondegenerate: Condition = None
    holomorphically_nondegenerate: Condition = None
    essential_type: int = None          # epsilon_1 when finite
    ell_1_lower: int = None
    levi_multitype: list = None         # (d, lambda_{1,0}, ...)
    n_M: int = None
    ell_M: int = None
    levi_multitype_generic: list = None
    normalization_map: list = None
    hierarchy_ok: bool = None

    def conditions(self):
        return [self.levi, self.finite, self.essentially_finite,
                self.segre_nondegenerate, self.holomorphically_nondegenerate]

    def to_dict(self):
        out = {
            "order": self.order,
            "levi": self.levi.to_dict(),
            "finitely_nondegenerate": self.finite.to_dict(),
            "essentially_finite": self.essentially_finite.to_dict(),
            "segre_nondegenerate": self.segre_nondegenerate.to_dict(),
            "holomorphically_nondegenerate":
                self.holomorphically_nondegenerate.to_dict(),
            "hierarchy_ok": self.hierarchy_ok,
        }
        if self.at_point is not None:
            out["at_point"] = self.at_point
        if self.essential_type is not None:
            out["essential_type"] = self.essential_type
        if self.ell_1_lower is not None:
            out["ell_1_lower_bound"] = self.ell_1_lower
        if self.levi_multitype is not None:
            out["levi_multitype"] = self.levi_multitype
        if self.n_M is not None:
            out["n_M"] = self.n_M
            out["ell_M"] = self.ell_M
            out["levi_multitype_generic"] = self.levi_multitype_generic
        if self.normalization_map is not None:
            out["normalization_map"] = self.normalization_map
        return out


# ---------------------------------------------------------------------------
# Segre mapping machinery
# ---------------------------------------------------------------------------

@dataclass
class SegreMapping:
    """The k-th Segre mapping: the d * #{|beta| <= k} series Theta_{j,beta}(t),
    ordered by (j, graded-lex beta)."""
    k: int
    m: int
    d: int
    n: int
    components: list            # [(j, beta, series in t)]

    def series(self):
        return [s for (_, _, s) in self.components]

    def rank_at_origin(self):
        rows = [[s.partial_derivative(i).constant_term() for i in range(self.n)]
                for s in self.series()]
        return exact_rank(rows)


def segre_mapping(M, k):
    if k > M.order:
        raise ManifoldError("jet order %d exceeds the truncation order" % k)
    fam = M.theta_coefficients(max_beta=k)
    comps = [(j, beta, fam[(j, beta)])
             for (j, beta) in sorted(fam, key=lambda jb: (jb[0], grlex_key(jb[1])))]
    return SegreMapping(k, M.m, M.d, M.n, comps)


@dataclass
class JetMap:
    """k-th order jets of the conjugate Segre varieties: the m + N components
    (zeta, d_zeta^beta Theta_j(zeta, t)/beta!) as series in (zeta, t)."""
    k: int
    m: int
    d: int
    components: dict            # (j, beta) -> series in (zeta, t)

    def rank_at(self, zeta_p, t_p):
        """Exact rank at the point (zeta_p, t_p); includes the m zeta-rows."""
        point = list(zeta_p) + list(t_p)
        nv = len(point)
        rows = []
        for (j, beta), s in sorted(self.components.items(),
                                   key=lambda kv: (kv[0][0], grlex_key(kv[0][1]))):
            rows.append([s.partial_derivative(i).evaluate(point)
                         for i in range(nv)])
        zeta_rows = [[ONE if i == r else ZERO for i in range(nv)]
                     for r in range(self.m)]
        return exact_rank(zeta_rows + rows)


def jet_map(M, k):
    if k > M.order - 1:
        raise ManifoldError("jet order %d exhausts the truncation order" % k)
    comps = {}
    for j in range(M.d):
        comps[(j, (0,) * M.m)] = M.theta[j]
    for level in range(1, k + 1):
        for beta in multiindices(M.m, level):
            if sum(beta) != level:
                continue
            kv = next(i for i, e in enumerate(beta) if e)
            prev = beta[:kv] + (beta[kv] - 1,) + beta[kv + 1:]
            for j in range(M.d):
                s = comps[(j, prev)].partial_derivative(kv)
                comps[(j, beta)] = s.scale(GaussRat(1) / beta[kv])
    return JetMap(k, M.m, M.d, comps)


def jet_generic_rank(M, k, seed=0, trials=DEFAULT_TRIALS):
    """Generic rank of the k-th jet map (including the zeta block): it is
    m plus the generic rank of the t-gradient block of the jet components."""
    jm = jet_map(M, k)
    nv = 2 * M.m + M.d
    rows = [s for (_, s) in sorted(jm.components.items(),
                                   key=lambda kv: (kv[0][0], grlex_key(kv[0][1])))]
    mat = SeriesMatrix([[s.partial_derivative(i) for i in range(M.m, nv)]
                        for s in rows])
    v = generic_rank(mat, seed=("jet", seed, k), trials=trials)
    return RankVerdict(v.value + M.m, v.confidence, v.samples)


# ---------------------------------------------------------------------------
# families of coefficient series
# ---------------------------------------------------------------------------

def _restrict_w0(s, m, d):
    """Substitute w = 0 into a series in (z, w), landing in the z variables."""
    out = {}
    for alpha, c in s.coeffs.items():
        if any(alpha[m + j] for j in range(d)):
            continue
        out[alpha[:m]] = c
    return TruncatedSeries(m, s.order, out)


def _lift_order(s, order):
    """Reinterpret a coefficient-extracted polynomial at the full order of
    the truncated model (exact on the model; tags stay on the report)."""
    if s.order >= order:
        return s
    return TruncatedSeries(s.nvars, order, s.coeffs)


def _family_sorted(fam):
    return sorted(fam, key=lambda jb: (jb[0], grlex_key(jb[1])))


# ---------------------------------------------------------------------------
# classification at the origin
# ---------------------------------------------------------------------------

def classify_at_origin(M, seed=0, trials=DEFAULT_TRIALS,
                       with_holo_dimension=True):
    """Full five-condition report at the center point, computed in
    internally normalized coordinates."""
    Mn, h = to_normal_coordinates(M)
    N = M.order
    k_max = N - 1
    fam = Mn.theta_coefficients(max_beta=k_max)
    m, d, n = M.m, M.d, M.n

    # z-gradients at 0 of the beta >= 1 components, level by level
    z_rank_at0 = []
    grad_rows = []
    for k in range(1, k_max + 1):
        for (j, beta) in _family_sorted(fam):
            if sum(beta) != k:
                continue
            s = fam[(j, beta)]
            grad_rows.append([s.partial_derivative(i).constant_term()
                              for i in range(m)])
        z_rank_at0.append(exact_rank(grad_rows))

    finite = Condition(NO, note="rank at 0 below n for every k <= %d" % k_max)
    for k, r in enumerate(z_rank_at0, start=1):
        if r == m:
            finite = Condition(YES, l0=k)
            break
    levi = Condition(YES, l0=1) if finite.verdict == YES and finite.l0 == 1 \
        else Condition(NO)

    multitype = [d]
    prev = 0
    for k, r in enumerate(z_rank_at0, start=1):
        multitype.append(r - prev)
        prev = r
        if r == m:
            break

    ess, epsilon_1, ell_1_lower = _essential_finiteness(fam, Mn, k_max)
    segre = _segre_nondegeneracy(fam, Mn, k_max, seed, trials)
    holo = _holomorphic_nondegeneracy(fam, Mn, k_max, seed, trials)

    report = ClassificationReport(
        order=N, levi=levi, finite=finite, essentially_finite=ess,
        segre_nondegenerate=segre, holomorphically_nondegenerate=holo,
        essential_type=epsilon_1, ell_1_lower=ell_1_lower,
        levi_multitype=multitype,
        normalization_map=[s.to_str(_t_names(m, d)) for s in h])
    if with_holo_dimension:
        n_M, ell_M, lam = essential_holo_dimension(Mn, seed=seed, trials=trials)
        report.n_M, report.ell_M, report.levi_multitype_generic = n_M, ell_M, lam
    report.hierarchy_ok = check_hierarchy(report)
    return report


def _t_names(m, d):
    return ["z_%d" % (k + 1) for k in range(m)] + \
           ["w_%d" % (j + 1) for j in range(d)]


def _essential_finiteness(fam, Mn, k_max):
    """Codimension of <Theta_{j,beta}(z,0)> in the z variables, with the
    two-level stabilization protocol deciding finite vs growing."""
    m, d, N = Mn.m, Mn.d, Mn.order
    gens_by_level = {}
    for (j, beta) in _family_sorted(fam):
        lv = sum(beta)
        if lv == 0:
            continue
        g = _restrict_w0(fam[(j, beta)], m, d)
        if not g.is_zero():
            gens_by_level.setdefault(lv, []).append(_lift_order(g, N))

    all_gens = [g for lv in sorted(gens_by_level) for g in gens_by_level[lv]]
    full = ideal_codimension(all_gens, N, nvars=m)
    if not full.stable:
        return (Condition(NO, note="ideal codimension still growing at "
                                   "levels %d/%d" % (N - 1, N)),
                None, None)
    epsilon_1 = full.value

    l0 = None
    ell_1_lower = None
    gens = []
    for k in range(1, k_max + 1):
        gens.extend(gens_by_level.get(k, []))
        res = ideal_codimension(gens, N, nvars=m)
        if l0 is None and res.stable:
            l0 = k
        if res.stable and res.value == epsilon_1:
            ell_1_lower = k
            break
    return Condition(YES, l0=l0), epsilon_1, ell_1_lower


def _segre_nondegeneracy(fam, Mn, k_max, seed, trials):
    """Generic rank of the restriction of Q_k to the Segre variety {w = 0}
    (normal coordinates), swept over k until it reaches m or stabilizes."""
    m, d = Mn.m, Mn.d
    return _rank_sweep(
        rows_by_level=_z_gradient_rows(fam, Mn, restrict=True),
        target=m, k_max=k_max, seed=("segre", seed), trials=trials,
        what="restricted generic rank")


def _holomorphic_nondegeneracy(fam, Mn, k_max, seed, trials):
    """Generic rank in (z, w) of the z-gradient block of the beta >= 1
    components (normal-coordinate criterion for genrk Q_k = n)."""
    return _rank_sweep(
        rows_by_level=_z_gradient_rows(fam, Mn, restrict=False),
        target=Mn.m, k_max=k_max, seed=("holo", seed), trials=trials,
        what="generic rank")


def _z_gradient_rows(fam, Mn, restrict):
    m, d = Mn.m, Mn.d
    rows_by_level = {}
    for (j, beta) in _family_sorted(fam):
        lv = sum(beta)
        if lv == 0:
            continue
        s = fam[(j, beta)]
        row = [s.partial_derivative(i) for i in range(m)]
        if restrict:
            row = [_restrict_w0(g, m, d) for g in row]
        if any(not g.is_zero() for g in row):
            rows_by_level.setdefault(lv, []).append(row)
    return rows_by_level


def _rank_sweep(rows_by_level, target, k_max, seed, trials, what):
    """Decide whether the generic rank of the cumulative family reaches
    `target`, and at which level.  The decision is made on the full family
    (ranks can jump after gaps, so no early stabilization is claimed); the
    level search only runs once the target is known to be reached."""
    all_rows = [row for k in range(1, k_max + 1)
                for row in rows_by_level.get(k, [])]
    if not all_rows:
        return Condition(NO, confidence=EXACT_SYMBOLIC,
                         note="%s: the family is identically zero" % what)
    v_full = generic_rank(SeriesMatrix(all_rows), seed=(seed, "full"),
                          trials=trials)
    if v_full.value >= target:
        rows = []
        for k in range(1, k_max + 1):
            rows.extend(rows_by_level.get(k, []))
            if not rows:
                continue
            v = generic_rank(SeriesMatrix(rows), seed=(seed, k), trials=trials)
            if v.value >= target:
                return Condition(YES, l0=k, confidence=v.confidence)
        return Condition(YES, l0=k_max, confidence=v_full.confidence)
    if v_full.certified:
        return Condition(NO, confidence=v_full.confidence,
                         note="%s is %d < %d up to k = %d"
                              % (what, v_full.value, target, k_max))
    return Condition(INCONCLUSIVE,
                     note="%s only bounded below by %d at k = %d"
                          % (what, v_full.value, k_max))


# ---------------------------------------------------------------------------
# essential holomorphic dimension, Levi multitype, holomorphic fields
# ---------------------------------------------------------------------------

def essential_holo_dimension(M, seed=0, trials=DEFAULT_TRIALS):
    """(n_M, ell_M, generic Levi multitype) from the stabilized generic
    ranks of the jet maps."""
    N = M.order
    k_max = N - 1
    ranks = []
    for k in range(0, k_max + 1):
        v = jet_generic_rank(M, k, seed=seed, trials=trials)
        ranks.append(v)
        if k >= 1 and ranks[-1].value == ranks[-2].value:
            ell_M = k - 1
            n_M = ranks[-2].value - M.m
            lam = [M.d] + [ranks[i].value - ranks[i - 1].value
                           for i in range(1, ell_M + 1)]
            if not (M.d <= n_M <= M.n and ell_M <= n_M - M.d):
                raise ManifoldError(
                    "jet-rank bookkeeping violated d <= n_M <= n")
            return n_M, ell_M, lam
    # never stabilized within the truncation: report the last lower bound
    return ranks[-1].value - M.m, None, None


def tangent_holomorphic_fields(M, seed=0, trials=DEFAULT_TRIALS):
    """A basis of n - n_M holomorphic vector fields tangent to M, as
    coefficient vectors (a_1(t), ..., a_n(t)); empty when n_M = n.

    The fields are Cramer solutions built from a symbolically nonzero
    n_M x n_M minor of the Jacobian of the infinite Segre mapping; their
    annihilation of every Theta_{j,beta} is verified on the truncation."""
    N = M.order
    fam = M.theta_coefficients(max_beta=N - 1)
    keys = _family_sorted(fam)
    rows = []
    for key in keys:
        s = fam[key]
        if s.order < 1:
            continue
        rows.append([s.partial_derivative(i) for i in range(M.n)])
    mat = SeriesMatrix(rows)
    v = generic_rank(mat, seed=("holofields", seed), trials=trials)
    n_M = v.value
    if n_M >= M.n:
        return []

    # pivot hunt: sample until the rank is achieved, then certify the minor
    pivot = None
    for t in range(64):
        rng = _trial_rng(seed, "holopivot", t)
        point = random_point(rng, mat.nvars)
        value = mat.evaluate(point)
        if exact_rank(value) != n_M:
            continue
        prows, pcols = _pivot_positions(value)
        minor = series_minor(mat, prows, pcols)
        if not minor.is_zero():
            pivot = (prows, pcols, minor)
            break
    if pivot is None:
        raise ManifoldError("no certifiable pivot minor for the field basis")
    prows, pcols, delta = pivot

    fields = []
    free = [q for q in range(M.n) if q not in pcols]
    for q in free:
        b = [mat.rows[r][q] for r in prows]
        coeffs = [TruncatedSeries(mat.nvars, delta.order) for _ in range(M.n)]
        coeffs[q] = delta
        for ci, c in enumerate(pcols):
            entries = [[mat.rows[r][pcols[cj]] if cj != ci else b[ri]
                        for cj in range(len(pcols))]
                       for ri, r in enumerate(prows)]
            from .linalg import _det
            coeffs[c] = -_det(entries)
        fields.append(SeriesVector(s.truncate(delta.order) for s in coeffs))

    # tangency: every field annihilates every Theta_{j,beta} on the truncation
    for a in fields:
        for key in keys:
            s = fam[key]
            if s.order < 1:
                continue
            acc = None
            for i in range(M.n):
                term = a[i] * s.partial_derivative(i)
                acc = term if acc is None else acc + term
            if not acc.is_zero():
                raise ManifoldError(
                    "field fails to annihilate Theta_{%d,%s}" % key)
    return fields


# ---------------------------------------------------------------------------
# classification at nearby points
# ---------------------------------------------------------------------------

def translated_family(M, p, max_beta=None):
    """The family Theta_{1,j,beta}(t_1) of the manifold re-centered at the
    surface point p, computed by exact polynomial re-expansion:
    Theta_{1,j,beta}(t_1) = d_zeta^beta Theta_j(zbar_p, t_1 + t_p) / beta!
    for beta != 0, and the beta = 0 component loses its constant."""
    if max_beta is None:
        max_beta = M.order - 1
    shift_consts = list(p.zbar) + list(p.z) + list(p.w)
    fam = {}
    for j in range(M.d):
        shifted = M.theta[j].shift(shift_consts)
        for alpha, c in shifted.coeffs.items():
            beta = alpha[:M.m]
            if sum(beta) > max_beta:
                continue
            key = (j, beta)
            fam.setdefault(key, {})[alpha[M.m:]] = c
    out = {}
    for j in range(M.d):
        for beta in multiindices(M.m, max_beta):
            coeffs = fam.get((j, beta), {})
            zero = (0,) * M.n
            if sum(beta) == 0 and zero in coeffs:
                del coeffs[zero]   # drop the constant wbar_p
            out[(j, beta)] = TruncatedSeries(M.n, M.order - sum(beta), coeffs)
    return out


def translated_segre_graph(M, p):
    """Graphing series of the Segre variety through p in the translated
    coordinates: G(z_1) = Thetabar(z_1 + z_p, zbar_p, wbar_p) - w_p."""
    z1 = [TruncatedSeries.variable(i, M.m, M.order) for i in range(M.m)]
    args = [z1[k] + TruncatedSeries.constant(p.z[k], M.m, M.order)
            for k in range(M.m)]
    consts = [TruncatedSeries.constant(c, M.m, M.order)
              for c in list(p.zbar) + list(p.wbar)]
    out = []
    for j in range(M.d):
        g = M.theta_bar[j].compose_at(args + consts)
        out.append(g - TruncatedSeries.constant(p.w[j], M.m, M.order))
    return SeriesVector(out)


def classify_at_point(M, p, seed=0, trials=DEFAULT_TRIALS, check_jets=True):
    """Five-condition report at a surface point p, from the translated
    coefficient family and jet-map ranks (no re-centering of the series)."""
    if not M.contains(p):
        raise ManifoldError("point is not on the truncated model")
    N = M.order
    m, d, n = M.m, M.d, M.n
    k_max = N - 1
    fam = translated_family(M, p, max_beta=k_max)
    keys = _family_sorted(fam)

    # ranks at 0 of the translated Segre mappings Q_{1,k}
    rank0 = {}
    rows = []
    for k in range(0, k_max + 1):
        for (j, beta) in keys:
            if sum(beta) != k:
                continue
            s = fam[(j, beta)]
            rows.append([s.partial_derivative(i).constant_term()
                         for i in range(n)])
        rank0[k] = exact_rank(rows)

    if check_jets:
        # the block identity: jet rank at (zbar_p, t_p) = m + rk_0 Q_{1,k}
        for k in (1, min(2, k_max)):
            jm = jet_map(M, k)
            lhs = jm.rank_at(list(p.zbar), list(p.t))
            if lhs != m + rank0[k]:
                raise ManifoldError(
                    "jet-rank block identity fails at k=%d: %d vs %d"
                    % (k, lhs, m + rank0[k]))

    finite = Condition(NO, note="rank at p below n for every k <= %d" % k_max)
    for k in range(1, k_max + 1):
        if rank0[k] == n:
            finite = Condition(YES, l0=k)
            break
    levi = Condition(YES, l0=1) if finite.verdict == YES and finite.l0 == 1 \
        else Condition(NO)
    multitype = [rank0[0]]
    for k in range(1, (finite.l0 or k_max) + 1):
        multitype.append(rank0[k] - rank0[k - 1])

    # essential finiteness at p: ideal of Theta_{1,j,beta} - Theta_{1,j,beta}(0)
    def _centered(key):
        s = fam[key]
        return _lift_order(
            s - TruncatedSeries.constant(s.constant_term(), n, s.order), N)

    gens = [g for g in (_centered(key) for key in keys) if not g.is_zero()]
    full = ideal_codimension(gens, N, nvars=n)
    if full.stable:
        epsilon_1 = full.value
        l0 = None
        acc = []
        for k in range(0, k_max + 1):
            acc.extend(g for g in (_centered(key) for key in keys
                                   if sum(key[1]) == k) if not g.is_zero())
            if not acc:
                continue
            res = ideal_codimension(acc, N, nvars=n)
            if res.stable:
                l0 = k
                break
        ess = Condition(YES, l0=l0)
    else:
        epsilon_1 = None
        ess = Condition(NO, note="ideal codimension still growing at "
                                 "levels %d/%d" % (N - 1, N))

    # Segre nondegeneracy at p: restriction to the translated Segre variety
    graph = translated_segre_graph(M, p)
    z1 = [TruncatedSeries.variable(i, m, N) for i in range(m)]
    rows_by_level = {}
    for (j, beta) in keys:
        lv = sum(beta)
        if lv == 0:
            continue
        s = fam[(j, beta)]
        restricted = s.compose(z1 + list(graph))
        row = [restricted.partial_derivative(i) for i in range(m)]
        if any(not g.is_zero() for g in row):
            rows_by_level.setdefault(lv, []).append(row)
    segre = _rank_sweep(rows_by_level, m, k_max, ("segre-p", seed), trials,
                        "restricted generic rank")

    # holomorphic nondegeneracy at p: full generic rank of the family
    # (the beta = 0 block participates at level 1: coordinates are not normal)
    rows_by_level = {}
    for (j, beta) in keys:
        s = fam[(j, beta)]
        if s.order < 1:
            continue
        row = [s.partial_derivative(i) for i in range(n)]
        if any(not g.is_zero() for g in row):
            rows_by_level.setdefault(max(sum(beta), 1), []).append(row)
    holo = _rank_sweep(rows_by_level, n, k_max, ("holo-p", seed), trials,
                       "generic rank")

    report = ClassificationReport(
        order=N, at_point=p.to_dict(), levi=levi, finite=finite,
        essentially_finite=ess, segre_nondegenerate=segre,
        holomorphically_nondegenerate=holo, essential_type=epsilon_1,
        levi_multitype=multitype)
    report.hierarchy_ok = check_hierarchy(report)
    return report


# ---------------------------------------------------------------------------
# hierarchy and invariance checks
# ---------------------------------------------------------------------------

def check_hierarchy(report):
    """Levi => finite => essentially finite => Segre => holomorphic:
    yes-verdicts must propagate rightward (no-verdicts leftward), and the
    integer types must not increase along the chain where both are yes."""
    chain = report.conditions()
    verdicts = [c.verdict for c in chain]
    for i in range(len(verdicts) - 1):
        if verdicts[i] == YES and verdicts[i + 1] == NO:
            return False
    # types weakly decrease downward where defined (skip levi: l0 = 1)
    typed = [c.l0 for c in chain[1:] if c.verdict == YES and c.l0 is not None]
    for a, b in zip(typed, typed[1:]):
        if b > a:
            return False
    return True


def reflection_mapping(Mprime, h):
    """The d' series mubar'_j - Theta'_j(lambdabar', h(t)) in the variables
    (t, lambdabar', mubar'); h holds n' series in the t variables of the
    source space."""
    h = SeriesVector(h)
    n_src = h.nvars
    mp, dp = Mprime.m, Mprime.d
    N = min(h.order, Mprime.order)
    nv = n_src + mp + dp
    t_pos = list(range(n_src))
    lam = [TruncatedSeries.variable(n_src + i, nv, N) for i in range(mp)]
    mu = [TruncatedSeries.variable(n_src + mp + j, nv, N) for j in range(dp)]
    h_emb = [s.truncate(N).embed(nv, t_pos) for s in h]
    out = []
    for j in range(dp):
        comp = Mprime.theta[j].truncate(N).compose(lam + h_emb)
        out.append(mu[j] - comp)
    return SeriesVector(out)


def transformation_rule_check(M, Mprime, h, k=2, samples=3, seed=0,
                              trials=DEFAULT_TRIALS):
    """Invariance of the Segre-mapping ranks under the invertible map h
    (which must send M to M'): equality of ranks at the origin and of
    generic ranks for every jet order <= k, and equality of jet-map ranks
    at sampled corresponding points of the complexifications.

    Returns a list of failure descriptions (empty = all checks passed)."""
    from .crmap import CRMapping, verify_cr_map

    mapping = CRMapping(M, Mprime, h)
    verdict = verify_cr_map(mapping)
    if not verdict.ok:
        return ["h does not map M into M': residual at %s" % (verdict.witness,)]
    dh0 = [[h[r].coefficient(_unit(h.nvars, i)) for i in range(h.nvars)]
           for r in range(len(h))]
    if len(h) != M.n or exact_rank(dh0) != M.n:
        return ["h is not invertible at 0"]

    failures = []
    for kk in range(0, k + 1):
        r_src = segre_mapping(M, kk).rank_at_origin()
        r_dst = segre_mapping(Mprime, kk).rank_at_origin()
        if r_src != r_dst:
            failures.append("rk_0 Q_%d: %d vs %d" % (kk, r_src, r_dst))
        g_src = _q_generic_rank(M, kk, seed, trials)
        g_dst = _q_generic_rank(Mprime, kk, seed, trials)
        if g_src.value != g_dst.value:
            failures.append("genrk Q_%d: %d vs %d"
                            % (kk, g_src.value, g_dst.value))

    # sampled corresponding points of the complexifications
    f_bar = [s.conjugate_coeffs() for s in mapping.f]
    jets_src = {kk: jet_map(M, kk) for kk in range(1, k + 1)}
    jets_dst = {kk: jet_map(Mprime, kk) for kk in range(1, k + 1)}
    for t in range(samples):
        rng = _trial_rng(seed, "corresp", t)
        zeta_p = random_point(rng, M.m)
        t_p = random_point(rng, M.n)
        theta_at = [s.evaluate(zeta_p + t_p) for s in M.theta]
        tau_p = zeta_p + theta_at
        t_p_dst = [s.evaluate(t_p) for s in h]
        zeta_p_dst = [s.evaluate(tau_p) for s in f_bar]
        for kk in range(1, k + 1):
            lhs = jets_src[kk].rank_at(zeta_p, t_p)
            rhs = jets_dst[kk].rank_at(zeta_p_dst, t_p_dst)
            if lhs != rhs:
                failures.append(
                    "jet rank k=%d at sample %d: %d vs %d" % (kk, t, lhs, rhs))
    return failures


def _q_generic_rank(M, k, seed, trials):
    sm = segre_mapping(M, k)
    rows = []
    for s in sm.series():
        if s.order < 1:
            continue
        rows.append([s.partial_derivative(i) for i in range(M.n)])
    if not rows:
        return RankVerdict(0, EXACT_SYMBOLIC)
    return generic_rank(SeriesMatrix(rows), seed=("qgen", seed, k),
                        trials=trials)


def _unit(nvars, i):
    return tuple(1 if j == i else 0 for j in range(nvars))
