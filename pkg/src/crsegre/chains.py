"""Segre chains: multiple flows of the pair of complexified CR foliations.

A chain state records the four component blocks (z, w, zeta, xi) of a point
of the complexification as series in the multitime variables
z_(k) = (z_1, ..., z_k), each time a block of m fresh variables.  The two
flows act by

    L-flow:     (z, w, zeta, xi) -> (z + t, Thetabar(z + t, zeta, xi), zeta, xi)
    Lbar-flow:  (z, w, zeta, xi) -> (z, w, zeta + t, Theta(zeta + t, z, w))

and the k-th Segre chain alternates them starting with the L-flow (the
conjugate chain starts with the Lbar-flow).  Generic ranks of the chains
yield the Segre type, multitype and minimality; the projected chains psi^k
yield the intrinsic orbit dimension.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .gaussrat import GaussRat, ZERO
from .series import TruncatedSeries, SeriesVector, OrderExhaustedError
from .linalg import (
    SeriesMatrix, generic_rank, exact_rank, jacobian, RankVerdict,
    random_rational, _trial_rng, DEFAULT_TRIALS, EXACT_SYMBOLIC,
)
from .manifold import GenericManifold, SurfacePoint, ManifoldError


@dataclass
class ChainState:
    m: int
    d: int
    order: int
    k: int                 # flows applied so far
    started_with_lbar: bool
    z: list
    w: list
    zeta: list
    xi: list

    @property
    def nvars(self):
        return self.m * self.k

    def components(self):
        return list(self.z) + list(self.w) + list(self.zeta) + list(self.xi)

    def t_components(self):
        return list(self.z) + list(self.w)

    def tau_components(self):
        return list(self.zeta) + list(self.xi)

    def on_complexification(self, M):
        """Membership check: xi - Theta(zeta, z, w) vanishes identically."""
        for j in range(self.d):
            val = M.theta[j].compose_at(self.zeta + self.z + self.w)
            if not (self.xi[j] - val).is_zero():
                return False
        return True


def start_state(M, base=None):
    """Chain state before any flow: the complexified base point (constant
    series in zero multitime variables).  `base` is a SurfacePoint or a raw
    (t_p, tau_p) pair of coordinate tuples; the origin by default."""
    if base is None:
        t_p = [ZERO] * M.n
        tau_p = [ZERO] * M.n
    elif isinstance(base, SurfacePoint):
        t_p = list(base.t)
        tau_p = list(base.zbar) + list(base.wbar)
    else:
        t_p, tau_p = [list(part) for part in base]
    const = lambda c: TruncatedSeries.constant(c, 0, M.order)
    return ChainState(
        M.m, M.d, M.order, 0, False,
        [const(c) for c in t_p[:M.m]], [const(c) for c in t_p[M.m:]],
        [const(c) for c in tau_p[:M.m]], [const(c) for c in tau_p[M.m:]])


def _extend(state):
    """Embed every component into the multitime ring with m fresh variables
    appended, and return the fresh time variables."""
    m = state.m
    old, new = state.nvars, state.nvars + m
    emb = list(range(old))

    def grow(series_list):
        return [s.embed(new, emb) for s in series_list]

    times = [TruncatedSeries.variable(old + i, new, state.order)
             for i in range(m)]
    return grow(state.z), grow(state.w), grow(state.zeta), grow(state.xi), times


def flow_L(M, state):
    """exp(t L): move along the Segre foliation whose leaves have frozen tau."""
    if state.k + 1 > state.order:
        raise OrderExhaustedError(
            "chain depth %d exceeds the truncation order %d"
            % (state.k + 1, state.order))
    z, w, zeta, xi, t = _extend(state)
    z_new = [a + b for a, b in zip(z, t)]
    w_new = [tb.compose_at(z_new + zeta + xi) for tb in M.theta_bar]
    return ChainState(state.m, state.d, state.order, state.k + 1,
                      state.started_with_lbar if state.k else False,
                      z_new, w_new, zeta, xi)


def flow_Lbar(M, state):
    """exp(t Lbar): move along the conjugate Segre foliation (frozen t)."""
    if state.k + 1 > state.order:
        raise OrderExhaustedError(
            "chain depth %d exceeds the truncation order %d"
            % (state.k + 1, state.order))
    z, w, zeta, xi, t = _extend(state)
    zeta_new = [a + b for a, b in zip(zeta, t)]
    xi_new = [th.compose_at(zeta_new + z + w) for th in M.theta]
    return ChainState(state.m, state.d, state.order, state.k + 1,
                      state.started_with_lbar if state.k else True,
                      z, w, zeta_new, xi_new)


def gamma_k(M, k, conjugate=False, base=None):
    """The k-th Segre chain Gamma_k (or its conjugate) from `base`."""
    if k < 1:
        raise ValueError("chain length must be >= 1")
    state = start_state(M, base)
    for step in range(k):
        use_lbar = (step % 2 == 0) == conjugate
        state = flow_Lbar(M, state) if use_lbar else flow_L(M, state)
    return state


def chain_on_m_components(state):
    """Coordinates of the chain on the complexification: (z, zeta, xi) when
    the last flow was an L-flow (odd plain chains), (z, w, zeta) otherwise."""
    last_was_lbar = (state.k % 2 == 1) == state.started_with_lbar
    if last_was_lbar:
        return list(state.z) + list(state.w) + list(state.zeta)
    return list(state.z) + list(state.zeta) + list(state.xi)


def chain_jacobian_at(state, point, components=None):
    """Exact Jacobian matrix of the chosen components at a rational point
    of the multitime space."""
    comps = components if components is not None else state.components()
    rows = []
    for s in comps:
        rows.append([s.partial_derivative(i).evaluate(point)
                     for i in range(state.nvars)])
    return rows


# ---------------------------------------------------------------------------
# Segre type / multitype / minimality
# ---------------------------------------------------------------------------

@dataclass
class SegreTypeReport:
    m: int
    d: int
    order: int
    generic_ranks: list          # genrk Gamma_k for k = 1..len
    rank_verdicts: list          # RankVerdict per k
    jumps: list                  # (m, m, e_3, ..., e_mu0)
    mu0: int
    nu0: int
    minimal: str                 # yes / no / inconclusive
    orbit_dim: int
    intrinsic_orbit_dim: int

    def to_dict(self):
        return {
            "order": self.order,
            "generic_ranks": list(self.generic_ranks),
            "confidence": [v.confidence for v in self.rank_verdicts],
            "multitype": list(self.jumps),
            "segre_type_mu0": self.mu0,
            "nu0": self.nu0,
            "minimal": self.minimal,
            "orbit_dim": self.orbit_dim,
            "intrinsic_orbit_dim": self.intrinsic_orbit_dim,
        }


def chain_generic_rank(M, k, conjugate=False, base=None, seed=0,
                       trials=DEFAULT_TRIALS):
    state = gamma_k(M, k, conjugate=conjugate, base=base)
    # ranks are taken in a (2m+d)-coordinate chart of the complexification;
    # the remaining d components are functions of these on it
    mat = jacobian(chain_on_m_components(state))
    return generic_rank(mat, seed=("chain", seed, k, conjugate), trials=trials)


def segre_type(M, seed=0, trials=DEFAULT_TRIALS, base=None):
    """Generic ranks of Gamma_1, Gamma_2, ... until stabilization (capped at
    k = d + 3 via the bound mu_0 <= d + 2), then the derived invariants."""
    cap = min(M.d + 3, M.order)
    top = 2 * M.m + M.d
    ranks, verdicts = [], []
    stabilized = False
    mu0 = cap
    for k in range(1, cap + 1):
        v = chain_generic_rank(M, k, base=base, seed=seed, trials=trials)
        ranks.append(v.value)
        verdicts.append(v)
        if k >= 2 and ranks[-1] == ranks[-2]:
            mu0 = k - 1
            stabilized = True
            break
        if v.value == top and v.certified:
            # the ranks are nondecreasing and bounded by dim of the
            # complexification, so the next one is forced to agree
            mu0 = k
            stabilized = True
            break
    orbit_dim = ranks[mu0 - 1]
    jumps = [M.m, M.m] + [ranks[k] - ranks[k - 1] for k in range(2, mu0)]
    if orbit_dim == 2 * M.m + M.d:
        # rank verdicts are always sound lower bounds, so reaching the
        # maximal dimension certifies minimality outright
        minimal = "yes"
    elif stabilized and all(v.certified for v in verdicts):
        minimal = "no"
    else:
        minimal = "inconclusive"
    return SegreTypeReport(
        M.m, M.d, M.order, ranks, verdicts, jumps, mu0, mu0 - 1, minimal,
        orbit_dim, orbit_dim - M.m)


def psi_generic_ranks(M, k_max, seed=0, trials=DEFAULT_TRIALS):
    """Generic ranks of the projected chains psi^k (tau-projection for even
    k, t-projection for odd k) and the stabilization index nu_0."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    ranks = []
    nu0 = None
    for k in range(1, k_max + 2):
        if nu0 is not None:
            # stabilized: later projected ranks are pinned by the chain
            # stabilization through the projection identity
            ranks.append(ranks[-1])
            continue
        state = gamma_k(M, k)
        comps = state.t_components() if k % 2 == 1 else state.tau_components()
        v = generic_rank(jacobian(comps), seed=("psi", seed, k), trials=trials)
        ranks.append(v.value)
        if k >= 2 and ranks[-1] == ranks[-2]:
            nu0 = k - 1
    return ranks[:k_max], nu0


def check_projection_identity(M, seed=0, trials=DEFAULT_TRIALS):
    """The identity  m + genrk psi^{k+1} = genrk Gamma_{k+2}  for small k;
    returns the list of (k, lhs, rhs) triples that FAIL (empty = pass)."""
    report = segre_type(M, seed=seed, trials=trials)
    failures = []
    for k in range(0, report.mu0 + 1):
        if k + 2 > min(M.d + 3, M.order):
            break
        state = gamma_k(M, k + 1)
        comps = state.t_components() if (k + 1) % 2 == 1 else state.tau_components()
        lhs = M.m + generic_rank(jacobian(comps),
                                 seed=("psiid", seed, k), trials=trials).value
        rhs = chain_generic_rank(M, k + 2, seed=seed, trials=trials).value
        if lhs != rhs:
            failures.append((k, lhs, rhs))
    return failures


# ---------------------------------------------------------------------------
# submersive slices (minimal case)
# ---------------------------------------------------------------------------

@dataclass
class SubmersiveSliceWitness:
    point: list                  # multitime point, length 2 m nu0
    columns: list                # n column indices spanning the slice
    minor: GaussRat              # the n x n slice minor (nonzero)
    chain_length: int
    conjugate: bool = True

    def to_dict(self):
        return {
            "point": [str(c) for c in self.point],
            "columns": list(self.columns),
            "minor": str(self.minor),
            "chain_length": self.chain_length,
            "conjugate": self.conjugate,
        }


@dataclass
class SubmersiveSliceFailure:
    reason: str
    orbit_dim: int = None
    trials: int = 0

    def to_dict(self):
        out = {"reason": self.reason, "trials": self.trials}
        if self.orbit_dim is not None:
            out["orbit_dim"] = self.orbit_dim
        return out


def palindromic_point(samples, m, nu0):
    """(a_1, ..., a_nu0, 0, -a_nu0, ..., -a_2): the truncated return point;
    the t-projection of the conjugate chain of length 2 nu0 vanishes there
    identically."""
    blocks = list(samples[:nu0])
    blocks.append([ZERO] * m)
    for a in reversed(samples[1:nu0]):
        blocks.append([-c for c in a])
    point = [c for block in blocks for c in block]
    if len(point) != 2 * m * nu0:
        raise ValueError("palindromic point has the wrong length")
    return point


def find_submersive_slice(M, trials=20, seed=0, report=None):
    """Search for a rational palindromic point where the t-projected
    conjugate chain of length 2 nu_0 reaches exact Jacobian rank n, together
    with the n coordinate columns of an affine slice realizing the rank.
    Returns a witness, or a failure (nonminimal manifold / no point found)."""
    if report is None:
        report = segre_type(M, seed=seed)
    if report.minimal == "no":
        return SubmersiveSliceFailure("manifold is not minimal",
                                      orbit_dim=report.orbit_dim)
    if report.minimal == "inconclusive":
        return SubmersiveSliceFailure("minimality is inconclusive at this order",
                                      orbit_dim=report.orbit_dim)
    nu0 = report.nu0
    state = gamma_k(M, 2 * nu0, conjugate=True)
    t_comps = state.t_components()
    for trial in range(trials):
        rng = _trial_rng(seed, "slice", trial)
        samples = [[GaussRat(random_rational(rng), random_rational(rng))
                    for _ in range(M.m)] for _ in range(nu0)]
        if any(all(c.is_zero() for c in a) for a in samples):
            continue
        point = palindromic_point(samples, M.m, nu0)
        values = [s.evaluate(point) for s in t_comps]
        if not all(v.is_zero() for v in values):
            continue  # should not happen; the palindrome returns to 0
        jac = chain_jacobian_at(state, point, components=t_comps)
        if exact_rank(jac) != M.n:
            continue
        cols = _independent_columns(jac, M.n)
        minor = _det_constant([[jac[r][c] for c in cols] for r in range(M.n)])
        return SubmersiveSliceWitness(point, cols, minor, 2 * nu0)
    return SubmersiveSliceFailure("no submersive palindromic point found",
                                  trials=trials)


def _independent_columns(matrix, rank):
    from .linalg import _pivot_positions
    cols = _pivot_positions([list(r) for r in zip(*matrix)])[0]
    if len(cols) != rank:
        raise ValueError("column selection failed")
    return sorted(cols[:rank])


def _det_constant(M):
    n = len(M)
    M = [row[:] for row in M]
    det = GaussRat(1)
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if not M[r][col].is_zero():
                pivot = r
                break
        if pivot is None:
            return ZERO
        if pivot != col:
            M[col], M[pivot] = M[pivot], M[col]
            det = -det
        det = det * M[col][col]
        inv = M[col][col].inverse()
        for r in range(col + 1, n):
            if not M[r][col].is_zero():
                f = M[r][col] * inv
                M[r] = [v - f * w for v, w in zip(M[r], M[col])]
    return det
