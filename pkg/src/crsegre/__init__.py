"""crsegre: exact local CR invariants of generic submanifolds of C^n.

Truncated-series models of real generic submanifolds given by complex or
real defining equations; Segre chains, type, multitype and minimality; the
five pointwise nondegeneracy conditions with their numeric types; jets of
Segre varieties; tangent holomorphic vector fields; and the nondegeneracy
conditions for CR mappings between two such manifolds.  All arithmetic is
exact over the Gaussian rationals, and every verdict is tagged with the
truncation order it was decided at.
"""

__version__ = "0.1.0"

from .gaussrat import GaussRat
from .series import (
    TruncatedSeries, SeriesVector, solve_implicit, identity_vector,
    SeriesError, ArityMismatchError, OrderExhaustedError, NonUnitError,
    SingularLinearPartError,
)
from .linalg import (
    SeriesMatrix, RankVerdict, exact_rank, generic_rank, ideal_codimension,
    jacobian,
)
from .frontend import (
    tokenize, parse_expr, parse_expr_text, load_manifest, load_manifold_spec,
    ManifoldSpec, MapSpec, FrontendError,
)
from .manifold import (
    GenericManifold, SurfacePoint, CRFrame, ManifoldError, RealityError,
    from_complex_equations, from_real_equations, build_from_spec,
    to_normal_coordinates, transform_linear, transform_triangular,
)
from .chains import (
    ChainState, SegreTypeReport, flow_L, flow_Lbar, gamma_k, segre_type,
    psi_generic_ranks, find_submersive_slice,
)
