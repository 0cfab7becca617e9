import pytest

from crsegre.frontend import load_manifest
from crsegre.manifold import build_from_spec

# The named fixtures of the corpus.  Orders are chosen so that every stated
# invariant fits inside the truncation (the CLI default is 12).
CORPUS_TEXT = """
manifold heisenberg { m = 1; d = 1; order = 10; style = complex_defining;
  eq: w - 2*I*z*zbar; }

manifold heisenberg_real { m = 1; d = 1; order = 10; style = real_graph;
  eq: x^2 + y^2; }

manifold levi_flat { m = 1; d = 1; order = 10; style = complex_defining;
  eq: w; }

manifold tilted { m = 1; d = 1; order = 10; style = real_graph;
  eq: x^2; }

# z = zbar + i w^2 wbar^2 in the coordinates of the source text; here
# written with w the normal variable: wbar = w - i z^2 zbar^2
manifold ex258 { m = 1; d = 1; order = 10; style = complex_defining;
  eq: w - I*z^2*zbar^2; }

manifold fin5 { m = 1; d = 1; order = 12; style = complex_defining;
  eq: w + I*(z^5*zbar + zbar^5*z); }

manifold fin2 { m = 2; d = 1; order = 8; style = complex_defining;
  eq: w + I*(z_1*zbar_1 + z_1^2*zbar_2 + zbar_1^2*z_2); }

manifold fin3 { m = 3; d = 1; order = 8; style = complex_defining;
  eq: w + I*(z_1*zbar_1 + z_1^2*zbar_2 + zbar_1^2*z_2
             + z_1^3*zbar_3 + zbar_1^3*z_3); }

manifold ess2 { m = 1; d = 1; order = 10; style = complex_defining;
  eq: w + I*z^2*zbar^2; }

manifold ess3 { m = 1; d = 1; order = 10; style = complex_defining;
  eq: w + I*z^3*zbar^3; }

manifold ess4 { m = 1; d = 1; order = 12; style = complex_defining;
  eq: w + I*z^4*zbar^4; }

manifold ess12 { m = 2; d = 1; order = 12; style = complex_defining;
  eq: w + I*(z_1^3*zbar_1^3 + z_2^4*zbar_2^4); }

manifold m3239 { m = 2; d = 1; order = 10; style = complex_defining;
  eq: -2*I*z_1*zbar_1*(1 + z_1*zbar_2) + w*(1 + z_1*zbar_2)/(1 + zbar_1*z_2); }

# Hermitian-symmetrized version of v = |z_1|^2 (1 + Re z_1 zbar_2):
# Segre nondegenerate but not essentially finite
manifold segnd { m = 2; d = 1; order = 8; style = complex_defining;
  eq: w + I*(2*z_1*zbar_1 + z_1^2*zbar_1*zbar_2 + z_1*z_2*zbar_1^2); }

manifold cubic3517 { m = 2; d = 1; order = 8; style = complex_defining;
  eq: w + I*(2*z_1*zbar_1 + z_1^2*zbar_2 + zbar_1^2*z_2);
  point: 1/2, 0;
  point: 0, 1; }

manifold m0_3220 { m = 2; d = 1; order = 8; style = complex_defining;
  eq: w + I*(2*z_1*zbar_1 + z_1^2*zbar_2 + zbar_1^2*z_2)/(1 - z_2*zbar_2); }

manifold unused_direction { m = 2; d = 1; order = 8; style = complex_defining;
  eq: w + I*z_1*zbar_1; }

manifold codim2 { m = 1; d = 2; order = 8; style = complex_defining;
  eq: w_1 - 2*I*z*zbar;
  eq: w_2 - 2*I*z^2*zbar^2; }

manifold lightcone { m = 2; d = 1; order = 8; style = real_graph;
  eq: sqrt1p(2*x_1 + x_1^2 + x_2^2) - 1; }

map ident_heis { source = heisenberg; target = heisenberg;
  h: z; h: w; }

map collapse { source = heisenberg; target = levi_flat;
  h: 0; h: 0; }
"""

MAP_4221_TEXT = """
manifold src4221 { m = 1; d = 1; order = 10; style = complex_defining;
  eq: w + I*z_1^2*zbar_1^2; }
manifold tgt4221 { m = 2; d = 1; order = 10; style = complex_defining;
  eq: w + I*(z_1^2*zbar_1^2 + z_1*zbar_2^2 + zbar_1*z_2^2); }
map embed4221 { source = src4221; target = tgt4221;
  h: z_1; h: 0; h: w_1; }
"""


@pytest.fixture(scope="session")
def corpus_manifest():
    return load_manifest(CORPUS_TEXT)


@pytest.fixture(scope="session")
def corpus(corpus_manifest):
    built = {}
    for name, spec in corpus_manifest.manifolds.items():
        built[name] = build_from_spec(spec)
    return built


@pytest.fixture(scope="session")
def map_4221():
    from crsegre.crmap import mapping_from_spec
    man = load_manifest(MAP_4221_TEXT)
    src = build_from_spec(man.manifolds["src4221"])
    dst = build_from_spec(man.manifolds["tgt4221"])
    return mapping_from_spec(man.maps["embed4221"], src, dst)


def manifold_from_text(text, name=None):
    man = load_manifest(text)
    if name is None:
        name = next(iter(man.manifolds))
    return build_from_spec(man.manifolds[name])
