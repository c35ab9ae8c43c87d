"""Bundled classical law sources.

Each catalog entry is a complete law (elastic + plastic body). Entries are
named after the component they showcase; elastic-only entries pair with the
identity plastic map. Plasticity entries pair with Hencky-strain elasticity,
the standard host for singular-value return mapping.

Plastic thresholds are parameterized in strain space (`yield_eps`,
`friction_alpha`) so the plastic body shares no parameter with the elastic
body; that keeps the two halves independently evolvable.
"""

from __future__ import annotations

from .nodes import LawAst
from .parser import parse_law
from .typecheck import typecheck

_MODULUS_PARAMS = """\
param mu init=10000.0 min=100.0 max=100000000.0 log
param lam init=10000.0 min=100.0 max=100000000.0 log
"""

ELASTIC_TEMPLATES: dict[str, tuple[str, str]] = {
    # name -> (param declarations, elastic block body)
    "fixed_corotated": (
        _MODULUS_PARAMS,
        """\
elastic {
  let (U, S, V) = svd(F);
  let R = U * transpose(V);
  let J = det(F);
  return 2.0 * mu * ((F - R) * transpose(F)) + (lam * J * (J - 1.0)) * I;
}
""",
    ),
    "neo_hookean": (
        _MODULUS_PARAMS,
        """\
elastic {
  let J = det(F);
  return mu * (F * transpose(F) - I) + (lam * log(J)) * I;
}
""",
    ),
    "stvk_hencky": (
        _MODULUS_PARAMS,
        """\
elastic {
  let (U, S, V) = svd(F);
  let eps = vlog(S);
  return U * diag(2.0 * mu * eps + lam * vsum(eps)) * transpose(U);
}
""",
    ),
}

PLASTIC_TEMPLATES: dict[str, tuple[str, str]] = {
    "identity": (
        "",
        """\
plastic {
  return F;
}
""",
    ),
    "von_mises": (
        "param yield_eps init=0.005 min=0.00001 max=1.0 log\n",
        """\
plastic {
  let (Up, Sp, Vp) = svd(F);
  let eps = vlog(Sp);
  let dev_eps = eps - vsum(eps) / 3.0;
  let n = vnorm(dev_eps);
  let dg = n - yield_eps;
  return if dg <= 0.0 then F
         else Up * diag(vexp(eps - (dg / n) * dev_eps)) * transpose(Vp);
}
""",
    ),
    "drucker_prager": (
        "param friction_alpha init=0.3 min=0.01 max=2.0 log\n",
        """\
plastic {
  let (Up, Sp, Vp) = svd(F);
  let eps = vlog(Sp);
  let tr = vsum(eps);
  let dev_eps = eps - tr / 3.0;
  let n = vnorm(dev_eps);
  let dg = n + friction_alpha * tr;
  return if tr > 0.0 then Up * transpose(Vp)
         else (if dg <= 0.0 then F
               else Up * diag(vexp(eps - (dg / n) * dev_eps)) * transpose(Vp));
}
""",
    ),
}


def compose_source(elastic_name: str, plastic_name: str) -> str:
    """Assemble a full law source from one elastic and one plastic template."""
    e_params, e_body = ELASTIC_TEMPLATES[elastic_name]
    p_params, p_body = PLASTIC_TEMPLATES[plastic_name]
    return e_params + p_params + e_body + p_body


# Catalog entry -> (elastic template, plastic template). `identity_plastic`
# is the canonical stress-free initialization pair.
CATALOG_PAIRS: dict[str, tuple[str, str]] = {
    "fixed_corotated": ("fixed_corotated", "identity"),
    "neo_hookean": ("neo_hookean", "identity"),
    "stvk_hencky": ("stvk_hencky", "identity"),
    "von_mises": ("stvk_hencky", "von_mises"),
    "drucker_prager": ("stvk_hencky", "drucker_prager"),
    "identity_plastic": ("fixed_corotated", "identity"),
}


def catalog_source(name: str) -> str:
    e, p = CATALOG_PAIRS[name]
    return compose_source(e, p)


def builtin_catalog() -> list[tuple[str, LawAst]]:
    """All bundled classical laws, parsed. Every entry also typechecks."""
    out = []
    for name in CATALOG_PAIRS:
        ast = parse_law(catalog_source(name))
        typecheck(ast)
        out.append((name, ast))
    return out
