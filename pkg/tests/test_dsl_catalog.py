import numpy as np

from dynalaw.dsl import (
    ast_equal,
    builtin_catalog,
    eval_elastic,
    parse_law,
    print_law,
    typecheck,
)


def test_catalog_contains_initialization_pair():
    names = [name for name, _ in builtin_catalog()]
    assert "fixed_corotated" in names
    assert "identity_plastic" in names
    for expected in ("neo_hookean", "stvk_hencky", "von_mises", "drucker_prager"):
        assert expected in names


def test_catalog_round_trips():
    for name, law in builtin_catalog():
        assert ast_equal(law, parse_law(print_law(law))), name


def test_catalog_elastic_entries_stress_free_at_identity():
    for name, law in builtin_catalog():
        tl = typecheck(law)
        theta = [p.init for p in law.params]
        tau = eval_elastic(tl, np.eye(3), theta)
        assert np.allclose(tau, 0.0, atol=1e-9), name


def test_catalog_param_names_unique_and_bounded():
    for name, law in builtin_catalog():
        names = [p.name for p in law.params]
        assert len(names) == len(set(names)), name
        for p in law.params:
            assert p.lo < p.hi
            assert p.lo <= p.init <= p.hi
            if p.log_scale:
                assert p.lo > 0
