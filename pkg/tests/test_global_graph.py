from hypothesis import given, settings

from stategraph.bes import substitute_expr
from stategraph.cfp import control_structure, normalize_cfps
from stategraph.generate import exponential_family
from stategraph.global_graph import (
    base_label,
    build_global_cfg,
    label_global,
    label_global_reference,
    values,
)
from stategraph.ground import atoms, equivalent, ground
from stategraph.rewrite import environments
from stategraph.unicity import UnicityConstraint, derive_unicity

from .strategies import systems

RUNNING_LABELS = {
    ("X", (1, 1)): {"k"},
    ("X", (2, 1)): {"k"},
    ("X", (1, 2)): {"k"},
    ("Y", (1, 1)): {"k"},
    ("Y", (2, 2)): {"k"},
    ("Z", (1, 2)): {"l"},
    ("Z", (2, 2)): {"l"},
}


def normal(p):
    nf = normalize_cfps(p, control_structure(p, derive_unicity(p)))
    return nf, derive_unicity(nf.pbes)


def test_values_of_running_example(running_global):
    a = running_global
    assert values(a.normal, a.normal_unicity, 1) == [1, 2]
    assert values(a.normal, a.normal_unicity, 2) == [1, 2]


def test_values_default_to_init_only():
    p = exponential_family(0)
    nf, u = normal(p)
    assert nf.ncfp == 0
    single = normal(exponential_family(1))
    assert values(*single, 1) == [True, False]
    assert values(single[0], UnicityConstraint(), 1) == [True]


def test_cfg_of_running_example(running_global):
    cfg = running_global.cfg
    assert set(cfg.vertices) == set(RUNNING_LABELS)
    assert len(cfg.vertices) == 7
    assert (("X", (1, 1)), 1, ("X", (2, 1))) in cfg.edges
    assert (("X", (1, 1)), 2, ("Z", (1, 2))) in cfg.edges
    for (x, _), i, (y, _) in cfg.edges:
        callee = [eq for eq in running_global.normal.pbes.equations if eq.name == x][0]
        from stategraph.core import pvi_at

        assert pvi_at(callee.rhs, i).name == y


def test_labels_of_running_example(running_global):
    assert running_global.labelling == RUNNING_LABELS


def test_labelling_steps(running_global):
    nf = running_global.normal
    assert "k" not in base_label(nf, "Z", (1, 2))
    assert base_label(nf, "Y", (1, 1)) == {"k"}
    assert base_label(nf, "Z", (1, 2)) == set()
    assert running_global.labelling[("Z", (1, 2))] == {"l"}  # from Y(1, 1, l, 1)


def test_exponential_family_sizes():
    for n in (4, 8, 10):
        nf, u = normal(exponential_family(n))
        assert len(build_global_cfg(nf, u).vertices) == 2**n


@settings(max_examples=150, deadline=None)
@given(systems())
def test_kernel_labelling_matches_reference_and_never_labels_cfps(p):
    nf, u = normal(p)
    cfg = build_global_cfg(nf, u)
    lab = label_global(nf, cfg)
    assert lab == label_global_reference(nf, cfg)
    for (x, _), labels in lab.items():
        assert labels <= {n for n, _ in nf.data_params(x)}


@settings(max_examples=100, deadline=None)
@given(systems(max_params=3))
def test_rhs_depends_only_on_neighbours(p):
    nf, u = normal(p)
    cfg = build_global_cfg(nf, u)
    for vertex in cfg.vertices:
        x, v = vertex
        eq = nf.pbes.equation(x)
        near = {(y, w) for _, (y, w) in cfg.successors(vertex)}
        for env in environments(nf.data_params(x)):
            full = dict(env)
            full.update(zip((n for n, _ in eq.params[: nf.ncfp]), v))
            expr = ground(eq.rhs, full)
            far = [a for a in atoms(expr) if (a[0], a[1][: nf.ncfp]) not in near]
            if not far:
                continue
            for value in (True, False):
                pinned = substitute_expr(expr, {a: value for a in far})
                assert equivalent(expr, pinned, 18) is not False
