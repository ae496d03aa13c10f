import pytest
from hypothesis import given, settings

from stategraph.bes import solve_pbes
from stategraph.core import And, Const, NatSort, Or, Plus, Var
from stategraph.errors import MissingLabel
from stategraph.generate import exponential_family
from stategraph.oracle import oracle_solve
from stategraph.pipeline import analyse
from stategraph.reset import all_live, reset_pbes, reset_vars
from stategraph.textio import format_formula

from .strategies import systems
from .test_global_graph import RUNNING_LABELS

N = NatSort(65535)
k, m = Var("k", N), Var("m", N)


def test_reset_vars_examples(running_global):
    nf = running_global.normal
    args = (Plus(m, k), k)
    assert reset_vars(("Z", (1, 2)), RUNNING_LABELS, args, nf) == ((Const(1, N), k), False)
    assert reset_vars(("Z", (1, 2)), all_live(nf), args, nf) == (args, False)
    none = {("Z", (1, 2)): set()}
    assert reset_vars(("Z", (1, 2)), none, args, nf) == ((Const(1, N), Const(1, N)), False)
    assert reset_vars(("Z", (9, 9)), RUNNING_LABELS, args, nf) == (args, True)


def test_x_right_hand_side_after_reset(running_global):
    a = running_global
    out, _ = reset_pbes(a.normal, a.labelling, u=a.normal_unicity, cfp_args="e")
    text = format_formula(out.equation("X").rhs)
    assert text == "(i != 1 || j != 1 || X(2, j, k, 1)) && (i != 1 || Z(i, 2, 1, k)) && (i != 2 || Z(i, 2, 1, k))"
    assert "forall" not in text


def test_both_forms_solve_to_true(running_global):
    a = running_global
    for form in ("v", "e"):
        out, _ = reset_pbes(a.normal, a.labelling, u=a.normal_unicity, cfp_args=form)
        assert solve_pbes(out) is True


def test_reduced_guard_skips_the_case_split(running_global):
    a = running_global
    out, plan = reset_pbes(a.normal, a.labelling, reduced_guard=True, u=a.normal_unicity)
    assert len(plan.entries[("X", 1)]) == 1
    assert plan.entries[("X", 1)][0][0] == (2, 1)
    assert len(reset_pbes(a.normal, a.labelling, u=a.normal_unicity)[1].entries[("X", 1)]) == 2
    assert solve_pbes(out) is True
    assert plan.to_json()["reduced_guard"] is True


def test_all_live_reset_keeps_meaning():
    for p in systems_sample():
        a = analyse(p)
        out, _ = reset_pbes(a.normal, all_live(a.normal), u=a.normal_unicity)
        assert oracle_solve(out) == oracle_solve(p)


def systems_sample():
    from stategraph.generate import corpus

    return corpus(40, seed=7)


def test_missing_labels_fall_back_or_raise(running_global):
    a = running_global
    _, plan = reset_pbes(a.normal, a.labelling, u=a.normal_unicity)
    assert "X(2,2)" in plan.to_json()["missing_labels"]
    with pytest.raises(MissingLabel):
        reset_pbes(a.normal, a.labelling, u=a.normal_unicity, strict=True)


def test_unknown_form_is_rejected(running_global):
    a = running_global
    with pytest.raises(ValueError):
        reset_pbes(a.normal, a.labelling, u=a.normal_unicity, cfp_args="x")


@settings(max_examples=200, deadline=None)
@given(systems())
def test_reset_preserves_solutions(p):
    want = oracle_solve(p)
    g = analyse(p, "global")
    loc = analyse(p, "local")
    red = analyse(p, "global", reduced_guard=True)
    for a in (g, loc, red):
        assert solve_pbes(a.reset) == want
    e_form, _ = reset_pbes(g.normal, g.labelling, u=g.normal_unicity, cfp_args="e")
    assert solve_pbes(e_form) == want


@settings(max_examples=100, deadline=None)
@given(systems())
def test_reset_twice_keeps_solutions(p):
    once = analyse(p).reset
    twice = analyse(once).reset
    assert solve_pbes(twice) == solve_pbes(p)


def depth(phi):
    if isinstance(phi, (And, Or)):
        return 1 + max(depth(phi.left), depth(phi.right))
    return 0


def test_full_split_is_balanced():
    a = analyse(exponential_family(10))
    (eq,) = a.reset.equations
    assert depth(eq.rhs) < 40
