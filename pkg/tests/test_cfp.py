import pytest
from hypothesis import given, settings

from stategraph.bes import solve_pbes
from stategraph.cfp import ControlStructure, control_structure, gcfps, lcfps, normalize_cfps
from stategraph.core import BOOL, NatSort
from stategraph.errors import SortConflict
from stategraph.oracle import oracle_solve
from stategraph.textio import parse_pbes, print_pbes
from stategraph.unicity import derive_unicity

from .strategies import systems


def names(pbes, members, eq):
    return {pbes.equation(x).params[n - 1][0] for x, n in members if x == eq}


def test_running_example_lcfps_and_gcfps(running):
    u = derive_unicity(running)
    lc = lcfps(running, u)
    assert names(running, lc, "X") == {"i", "j", "k"}  # l + 1 rules out l
    assert names(running, lc, "Y") == {"i", "j", "k", "l"}
    assert names(running, lc, "Z") == {"i", "j", "k", "l"}
    gc = gcfps(running, u, lc)
    assert "k" not in names(running, gc, "Z")  # m + k has no target or copy
    for eq in "XYZ":
        assert {"i", "j"} <= names(running, gc, eq)


def test_running_example_control_structure(running):
    cs = control_structure(running, derive_unicity(running))
    assert [set(cls) for cls in cs.classes] == [
        {("X", 1), ("Y", 1), ("Z", 1)},
        {("X", 2), ("Y", 2), ("Z", 2)},
    ]
    assert cs.unified_names == ["i", "j"]


def test_running_example_is_already_uniform(running):
    nf = normalize_cfps(running, control_structure(running, derive_unicity(running)))
    assert nf.cfp_names == ("i", "j")
    assert nf.pbes == running


def test_single_equation_gcfps_equal_lcfps():
    p = parse_pbes("nu X(a: Nat2, b: Nat2) = a == 0 && X(1, b) || X(a, b); init X(0, 0);")
    u = derive_unicity(p)
    assert gcfps(p, u, lcfps(p, u)) == lcfps(p, u)


def test_two_unrelated_cfps_stay_separate():
    p = parse_pbes(
        "nu X(a: Nat2, b: Nat2) = (a != 0 || X(1, b)) && (b != 0 || X(a, 1)); init X(0, 0);"
    )
    cs = control_structure(p, derive_unicity(p))
    assert [set(cls) for cls in cs.classes] == [{("X", 1)}, {("X", 2)}]


def test_crowded_class_restarts_without_the_crowding_equation():
    # The copies force a^X ~ a^Y and a^X ~ b^Y, putting two parameters of Y
    # in one class. Both members from Y are dropped and the search restarts.
    p = parse_pbes(
        "nu X(a: Nat2) = Y(a, 0) && Y(0, a); nu Y(a: Nat2, b: Nat2) = a == b; init X(1);"
    )
    cs = control_structure(p, derive_unicity(p))
    assert cs.dropped == {("Y", 1), ("Y", 2)}
    assert [set(cls) for cls in cs.classes] == [{("X", 1)}]
    nf = normalize_cfps(p, cs)
    assert nf.pbes.equation("Y").params[0] == (cs.unified_names[0], NatSort(1))
    assert "Y(1, a_1, 0) && Y(1, 0, a_1)" in print_pbes(nf.pbes)
    assert oracle_solve(nf.pbes) == oracle_solve(p)


def test_missing_class_is_added_with_the_init_default():
    p = parse_pbes(
        "nu X(c: Nat3, d: Nat3) = c != 2 || Y(d); mu Y(d: Nat3) = d == 1 || X(1, d); init X(2, 0);"
    )
    cs = control_structure(p, derive_unicity(p))
    nf = normalize_cfps(p, cs)
    y = nf.pbes.equation("Y")
    assert y.params[0][0] == "c" and len(y.params) == 2
    assert "Y(2, d)" in print_pbes(nf.pbes)
    assert oracle_solve(nf.pbes) == oracle_solve(p)


def test_mixed_sorts_in_a_class_conflict():
    p = parse_pbes("nu X(a: Bool) = Y(0); nu Y(a: Nat2) = X(true); init X(true);")
    cs = ControlStructure({("X", 1), ("Y", 1)}, [frozenset({("X", 1), ("Y", 1)})], ["a"], [BOOL])
    with pytest.raises(SortConflict):
        normalize_cfps(p, cs)


@settings(max_examples=200, deadline=None)
@given(systems())
def test_cfp_sets_are_nested_and_one_per_equation(p):
    u = derive_unicity(p)
    lc = lcfps(p, u)
    gc = gcfps(p, u, lc)
    cs = control_structure(p, u)
    assert gc <= lc
    members = set().union(*cs.classes) if cs.classes else set()
    assert members <= gc
    for cls in cs.classes:
        eqs = [x for x, _ in cls]
        assert len(eqs) == len(set(eqs))


@settings(max_examples=200, deadline=None)
@given(systems())
def test_normalization_preserves_solutions(p):
    nf = normalize_cfps(p, control_structure(p, derive_unicity(p)))
    assert oracle_solve(nf.pbes) == oracle_solve(p)
    assert solve_pbes(nf.pbes) == solve_pbes(p)
