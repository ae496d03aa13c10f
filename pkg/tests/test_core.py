import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stategraph.core import (
    BOOL,
    TRUE,
    And,
    BoolTerm,
    Const,
    Eq,
    EnumSort,
    Equation,
    Forall,
    Lt,
    NatSort,
    Or,
    Pbes,
    Plus,
    Pvi,
    Var,
    cap_sorts,
    check_well_formed,
    eval_term,
    free_vars,
    npred,
    pvi_at,
    replace_pvi,
    substitute,
)
from stategraph.errors import IndexOutOfRange, SortMismatch, WellFormednessError
from stategraph.textio import format_formula

from .strategies import formulas

N = NatSort(65535)
i, j, k, l = (Var(n, N) for n in "ijkl")


def c(v):
    return Const(v, N)


def x_rhs(running):
    return running.equation("X").rhs


def test_sorts_are_finite_and_enumerable():
    assert list(NatSort(2).domain()) == [0, 1, 2]
    assert BOOL.size == 2 and BOOL.minimum is False
    e = EnumSort(("p", "q"))
    assert e.contains("q") and not e.contains("r") and e.minimum == "p"
    with pytest.raises(ValueError):
        NatSort(-1)
    with pytest.raises(ValueError):
        EnumSort(())


def test_plus_saturates_at_max():
    s = NatSort(3)
    assert eval_term(Plus(Var("x", s), Const(2, s)), {"x": 2}) == 3


def test_free_vars_examples():
    assert free_vars(BoolTerm(Lt(k, c(10)))) == {"k"}
    body = Pvi("Z", (i, c(2), Plus(Var("m", N), k), k))
    assert free_vars(Forall("m", N, body)) == {"i", "k"}
    assert free_vars(TRUE) == set()


def test_npred_and_pvi_at_on_running_example(running):
    rhs_x = running.equation("X").rhs
    assert npred(rhs_x) == 2
    assert npred(running.equation("Z").rhs) == 2
    assert npred(BoolTerm(Var("b", BOOL))) == 0
    first = pvi_at(rhs_x, 1)
    assert first.name == "X" and first.args == (c(2), j, k, Plus(l, c(1)))
    second = pvi_at(rhs_x, 2)
    assert second.name == "Z" and second.args == (i, c(2), Plus(Var("m", N), k), k)
    with pytest.raises(IndexOutOfRange):
        pvi_at(BoolTerm(Var("b", BOOL)), 1)


def test_replace_pvi_examples(running):
    b = BoolTerm(Var("b", BOOL))
    assert replace_pvi(And(Pvi("X", ()), b), 1, TRUE) == And(TRUE, b)
    rhs_x = running.equation("X").rhs
    z = pvi_at(rhs_x, 2)
    guarded = And(BoolTerm(Eq(j, c(2))), z)
    out = replace_pvi(rhs_x, 2, guarded)
    assert pvi_at(out, 2) == z and pvi_at(out, 1) == pvi_at(rhs_x, 1)
    assert "j == 2 && Z(" in format_formula(out)
    with pytest.raises(IndexOutOfRange):
        replace_pvi(b, 1, TRUE)


def test_substitute_examples():
    phi = Or(BoolTerm(Lt(k, c(10))), BoolTerm(Eq(j, c(2))))
    assert substitute(phi, {"j": c(2)}) == Or(BoolTerm(Lt(k, c(10))), BoolTerm(Eq(c(2), c(2))))
    q = Forall("m", N, Pvi("Z", (i, c(2), Plus(Var("m", N), k), k)))
    assert substitute(q, {"k": c(1)}) == Forall("m", N, Pvi("Z", (i, c(2), Plus(Var("m", N), c(1)), c(1))))
    x = Pvi("X", (c(2), j, k, Plus(l, c(1))))
    assert substitute(x, {"l": c(1)}) == Pvi("X", (c(2), j, k, Plus(c(1), c(1))))
    with pytest.raises(SortMismatch):
        substitute(x, {"l": Const(True, BOOL)})


def test_well_formedness_errors():
    s = NatSort(1)
    ok = Equation("nu", "X", (("i", s),), TRUE)
    with pytest.raises(WellFormednessError):
        check_well_formed(Pbes((ok, ok), Pvi("X", (Const(0, s),))))
    unbound = Equation("nu", "X", (("i", s),), Pvi("Y", (Var("i", s),)))
    with pytest.raises(WellFormednessError):
        check_well_formed(Pbes((unbound,), Pvi("X", (Const(0, s),))))
    with pytest.raises(WellFormednessError):
        check_well_formed(Pbes((ok,), Pvi("X", (Const(5, s),))))
    free = Equation("nu", "X", (("i", s),), BoolTerm(Eq(Var("q", s), Const(0, s))))
    with pytest.raises(WellFormednessError):
        check_well_formed(Pbes((free,), Pvi("X", (Const(0, s),))))


def test_cap_sorts_bounds_every_nat(running):
    capped = cap_sorts(running, 4)
    for eq in capped.equations:
        assert all(s.size <= 4 for _, s in eq.params)
    check_well_formed(capped)


@settings(max_examples=200, deadline=None)
@given(formulas(), st.integers(1, 6))
def test_reindexing_is_stable(phi, i):
    if i > npred(phi):
        with pytest.raises(IndexOutOfRange):
            pvi_at(phi, i)
        return
    assert pvi_at(replace_pvi(phi, i, pvi_at(phi, i)), i) == pvi_at(phi, i)
    assert replace_pvi(phi, i, pvi_at(phi, i)) == phi


@settings(max_examples=200, deadline=None)
@given(formulas(), formulas(depth=1), st.integers(1, 6))
def test_replace_pvi_count(phi, psi, i):
    if i <= npred(phi):
        assert npred(replace_pvi(phi, i, psi)) == npred(phi) + npred(psi) - 1


@settings(max_examples=200, deadline=None)
@given(formulas(), st.integers(0, 2), st.booleans())
def test_substitution_composes(phi, b, a):
    first = {"b": Const(b, NatSort(2))}
    second = {"a": Const(a, BOOL)}
    assert substitute(substitute(phi, first), second) == substitute(phi, {**first, **second})
