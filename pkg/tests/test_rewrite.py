import pytest
from hypothesis import given, settings

from stategraph.core import (
    BOOL,
    TRUE,
    And,
    BoolTerm,
    Const,
    Eq,
    Exists,
    Forall,
    Lt,
    NatSort,
    Neq,
    Or,
    Pvi,
    Var,
    npred,
    pvi_at,
    replace_pvi,
    substitute,
)
from stategraph.errors import IndexOutOfRange, UnboundVariable
from stategraph.ground import equivalent, ground
from stategraph.rewrite import (
    environments,
    eval_formula,
    guard,
    guard_table,
    guarded,
    significant,
    simplify,
)
from stategraph.textio import format_formula

from .strategies import SCOPE, formulas

N = NatSort(65535)
i, j, k = (Var(n, N) for n in "ijk")


def c(v):
    return Const(v, N)


def same_everywhere(phi, psi):
    """Exhaustive check over data environments and PVI truth assignments."""
    for env in environments(SCOPE):
        if not equivalent(ground(phi, dict(env)), ground(psi, dict(env)), 20):
            return False
    return True


def test_significant_examples():
    assert significant(Or(BoolTerm(Lt(k, c(10))), BoolTerm(Eq(j, c(2))))) == {"k", "j"}
    assert significant(Pvi("Y", (k,))) == set()
    d = Var("d", N)
    assert significant(Exists("d", N, And(BoolTerm(Eq(d, k)), Pvi("X", (d,))))) == {"k"}


def test_simplify_examples():
    phi = Or(BoolTerm(Lt(k, c(10))), BoolTerm(Eq(j, c(2))))
    assert simplify(substitute(phi, {"j": c(2)})) == TRUE
    psi = Pvi("X", (k,))
    assert simplify(And(TRUE, psi)) == psi
    assert simplify(Or(BoolTerm(Neq(c(1), c(1))), psi)) == psi
    assert simplify(Forall("m", N, psi)) == psi


def test_simplify_prunes_branches_under_a_literal():
    x1, x2 = Pvi("X", (c(1),)), Pvi("X", (c(2),))
    phi = Or(BoolTerm(Neq(j, c(1))), And(Or(BoolTerm(Neq(j, c(1))), x1), Or(BoolTerm(Neq(j, c(2))), x2)))
    assert format_formula(simplify(phi)) == "j != 1 || X(1)"


def test_guards_of_running_example(running):
    table = guard_table(running)
    assert set(table) == {("X", 1), ("X", 2), ("Y", 1), ("Z", 1), ("Z", 2)}
    assert format_formula(table[("X", 1)]) == "i == 1 && j == 1"
    assert table[("X", 2)] == TRUE
    assert format_formula(table[("Z", 1)]) == "j == 2"
    assert table[("Z", 2)] == TRUE
    assert guard(1, Pvi("Y", ())) == TRUE
    with pytest.raises(IndexOutOfRange):
        guard(3, running.equation("X").rhs)
    with pytest.raises(IndexOutOfRange):
        guard(1, BoolTerm(Var("b", BOOL)))


def test_guarded_examples(running):
    b = BoolTerm(Var("b", BOOL))
    assert guarded(b) == b
    assert guarded(Pvi("X", ())) == And(TRUE, Pvi("X", ()))
    out = guarded(running.equation("X").rhs)
    text = format_formula(out)
    assert "i == 1 && j == 1 && X(2, j, k, l + 1)" in text
    assert "forall m: Nat65536 . true && Z(i, 2, m + k, k)" in text


def test_eval_examples():
    env = {"i": 1, "j": 1}
    assert eval_formula(Or(BoolTerm(Neq(i, c(1))), BoolTerm(Neq(j, c(1)))), {}, env) is False
    assert eval_formula(Pvi("X", (c(2),)), {("X", (2,)): True}) is True
    n3 = NatSort(2)
    assert eval_formula(Forall("m", n3, BoolTerm(Lt(Var("m", n3), Const(3, NatSort(3))))), {}) is True
    with pytest.raises(UnboundVariable):
        eval_formula(BoolTerm(Eq(i, c(1))), {}, {})


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_guard_soundness(phi):
    for idx in range(1, npred(phi) + 1):
        variant = replace_pvi(phi, idx, And(guard(idx, phi), pvi_at(phi, idx)))
        assert same_everywhere(phi, variant)


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_guarded_preserves_meaning(phi):
    assert same_everywhere(phi, guarded(phi))


@settings(max_examples=300, deadline=None)
@given(formulas())
def test_simplify_is_sound_idempotent_and_shrinks(phi):
    s = simplify(phi)
    assert same_everywhere(phi, s)
    assert simplify(s) == s
    assert significant(s) <= significant(phi)



def depth(phi):
    if isinstance(phi, (And, Or)):
        return 1 + max(depth(phi.left), depth(phi.right))
    return 0


def test_simplify_long_chain_stays_shallow():
    b = NatSort(7)
    x = Var("x", b)
    chain = Pvi("X", (Const(0, b),))
    for v in range(1, 3000):
        chain = And(chain, Or(BoolTerm(Neq(x, Const(v % 8, b))), Pvi("X", (Const(v % 8, b),))))
    out = simplify(chain)
    assert depth(out) < 20
    assert npred(out) == 9
