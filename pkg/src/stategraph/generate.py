"""Seeded random PBESs and formulae for property tests and fuzzing.

Generated systems are small (at most three equations, four parameters per
equation, sorts with at most three values) and are shaped so that control
flow detection has something to find: parameters are drawn from a shared
pool, so equally named parameters agree on their sort, and PVI arguments are
mostly constants or copies of caller parameters guarded by equalities.
"""
from __future__ import annotations

import os
import random

from .core import (
    BOOL,
    And,
    BoolTerm,
    Const,
    DNot,
    DOr,
    Eq,
    EnumSort,
    Equation,
    Exists,
    Forall,
    Lt,
    NatSort,
    Neq,
    Or,
    Pbes,
    Plus,
    Pvi,
    Var,
    check_well_formed,
)

DEFAULT_SEED = 20240601

POOL = (
    ("a", BOOL),
    ("b", NatSort(2)),
    ("c", NatSort(1)),
    ("d", EnumSort(("red", "green", "blue"))),
    ("e", BOOL),
    ("f", NatSort(2)),
)


def corpus_seed(default: int = DEFAULT_SEED) -> int:
    """The corpus seed, overridable through ``STATEGRAPH_SEED``."""
    value = os.environ.get("STATEGRAPH_SEED")
    return int(value) if value else default


def _const(rng, sort):
    return Const(rng.choice(list(sort.domain())), sort)


def _same_sort(scope, sort):
    return [Var(n, s) for n, s in scope if s == sort]


def random_literal(rng, scope):
    """A PVI-free Boolean data term over ``scope`` (list of (name, sort))."""
    if not scope:
        return Const(rng.random() < 0.5, BOOL)
    name, sort = rng.choice(scope)
    var = Var(name, sort)
    roll = rng.random()
    if sort == BOOL:
        lit = var if roll < 0.5 else DNot(var)
    elif isinstance(sort, NatSort) and roll < 0.2:
        lit = Lt(var, _const(rng, sort)) if rng.random() < 0.5 else Lt(_const(rng, sort), var)
    elif roll < 0.65:
        lit = Eq(var, _const(rng, sort))
    else:
        lit = Neq(var, _const(rng, sort))
    if rng.random() < 0.15:
        lit = DOr(lit, random_literal(rng, scope))
    return lit


def random_argument(rng, scope, sort, want_name=None):
    """An argument of ``sort``: a copy, a constant, or a small expression."""
    same = _same_sort(scope, sort)
    preferred = [v for v in same if v.name == want_name]
    roll = rng.random()
    if preferred and roll < 0.45:
        return preferred[0]
    if roll < 0.75 or not same:
        return _const(rng, sort)
    var = rng.choice(same)
    if isinstance(sort, NatSort) and rng.random() < 0.4:
        return Plus(var, Const(1, sort))
    if sort == BOOL and rng.random() < 0.3:
        return DNot(var)
    return var


def _pvi(rng, scope, signatures):
    name = rng.choice(sorted(signatures))
    args = tuple(random_argument(rng, scope, sort, pname) for pname, sort in signatures[name])
    return Pvi(name, args)


def random_formula(rng, scope, signatures, depth: int = 3, bound: int = 0):
    """A random predicate formula.

    ``signatures`` maps predicate names to their parameter lists; PVIs are
    only generated when it is non-empty.
    """
    roll = rng.random()
    if depth <= 0 or roll < 0.25:
        if signatures and rng.random() < 0.55:
            return _pvi(rng, scope, signatures)
        return BoolTerm(random_literal(rng, scope))
    if roll < 0.45 and signatures:
        # guarded call, the typical shape of control flow
        guard = BoolTerm(random_literal(rng, scope))
        call = _pvi(rng, scope, signatures)
        return And(guard, call) if rng.random() < 0.5 else Or(guard, call)
    if roll < 0.55 and bound < 2:
        name = f"m{bound}"
        sort = rng.choice([BOOL, NatSort(1), NatSort(2)])
        inner = scope + [(name, sort)]
        body = random_formula(rng, inner, signatures, depth - 1, bound + 1)
        return (Forall if rng.random() < 0.5 else Exists)(name, sort, body)
    left = random_formula(rng, scope, signatures, depth - 1, bound)
    right = random_formula(rng, scope, signatures, depth - 1, bound)
    return And(left, right) if rng.random() < 0.5 else Or(left, right)


def random_pbes(rng: random.Random, max_equations: int = 3, max_params: int = 4, depth: int = 3) -> Pbes:
    """A closed, well-formed random PBES."""
    count = rng.randint(1, max_equations)
    names = [f"X{k}" for k in range(count)]
    signatures = {}
    for name in names:
        width = rng.randint(0, max_params)
        params = rng.sample(POOL, width)
        if rng.random() < 0.6:
            params.sort(key=POOL.index)
        signatures[name] = tuple(params)
    equations = []
    for name in names:
        scope = list(signatures[name])
        rhs = random_formula(rng, scope, signatures, depth)
        sign = rng.choice(("mu", "nu"))
        equations.append(Equation(sign, name, signatures[name], rhs))
    init_name = names[0]
    init = Pvi(init_name, tuple(_const(rng, s) for _, s in signatures[init_name]))
    pbes = Pbes(tuple(equations), init)
    check_well_formed(pbes)
    return pbes


def corpus(count: int, seed: int | None = None, **kwargs):
    """``count`` random PBESs from one seeded stream."""
    rng = random.Random(corpus_seed() if seed is None else seed)
    return [random_pbes(rng, **kwargs) for _ in range(count)]


def exponential_family(n: int) -> Pbes:
    """``nu X(i1..in: Bool)``: a disjunction that flips any one flag, so all
    2^n valuations of the flags are reachable from the all-true init."""
    params = tuple((f"i{k}", BOOL) for k in range(1, n + 1))
    rhs = None
    for k in range(1, n + 1):
        flag = Var(f"i{k}", BOOL)
        for literal, new in ((flag, False), (DNot(flag), True)):
            args = tuple(
                Const(new, BOOL) if j == k else Var(name, BOOL)
                for j, (name, _) in enumerate(params, start=1)
            )
            part = And(BoolTerm(literal), Pvi("X", args))
            rhs = part if rhs is None else Or(rhs, part)
    pbes = Pbes(
        (Equation("nu", "X", params, rhs if rhs is not None else BoolTerm(Const(True, BOOL))),),
        Pvi("X", tuple(Const(True, BOOL) for _ in params)),
    )
    check_well_formed(pbes)
    return pbes
