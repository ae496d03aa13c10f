"""Formula analyses: significant parameters, simplification, guards, evaluation."""
from __future__ import annotations

import itertools
from typing import Callable, Mapping

from .core import (
    BOOL,
    FALSE,
    T_FALSE,
    T_TRUE,
    balanced,
    TRUE,
    And,
    BoolTerm,
    Const,
    DAnd,
    DNot,
    DOr,
    EnumSort,
    Eq,
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
    eval_term,
    free_vars,
    is_false,
    is_ground,
    is_true,
    map_pvis,
    npred,
    sort_of,
    subst_term,
    substitute,
    term_vars,
)
from .errors import IndexOutOfRange, UnboundVariable

EXPAND_LIMIT = 4


def significant(phi) -> set:
    """Variables that may influence the truth value of ``phi`` outside PVIs."""
    if isinstance(phi, BoolTerm):
        return term_vars(phi.term)
    if isinstance(phi, Pvi):
        return set()
    if isinstance(phi, (And, Or)):
        return significant(phi.left) | significant(phi.right)
    if isinstance(phi, (Forall, Exists)):
        return significant(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


# --------------------------------------------------------------------------
# Data-term simplification


def _flatten(term, cls, out):
    if isinstance(term, cls):
        _flatten(term.left, cls, out)
        _flatten(term.right, cls, out)
    else:
        out.append(term)
    return out


def _build(items, cls, unit):
    return balanced(items, cls, unit)


def _is_const(term, value):
    return isinstance(term, Const) and type(term.value) is type(value) and term.value == value


def _var_const(term):
    """(var, const) when ``term`` compares a variable with a literal."""
    left, right = term.left, term.right
    if isinstance(left, Var) and isinstance(right, Const):
        return left, right
    if isinstance(right, Var) and isinstance(left, Const):
        return right, left
    return None


def _in_domain(value, sort):
    if isinstance(sort, NatSort):
        return type(value) is int and 0 <= value <= sort.max
    if isinstance(sort, EnumSort):
        return value in sort.values
    return type(value) is bool


def negate_term(term):
    """A negation-normal form of ``not term`` for Boolean data terms."""
    if isinstance(term, Const):
        return Const(not term.value, BOOL)
    if isinstance(term, DNot):
        return term.arg
    if isinstance(term, Eq):
        return Neq(term.left, term.right)
    if isinstance(term, Neq):
        return Eq(term.left, term.right)
    if isinstance(term, Lt):
        return DOr(Lt(term.right, term.left), Eq(term.left, term.right))
    if isinstance(term, DAnd):
        return DOr(negate_term(term.left), negate_term(term.right))
    if isinstance(term, DOr):
        return DAnd(negate_term(term.left), negate_term(term.right))
    return DNot(term)


def _complementary(a, b):
    if isinstance(a, DNot) and a.arg == b or isinstance(b, DNot) and b.arg == a:
        return True
    if isinstance(a, Eq) and isinstance(b, Neq) or isinstance(a, Neq) and isinstance(b, Eq):
        return (a.left, a.right) in ((b.left, b.right), (b.right, b.left))
    return False


def _simplify_term_once(term):
    if isinstance(term, (Const, Var)):
        return term
    if is_ground(term):
        value = eval_term(term, {})
        return Const(value, BOOL) if type(value) is bool else Const(value, sort_of(term))
    if isinstance(term, DNot):
        arg = _simplify_term_once(term.arg)
        if isinstance(arg, Const):
            return Const(not arg.value, BOOL)
        if isinstance(arg, (DNot, Eq, Neq)):
            return negate_term(arg)
        return DNot(arg)
    if isinstance(term, (DAnd, DOr)):
        return _simplify_junction(term)
    left = _simplify_term_once(term.left)
    right = _simplify_term_once(term.right)
    if isinstance(term, Plus):
        if _is_const(right, 0):
            return left
        if _is_const(left, 0):
            return right
        return Plus(left, right)
    if isinstance(term, (Eq, Neq)):
        positive = isinstance(term, Eq)
        if left == right:
            return T_TRUE if positive else T_FALSE
        vc = _var_const(type(term)(left, right))
        if vc is not None and not _in_domain(vc[1].value, vc[0].sort):
            return T_FALSE if positive else T_TRUE
        if vc is not None and isinstance(vc[0].sort, NatSort) and vc[0].sort.max == 0:
            return T_TRUE if positive else T_FALSE
        if vc is not None and isinstance(vc[0].sort, EnumSort) and len(vc[0].sort.values) == 1:
            return T_TRUE if positive else T_FALSE
        return type(term)(left, right)
    if isinstance(term, Lt):
        if left == right or _is_const(right, 0):
            return T_FALSE
        if isinstance(left, Var) and isinstance(right, Const) and isinstance(left.sort, NatSort):
            if right.value > left.sort.max:
                return T_TRUE
        if isinstance(left, Const) and isinstance(right, Var) and isinstance(right.sort, NatSort):
            if left.value >= right.sort.max:
                return T_FALSE
        return Lt(left, right)
    raise TypeError(f"not a data term: {term!r}")


def _simplify_junction(term):
    cls = type(term)
    conj = cls is DAnd
    zero, unit = (T_FALSE, T_TRUE) if conj else (T_TRUE, T_FALSE)
    items = []
    for raw in _flatten(term, cls, []):
        item = _simplify_term_once(raw)
        if item == unit:
            continue
        if item == zero:
            return zero
        for sub in _flatten(item, cls, []):
            if sub not in items:
                items.append(sub)
    for a, b in itertools.combinations(items, 2):
        if _complementary(a, b):
            return zero
    if conj:
        # x == c1 && x == c2 with distinct literals is unsatisfiable.
        fixed = {}
        for item in items:
            if isinstance(item, Eq):
                vc = _var_const(item)
                if vc is not None:
                    seen = fixed.setdefault(vc[0], vc[1])
                    if seen != vc[1]:
                        return zero
    else:
        banned = {}
        for item in items:
            if isinstance(item, Neq):
                vc = _var_const(item)
                if vc is not None:
                    seen = banned.setdefault(vc[0], vc[1])
                    if seen != vc[1]:
                        return zero
    # Absorption: a && (a || b) == a, and dually.
    dual = DOr if conj else DAnd
    kept = []
    for k, item in enumerate(items):
        if isinstance(item, dual):
            parts = _flatten(item, dual, [])
            if any(other in parts for j, other in enumerate(items) if j != k and not isinstance(other, dual)):
                continue
        kept.append(item)
    return _build(kept, cls, unit)


def simplify_term(term):
    for _ in range(64):
        nxt = _simplify_term_once(term)
        if nxt == term:
            return term
        term = nxt
    return term


# --------------------------------------------------------------------------
# Formula simplification


def _simplify_once(phi):
    if isinstance(phi, BoolTerm):
        term = simplify_term(phi.term)
        return phi if term == phi.term else BoolTerm(term)
    if isinstance(phi, Pvi):
        return phi
    if isinstance(phi, (And, Or)):
        return _simplify_connective(phi)
    if isinstance(phi, (Forall, Exists)):
        return _simplify_quantifier(phi)
    raise TypeError(f"not a formula: {phi!r}")


def _flatten_formula(phi, cls, out):
    stack = [phi]
    while stack:
        item = stack.pop()
        if isinstance(item, cls):
            stack.append(item.right)
            stack.append(item.left)
        else:
            out.append(item)
    return out


def _simplify_connective(phi):
    cls = type(phi)
    conj = cls is And
    data_cls = DAnd if conj else DOr
    zero = FALSE if conj else TRUE
    seen = {}
    for raw in _flatten_formula(phi, cls, []):
        item = _simplify_once(raw)
        for sub in _flatten_formula(item, cls, []):
            if (is_true(sub) and conj) or (is_false(sub) and not conj):
                continue
            if sub == zero:
                return zero
            seen.setdefault(sub)
    items = list(seen)
    # Merge all PVI-free data leaves into one Boolean term at the position of
    # the first one, so the data simplifier can see them together.
    data = [item.term for item in items if isinstance(item, BoolTerm)]
    if len(data) > 1:
        merged = BoolTerm(simplify_term(_build(data, data_cls, None)))
        out = []
        placed = False
        for item in items:
            if isinstance(item, BoolTerm):
                if not placed:
                    out.append(merged)
                    placed = True
            else:
                out.append(item)
        items = out
        if merged == zero:
            return zero
        if (is_true(merged) and conj) or (is_false(merged) and not conj):
            items = [item for item in items if item is not merged]
    if not items:
        return TRUE if conj else FALSE
    items = _propagate_context(items, conj, data_cls)
    return _build(items, cls, None)


def _context_binding(items, conj, data_cls):
    """Values a junction's data literals force on the other operands.

    In ``x == c && psi`` the operand ``psi`` only matters when ``x`` is
    ``c``; in ``x != c || psi`` likewise. Boolean variables work the same
    way with their polarity flipped for disjunctions.
    """
    binding = {}
    for item in items:
        if not isinstance(item, BoolTerm):
            continue
        for lit in _flatten(item.term, data_cls, []):
            if isinstance(lit, Eq if conj else Neq):
                vc = _var_const(lit)
                if vc is not None:
                    binding.setdefault(vc[0].name, Const(vc[1].value, vc[0].sort))
            elif isinstance(lit, Var) and lit.sort == BOOL:
                binding.setdefault(lit.name, Const(conj, BOOL))
            elif isinstance(lit, DNot) and isinstance(lit.arg, Var):
                binding.setdefault(lit.arg.name, Const(not conj, BOOL))
    return binding


def _propagate_context(items, conj, data_cls):
    binding = _context_binding(items, conj, data_cls)
    if not binding:
        return items
    out = []
    for item in items:
        if isinstance(item, BoolTerm):
            out.append(item)
            continue
        out.append(_substitute_leaves(item, binding))
    return out


def _substitute_leaves(phi, binding):
    """Substitute into data leaves only; PVI arguments are left as written."""
    if isinstance(phi, BoolTerm):
        if not term_vars(phi.term) & binding.keys():
            return phi
        return BoolTerm(subst_term(phi.term, binding))
    if isinstance(phi, (And, Or)):
        return type(phi)(_substitute_leaves(phi.left, binding), _substitute_leaves(phi.right, binding))
    if isinstance(phi, (Forall, Exists)):
        inner = {k: v for k, v in binding.items() if k != phi.var}
        return type(phi)(phi.var, phi.sort, _substitute_leaves(phi.body, inner)) if inner else phi
    return phi


def _simplify_quantifier(phi):
    body = _simplify_once(phi.body)
    if phi.var not in free_vars(body):
        return body
    if npred(body) == 0 and phi.sort.size <= EXPAND_LIMIT:
        parts = [
            _simplify_once(substitute(body, {phi.var: Const(v, phi.sort)}))
            for v in phi.sort.domain()
        ]
        cls = And if isinstance(phi, Forall) else Or
        expanded = _simplify_once(_build(parts, cls, None))
        if isinstance(expanded, BoolTerm) and isinstance(expanded.term, Const):
            return expanded
        if significant(expanded) < significant(body) - {phi.var}:
            return expanded
    return type(phi)(phi.var, phi.sort, body)


def simplify(phi):
    """An equivalent formula, usually smaller and with fewer significant vars."""
    for _ in range(64):
        nxt = _simplify_once(phi)
        if nxt == phi:
            return phi
        phi = nxt
    return phi


# --------------------------------------------------------------------------
# Guards


def negate(phi):
    """Negation of a PVI-free formula, pushed down to data comparisons."""
    if isinstance(phi, BoolTerm):
        return BoolTerm(negate_term(phi.term))
    if isinstance(phi, And):
        return Or(negate(phi.left), negate(phi.right))
    if isinstance(phi, Or):
        return And(negate(phi.left), negate(phi.right))
    if isinstance(phi, Forall):
        return Exists(phi.var, phi.sort, negate(phi.body))
    if isinstance(phi, Exists):
        return Forall(phi.var, phi.sort, negate(phi.body))
    raise ValueError("cannot negate a formula containing PVIs")


def _s(chi):
    return chi if npred(chi) == 0 else TRUE


def _guard(i, phi):
    if isinstance(phi, Pvi):
        return TRUE
    if isinstance(phi, BoolTerm):
        return FALSE
    if isinstance(phi, (Forall, Exists)):
        return _guard(i, phi.body)
    n_left = npred(phi.left)
    if i <= n_left:
        other, inner = phi.right, _guard(i, phi.left)
    else:
        other, inner = phi.left, _guard(i - n_left, phi.right)
    if isinstance(phi, And):
        return And(_s(other), inner)
    return And(_s(negate(other)) if npred(other) == 0 else TRUE, inner)


def guard(i: int, phi):
    """A necessary condition for ``phi``'s value to depend on its i-th PVI."""
    n = npred(phi)
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"PVI index {i} outside 1..{n}")
    return simplify(_guard(i, phi))


def guarded(phi):
    """``phi`` with every PVI conjoined with its own guard."""
    guards = {i: guard(i, phi) for i in range(1, npred(phi) + 1)}
    return map_pvis(phi, lambda i, pvi: And(guards[i], pvi))


def guard_table(pbes: Pbes) -> dict:
    """(equation name, PVI index) -> guard, for every PVI of every equation."""
    table = {}
    for eq in pbes.equations:
        for i in range(1, npred(eq.rhs) + 1):
            table[(eq.name, i)] = guard(i, eq.rhs)
    return table


def conjuncts(phi) -> list:
    """Top-level conjuncts of a formula, looking through Boolean data terms."""
    if isinstance(phi, And):
        return conjuncts(phi.left) + conjuncts(phi.right)
    if isinstance(phi, BoolTerm):
        return [BoolTerm(t) for t in _flatten(phi.term, DAnd, [])]
    return [phi]


# --------------------------------------------------------------------------
# Evaluation


def eval_formula(phi, penv, denv: Mapping | None = None) -> bool:
    """Truth value of ``phi``.

    ``penv`` is either a mapping from ``(name, args)`` to bool or a callable
    ``penv(name, args)``; ``denv`` maps data variables to values.
    """
    lookup: Callable = penv if callable(penv) else (lambda name, args: _lookup(penv, name, args))
    return _eval(phi, lookup, dict(denv or {}))


def _lookup(penv, name, args):
    try:
        return penv[(name, args)]
    except KeyError:
        raise UnboundVariable(f"no value for {name}{args}") from None


def _eval(phi, lookup, env):
    if isinstance(phi, BoolTerm):
        return bool(eval_term(phi.term, env))
    if isinstance(phi, Pvi):
        return bool(lookup(phi.name, tuple(eval_term(a, env) for a in phi.args)))
    if isinstance(phi, And):
        return _eval(phi.left, lookup, env) and _eval(phi.right, lookup, env)
    if isinstance(phi, Or):
        return _eval(phi.left, lookup, env) or _eval(phi.right, lookup, env)
    want_all = isinstance(phi, Forall)
    saved = env.get(phi.var, _MISSING)
    try:
        for value in phi.sort.domain():
            env[phi.var] = value
            if _eval(phi.body, lookup, env) != want_all:
                return not want_all
        return want_all
    finally:
        if saved is _MISSING:
            env.pop(phi.var, None)
        else:
            env[phi.var] = saved


_MISSING = object()


def environments(params):
    """Every assignment of values to ``params`` (a list of (name, sort))."""
    names = [n for n, _ in params]
    for values in itertools.product(*(s.domain() for _, s in params)):
        yield dict(zip(names, values))


def bind_values(params, values) -> dict:
    """Substitution binding each parameter to a typed literal."""
    return {name: Const(v, sort) for (name, sort), v in zip(params, values)}


def instantiate_term(term, binding):
    return simplify_term(subst_term(term, binding))
