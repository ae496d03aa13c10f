"""Grounding of predicate formulae into positive Boolean expressions.

Under a full data environment every quantifier can be expanded and every
data term evaluated, leaving a Boolean expression over predicate variable
instances. Expressions are ``True``/``False``, an atom ``(name, args)``, or
a tagged tuple ``("&", items)`` / ``("|", items)``.
"""
from __future__ import annotations

import itertools

from .core import And, BoolTerm, Exists, Forall, Or, Pvi, eval_term

AND = "&"
OR = "|"


def is_atom(expr) -> bool:
    return type(expr) is tuple and len(expr) == 2 and type(expr[0]) is str and expr[0] not in (AND, OR)


def ground(phi, env: dict):
    """Evaluate data inside ``phi`` under ``env`` and expand quantifiers."""
    if isinstance(phi, BoolTerm):
        return bool(eval_term(phi.term, env))
    if isinstance(phi, Pvi):
        return (phi.name, tuple(eval_term(a, env) for a in phi.args))
    if isinstance(phi, (And, Or)):
        conj = isinstance(phi, And)
        parts = []
        _collect(phi, type(phi), env, parts)
        return make(AND if conj else OR, parts)
    conj = isinstance(phi, Forall)
    parts = []
    saved = env.get(phi.var, _MISSING)
    try:
        for value in phi.sort.domain():
            env[phi.var] = value
            parts.append(ground(phi.body, env))
            if parts[-1] is (not conj):
                break
    finally:
        if saved is _MISSING:
            env.pop(phi.var, None)
        else:
            env[phi.var] = saved
    return make(AND if conj else OR, parts)


_MISSING = object()


def instances(phi, env: dict, out=None) -> dict:
    """Every PVI instance of ``phi`` under ``env``, quantifiers expanded, in
    occurrence order, without Boolean short-circuiting. Returned as an
    ordered dict used as a set."""
    if out is None:
        out = {}
    if isinstance(phi, Pvi):
        out.setdefault((phi.name, tuple(eval_term(a, env) for a in phi.args)))
    elif isinstance(phi, (And, Or)):
        instances(phi.left, env, out)
        instances(phi.right, env, out)
    elif isinstance(phi, (Forall, Exists)):
        saved = env.get(phi.var, _MISSING)
        try:
            for value in phi.sort.domain():
                env[phi.var] = value
                instances(phi.body, env, out)
        finally:
            if saved is _MISSING:
                env.pop(phi.var, None)
            else:
                env[phi.var] = saved
    return out


def _collect(phi, cls, env, parts):
    if isinstance(phi, cls):
        _collect(phi.left, cls, env, parts)
        if parts and parts[-1] is (cls is Or):
            return
        _collect(phi.right, cls, env, parts)
    else:
        parts.append(ground(phi, env))


def make(op, parts):
    """Flattened, constant-folded, duplicate-free junction."""
    zero = op == OR
    out = []
    seen = set()
    for part in parts:
        if part is zero:
            return zero
        if part is (not zero):
            continue
        subs = part[1] if type(part) is tuple and part[0] == op else (part,)
        for sub in subs:
            if sub not in seen:
                seen.add(sub)
                out.append(sub)
    if not out:
        return not zero
    if len(out) == 1:
        return out[0]
    return (op, tuple(out))


def atoms(expr, out=None) -> list:
    """Distinct atoms of ``expr`` in first-occurrence order."""
    found = dict.fromkeys(out or ())
    stack = [expr]
    while stack:
        e = stack.pop()
        if e is True or e is False:
            continue
        if is_atom(e):
            found.setdefault(e)
        else:
            stack.extend(reversed(e[1]))
    return list(found)


def evaluate(expr, assignment) -> bool:
    if expr is True or expr is False:
        return expr
    if is_atom(expr):
        return assignment[expr]
    if expr[0] == AND:
        return all(evaluate(sub, assignment) for sub in expr[1])
    return any(evaluate(sub, assignment) for sub in expr[1])


def equivalent(a, b, max_atoms: int = 16):
    """Whether two ground expressions agree under every atom assignment.

    Returns None when there are too many atoms to enumerate.
    """
    if a == b:
        return True
    names = atoms(b, atoms(a))
    if len(names) > max_atoms:
        return None
    for bits in itertools.product((False, True), repeat=len(names)):
        assignment = dict(zip(names, bits))
        if evaluate(a, assignment) != evaluate(b, assignment):
            return False
    return True
