"""Unicity constraints: which values a parameter must have for a PVI to
matter (source), which value it is given by the PVI (target), and which
parameters are passed through unchanged (copy)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import (
    And,
    BoolSort,
    BoolTerm,
    Const,
    DNot,
    Eq,
    Pbes,
    Var,
    bound_vars,
    format_value,
    iter_pvis,
    npred,
    replace_pvi,
    subst_term,
)
from .ground import equivalent, ground
from .rewrite import conjuncts, environments, guard_table, simplify_term


@dataclass
class UnicityConstraint:
    """Partial maps keyed by (equation, PVI index, parameter index), 1-based.

    ``source`` and ``target`` hold plain values; ``copy`` holds the index of
    the parameter of the called equation that receives the copied value.
    """

    source: dict = field(default_factory=dict)
    target: dict = field(default_factory=dict)
    copy: dict = field(default_factory=dict)

    def to_json(self) -> list:
        entries = []
        for kind in ("source", "target", "copy"):
            table = getattr(self, kind)
            for (eq, i, j), value in sorted(table.items()):
                text = str(value) if kind == "copy" else format_value(value)
                entries.append({"eq": eq, "pvi": i, "param": j, "kind": kind, "value": text})
        return entries


def _guard_literal(conjunct, params):
    """(parameter index, value) for a conjunct ``d == e``, ``d``, or ``!d``."""
    if not isinstance(conjunct, BoolTerm):
        return None
    term = conjunct.term
    var = value = None
    if isinstance(term, Eq):
        if isinstance(term.left, Var) and isinstance(term.right, Const):
            var, value = term.left, term.right.value
        elif isinstance(term.right, Var) and isinstance(term.left, Const):
            var, value = term.right, term.left.value
    elif isinstance(term, Var) and isinstance(term.sort, BoolSort):
        var, value = term, True
    elif isinstance(term, DNot) and isinstance(term.arg, Var) and isinstance(term.arg.sort, BoolSort):
        var, value = term.arg, False
    if var is None:
        return None
    for j, (name, sort) in enumerate(params, start=1):
        if name == var.name and sort.contains(value):
            return j, value
    return None


def derive_unicity(pbes: Pbes, guards: dict | None = None) -> UnicityConstraint:
    """Read a unicity constraint off the guards and the PVI argument shapes."""
    if guards is None:
        guards = guard_table(pbes)
    u = UnicityConstraint()
    for eq in pbes.equations:
        shadowed = bound_vars(eq.rhs)
        params = [(n, s) for n, s in eq.params]
        visible = [(n, s) if n not in shadowed else (None, s) for n, s in params]
        for i, pvi in enumerate(iter_pvis(eq.rhs), start=1):
            callee = pbes.equation(pvi.name)
            known = {}
            for conjunct in conjuncts(guards[(eq.name, i)]):
                hit = _guard_literal(conjunct, visible)
                if hit is not None:
                    j, value = hit
                    known[j] = value
                    u.source[(eq.name, i, j)] = value
            binding = {params[j - 1][0]: Const(v, params[j - 1][1]) for j, v in known.items()}
            for k, arg in enumerate(pvi.args, start=1):
                if isinstance(arg, Var) and arg.name not in shadowed:
                    for n, (name, sort) in enumerate(params, start=1):
                        if name == arg.name and sort == callee.params[k - 1][1]:
                            u.copy.setdefault((eq.name, i, n), k)
                reduced = simplify_term(subst_term(arg, binding))
                if isinstance(reduced, Const) and callee.params[k - 1][1].contains(reduced.value):
                    u.target[(eq.name, i, k)] = reduced.value
            for (x, pi, n), k in u.copy.items():
                if x == eq.name and pi == i and n in known:
                    u.target[(x, pi, k)] = known[n]
    return u


# --------------------------------------------------------------------------
# Checking by enumeration


@dataclass(frozen=True)
class Violation:
    kind: str
    eq: str
    pvi: int
    param: int
    status: str  # "violated" or "unchecked"

    def __str__(self):
        return f"{self.kind}({self.eq},{self.pvi},{self.param}) {self.status}"


def check_unicity(pbes: Pbes, u: UnicityConstraint, max_envs: int = 10**6, max_atoms: int = 16) -> list:
    """Verify each entry's defining equivalence by exhaustive enumeration.

    An entry whose environment space exceeds ``max_envs`` (or whose grounded
    formula mentions more than ``max_atoms`` PVIs) is reported "unchecked".
    """
    out = []
    for kind in ("source", "target", "copy"):
        for (x, i, j), value in sorted(getattr(u, kind).items()):
            eq = pbes.equation(x)
            rhs = eq.rhs
            pvi = _nth_pvi(rhs, i)
            callee = pbes.equation(pvi.name)
            if kind == "source":
                cond = Eq(eq.var(j), Const(value, eq.params[j - 1][1]))
            elif kind == "target":
                cond = Eq(pvi.args[j - 1], Const(value, callee.params[j - 1][1]))
            else:
                cond = Eq(pvi.args[value - 1], eq.var(j))
            variant = replace_pvi(rhs, i, And(BoolTerm(cond), pvi))
            space = math.prod(s.size for _, s in eq.params)
            if space > max_envs:
                out.append(Violation(kind, x, i, j, "unchecked"))
                continue
            status = None
            for env in environments(eq.params):
                same = equivalent(ground(rhs, dict(env)), ground(variant, dict(env)), max_atoms)
                if same is None:
                    status = "unchecked"
                elif not same:
                    status = "violated"
                    break
            if status is not None:
                out.append(Violation(kind, x, i, j, status))
    return out


def _nth_pvi(phi, i):
    for k, pvi in enumerate(iter_pvis(phi), start=1):
        if k == i:
            return pvi
    raise IndexError(i)


def check_structure(pbes: Pbes, u: UnicityConstraint) -> list:
    """Structural invariants: indices in range, completion, coherence."""
    problems = []
    for kind in ("source", "target", "copy"):
        for (x, i, j), value in getattr(u, kind).items():
            eq = pbes.equation(x)
            if not 1 <= i <= npred(eq.rhs):
                problems.append(f"{kind}({x},{i},{j}): PVI index out of range")
                continue
            callee = pbes.equation(_nth_pvi(eq.rhs, i).name)
            width = len(callee.params) if kind == "target" else len(eq.params)
            if not 1 <= j <= width:
                problems.append(f"{kind}({x},{i},{j}): parameter index out of range")
            if kind == "copy" and not 1 <= value <= len(callee.params):
                problems.append(f"copy({x},{i},{j}) = {value}: out of range")
    for (x, i, n), m in u.copy.items():
        if (x, i, n) in u.source:
            if u.target.get((x, i, m), _MISSING) != u.source[(x, i, n)]:
                problems.append(f"completion fails at ({x},{i},{n})")
    return problems


_MISSING = object()
