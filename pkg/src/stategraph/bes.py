"""Instantiation of a PBES to a BES, and BES solving.

BES variables are ``(name, args)`` pairs; right-hand sides are the ground
expressions of :mod:`stategraph.ground`.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import networkx as nx

from .core import Pbes, eval_term, format_value
from .errors import InstantiationDiverged
from .ground import AND, OR, atoms, ground, instances, is_atom, make
from .kernels import attractor

DEFAULT_LIMIT = 10**5


@dataclass
class Bes:
    """Equations ``(sign, variable, rhs)`` in solution-priority order."""

    equations: list
    init: tuple
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {var: k for k, (_, var, _) in enumerate(self.equations)}

    def __len__(self):
        return len(self.equations)

    def position(self, var) -> int:
        return self._index[var]

    def edge_count(self) -> int:
        return sum(len(atoms(rhs)) for _, _, rhs in self.equations)


def format_var(var) -> str:
    name, args = var
    return f"{name}(" + ",".join(format_value(a) for a in args) + ")"


def format_expr(expr, top=True) -> str:
    if expr is True:
        return "true"
    if expr is False:
        return "false"
    if is_atom(expr):
        return format_var(expr)
    op = " && " if expr[0] == AND else " || "
    text = op.join(format_expr(sub, top=False) for sub in expr[1])
    return text if top else f"({text})"


def dump_bes(bes: Bes) -> str:
    lines = [f"{sign} {format_var(var)} = {format_expr(rhs)};" for sign, var, rhs in bes.equations]
    lines.append(f"init {format_var(bes.init)};")
    return "\n".join(lines) + "\n"


def instantiate(pbes: Pbes, limit: int = DEFAULT_LIMIT, prune: bool = False) -> Bes:
    """Breadth-first instantiation from the init variable.

    Every PVI instance left after evaluating the data terms of a right-hand
    side becomes a variable, even one that Boolean folding then removes from
    the equation. With ``prune`` only instances that survive folding are
    explored, which can give a smaller BES with the same solution.

    Raises InstantiationDiverged as soon as more than ``limit`` distinct
    variables have been discovered.
    """
    if limit < 1:
        raise ValueError("limit must be at least 1")
    info = {eq.name: (k, eq) for k, eq in enumerate(pbes.equations)}
    start = (pbes.init.name, tuple(eval_term(a, {}) for a in pbes.init.args))
    seen = {start: 0}
    order = [start]
    rhs = {}
    queue = deque([start])
    while queue:
        var = queue.popleft()
        _, eq = info[var[0]]
        env = dict(zip(eq.param_names, var[1]))
        expr = ground(eq.rhs, env)
        rhs[var] = expr
        for atom in atoms(expr) if prune else instances(eq.rhs, env):
            if atom not in seen:
                seen[atom] = len(order)
                order.append(atom)
                if len(order) > limit:
                    raise InstantiationDiverged(limit, len(order))
                queue.append(atom)
    ranked = sorted(order, key=lambda v: (info[v[0]][0], seen[v]))
    equations = [(info[v[0]][1].sign, v, rhs[v]) for v in ranked]
    return Bes(equations, start)


# --------------------------------------------------------------------------
# Solving


def substitute_expr(expr, values: dict):
    """Replace atoms that have an entry in ``values`` and re-fold."""
    if expr is True or expr is False:
        return expr
    if is_atom(expr):
        return values.get(expr, expr)
    return make(expr[0], [substitute_expr(sub, values) for sub in expr[1]])


def _uniform_solve(sign, members, rhs):
    """Solve an SCC whose equations share one fixpoint sign."""
    index = {v: k for k, v in enumerate(members)}
    eager = []
    succ = []
    # For mu we compute the set of true variables (OR is eager); for nu the
    # set of false variables (AND is eager).
    eager_op = OR if sign == "mu" else AND

    def node(expr):
        k = len(eager)
        if expr is True or expr is False:
            # true is an empty conjunction, false an empty disjunction
            eager.append((AND if expr else OR) == eager_op)
            succ.append([])
            return k
        if is_atom(expr):
            eager.append(True)
            succ.append([index[expr]])
            return k
        eager.append(expr[0] == eager_op)
        succ.append(None)
        succ[k] = [sub_node(sub) for sub in expr[1]]
        return k

    def sub_node(expr):
        if is_atom(expr):
            return index[expr]
        return node(expr)

    # variable nodes first so that index[v] is the node of v
    for v in members:
        eager.append(None)
        succ.append(None)
    for v in members:
        expr = rhs[v]
        k = index[v]
        if expr is True or expr is False:
            eager[k] = (AND if expr else OR) == eager_op
            succ[k] = []
        elif is_atom(expr):
            eager[k] = True
            succ[k] = [index[expr]]
        else:
            eager[k] = expr[0] == eager_op
            succ[k] = [sub_node(sub) for sub in expr[1]]
    indptr = [0]
    flat = []
    for s in succ:
        flat.extend(s)
        indptr.append(len(flat))
    won = attractor(eager, indptr, flat)
    winner_value = sign == "mu"
    return {v: (won[index[v]] == winner_value) for v in members}


def _gauss(block, rhs):
    """Gauss elimination on ``block`` (variables in priority order) whose
    right-hand sides mention only variables of the block."""
    signs = {v: s for s, v in block}
    order = [v for _, v in block]
    f = {v: rhs[v] for v in order}
    for k in range(len(order) - 1, -1, -1):
        x = order[k]
        f[x] = substitute_expr(f[x], {x: signs[x] == "nu"})
        for j in range(k):
            y = order[j]
            if x in atoms(f[y]):
                f[y] = substitute_expr(f[y], {x: f[x]})
    solution = {}
    for x in order:
        value = substitute_expr(f[x], solution)
        if value is not True and value is not False:
            raise AssertionError(f"Gauss elimination left {format_expr(value)} open")
        solution[x] = value
    return solution


def solve_bes(bes: Bes) -> dict:
    """Solve every variable: SCCs in reverse topological order, uniform
    components with the attractor kernel, mixed ones by Gauss elimination."""
    graph = nx.DiGraph()
    rhs = {}
    signs = {}
    for sign, var, expr in bes.equations:
        graph.add_node(var)
        rhs[var] = expr
        signs[var] = sign
        for atom in atoms(expr):
            graph.add_edge(var, atom)
    condensed = nx.condensation(graph)
    solution = {}
    for comp in reversed(list(nx.topological_sort(condensed))):
        members = sorted(condensed.nodes[comp]["members"], key=bes.position)
        local = {v: substitute_expr(rhs[v], solution) for v in members}
        comp_signs = {signs[v] for v in members}
        if len(comp_signs) == 1:
            solution.update(_uniform_solve(comp_signs.pop(), members, local))
        else:
            solution.update(_gauss([(signs[v], v) for v in members], local))
    return solution


def gauss_eliminate(bes: Bes) -> dict:
    """Plain Gauss elimination over the whole BES (no SCC split).

    Expressions may grow quickly; meant for small systems and cross-checks.
    """
    rhs = {var: expr for _, var, expr in bes.equations}
    return _gauss([(sign, var) for sign, var, _ in bes.equations], rhs)


def solve_pbes(pbes: Pbes, limit: int = DEFAULT_LIMIT, prune: bool = False) -> bool:
    bes = instantiate(pbes, limit, prune)
    return solve_bes(bes)[bes.init]


def bes_stats(bes: Bes, solution: dict | None = None) -> dict:
    return {
        "variables": len(bes),
        "edges": bes.edge_count(),
        "solve_result": None if solution is None else solution[bes.init],
    }
