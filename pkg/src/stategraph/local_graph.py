"""Local control flow graphs: one small subgraph per CFP instead of one
graph over the product of all CFP valuations.

Vertices are ``(X, n, v)``: equation ``X``, CFP index ``n`` (1-based) and a
value ``v`` of that CFP. When some data parameter belongs to no real CFP a
virtual single-valued CFP with index ``ncfp + 1`` and value ``DUMMY`` is
added; it rules every PVI, so every data parameter belongs to it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .core import Const, Var, free_vars, iter_pvis, substitute, term_vars
from .global_graph import pvi_table, values
from .rewrite import guard_table, significant, simplify

DUMMY = "*"


@dataclass
class LocalControlFlowGraph:
    vertices: list
    edges: list  # ((X, n, v), i, (Y, n, w))
    ncfp: int  # number of real CFPs
    values: dict  # CFP index -> list of values
    dummy: int | None = None  # index of the virtual CFP, if any
    _out: dict = field(default_factory=dict, repr=False)

    @property
    def width(self):
        return self.ncfp + (1 if self.dummy else 0)

    def out_edges(self, vertex):
        return self._out.get(vertex, [])

    def rules(self, n, x, i) -> bool:
        """Whether CFP ``n`` rules PVI ``i`` of equation ``x``."""
        return any(
            (j == i) for v in self.values[n] for j, _ in self._out.get((x, n, v), ())
        )


def _local_edge_targets(u, x, callee, i, n, v):
    key = (x, i, n)
    if key in u.source:
        if u.source[key] == v and key in u.target:
            return [u.target[key]]
        return []
    if callee == x:
        return []
    out = []
    if key in u.target:
        out.append(u.target[key])
    if u.copy.get(key) == n and v not in out:
        out.append(v)
    return out


def build_local_cfg(nf, u, with_dummy: bool = False) -> LocalControlFlowGraph:
    """All vertices ``(X, n, v)`` with ``v`` in values(c_n), plus edges."""
    pbes = nf.pbes
    pvis = pvi_table(pbes)
    vals = {n: values(nf, u, n) for n in range(1, nf.ncfp + 1)}
    dummy = None
    if with_dummy:
        dummy = nf.ncfp + 1
        vals[dummy] = [DUMMY]
    vertices = []
    edges = []
    out = {}
    for eq in pbes.equations:
        for n in sorted(vals):
            for v in vals[n]:
                vertex = (eq.name, n, v)
                vertices.append(vertex)
                lst = out.setdefault(vertex, [])
                for i, pvi in enumerate(pvis[eq.name], start=1):
                    if n == dummy:
                        targets = [DUMMY]
                    else:
                        targets = _local_edge_targets(u, eq.name, pvi.name, i, n, v)
                    for w in targets:
                        dst = (pvi.name, n, w)
                        edges.append((vertex, i, dst))
                        lst.append((i, dst))
    return LocalControlFlowGraph(vertices, edges, nf.ncfp, vals, dummy, out)


@dataclass
class Usage:
    used_for: set
    used_in: set
    changed: set


def usage_relations(nf, guards: dict | None = None) -> dict:
    """(X, i) -> which parameters of X the i-th PVI uses or changes."""
    pbes = nf.pbes
    if guards is None:
        guards = guard_table(pbes)
    out = {}
    for eq in pbes.equations:
        names = [n for n, _ in eq.params]
        for i, pvi in enumerate(iter_pvis(eq.rhs), start=1):
            used_for = set(names) & free_vars(guards[(eq.name, i)])
            used_in = set()
            for k, arg in enumerate(pvi.args):
                free = term_vars(arg)
                for j, name in enumerate(names):
                    if name in free and not (pvi.name == eq.name and k == j):
                        used_in.add(name)
            changed = set()
            if pvi.name == eq.name:
                for j, name in enumerate(names):
                    arg = pvi.args[j]
                    if not (isinstance(arg, Var) and arg.name == name):
                        changed.add(name)
            out[(eq.name, i)] = Usage(used_for, used_in, changed)
    return out


def belongs_to(nf, lcfg: LocalControlFlowGraph, rel: dict) -> dict:
    """(X, n) -> data parameters of X whose whole dataflow CFP n controls."""
    pbes = nf.pbes
    out = {}
    for eq in pbes.equations:
        data = [n for n, _ in eq.params[nf.ncfp :]]
        npvi = sum(1 for _ in iter_pvis(eq.rhs))
        for n in range(1, lcfg.width + 1):
            ruled = {i for i in range(1, npvi + 1) if lcfg.rules(n, eq.name, i)}
            members = set()
            for d in data:
                ok = True
                for i in range(1, npvi + 1):
                    use = rel[(eq.name, i)]
                    involved = d in use.used_for or d in use.used_in or d in use.changed
                    if involved and i not in ruled:
                        ok = False
                        break
                if ok:
                    members.add(d)
            out[(eq.name, n)] = members
    return out


def needs_dummy(nf, bt: dict, width: int) -> bool:
    for eq in nf.pbes.equations:
        for d, _ in eq.params[nf.ncfp :]:
            if not any(d in bt.get((eq.name, n), ()) for n in range(1, width + 1)):
                return True
    return False


def local_base(nf, x, n, v, members):
    eq = nf.pbes.equation(x)
    if n <= nf.ncfp:
        name, sort = eq.params[n - 1]
        rhs = substitute(eq.rhs, {name: Const(v, sort)})
    else:
        rhs = eq.rhs
    return significant(simplify(rhs)) & members


def label_local(nf, lcfg: LocalControlFlowGraph, bt: dict) -> dict:
    """Least fixpoint of the base, internal and external clauses."""
    pbes = nf.pbes
    pvis = pvi_table(pbes)
    params = {eq.name: [n for n, _ in eq.params] for eq in pbes.equations}
    labels = {
        (x, n, v): local_base(nf, x, n, v, bt[(x, n)]) for x, n, v in lcfg.vertices
    }
    # Edges grouped by (X, i, m): every (v', w') with (X,m,v') ->i (Y,m,w').
    by_pvi = {}
    for (x, m, vp), i, (y, _, wp) in lcfg.edges:
        by_pvi.setdefault((x, i), []).append((m, (y, m, wp)))
    arg_vars = {
        (x, i): [term_vars(a) for a in pvi.args]
        for x in pvis
        for i, pvi in enumerate(pvis[x], start=1)
    }
    changed = True
    while changed:
        changed = False
        for vertex in lcfg.vertices:
            x, n, v = vertex
            members = bt[(x, n)]
            current = labels[vertex]
            add = set()
            ruled_here = set()
            for i, dst in lcfg.out_edges(vertex):
                ruled_here.add(i)
                y = dst[0]
                for ell, pname in enumerate(params[y]):
                    if pname in labels[dst]:
                        add |= arg_vars[(x, i)][ell] & members
            for i in ruled_here:
                for m, dst in by_pvi.get((x, i), ()):
                    if m == n:
                        continue
                    y = dst[0]
                    outside = bt[(y, n)]
                    for ell, pname in enumerate(params[y]):
                        if pname in labels[dst] and pname not in outside:
                            add |= arg_vars[(x, i)][ell] & members
            add -= current
            if add:
                current |= add
                changed = True
    return labels


class InducedLabelling:
    """Read-only mapping (X, v) -> live data parameters, computed on demand
    from a local labelling for any valuation ``v`` of the real CFPs."""

    def __init__(self, nf, local: dict, bt: dict, lcfg: LocalControlFlowGraph):
        self.nf = nf
        self.local = local
        self.bt = bt
        self.width = lcfg.width
        self.dummy = lcfg.dummy
        self.values = lcfg.values
        self._cache = {}

    def _compute(self, x, valuation):
        eq = self.nf.pbes.equation(x)
        out = set()
        for d, _ in eq.params[self.nf.ncfp :]:
            live = True
            for k in range(1, self.width + 1):
                if d not in self.bt[(x, k)]:
                    continue
                value = DUMMY if k == self.dummy else valuation[k - 1]
                if d not in self.local.get((x, k, value), ()):
                    live = False
                    break
            if live:
                out.add(d)
        return out

    def __getitem__(self, vertex):
        if vertex not in self._cache:
            x, valuation = vertex
            for k, value in enumerate(valuation, start=1):
                if value not in self.values[k]:
                    raise KeyError(vertex)
            self._cache[vertex] = self._compute(x, valuation)
        return self._cache[vertex]

    def get(self, vertex, default=None):
        try:
            return self[vertex]
        except KeyError:
            return default

    def __contains__(self, vertex):
        return self.get(vertex) is not None


def induced_labelling(ll: dict, bt: dict, cfg, nf=None, lcfg=None) -> dict:
    """The induced labelling restricted to the vertices of ``cfg``."""
    lazy = InducedLabelling(nf, ll, bt, lcfg)
    return {v: set(lazy[v]) for v in cfg.vertices}


@dataclass
class LocalAnalysis:
    lcfg: LocalControlFlowGraph
    usage: dict
    belongs: dict
    labels: dict
    induced: InducedLabelling


def analyse_local(nf, u, guards=None) -> LocalAnalysis:
    """Build the LCFG, add a dummy CFP if needed, and label it."""
    rel = usage_relations(nf, guards)
    lcfg = build_local_cfg(nf, u)
    bt = belongs_to(nf, lcfg, rel)
    if needs_dummy(nf, bt, lcfg.width):
        lcfg = build_local_cfg(nf, u, with_dummy=True)
        bt = belongs_to(nf, lcfg, rel)
    labels = label_local(nf, lcfg, bt)
    return LocalAnalysis(lcfg, rel, bt, labels, InducedLabelling(nf, labels, bt, lcfg))
