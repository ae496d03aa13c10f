"""The global control flow graph over full CFP valuations and its labelling."""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

from .core import Const, iter_pvis, substitute, term_vars
from .errors import CfgTooLarge
from .kernels import propagate_labels
from .rewrite import significant, simplify

DEFAULT_CFG_CAP = 10**6


def values(nf, u, k: int) -> list:
    """Candidate values of CFP ``k`` (1-based): its init value plus every
    value some PVI demands (source) or assigns (target)."""
    out = [nf.pbes.init_values()[k - 1]]
    for table in (u.source, u.target):
        for (_, _, j), value in sorted(table.items(), key=lambda kv: (kv[0], str(kv[1]))):
            if j == k and value not in out:
                out.append(value)
    return out


@dataclass
class ControlFlowGraph:
    vertices: list  # (equation, valuation tuple), discovery order
    edges: list  # ((X, v), i, (Y, w))
    _succ: dict = field(default_factory=dict, repr=False)

    def successors(self, vertex):
        return self._succ.get(vertex, [])


def pvi_table(pbes) -> dict:
    """Equation name -> list of its PVIs in index order."""
    return {eq.name: list(iter_pvis(eq.rhs)) for eq in pbes.equations}


def edge_candidates(u, x, i, ncfp, valuation):
    """Per CFP, the values ``w_k`` allowed for an edge leaving PVI ``i``."""
    per = []
    for k in range(1, ncfp + 1):
        key = (x, i, k)
        source = u.source.get(key)
        target = u.target.get(key)
        if key in u.source:
            if source != valuation[k - 1] or key not in u.target:
                return None
            per.append((target,))
            continue
        options = []
        if u.copy.get(key) == k:
            options.append(valuation[k - 1])
        if key in u.target and target not in options:
            options.append(target)
        if not options:
            return None
        per.append(tuple(options))
    return per


def build_global_cfg(nf, u, cap: int = DEFAULT_CFG_CAP) -> ControlFlowGraph:
    """Locations reachable from the initial one, with PVI-indexed edges."""
    pbes = nf.pbes
    ncfp = nf.ncfp
    pvis = pvi_table(pbes)
    start = (pbes.init.name, tuple(pbes.init_values()[:ncfp]))
    seen = {start}
    order = [start]
    edges = []
    succ = {}
    queue = deque([start])
    while queue:
        vertex = queue.popleft()
        x, valuation = vertex
        out = succ.setdefault(vertex, [])
        for i, pvi in enumerate(pvis[x], start=1):
            per = edge_candidates(u, x, i, ncfp, valuation)
            if per is None:
                continue
            for w in itertools.product(*per):
                dst = (pvi.name, tuple(w))
                edges.append((vertex, i, dst))
                out.append((i, dst))
                if dst not in seen:
                    seen.add(dst)
                    order.append(dst)
                    if len(order) > cap:
                        raise CfgTooLarge(f"control flow graph exceeds {cap} locations")
                    queue.append(dst)
    return ControlFlowGraph(order, edges, succ)


def base_label(nf, name, valuation) -> set:
    """Data parameters significant in ``rhs[c := v]`` after simplification."""
    eq = nf.pbes.equation(name)
    binding = {
        pname: Const(value, sort)
        for (pname, sort), value in zip(eq.params[: nf.ncfp], valuation)
    }
    data = {n for n, _ in eq.params[nf.ncfp :]}
    return significant(simplify(substitute(eq.rhs, binding))) & data


def dependency_masks(nf, caller, pvi):
    """For each parameter position of the callee, the caller's data
    parameters (as a bitmask over data positions) free in that argument."""
    data = [n for n, _ in nf.pbes.equation(caller).params[nf.ncfp :]]
    bit = {n: 1 << k for k, n in enumerate(data)}
    masks = []
    for arg in pvi.args:
        m = 0
        for v in term_vars(arg):
            m |= bit.get(v, 0)
        masks.append(m)
    return masks


def label_global(nf, cfg: ControlFlowGraph) -> dict:
    """Least labelling closed under backward propagation along CFG edges."""
    pbes = nf.pbes
    pvis = pvi_table(pbes)
    index = {v: k for k, v in enumerate(cfg.vertices)}
    data_names = {eq.name: [n for n, _ in eq.params[nf.ncfp :]] for eq in pbes.equations}

    init = []
    for name, valuation in cfg.vertices:
        names = base_label(nf, name, valuation)
        init.append(sum(1 << k for k, n in enumerate(data_names[name]) if n in names))

    # One table per (caller, PVI index). Bit l of a destination mask is the
    # l-th data parameter of the callee, i.e. argument ncfp + l.
    tables = {}
    offsets = [0]
    flat = []
    for eq in pbes.equations:
        for i, pvi in enumerate(pvis[eq.name], start=1):
            masks = dependency_masks(nf, eq.name, pvi)[nf.ncfp :]
            tables[(eq.name, i)] = len(offsets) - 1
            flat.extend(masks)
            offsets.append(len(flat))
    src, dst, tab = [], [], []
    for a, i, b in cfg.edges:
        src.append(index[a])
        dst.append(index[b])
        tab.append(tables[(a[0], i)])
    result = propagate_labels(init, src, dst, tab, offsets, flat)
    labelling = {}
    for (name, valuation), mask in zip(cfg.vertices, result):
        labelling[(name, valuation)] = {
            n for k, n in enumerate(data_names[name]) if mask >> k & 1
        }
    return labelling


def label_global_reference(nf, cfg: ControlFlowGraph) -> dict:
    """The labelling recursion iterated naively; used to cross-check."""
    pbes = nf.pbes
    pvis = pvi_table(pbes)
    labels = {v: base_label(nf, *v) for v in cfg.vertices}
    changed = True
    while changed:
        changed = False
        for a, i, b in cfg.edges:
            pvi = pvis[a[0]][i - 1]
            callee = pbes.equation(pvi.name)
            data = {n for n, _ in pbes.equation(a[0]).params[nf.ncfp :]}
            for ell, (pname, _) in enumerate(callee.params, start=1):
                if pname in labels[b]:
                    extra = (term_vars(pvi.args[ell - 1]) & data) - labels[a]
                    if extra:
                        labels[a] |= extra
                        changed = True
    return labels
