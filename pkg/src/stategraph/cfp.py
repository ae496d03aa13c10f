"""Control flow parameter detection and normalization.

Parameters are identified as ``(equation name, parameter index)`` pairs with
1-based indices.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .core import Const, Equation, Pbes, Pvi, Var, bound_vars, iter_pvis, map_pvis, substitute
from .errors import SortConflict
from .unicity import UnicityConstraint


def _self_pvis(eq):
    return [i for i, pvi in enumerate(iter_pvis(eq.rhs), start=1) if pvi.name == eq.name]


def lcfps(pbes: Pbes, u: UnicityConstraint) -> set:
    """Parameters whose value at every self-dependency is fixed or copied."""
    out = set()
    for eq in pbes.equations:
        selfs = _self_pvis(eq)
        for n in range(1, len(eq.params) + 1):
            if all(
                ((eq.name, i, n) in u.source and (eq.name, i, n) in u.target)
                or u.copy.get((eq.name, i, n)) == n
                for i in selfs
            ):
                out.add((eq.name, n))
    return out


def gcfps(pbes: Pbes, u: UnicityConstraint, lcfp: set) -> set:
    """Largest subset of ``lcfp`` that is fixed or copied by every caller."""
    callers = {}
    for eq in pbes.equations:
        for i, pvi in enumerate(iter_pvis(eq.rhs), start=1):
            if pvi.name != eq.name:
                callers.setdefault(pvi.name, []).append((eq.name, i))
    current = set(lcfp)
    changed = True
    while changed:
        changed = False
        for x, n in sorted(current):
            for y, i in callers.get(x, ()):
                if (y, i, n) in u.target:
                    continue
                if any(
                    m == n and (yy, mm) in current
                    for (yy, ii, mm), m in u.copy.items()
                    if yy == y and ii == i
                ):
                    continue
                current.discard((x, n))
                changed = True
                break
    return current


@dataclass
class ControlStructure:
    cfps: set
    classes: list  # list of frozensets of (equation, index), in vector order
    unified_names: list  # one name per class
    sorts: list  # one sort per class
    dropped: set = field(default_factory=set)

    def class_of(self, member):
        for k, cls in enumerate(self.classes):
            if member in cls:
                return k
        return None


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def groups(self):
        out = {}
        for x in sorted(self.parent):
            out.setdefault(self.find(x), set()).add(x)
        return [frozenset(g) for g in out.values()]


def copy_classes(pbes: Pbes, u: UnicityConstraint, cfps: set) -> list:
    """Classes of the equivalence closure of the copy relation on ``cfps``."""
    uf = _UnionFind(cfps)
    for (x, i, n), m in u.copy.items():
        callee = _nth_pvi(pbes.equation(x).rhs, i).name
        if (x, n) in cfps and (callee, m) in cfps:
            uf.union((x, n), (callee, m))
    return uf.groups()


def _nth_pvi(phi, i):
    for k, pvi in enumerate(iter_pvis(phi), start=1):
        if k == i:
            return pvi
    raise IndexError(i)


def _violations(classes):
    bad = []
    for cls in classes:
        count = {}
        for x, _ in cls:
            count[x] = count.get(x, 0) + 1
        crowded = {x for x, c in count.items() if c > 1}
        if crowded:
            bad.append({m for m in cls if m[0] in crowded})
    return bad


def control_structure(pbes: Pbes, u: UnicityConstraint, g: set | None = None, lcfp: set | None = None) -> ControlStructure:
    """Group global CFPs into classes with at most one member per equation.

    When copying forces several parameters of one equation into the same
    class, all of them are dropped and the global fixpoint is recomputed
    without them. Keeping any one of them would make its class depend on an
    arbitrary choice; dropping all lets the recomputation cascade to the
    parameters that were only CFPs through them.
    """
    if lcfp is None:
        lcfp = lcfps(pbes, u)
    dropped = set()
    current = set(g) if g is not None else gcfps(pbes, u, lcfp)
    while True:
        classes = copy_classes(pbes, u, current)
        bad = _violations(classes)
        if not bad:
            break
        dropped |= set().union(*bad)
        current = gcfps(pbes, u, lcfp - dropped)
    classes = _merge_by_name(pbes, classes)
    classes = _order_classes(pbes, classes)
    sorts = []
    for cls in classes:
        members = sorted({pbes.equation(x).params[n - 1][1] for x, n in cls}, key=str)
        if len(members) > 1:
            raise SortConflict(f"class {sorted(cls)} mixes sorts {', '.join(map(str, members))}")
        sorts.append(members[0])
    names = _unified_names(pbes, classes)
    return ControlStructure(set(current), classes, names, sorts, dropped)


def _pname(pbes, member):
    return pbes.equation(member[0]).params[member[1] - 1][0]


def _psort(pbes, member):
    return pbes.equation(member[0]).params[member[1] - 1][1]


def _merge_by_name(pbes, classes):
    """Greedily merge classes that share a parameter name and a sort."""
    classes = [set(c) for c in sorted(classes, key=lambda c: sorted(c))]
    merged = True
    while merged:
        merged = False
        for a in range(len(classes)):
            for b in range(a + 1, len(classes)):
                ca, cb = classes[a], classes[b]
                if {x for x, _ in ca} & {x for x, _ in cb}:
                    continue
                names_a = {_pname(pbes, m) for m in ca}
                names_b = {_pname(pbes, m) for m in cb}
                if not names_a & names_b:
                    continue
                if {_psort(pbes, m) for m in ca} != {_psort(pbes, m) for m in cb}:
                    continue
                ca |= cb
                del classes[b]
                merged = True
                break
            if merged:
                break
    return [frozenset(c) for c in classes]


def _order_classes(pbes, classes):
    order = {name: k for k, name in enumerate(pbes.names)}
    init_eq = pbes.init.name

    def key(cls):
        for x, n in cls:
            if x == init_eq:
                return (0, n, 0)
        first = min(cls, key=lambda m: (order[m[0]], m[1]))
        return (1, order[first[0]], first[1])

    return sorted(classes, key=key)


def _unified_names(pbes, classes):
    taken = set()
    for eq in pbes.equations:
        taken |= bound_vars(eq.rhs)
        for n, (name, _) in enumerate(eq.params, start=1):
            if not any((eq.name, n) in cls for cls in classes):
                taken.add(name)
    names = []
    for cls in classes:
        base = min(_pname(pbes, m) for m in cls)
        name = base
        suffix = 1
        while name in taken or name in names:
            name = f"{base}_{suffix}"
            suffix += 1
        names.append(name)
    return names


# --------------------------------------------------------------------------
# Normalization


@dataclass
class NormalForm:
    """A PBES whose equations all start with the same CFP vector."""

    pbes: Pbes
    cfp_names: tuple
    cfp_sorts: tuple
    origin: dict  # (equation, new index) -> original index or None if added

    @property
    def ncfp(self):
        return len(self.cfp_names)

    def data_params(self, name):
        return self.pbes.equation(name).params[self.ncfp:]


def normalize_cfps(pbes: Pbes, cs: ControlStructure) -> NormalForm:
    """Rename and reorder parameters so every equation starts with the CFPs.

    Equations that lack a class get a fresh parameter for it. It is passed
    on unchanged at self-dependencies and set to the class default elsewhere.
    """
    for cls in cs.classes:
        sorts = {_psort(pbes, m) for m in cls}
        if len(sorts) > 1:
            raise SortConflict(f"class {sorted(cls)} mixes sorts {', '.join(sorted(map(str, sorts)))}")
    defaults = []
    for cls, sort in zip(cs.classes, cs.sorts):
        value = sort.minimum
        for x, n in cls:
            if x == pbes.init.name:
                value = pbes.init_values()[n - 1]
        defaults.append(value)

    layout = {}  # equation -> (list of original index or None per CFP, data indices)
    for eq in pbes.equations:
        slots = []
        for cls in cs.classes:
            hit = [n for x, n in cls if x == eq.name]
            slots.append(hit[0] if hit else None)
        used = {n for n in slots if n is not None}
        data = [n for n in range(1, len(eq.params) + 1) if n not in used]
        layout[eq.name] = (slots, data)

    def reorder(target, args, caller):
        slots, data = layout[target]
        out = []
        for k, n in enumerate(slots):
            if n is not None:
                out.append(args[n - 1])
            elif caller == target:
                out.append(Var(cs.unified_names[k], cs.sorts[k]))
            else:
                out.append(Const(defaults[k], cs.sorts[k]))
        out.extend(args[n - 1] for n in data)
        return tuple(out)

    equations = []
    origin = {}
    for eq in pbes.equations:
        slots, data = layout[eq.name]
        rename = {}
        params = []
        for k, n in enumerate(slots):
            new = cs.unified_names[k]
            params.append((new, cs.sorts[k]))
            origin[(eq.name, k + 1)] = n
            if n is not None and eq.params[n - 1][0] != new:
                rename[eq.params[n - 1][0]] = Var(new, cs.sorts[k])
        for pos, n in enumerate(data, start=len(slots) + 1):
            params.append(eq.params[n - 1])
            origin[(eq.name, pos)] = n
        rhs = substitute(eq.rhs, rename)
        rhs = map_pvis(rhs, lambda i, pvi, caller=eq.name: Pvi(pvi.name, reorder(pvi.name, pvi.args, caller)))
        equations.append(Equation(eq.sign, eq.name, tuple(params), rhs))
    init = Pvi(pbes.init.name, reorder(pbes.init.name, pbes.init.args, None))
    normal = Pbes(tuple(equations), init)
    return NormalForm(normal, tuple(cs.unified_names), tuple(cs.sorts), origin)


def cfp_report(pbes: Pbes, lcfp: set, gcfp: set, cs: ControlStructure) -> dict:
    def names(members, eq):
        return [eq.params[n - 1][0] for x, n in sorted(members) if x == eq.name]

    report = {"equations": {}, "classes": []}
    for eq in pbes.equations:
        report["equations"][eq.name] = {"lcfps": names(lcfp, eq), "gcfps": names(gcfp, eq)}
    for name, cls, sort in zip(cs.unified_names, cs.classes, cs.sorts):
        report["classes"].append(
            {
                "name": name,
                "sort": str(sort),
                "members": [f"{_pname(pbes, m)}^{m[0]}" for m in sorted(cls)],
            }
        )
    report["dropped"] = [f"{_pname(pbes, m)}^{m[0]}" for m in sorted(cs.dropped)]
    return report
