"""Sorts, data terms, predicate formulae and PBESs.

All nodes are frozen dataclasses, so they hash structurally and can be
shared freely. PVIs are numbered 1..npred(phi) by an in-order traversal
that visits the left operand of a conjunction or disjunction first.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

from .errors import IndexOutOfRange, SortMismatch, UnboundVariable, WellFormednessError

DEFAULT_NAT_MAX = 32


# --------------------------------------------------------------------------
# Sorts


@dataclass(frozen=True)
class BoolSort:
    def domain(self):
        return (False, True)

    def contains(self, value):
        return type(value) is bool

    @property
    def size(self):
        return 2

    @property
    def minimum(self):
        return False

    def __str__(self):
        return "Bool"


@dataclass(frozen=True)
class NatSort:
    """Naturals 0..max; addition saturates at max."""

    max: int = DEFAULT_NAT_MAX

    def __post_init__(self):
        if self.max < 0:
            raise ValueError("NatSort.max must be >= 0")

    def domain(self):
        return range(self.max + 1)

    def contains(self, value):
        return type(value) is int and 0 <= value <= self.max

    @property
    def size(self):
        return self.max + 1

    @property
    def minimum(self):
        return 0

    def __str__(self):
        return f"Nat{self.max + 1}"


@dataclass(frozen=True)
class EnumSort:
    values: tuple

    def __post_init__(self):
        if not self.values:
            raise ValueError("EnumSort needs at least one value")
        object.__setattr__(self, "values", tuple(self.values))

    def domain(self):
        return self.values

    def contains(self, value):
        return type(value) is str and value in self.values

    @property
    def size(self):
        return len(self.values)

    @property
    def minimum(self):
        return self.values[0]

    def __str__(self):
        return "Enum {" + ", ".join(self.values) + "}"


BOOL = BoolSort()
Sort = BoolSort | NatSort | EnumSort


def format_value(value) -> str:
    if type(value) is bool:
        return "true" if value else "false"
    return str(value)


# --------------------------------------------------------------------------
# Data terms


class DataTerm:
    __slots__ = ()


class Const(DataTerm):
    """A literal. ``sort`` is advisory (it drives saturation of ``+``) and is
    ignored by equality, so ``1`` parsed in two contexts compares equal."""

    __slots__ = ("value", "sort")

    def __init__(self, value, sort=None):
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "sort", sort)

    def __setattr__(self, name, value):
        raise AttributeError("Const is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Const)
            and type(self.value) is type(other.value)
            and self.value == other.value
        )

    def __hash__(self):
        return hash(("Const", type(self.value).__name__, self.value))

    def __repr__(self):
        return f"Const({self.value!r})"


@dataclass(frozen=True)
class Var(DataTerm):
    name: str
    sort: object


@dataclass(frozen=True)
class Plus(DataTerm):
    left: DataTerm
    right: DataTerm


@dataclass(frozen=True)
class Eq(DataTerm):
    left: DataTerm
    right: DataTerm


@dataclass(frozen=True)
class Neq(DataTerm):
    left: DataTerm
    right: DataTerm


@dataclass(frozen=True)
class Lt(DataTerm):
    left: DataTerm
    right: DataTerm


@dataclass(frozen=True)
class DAnd(DataTerm):
    left: DataTerm
    right: DataTerm


@dataclass(frozen=True)
class DOr(DataTerm):
    left: DataTerm
    right: DataTerm


@dataclass(frozen=True)
class DNot(DataTerm):
    arg: DataTerm


BINARY_TERMS = (Plus, Eq, Neq, Lt, DAnd, DOr)
COMPARISONS = (Eq, Neq, Lt)

T_TRUE = Const(True, BOOL)
T_FALSE = Const(False, BOOL)


def const_sort(value):
    if type(value) is bool:
        return BOOL
    return None


def sort_of(term: DataTerm):
    """Static sort of a term, or None for an unannotated numeric/enum literal."""
    if isinstance(term, Var):
        return term.sort
    if isinstance(term, Const):
        return term.sort if term.sort is not None else const_sort(term.value)
    if isinstance(term, Plus):
        return sort_of(term.left) or sort_of(term.right)
    return BOOL


def compatible(sort_a, sort_b) -> bool:
    return sort_a is None or sort_b is None or sort_a == sort_b


def term_vars(term: DataTerm) -> set:
    out = set()
    _term_vars(term, out)
    return out


def _term_vars(term, out):
    if isinstance(term, Var):
        out.add(term.name)
    elif isinstance(term, DNot):
        _term_vars(term.arg, out)
    elif isinstance(term, BINARY_TERMS):
        _term_vars(term.left, out)
        _term_vars(term.right, out)


def is_ground(term: DataTerm) -> bool:
    if isinstance(term, Const):
        return True
    if isinstance(term, Var):
        return False
    if isinstance(term, DNot):
        return is_ground(term.arg)
    return is_ground(term.left) and is_ground(term.right)


def eval_term(term: DataTerm, env: Mapping):
    """Evaluate a data term under ``env`` (variable name -> value)."""
    if isinstance(term, Const):
        return term.value
    if isinstance(term, Var):
        try:
            return env[term.name]
        except KeyError:
            raise UnboundVariable(f"unbound data variable {term.name!r}") from None
    if isinstance(term, Plus):
        total = eval_term(term.left, env) + eval_term(term.right, env)
        sort = sort_of(term)
        if isinstance(sort, NatSort) and total > sort.max:
            return sort.max
        return total
    if isinstance(term, Eq):
        return _same(eval_term(term.left, env), eval_term(term.right, env))
    if isinstance(term, Neq):
        return not _same(eval_term(term.left, env), eval_term(term.right, env))
    if isinstance(term, Lt):
        return eval_term(term.left, env) < eval_term(term.right, env)
    if isinstance(term, DAnd):
        return eval_term(term.left, env) and eval_term(term.right, env)
    if isinstance(term, DOr):
        return eval_term(term.left, env) or eval_term(term.right, env)
    if isinstance(term, DNot):
        return not eval_term(term.arg, env)
    raise TypeError(f"not a data term: {term!r}")


def _same(a, b):
    return type(a) is type(b) and a == b


def subst_term(term: DataTerm, binding: Mapping) -> DataTerm:
    if isinstance(term, Var):
        repl = binding.get(term.name)
        if repl is None:
            return term
        if isinstance(repl, Const) and repl.sort is None and not isinstance(term.sort, BoolSort):
            return Const(repl.value, term.sort)
        return repl
    if isinstance(term, Const):
        return term
    if isinstance(term, DNot):
        arg = subst_term(term.arg, binding)
        return term if arg is term.arg else DNot(arg)
    left = subst_term(term.left, binding)
    right = subst_term(term.right, binding)
    if left is term.left and right is term.right:
        return term
    return type(term)(left, right)


# --------------------------------------------------------------------------
# Predicate formulae


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class BoolTerm(Formula):
    term: DataTerm


@dataclass(frozen=True)
class Pvi(Formula):
    name: str
    args: tuple = ()

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    sort: object
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    sort: object
    body: Formula


TRUE = BoolTerm(T_TRUE)
FALSE = BoolTerm(T_FALSE)
Quantifier = (Forall, Exists)


def is_true(phi) -> bool:
    return isinstance(phi, BoolTerm) and isinstance(phi.term, Const) and phi.term.value is True


def is_false(phi) -> bool:
    return isinstance(phi, BoolTerm) and isinstance(phi.term, Const) and phi.term.value is False


def balanced(items, cls, unit):
    """Combine ``items`` with the binary ``cls`` into a tree of logarithmic
    depth. The left half takes the largest power of two below ``len(items)``,
    so two or three items give the usual left-nested chain."""
    items = list(items)
    if not items:
        return unit

    def build(lo, hi):
        if hi - lo == 1:
            return items[lo]
        half = 1 << ((hi - lo - 1).bit_length() - 1)
        return cls(build(lo, lo + half), build(lo + half, hi))

    return build(0, len(items))


def conj(*parts: Formula) -> Formula:
    """Conjunction of ``parts``; empty conjunction is true."""
    return balanced(parts, And, TRUE)


def disj(*parts: Formula) -> Formula:
    return balanced(parts, Or, FALSE)


def free_vars(phi: Formula) -> set:
    """Data variables occurring outside any binding quantifier."""
    if isinstance(phi, BoolTerm):
        return term_vars(phi.term)
    if isinstance(phi, Pvi):
        out = set()
        for arg in phi.args:
            _term_vars(arg, out)
        return out
    if isinstance(phi, (And, Or)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, Quantifier):
        return free_vars(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def npred(phi: Formula) -> int:
    if isinstance(phi, Pvi):
        return 1
    if isinstance(phi, (And, Or)):
        return npred(phi.left) + npred(phi.right)
    if isinstance(phi, Quantifier):
        return npred(phi.body)
    return 0


def iter_pvis(phi: Formula) -> Iterator[Pvi]:
    """PVIs in index order (left operand first)."""
    stack = [phi]
    while stack:
        node = stack.pop()
        if isinstance(node, Pvi):
            yield node
        elif isinstance(node, (And, Or)):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, Quantifier):
            stack.append(node.body)


def pvis(phi: Formula) -> list:
    return list(iter_pvis(phi))


def pvi_at(phi: Formula, i: int) -> Pvi:
    """The i-th PVI of ``phi`` (1-based)."""
    n = npred(phi)
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"PVI index {i} outside 1..{n}")
    for k, node in enumerate(iter_pvis(phi), start=1):
        if k == i:
            return node
    raise AssertionError("unreachable")


def replace_pvi(phi: Formula, i: int, psi: Formula) -> Formula:
    """``phi`` with its i-th PVI replaced syntactically by ``psi``."""
    n = npred(phi)
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"PVI index {i} outside 1..{n}")
    return _replace(phi, i, psi)


def _replace(phi, i, psi):
    if isinstance(phi, Pvi):
        return psi if i == 1 else phi
    if isinstance(phi, (And, Or)):
        n_left = npred(phi.left)
        if i > n_left:
            return type(phi)(phi.left, _replace(phi.right, i - n_left, psi))
        return type(phi)(_replace(phi.left, i, psi), phi.right)
    if isinstance(phi, Quantifier):
        return type(phi)(phi.var, phi.sort, _replace(phi.body, i, psi))
    return phi


def map_pvis(phi: Formula, fn) -> Formula:
    """Simultaneously replace every PVI by ``fn(index, pvi)``."""
    counter = [0]

    def walk(node):
        if isinstance(node, Pvi):
            counter[0] += 1
            return fn(counter[0], node)
        if isinstance(node, (And, Or)):
            left = walk(node.left)
            right = walk(node.right)
            return type(node)(left, right)
        if isinstance(node, Quantifier):
            return type(node)(node.var, node.sort, walk(node.body))
        return node

    return walk(phi)


def substitute(phi: Formula, binding: Mapping) -> Formula:
    """Replace free occurrences of variables by terms.

    ``binding`` maps variable names to data terms. Bound variables are left
    alone; capture cannot happen because a quantified variable never also
    occurs free in the same formula.
    """
    if not binding:
        return phi
    return _subst(phi, dict(binding), _free_sorts(phi))


def _free_sorts(phi):
    sorts = {}

    def walk_term(term):
        if isinstance(term, Var):
            sorts.setdefault(term.name, term.sort)
        elif isinstance(term, DNot):
            walk_term(term.arg)
        elif isinstance(term, BINARY_TERMS):
            walk_term(term.left)
            walk_term(term.right)

    def walk(node):
        if isinstance(node, BoolTerm):
            walk_term(node.term)
        elif isinstance(node, Pvi):
            for arg in node.args:
                walk_term(arg)
        elif isinstance(node, (And, Or)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, Quantifier):
            walk(node.body)

    walk(phi)
    return sorts


def _check_binding(binding, sorts):
    for name, term in binding.items():
        expected = sorts.get(name)
        if expected is None:
            continue
        got = sort_of(term)
        if isinstance(term, Const) and got is None:
            if not _literal_fits(term.value, expected):
                raise SortMismatch(f"{term.value!r} is not a value of {expected} (for {name})")
        elif not compatible(got, expected):
            raise SortMismatch(f"cannot substitute term of sort {got} for {name}: {expected}")


def _literal_fits(value, sort):
    if isinstance(sort, NatSort):
        return type(value) is int
    if isinstance(sort, EnumSort):
        return type(value) is str and value in sort.values
    return type(value) is bool


def _subst(phi, binding, sorts):
    _check_binding(binding, sorts)
    return _subst_walk(phi, binding)


def _subst_walk(phi, binding):
    if isinstance(phi, BoolTerm):
        term = subst_term(phi.term, binding)
        return phi if term is phi.term else BoolTerm(term)
    if isinstance(phi, Pvi):
        args = tuple(subst_term(a, binding) for a in phi.args)
        return Pvi(phi.name, args)
    if isinstance(phi, (And, Or)):
        return type(phi)(_subst_walk(phi.left, binding), _subst_walk(phi.right, binding))
    if isinstance(phi, Quantifier):
        if phi.var in binding:
            inner = {k: v for k, v in binding.items() if k != phi.var}
            if not inner:
                return phi
            return type(phi)(phi.var, phi.sort, _subst_walk(phi.body, inner))
        return type(phi)(phi.var, phi.sort, _subst_walk(phi.body, binding))
    raise TypeError(f"not a formula: {phi!r}")


def bound_vars(phi: Formula) -> set:
    if isinstance(phi, (And, Or)):
        return bound_vars(phi.left) | bound_vars(phi.right)
    if isinstance(phi, Quantifier):
        return {phi.var} | bound_vars(phi.body)
    return set()


def formula_size(phi: Formula) -> int:
    if isinstance(phi, (And, Or)):
        return 1 + formula_size(phi.left) + formula_size(phi.right)
    if isinstance(phi, Quantifier):
        return 1 + formula_size(phi.body)
    return 1


# --------------------------------------------------------------------------
# Equations and systems


@dataclass(frozen=True)
class Equation:
    sign: str
    name: str
    params: tuple
    rhs: Formula

    def __post_init__(self):
        if self.sign not in ("mu", "nu"):
            raise ValueError(f"bad fixpoint sign {self.sign!r}")
        object.__setattr__(self, "params", tuple((n, s) for n, s in self.params))

    @property
    def param_names(self):
        return tuple(n for n, _ in self.params)

    @property
    def param_sorts(self):
        return tuple(s for _, s in self.params)

    def param_index(self, name):
        """1-based index of a formal parameter."""
        return self.param_names.index(name) + 1

    def var(self, j):
        name, sort = self.params[j - 1]
        return Var(name, sort)


@dataclass(frozen=True)
class Pbes:
    equations: tuple
    init: Pvi

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))

    @property
    def names(self):
        return tuple(eq.name for eq in self.equations)

    def equation(self, name) -> Equation:
        for eq in self.equations:
            if eq.name == name:
                return eq
        raise KeyError(name)

    def index_of(self, name) -> int:
        return self.names.index(name)

    def init_values(self) -> tuple:
        return tuple(eval_term(a, {}) for a in self.init.args)

    def init_value(self, param_name, sort=None):
        """init(d): the top assertion's value for a parameter of that name.

        Parameters of other equations without a same-named counterpart in the
        init equation fall back to the minimum of their sort.
        """
        eq = self.equation(self.init.name)
        for (name, psort), arg in zip(eq.params, self.init.args):
            if name == param_name and (sort is None or psort == sort):
                return eval_term(arg, {})
        if sort is None:
            raise KeyError(param_name)
        return sort.minimum

    def signature_size(self) -> int:
        total = 0
        for eq in self.equations:
            size = 1
            for _, sort in eq.params:
                size *= sort.size
            total += size
        return total


def check_well_formed(pbes: Pbes) -> None:
    """Raise WellFormednessError unless ``pbes`` is well-formed and closed."""
    seen = set()
    for eq in pbes.equations:
        if eq.name in seen:
            raise WellFormednessError(f"duplicate equation for {eq.name}")
        seen.add(eq.name)
        names = eq.param_names
        if len(set(names)) != len(names):
            raise WellFormednessError(f"duplicate parameter in {eq.name}")
    arity = {eq.name: eq for eq in pbes.equations}
    for eq in pbes.equations:
        extra = free_vars(eq.rhs) - set(eq.param_names)
        if extra:
            raise WellFormednessError(
                f"free variables {sorted(extra)} of {eq.name} are not parameters"
            )
        bound = bound_vars(eq.rhs)
        clash = bound & set(eq.param_names)
        if clash & free_vars(eq.rhs):
            raise WellFormednessError(
                f"quantified variable(s) {sorted(clash)} also occur free in {eq.name}"
            )
        for pvi in iter_pvis(eq.rhs):
            _check_pvi(pvi, arity, where=eq.name)
    if pbes.init.name not in arity:
        raise WellFormednessError(f"init names unbound variable {pbes.init.name}")
    _check_pvi(pbes.init, arity, where="init")
    target = arity[pbes.init.name]
    for arg, (pname, sort) in zip(pbes.init.args, target.params):
        if not is_ground(arg):
            raise WellFormednessError(f"init argument for {pname} is not ground")
        value = eval_term(arg, {})
        if not sort.contains(value):
            raise WellFormednessError(f"init value {format_value(value)} outside {sort}")


def _check_pvi(pvi, arity, where):
    target = arity.get(pvi.name)
    if target is None:
        raise WellFormednessError(f"{pvi.name} is unbound (used in {where})")
    if len(pvi.args) != len(target.params):
        raise WellFormednessError(
            f"{pvi.name} expects {len(target.params)} arguments, got {len(pvi.args)} in {where}"
        )
    for arg, (pname, sort) in zip(pvi.args, target.params):
        got = sort_of(arg)
        if isinstance(arg, Const):
            if not sort.contains(arg.value):
                raise WellFormednessError(
                    f"argument {format_value(arg.value)} for {pvi.name}.{pname} outside {sort} in {where}"
                )
        elif not compatible(got, sort):
            raise WellFormednessError(
                f"argument for {pvi.name}.{pname} has sort {got}, expected {sort} in {where}"
            )


def map_sorts(pbes: Pbes, fn) -> Pbes:
    """Rebuild ``pbes`` with every sort ``s`` replaced by ``fn(s)``."""

    def term(t):
        if isinstance(t, Var):
            return Var(t.name, fn(t.sort))
        if isinstance(t, Const):
            return Const(t.value, None if t.sort is None else fn(t.sort))
        if isinstance(t, DNot):
            return DNot(term(t.arg))
        return type(t)(term(t.left), term(t.right))

    def formula(phi):
        if isinstance(phi, BoolTerm):
            return BoolTerm(term(phi.term))
        if isinstance(phi, Pvi):
            return Pvi(phi.name, tuple(term(a) for a in phi.args))
        if isinstance(phi, (And, Or)):
            return type(phi)(formula(phi.left), formula(phi.right))
        return type(phi)(phi.var, fn(phi.sort), formula(phi.body))

    equations = [
        Equation(eq.sign, eq.name, tuple((n, fn(s)) for n, s in eq.params), formula(eq.rhs))
        for eq in pbes.equations
    ]
    return Pbes(tuple(equations), formula(pbes.init))


def cap_sorts(pbes: Pbes, size: int) -> Pbes:
    """Shrink every Nat sort to at most ``size`` values."""

    def cap(sort):
        if isinstance(sort, NatSort) and sort.size > size:
            return NatSort(size - 1)
        return sort

    return map_sorts(pbes, cap)
