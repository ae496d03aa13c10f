"""Resetting dead PVI arguments to their initial values.

Every PVI ``Y(e, e')`` (``e`` the CFP arguments, ``e'`` the data arguments)
is replaced by a conjunction over candidate CFP valuations ``v`` of
``v != e || Y(v, reset(e'))``, where ``reset`` keeps the arguments that are
live at location ``(Y, v)`` and replaces the others by their initial value.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import (
    And,
    BoolTerm,
    Const,
    DOr,
    Equation,
    Neq,
    Or,
    Pbes,
    Pvi,
    balanced,
    format_value,
    map_pvis,
)
from .errors import MissingLabel
from .global_graph import values as cfp_values
from .rewrite import simplify
from .textio import format_term, format_valuation


def reset_vars(location, lab, args, nf):
    """Positional reset of the data arguments ``args`` of a PVI to ``location``.

    Returns ``(new_args, missing)``. When ``lab`` has no entry for the
    location every argument is kept and ``missing`` is True.
    """
    name, _ = location
    eq = nf.pbes.equation(name)
    live = lab.get(location)
    if live is None:
        return tuple(args), True
    out = []
    for (pname, sort), arg in zip(eq.params[nf.ncfp :], args):
        if pname in live:
            out.append(arg)
        else:
            out.append(Const(nf.pbes.init_value(pname, sort), sort))
    return tuple(out), False


@dataclass
class ResetPlan:
    reduced_guard: bool
    entries: dict = field(default_factory=dict)  # (X, i) -> [(v, args)]
    missing: list = field(default_factory=list)  # locations without a label

    def to_json(self) -> dict:
        out = {"reduced_guard": self.reduced_guard, "pvis": []}
        for (x, i), cases in sorted(self.entries.items()):
            out["pvis"].append(
                {
                    "eq": x,
                    "pvi": i,
                    "cases": [
                        {
                            "cfps": [format_value(c) for c in v],
                            "args": [format_term(a) for a in args],
                        }
                        for v, args in cases
                    ],
                }
            )
        out["missing_labels"] = sorted(
            f"{x}(" + ",".join(format_value(c) for c in v) + ")" for x, v in set(self.missing)
        )
        return out


def reset_pbes(
    nf,
    lab,
    reduced_guard: bool = False,
    u=None,
    cfp_args: str = "v",
    simplify_result: bool = True,
    strict: bool = False,
):
    """Apply Reset to a normalized PBES. Returns ``(pbes, plan)``.

    ``lab`` maps ``(Y, v)`` to live data parameters; ``u`` is the unicity
    constraint of ``nf.pbes`` (needed for the candidate values and for the
    reduced guard). ``cfp_args="v"`` passes the case value ``v`` as the CFP
    arguments of the new PVI; ``"e"`` keeps the original expressions.

    A location without a label keeps every argument; with ``strict`` it
    raises MissingLabel instead.
    """
    if cfp_args not in ("v", "e"):
        raise ValueError(f"cfp_args must be 'v' or 'e', not {cfp_args!r}")
    if u is None:
        from .unicity import derive_unicity

        u = derive_unicity(nf.pbes)
    ncfp = nf.ncfp
    vals = [cfp_values(nf, u, k) for k in range(1, ncfp + 1)]
    plan = ResetPlan(reduced_guard)
    sorts = nf.cfp_sorts

    equations = []
    for eq in nf.pbes.equations:

        def replace(i, pvi, x=eq.name):
            cfp, data = pvi.args[:ncfp], pvi.args[ncfp:]
            options = []
            split = []
            for k in range(ncfp):
                key = (x, i, k + 1)
                if reduced_guard and key in u.target:
                    options.append((u.target[key],))
                    split.append(False)
                elif isinstance(cfp[k], Const):
                    options.append((cfp[k].value,))
                    split.append(False)
                else:
                    options.append(tuple(vals[k]))
                    split.append(True)
            parts = []
            cases = []
            for v in itertools.product(*options):
                new_data, missing = reset_vars((pvi.name, v), lab, data, nf)
                if missing:
                    if strict:
                        raise MissingLabel(f"no label for location {pvi.name}{format_valuation(v)}")
                    plan.missing.append((pvi.name, v))
                if cfp_args == "v":
                    head = tuple(Const(value, sort) for value, sort in zip(v, sorts))
                else:
                    head = tuple(cfp)
                new = Pvi(pvi.name, head + new_data)
                cases.append((v, head + new_data))
                guard = balanced(
                    [Neq(cfp[k], Const(v[k], sorts[k])) for k in range(ncfp) if split[k]], DOr, None
                )
                parts.append(new if guard is None else Or(BoolTerm(guard), new))
            plan.entries[(x, i)] = cases
            return balanced(parts, And, None)

        rhs = map_pvis(eq.rhs, replace)
        if simplify_result:
            rhs = simplify(rhs)
        equations.append(Equation(eq.sign, eq.name, eq.params, rhs))
    return Pbes(tuple(equations), nf.pbes.init), plan


def all_live(nf):
    """A labelling under which every data parameter is live everywhere."""
    return _AllLive(nf)


class _AllLive:
    def __init__(self, nf):
        self.names = {eq.name: {n for n, _ in eq.params[nf.ncfp :]} for eq in nf.pbes.equations}

    def get(self, vertex, default=None):
        return self.names[vertex[0]]

    def __getitem__(self, vertex):
        return self.names[vertex[0]]

    def __contains__(self, vertex):
        return True
