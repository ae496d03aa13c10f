"""Brute-force PBES semantics by nested Knaster-Tarski iteration.

Independent of instantiation and of the BES solver: predicate variables are
interpreted as complete tables over their signature, and each block of
equations with the same fixpoint sign is iterated from bottom (mu) or top
(nu) until stable, re-solving all later blocks at every step.
"""
from __future__ import annotations

import itertools

from .core import Pbes, eval_term
from .rewrite import eval_formula


def signatures(eq):
    return list(itertools.product(*(sort.domain() for _, sort in eq.params)))


def solve_brute_force(pbes: Pbes, max_space: int = 10**4) -> dict:
    """Full solution: equation name -> {argument tuple: bool}."""
    if pbes.signature_size() > max_space:
        raise ValueError(f"signature space {pbes.signature_size()} exceeds {max_space}")
    blocks = []
    for eq in pbes.equations:
        if blocks and blocks[-1][0] == eq.sign:
            blocks[-1][1].append(eq)
        else:
            blocks.append((eq.sign, [eq]))
    sigs = {eq.name: signatures(eq) for eq in pbes.equations}

    def evaluate(eq, eta):
        lookup = lambda name, args: eta[name][args]
        return {
            sig: eval_formula(eq.rhs, lookup, dict(zip(eq.param_names, sig)))
            for sig in sigs[eq.name]
        }

    def solve_from(b, eta):
        if b == len(blocks):
            return eta
        sign, eqs = blocks[b]
        start = sign == "nu"
        current = {eq.name: {sig: start for sig in sigs[eq.name]} for eq in eqs}
        while True:
            inner = solve_from(b + 1, {**eta, **current})
            nxt = {eq.name: evaluate(eq, inner) for eq in eqs}
            if nxt == current:
                return inner
            current = nxt

    return solve_from(0, {})


def oracle_solve(pbes: Pbes, max_space: int = 10**4) -> bool:
    """Truth value of the init variable under the brute-force semantics."""
    solution = solve_brute_force(pbes, max_space)
    args = tuple(eval_term(a, {}) for a in pbes.init.args)
    return solution[pbes.init.name][args]
