"""Hypothesis strategies built on the seeded generators."""
from hypothesis import strategies as st

from stategraph.core import BOOL, NatSort
from stategraph.generate import random_formula, random_pbes

SCOPE = [("a", BOOL), ("b", NatSort(2)), ("c", NatSort(1))]
SIGNATURES = {"P": (("a", BOOL), ("b", NatSort(2))), "Q": (("c", NatSort(1)),)}

rngs = st.randoms(use_true_random=False)


@st.composite
def formulas(draw, depth=3):
    return random_formula(draw(rngs), list(SCOPE), SIGNATURES, depth)


@st.composite
def systems(draw, **kwargs):
    return random_pbes(draw(rngs), **kwargs)
