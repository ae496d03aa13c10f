import time

from hypothesis import given, settings

from stategraph.core import cap_sorts
from stategraph.unicity import UnicityConstraint, check_structure, check_unicity, derive_unicity

from .strategies import systems


def test_running_example_values(running):
    u = derive_unicity(running)
    assert u.source[("X", 1, 2)] == 1
    assert u.target[("X", 1, 2)] == 1
    assert u.copy[("Z", 1, 4)] == 3
    assert u.target[("X", 2, 2)] == 2
    assert ("X", 1, 4) not in u.target  # l + 1 is not ground
    assert check_structure(running, u) == []


def test_running_example_checks_clean_when_capped(running):
    capped = cap_sorts(running, 4)
    start = time.perf_counter()
    assert check_unicity(capped, derive_unicity(capped)) == []
    assert time.perf_counter() - start < 1.0


def test_injected_source_is_reported(running):
    capped = cap_sorts(running, 4)
    u = derive_unicity(capped)
    u.source[("X", 1, 2)] = 2
    bad = check_unicity(capped, u)
    assert [(v.kind, v.eq, v.pvi, v.param, v.status) for v in bad] == [("source", "X", 1, 2, "violated")]


def test_empty_constraint_is_vacuous(running):
    assert check_unicity(cap_sorts(running, 4), UnicityConstraint()) == []


def test_large_sorts_are_unchecked_not_trusted(running):
    problems = check_unicity(running, derive_unicity(running), max_envs=100)
    assert problems and all(v.status == "unchecked" for v in problems)


def test_json_entries(running):
    entries = derive_unicity(running).to_json()
    assert {"eq": "X", "pvi": 1, "param": 2, "kind": "source", "value": "1"} in entries
    assert {"eq": "Z", "pvi": 1, "param": 4, "kind": "copy", "value": "3"} in entries


@settings(max_examples=150, deadline=None)
@given(systems())
def test_derived_constraints_are_sound(p):
    u = derive_unicity(p)
    assert check_structure(p, u) == []
    assert [v for v in check_unicity(p, u, max_atoms=20) if v.status == "violated"] == []


@settings(max_examples=150, deadline=None)
@given(systems())
def test_completion_and_coherence(p):
    u = derive_unicity(p)
    for (x, i, n), m in u.copy.items():
        if (x, i, n) in u.source:
            assert u.target[(x, i, m)] == u.source[(x, i, n)]
