"""The end-to-end analysis: guards, unicity, CFPs, a state graph, Reset,
instantiation and solving, with timings and sizes per stage."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .bes import DEFAULT_LIMIT, instantiate, solve_bes
from .cfp import cfp_report, control_structure, gcfps, lcfps, normalize_cfps
from .errors import InstantiationDiverged
from .global_graph import build_global_cfg, label_global
from .local_graph import analyse_local
from .reset import reset_pbes
from .rewrite import guard_table
from .unicity import derive_unicity


@dataclass
class Analysis:
    """Intermediate artifacts of one run; ``report`` is the JSON summary."""

    pbes: object
    guards: dict = None
    unicity: object = None
    lcfp: set = None
    gcfp: set = None
    structure: object = None
    normal: object = None
    normal_unicity: object = None
    cfg: object = None
    local: object = None
    labelling: dict = None
    reset: object = None
    plan: object = None
    report: dict = field(default_factory=dict)


class _Stages:
    def __init__(self):
        self.stages = []

    def run(self, name, fn, *args, **kwargs):
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        self.stages.append({"name": name, "seconds": time.perf_counter() - start})
        return result

    def note(self, **sizes):
        self.stages[-1].update(sizes)


def analyse(pbes, mode: str = "global", reduced_guard: bool = False) -> Analysis:
    """Run every static stage up to and including Reset."""
    if mode not in ("global", "local"):
        raise ValueError(f"unknown mode {mode!r}")
    a = Analysis(pbes)
    st = _Stages()
    a.guards = st.run("guards", guard_table, pbes)
    st.note(guards=len(a.guards))
    a.unicity = st.run("unicity", derive_unicity, pbes, a.guards)
    st.note(entries=len(a.unicity.to_json()))
    a.lcfp = lcfps(pbes, a.unicity)
    a.gcfp = gcfps(pbes, a.unicity, a.lcfp)
    a.structure = st.run("cfp", control_structure, pbes, a.unicity, a.gcfp, a.lcfp)
    st.note(lcfps=len(a.lcfp), gcfps=len(a.gcfp), classes=len(a.structure.classes))
    a.normal = st.run("normalize", normalize_cfps, pbes, a.structure)
    nf = a.normal
    a.normal_unicity = derive_unicity(nf.pbes)
    a.cfg = st.run("cfg", build_global_cfg, nf, a.normal_unicity)
    st.note(vertices=len(a.cfg.vertices), edges=len(a.cfg.edges))
    if mode == "global":
        a.labelling = st.run("labelling", label_global, nf, a.cfg)
    else:
        a.local = st.run("labelling", analyse_local, nf, a.normal_unicity)
        st.note(lcfg_vertices=len(a.local.lcfg.vertices), lcfg_edges=len(a.local.lcfg.edges))
        a.labelling = {v: set(a.local.induced[v]) for v in a.cfg.vertices}
    st.note(labels=sum(len(s) for s in a.labelling.values()))
    a.reset, a.plan = st.run(
        "reset", reset_pbes, nf, a.labelling, reduced_guard=reduced_guard, u=a.normal_unicity
    )
    st.note(missing_labels=len(set(a.plan.missing)))
    a.report = {
        "mode": mode,
        "reduced_guard": reduced_guard,
        "cfps": list(nf.cfp_names),
        "cfp_report": cfp_report(pbes, a.lcfp, a.gcfp, a.structure),
        "stages": st.stages,
    }
    return a


def _solve_stage(pbes, limit):
    start = time.perf_counter()
    try:
        bes = instantiate(pbes, limit)
    except InstantiationDiverged as exc:
        return {
            "diverged": True,
            "bes_equations": None,
            "verdict": None,
            "limit": limit,
            "discovered": exc.discovered,
            "seconds": time.perf_counter() - start,
        }
    solution = solve_bes(bes)
    return {
        "diverged": False,
        "bes_equations": len(bes),
        "verdict": solution[bes.init],
        "limit": limit,
        "seconds": time.perf_counter() - start,
    }


def run_pipeline(pbes, mode: str = "global", reduced_guard: bool = False, limit: int = DEFAULT_LIMIT, seed=None) -> Analysis:
    """Static analysis followed by solving both the original and the reset
    PBES. The report's ``reduction`` is the relative BES size saving in
    percent, present only when the original instantiation terminates."""
    a = analyse(pbes, mode, reduced_guard)
    original = _solve_stage(pbes, limit)
    reduced = _solve_stage(a.reset, limit)
    reduction = None
    if not original["diverged"] and not reduced["diverged"] and original["bes_equations"]:
        before, after = original["bes_equations"], reduced["bes_equations"]
        reduction = 100.0 * (before - after) / before
    a.report.update(
        {
            "original": original,
            "reduced": reduced,
            "reduction": reduction,
            "verdict": reduced["verdict"],
            "seed": seed,
        }
    )
    return a
