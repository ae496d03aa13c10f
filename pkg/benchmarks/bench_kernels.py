"""Compare the compiled kernels with the pure-Python ones.

Run from the repository root after an editable install:

    python benchmarks/bench_kernels.py [--repeat 5] [--seed 7]

Both backends get identical inputs and their outputs are checked for
equality before any timing is reported.
"""
from __future__ import annotations

import argparse
import random
import sys
import timeit

from stategraph import _pykernels

try:
    from stategraph import _kernels
except ImportError:
    _kernels = None


def random_label_graph(rng, vertices, edges, width, tables):
    init = [rng.getrandbits(width) if rng.random() < 0.05 else 0 for _ in range(vertices)]
    src = [rng.randrange(vertices) for _ in range(edges)]
    dst = [rng.randrange(vertices) for _ in range(edges)]
    tab = [rng.randrange(tables) for _ in range(edges)]
    offsets = [k * width for k in range(tables + 1)]
    masks = [rng.getrandbits(width) & rng.getrandbits(width) for _ in range(tables * width)]
    return init, src, dst, tab, offsets, masks


def random_game(rng, nodes, degree):
    eager = [rng.random() < 0.5 for _ in range(nodes)]
    indptr, flat = [0], []
    for _ in range(nodes):
        flat.extend(rng.randrange(nodes) for _ in range(rng.randint(0, degree)))
        indptr.append(len(flat))
    return eager, indptr, flat


def exponential_labelling_input(n):
    """The arguments ``label_global`` hands to the kernel for the
    exponential family, captured by wrapping the kernel once."""
    from stategraph import global_graph
    from stategraph.cfp import control_structure, gcfps, lcfps, normalize_cfps
    from stategraph.generate import exponential_family
    from stategraph.unicity import derive_unicity

    pbes = exponential_family(n)
    u = derive_unicity(pbes)
    local = lcfps(pbes, u)
    nf = normalize_cfps(pbes, control_structure(pbes, u, gcfps(pbes, u, local), local))
    cfg = global_graph.build_global_cfg(nf, derive_unicity(nf.pbes))

    captured = {}
    original = global_graph.propagate_labels

    def spy(*args):
        captured["args"] = args
        return original(*args)

    global_graph.propagate_labels = spy
    try:
        global_graph.label_global(nf, cfg)
    finally:
        global_graph.propagate_labels = original
    return captured["args"]


def best_of(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)
    if _kernels is None:
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1

    rng = random.Random(args.seed)
    cases = [
        ("labels  random 2k/8k w=16", "propagate_labels", random_label_graph(rng, 2_000, 8_000, 16, 20)),
        ("labels  random 20k/80k w=48", "propagate_labels", random_label_graph(rng, 20_000, 80_000, 48, 50)),
        ("labels  exponential n=12", "propagate_labels", exponential_labelling_input(12)),
        ("attractor random 20k d=4", "attractor", random_game(rng, 20_000, 4)),
        ("attractor random 200k d=4", "attractor", random_game(rng, 200_000, 4)),
    ]
    print(f"{'case':30} {'python s':>10} {'cython s':>10} {'speedup':>8}")
    for title, name, inputs in cases:
        slow, fast = getattr(_pykernels, name), getattr(_kernels, name)
        if list(slow(*inputs)) != list(fast(*inputs)):
            print(f"{title}: backends disagree", file=sys.stderr)
            return 2
        t_py = best_of(slow, inputs, args.repeat)
        t_cy = best_of(fast, inputs, args.repeat)
        print(f"{title:30} {t_py:10.4f} {t_cy:10.4f} {t_py / t_cy:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
