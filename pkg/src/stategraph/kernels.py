"""Kernel selection: the compiled extension when it is importable, otherwise
the pure-Python implementation. Set ``STATEGRAPH_PURE_PYTHON=1`` to force
the fallback."""
import os

if os.environ.get("STATEGRAPH_PURE_PYTHON", "") not in ("", "0"):
    from ._pykernels import BACKEND, attractor, propagate_labels
else:
    try:
        from ._kernels import BACKEND, attractor, propagate_labels
    except ImportError:
        from ._pykernels import BACKEND, attractor, propagate_labels

__all__ = ["BACKEND", "attractor", "propagate_labels"]
