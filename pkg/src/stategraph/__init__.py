"""Control flow detection, liveness analysis and parameter reset for
parameterised Boolean equation systems, with an instantiation engine and a
BES solver to check that the reset preserves solutions."""

from .core import Pbes
from .textio import parse_file, parse_pbes, print_pbes

__version__ = "0.1.0"

__all__ = ["Pbes", "parse_pbes", "parse_file", "print_pbes", "__version__"]
