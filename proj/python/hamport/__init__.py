"""Boundary-controlled port-Hamiltonian closed loops.

Thin re-export of the compiled extension: plant/controller constructors,
condition certification, energy-consistent discretization, implicit-midpoint
simulation, and stability diagnostics.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc

__all__ = [name for name in dir() if not name.startswith("_")]
__doc__ = _core_doc
