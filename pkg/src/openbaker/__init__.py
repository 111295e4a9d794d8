"""Numerical laboratory for resonance eigenstates of the open triadic baker map."""

__version__ = "0.1.0"

from . import classical, experiments, io_utils, phase_space, quantum, spectral, walsh  # noqa: F401,E402
