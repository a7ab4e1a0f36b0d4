"""Spectra of Schrodinger operators with quasi-periodic algebro-geometric KdV
potentials: python bindings over the C++ core."""

try:
    from ._kdvspec import *  # noqa: F401,F403  (installed layout)
except ImportError:  # in-build layout: extension on PYTHONPATH
    from _kdvspec import *  # noqa: F401,F403
