"""Analytically solvable complex PT-invariant periodic potentials.

The package builds PT-transformed Lame and associated Lame potentials and
their supersymmetric partners, evaluates their closed-form band-edge energies,
eigenfunctions, and dispersion relations, and verifies everything against an
independent numerical Floquet monodromy engine.
"""

from . import elliptic, potentials, spectra, floquet

__all__ = ["elliptic", "potentials", "spectra", "floquet"]

__version__ = "0.1.0"
