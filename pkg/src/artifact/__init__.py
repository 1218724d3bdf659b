"""NEASS toolkit for magnetic lattice Hamiltonians on a finite torus."""

__version__ = "0.1.0"
