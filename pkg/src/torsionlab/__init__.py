"""Torsion, linking and rotation sets of surface diffeomorphisms."""
__version__ = "0.1.0"
