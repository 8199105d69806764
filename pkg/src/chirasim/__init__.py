"""Simulator for chiral polarimetry with polarization-entangled light."""

__version__ = "0.1.0"
