"""Harmonic morphism checks for metric Lie algebras."""

__version__ = "0.1.0"
