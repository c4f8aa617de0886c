"""Tests for harmonic morphisms on metric Lie algebras."""
