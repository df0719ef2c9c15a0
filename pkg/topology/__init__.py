"""Combinatorial core: triangulations, normal coordinates, refinement, prisms, enumeration."""
