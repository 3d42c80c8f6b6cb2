"""Numerical laboratory for Ricci-flow-invariant curvature cones."""
__version__ = "0.1.0"
