"""Exact verification engine for Galois-equivariant McKay bijections of groups of Lie type."""

__version__ = "0.1.0"
