"""Theta-deformations of Fell bundles, computed on sampled fibers."""

__version__ = "0.1.0"
