"""Stochastic matrix analysis: chain structure, spectral projections, persistent algebra."""
