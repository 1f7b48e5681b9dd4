"""Exact Lie-algebra construction, Hermitian curvature and flow tools.

Subpackages are intentionally flat:

- exact, linalg: scalar field Q(i, sqrt(d)) and exact elimination
- liealg, samelson: compact algebras, complex structures, metrics
- bicomplex, weyl, tanre: double complexes, coinvariants, finite models
- geometry, flow: invariant tensor calculus and the metric flow
- verify, cli: reproducible check suite and command line front end
"""

__version__ = "0.1.0"
