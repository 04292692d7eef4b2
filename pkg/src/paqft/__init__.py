"""paqft: desk-scale perturbative algebraic QFT.

Exact star products of polynomial field functionals over a discretized 1+1D
spacetime, Feynman-graph combinatorics of time-ordered products, extension of
singular distributions on the line, numerical wavefront-set estimation, and
finite-dimensional GNS/Weyl machinery, with a batch CLI.
"""

__version__ = "0.1.0"
