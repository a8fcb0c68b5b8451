"""Exact-arithmetic toolkit for primitive/normal element existence certificates.

The package decides, for a prime power q and extension degree n, whether
every admissible rational function f over GF(q^n) admits a primitive element
alpha of GF(q^n), normal over GF(q), with f(alpha) primitive as well; it
produces replayable certificates for the decision and brute-force oracles to
validate them on enumerable fields.
"""

__version__ = "0.1.0"
