"""Exact computations for quasi-split affine quantum symmetric pairs of type AIII.

Submodules: ``scalars`` (Q(v) and truncated series), ``matrix``, ``rootdata``
(Satake data and affine Weyl words), ``symnc`` (noncommutative polynomials and
braid substitutions), ``loopalg`` (loop algebra modules), ``coideal`` (the
coideal subalgebra and its Drinfeld-type generators), ``charlab`` (congruences,
spectra and q-characters) and ``cli``.
"""

__version__ = "0.1.0"
