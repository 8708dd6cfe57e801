"""
bordered_khovanov

Bordered Khovanov homology over the arc algebra H^n and the Roberts-type algebras
rebuilt from it: tangle complexes, Type D / Type A structures, DD bimodules and
the pairings that recover the Khovanov complex of a link.
"""

__version__ = "0.1.0"
