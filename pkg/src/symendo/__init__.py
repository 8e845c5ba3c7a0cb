"""Exact-arithmetic invariants of symmetric varieties and endoscopic descent.

Submodules, bottom up:

- lattice: integer-lattice normal forms, quotients, finite group actions.
- rootdata: based root data, Weyl groups, restricted root systems, folding.
- involution: Galois/involution frames, theta-bases, admissibility tests.
- spherical: weight lattices, spherical roots, colors, doubling automorphisms.
- dual: dual group, associated coroots, dual involution, heart locus.
- endoscopy: descent at finite-order dual-torus elements.
- match: orbit spaces over finite fields and the matching map.
- catalog_cli: preset catalog, table jobs, command line interface.
"""

__version__ = "0.1.0"
