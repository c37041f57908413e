"""Localized and magnetic Weyl calculus on discretized phase spaces over
nilpotent Lie groups.

Layered bottom-up:

- ``poly``       exact rational multivariate polynomials
- ``nilpotent``  BCH group law, translation action, coordinate-functional
                 spans, semidirect structure
- ``magnetic``   polynomial 1-forms/2-forms, magnetic phases, gauge moves
- ``repspace``   grids, discretized states/operators, phase-space transforms
- ``weyl``       ambiguity, Wigner, quantization, Moyal product
- ``modspace``   mixed-norm (modulation-type) norms and exponent algebra
- ``verify``     runnable identity/inequality checks with reports
- ``cli``        command-line front end
"""

__version__ = "0.1.0"
