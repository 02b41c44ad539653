"""Physical constants in CGS-Gaussian units.

CODATA 2018 values. CGS throughout: the skin depth c/omega_p and the
free-electron plasma frequency sqrt(4 pi n e^2 / m) take their textbook
form without any 4*pi*eps0 bookkeeping.
"""

SPEED_OF_LIGHT = 2.99792458e10
"""Speed of light in vacuum, cm/s (exact)."""

ELEMENTARY_CHARGE = 4.803204713e-10
"""Elementary charge, esu (statcoulomb)."""

ELECTRON_MASS = 9.1093837015e-28
"""Electron rest mass, g."""

HBAR = 1.054571817e-27
"""Reduced Planck constant, erg*s."""
