"""
Configuration defaults for towerlab
"""

# q-expansion precision, in integral q-terms
DEFAULT_PRECISION_TERMS = 120
ROBUST_PRECISION_TERMS = 200

# Exponent grid: one grid unit is q^(1/24)
GRID = 24

# Extra grid units computed beyond the requested precision of an identity check
WORK_MARGIN = 12 * GRID

# Field limits
MAX_FIELD_SIZE = 10**6
MAX_EXTENSION_DEGREE = 12
MAX_POLY_DEGREE = 64

# Tower limits
MAX_DEPTH = 12
MAX_GENUS_LEVEL = 14

# Ramification analysis runs over GF(p^2) for each surrogate prime p
DEFAULT_SURROGATES = (101, 103)
SURROGATE_DEGREE = 2

# Worker pool size for batch runs
MAX_WORKERS = 8
