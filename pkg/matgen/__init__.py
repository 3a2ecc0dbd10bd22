# This software is licensed under NNCL v1.4 see LICENSE.md for more info
"""
matgen: generation, invariants and strata of r-tuples of 2x2 complex matrices.
"""

__version__ = "1.0.0"
SCHEMA_VERSION = "1"
