# This software is licensed under NNCL v1.4 see LICENSE.md for more info
"""
Exception hierarchy for matgen.

Every error carries the CLI exit code it maps to:
0 success, 1 mathematical failure, 2 input error, 3 unsupported backend.
"""


class MatgenError(Exception):
    exit_code = 1


class InputError(MatgenError, ValueError):
    """Bad input: malformed documents, violated preconditions, wrong shapes."""

    exit_code = 2


class DocumentError(InputError):
    pass


class ConfigError(InputError):
    pass


class BackendMismatch(InputError):
    pass


class WrongArity(InputError):
    pass


class InvalidParameter(InputError):
    pass


class InvalidPoint(InputError):
    pass


class NotTraceless(InputError):
    pass


class ScalarBase(InputError):
    pass


class MarginViolation(InputError):
    pass


class NotOnSphere(InputError):
    pass


class NotUnitModulus(InputError):
    pass


class OnQuadric(InputError):
    pass


class SingularConjugator(InputError):
    pass


class WrongStratum(InputError):
    pass


class LineOutsideChart(InputError):
    pass


class InconsistentClassification(MatgenError):
    """The span test and the common-eigenline test disagree beyond tolerance."""

    exit_code = 1


class UnsupportedBackend(MatgenError):
    exit_code = 3
