"""Shared exception types.

Each carries the CLI exit status used when it escapes a subcommand, so the
command-line layer can map failures without a lookup table.
"""


class OrbitCensusError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ParameterError(OrbitCensusError, ValueError):
    """Invalid argument values (lengths, ranges, malformed vectors)."""

    exit_code = 1


class CapacityError(OrbitCensusError):
    """Request exceeds the supported size envelope of an engine."""

    exit_code = 2


class StateError(OrbitCensusError):
    """Data required by the operation is absent (e.g. necklace sizes)."""

    exit_code = 1


class ValidationFailure(OrbitCensusError):
    """A mathematical identity check exceeded its tolerance."""

    exit_code = 3


class NumericalError(OrbitCensusError):
    """Floating-point result too far from the exact value it must round to."""

    exit_code = 4
