"""Shared exception types.

The CLI maps these onto exit codes: InputError -> 2 (unusable input),
InvariantError -> 1 (well-formed input that violates a data invariant).
"""


class GasflowError(Exception):
    """Base class for all errors raised by this package."""


class InputError(GasflowError):
    """Malformed or unusable input (bad file, bad row, bad arguments)."""


class InvariantError(GasflowError):
    """Input parsed fine but violates a documented data invariant."""
