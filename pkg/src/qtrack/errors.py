"""Exception types shared across the package.

Plain ``ValueError`` is used for bad arguments and malformed inputs; the
classes here exist so the CLI can map failures to distinct exit codes.
"""


class CapacityError(Exception):
    """A problem exceeds a hard size cap (brute force, statevector)."""


class NumericalError(Exception):
    """A numerical failure: non-finite objective value or feature."""
