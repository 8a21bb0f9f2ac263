"""Exception types shared across the package."""


class InputError(ValueError):
    """A parameter violates a documented precondition."""


class CapacityError(InputError):
    """A request exceeds a hard size limit (e.g. exhaustive enumeration cap)."""


class DataError(ValueError):
    """Detection-record data is malformed or inconsistent."""


class EstimationError(ValueError):
    """Counts are insufficient to form the requested estimate."""
