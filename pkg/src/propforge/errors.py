"""Exception types shared across modules."""


class PropforgeError(Exception):
    """Base class for every error raised by this package."""


class CapExceeded(PropforgeError):
    """An enumeration was asked to range over more variables than its cap allows."""
