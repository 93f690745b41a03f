"""Exception hierarchy shared by all treeshift modules."""


class TreeShiftError(Exception):
    """Base class for every error raised by this package."""


class DomainError(TreeShiftError, ValueError):
    """An argument lies outside the domain of an operation (unknown vertex, bad parameter)."""


class WindowError(TreeShiftError):
    """A truncation window is too small for the requested computation."""


class PreconditionError(TreeShiftError):
    """An operation was called on an object that does not meet its requirements."""


class SpecError(TreeShiftError):
    """A shift specification file could not be parsed or failed validation."""
