"""Exception types shared across the package."""


class QcapError(Exception):
    """Base class for package-specific errors."""


class DomainError(QcapError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class GeometryError(QcapError):
    """A geometric construction failed (empty or merged plates, bad shells, ...)."""


class EmptySetError(QcapError):
    """An operation that requires a nonempty cell set received an empty one."""


class SingularityError(QcapError):
    """The unregularized energy gradient was requested at a singular configuration."""


class DegenerateError(QcapError):
    """Too large a fraction of the domain carries a degenerate Jacobian."""


class WindowError(QcapError):
    """Exponents fall outside the validity window of the requested check."""
