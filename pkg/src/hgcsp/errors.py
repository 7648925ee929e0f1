"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates an operation's stated precondition."""


class ResourceLimitError(RuntimeError):
    """An enumeration cap or search budget was exceeded."""


class CertificateError(AssertionError):
    """A result failed its own verification; indicates an internal bug
    or an inconsistent caller-supplied oracle."""


class BoundViolationError(RuntimeError):
    """A caller-supplied width bound turned out not to hold; carries the
    witness so the caller can inspect it instead of getting a wrong answer."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
