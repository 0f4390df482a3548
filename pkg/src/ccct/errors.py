"""Exception hierarchy shared by every module.

Each class carries the process exit status the CLI reports for it.
"""


class CCCError(Exception):
    """Base class for all channel errors."""

    exit_code = 5


class InvalidArgument(CCCError, ValueError):
    exit_code = 1


class FormatError(CCCError, ValueError):
    """Malformed carrier, key, nonce, filter or plan file."""

    exit_code = 2


class DanglingReference(FormatError):
    """A GEXF element refers to an undeclared node or attribute."""


class CapacityError(CCCError, ValueError):
    """Payload or selection does not fit the available links/members."""

    exit_code = 3

    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


class KeyMismatch(CCCError):
    """Key or nonce does not validate against the shipped Bloom filter."""

    exit_code = 4


class GraphError(CCCError, ValueError):
    """Unknown node, forbidden loop or other graph-model violation."""

    exit_code = 1


class InternalError(CCCError):
    """Self-check failed; indicates a bug rather than bad input."""

    exit_code = 5
