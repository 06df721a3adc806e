"""Shared exception types."""


class InvariantError(RuntimeError):
    """An internal exact identity failed; signals a bug upstream, not bad input."""
