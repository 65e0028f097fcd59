"""Base exception shared by every qfe module."""


class QfeError(Exception):
    """Root of the qfe error hierarchy; each module subclasses it for its own failures."""
