"""Exception types shared across the toolkit."""
from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class DegenerateInputError(ValueError):
    """The input is formally valid but leaves nothing to compute with, such
    as a zero survival probability or a zero overall gain."""

    def __init__(self, message: str, step: int | None = None) -> None:
        super().__init__(message)
        self.step = step


class NoSecureRegionError(RuntimeError):
    """A requested quantity is positive nowhere in the searched range."""
