"""Exceptions raised by the engine.

Everything derives from ``EngineError``, itself a ``ValueError``, so callers that only
care about "bad input" can keep catching ``ValueError``.
"""

from __future__ import annotations


class EngineError(ValueError):
    """Base class for all engine errors."""


class NotArtinianError(EngineError):
    """A length was requested for a module that does not have finite length."""


class InRelationsError(EngineError):
    """A monomial expected to be nonzero in M = R/I lies in I."""


class NotFiniteLengthError(EngineError):
    """A termwise length sum was requested for a complex with an infinite term."""


class ShapeMismatchError(EngineError):
    """Matrices or complexes that must line up do not."""


class UnstableError(EngineError):
    """A quantity did not stabilize within the configured scan bound."""


class DisagreementError(EngineError):
    """Two independent computations of the same number disagree."""

    def __init__(self, message: str, dump: dict | None = None) -> None:
        super().__init__(message)
        self.dump = dump or {}


class NotSOPError(EngineError):
    """The elements do not form a system of parameters for the module."""


class NoStabilizationError(EngineError):
    """An ascending chain did not become stationary below the scan cap."""


class RadicalMismatchError(EngineError):
    """Two systems that must generate ideals with the same radical do not."""


class ConstructionError(EngineError):
    """A complex, system or weight assignment violates its structural invariants."""


class InstanceError(EngineError):
    """An instance file failed validation.

    Args:
        message: What is wrong
        field: Dotted path of the offending field, e.g. ``a[1].monomial``
    """

    def __init__(self, message: str, field: str | None = None) -> None:
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_UNSTABLE = 3


def exit_code(exc: BaseException) -> int:
    """Process exit code for an engine failure."""
    if isinstance(exc, UnstableError | NoStabilizationError):
        return EXIT_UNSTABLE
    if isinstance(exc, DisagreementError):
        return EXIT_FAIL
    return EXIT_INVALID
