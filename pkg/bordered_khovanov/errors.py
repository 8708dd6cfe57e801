"""Exception hierarchy shared by every bordered_khovanov module."""

from typing import Any, Dict, Optional


class BorderedKhovanovError(Exception):
    """Base class for all library errors."""


class InputError(BorderedKhovanovError, ValueError):
    """Malformed or inconsistent input (bad identification, d^2 != 0 input, ...)."""


class SizeError(InputError):
    """n outside the supported bound, or two objects built for different n."""


class BridgeError(InputError):
    """A bridge that cannot be drawn on the given matching."""


class ParseError(InputError):
    """Tangle, link or matching text that does not parse."""

    def __init__(self, message: str, line: Optional[int] = None, event: Optional[int] = None):
        self.line = line
        self.event = event
        location = []
        if line is not None:
            location.append(f"line {line}")
        if event is not None:
            location.append(f"event {event}")
        suffix = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{suffix}")


class PresentationError(BorderedKhovanovError):
    """A presentation that is not of the linear-quadratic shape required."""


class ResourceError(BorderedKhovanovError):
    """A configured size limit was exceeded while spanning a graded piece."""


class VerificationError(BorderedKhovanovError):
    """An algebraic identity failed; `witness` records where."""

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        self.witness = witness or {}
        super().__init__(message)


class HypothesisError(VerificationError):
    """A hypothesis of the Gaussian elimination lemma does not hold."""

    def __init__(self, item: int, message: str, witness: Optional[Dict[str, Any]] = None):
        self.item = item
        super().__init__(f"item {item}: {message}", witness)


class CompositionError(BorderedKhovanovError):
    """Composition of A-infinity morphisms outside the supported case."""
