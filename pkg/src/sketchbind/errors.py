"""Exception types shared across the package.

Every error that can cross the session protocol carries a short stable
code (see ``fault_code``) so clients can match on it without parsing
messages.
"""


class SketchbindError(Exception):
    """Base class for all package errors."""

    code = "Error"


# --- geometry ---

class NoIntersectionError(SketchbindError):
    """View ray is parallel to the plane or points away from it."""

    code = "NoIntersection"


class BehindCameraError(SketchbindError):
    """Point has non-positive depth in the camera frame."""

    code = "BehindCamera"


# --- scene container ---

class MalformedManifestError(SketchbindError):
    code = "MalformedManifest"


class UnsupportedVersionError(SketchbindError):
    code = "UnsupportedVersion"


class FrameCountMismatchError(SketchbindError):
    code = "FrameCountMismatch"


class CorruptFrameError(SketchbindError):
    code = "CorruptFrame"


# --- tracking ---

class TapOutOfBoundsError(SketchbindError):
    code = "OutOfBounds"


# --- sketching ---

class StrokeTooShortError(SketchbindError):
    code = "StrokeTooShort"


class NoAnchorError(SketchbindError):
    code = "NoAnchor"


class DegenerateGeometryError(SketchbindError):
    code = "DegenerateGeometry"


# --- expression language ---

class ExpressionSyntaxError(SketchbindError):
    """Raised by the parser; ``position`` is a 0-based character offset."""

    code = "SyntaxError"

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class EvalError(SketchbindError):
    """Base class for evaluation failures."""

    code = "EvalError"


class UnknownIdentifierError(EvalError):
    code = "UnknownIdentifier"

    def __init__(self, name):
        super().__init__(f"unknown identifier '{name}'")
        self.name = name


class DivisionByZeroError(EvalError):
    code = "DivisionByZero"


class DomainError(EvalError):
    """Math domain failure (sqrt of a negative, non-finite result, ...)."""

    code = "DomainError"


# --- binding engine ---

class NameCollisionError(SketchbindError):
    code = "NameCollision"


class CyclicDependencyError(SketchbindError):
    code = "CyclicDependency"


class InvalidNameError(SketchbindError):
    code = "InvalidName"


# --- visualization ---

class AlreadyRecordingError(SketchbindError):
    code = "AlreadyRecording"


class NotRecordingError(SketchbindError):
    code = "NotRecording"


# --- session protocol ---

class ProtocolVersionMismatchError(SketchbindError):
    code = "ProtocolVersionMismatch"


class UnknownEntityError(SketchbindError):
    code = "UnknownEntity"


class BadModeError(SketchbindError):
    code = "BadMode"


class OutOfRangeError(SketchbindError):
    code = "OutOfRange"


class NotEstablishedError(SketchbindError):
    code = "NotEstablished"


class BadCommandError(SketchbindError):
    code = "BadCommand"


# --- scene generators ---

class BadParamsError(SketchbindError):
    code = "BadParams"


def fault_code(exc: Exception) -> str:
    """Stable protocol code for an exception (``"Error"`` for foreign ones)."""
    return getattr(exc, "code", "Error")
