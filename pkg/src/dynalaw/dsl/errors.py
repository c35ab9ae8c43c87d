"""Error types for the constitutive-law DSL."""

from __future__ import annotations


class LawError(Exception):
    """Base class for all DSL failures."""


class LawSyntaxError(LawError):
    """Malformed source. Carries position and the token set that was expected."""

    def __init__(self, message: str, line: int, col: int, expected: tuple[str, ...] = ()):
        self.line = line
        self.col = col
        self.expected = tuple(expected)
        detail = f"line {line}, col {col}: {message}"
        if expected:
            detail += f" (expected one of: {', '.join(expected)})"
        super().__init__(detail)


class UnknownIdentifierError(LawError):
    def __init__(self, name: str, line: int = 0, col: int = 0):
        self.name = name
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: unknown identifier '{name}'")


class DuplicateParamError(LawError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"duplicate parameter '{name}'")


class LawTypeError(LawError):
    """Type mismatch inside a law body."""

    def __init__(self, message: str, node_id: int = -1):
        self.node_id = node_id
        super().__init__(message)


class ReturnTypeError(LawTypeError):
    """A body's return expression is not a 3x3 matrix."""


class EvalError(LawError):
    """Non-finite value produced during evaluation.

    node_id identifies the offending subexpression; node_text is its
    printed form, surfaced verbatim to the repair loop.
    """

    def __init__(self, message: str, node_id: int = -1, node_text: str = ""):
        self.node_id = node_id
        self.node_text = node_text
        detail = message if not node_text else f"{message} in subexpression '{node_text}'"
        super().__init__(detail)


class DomainError(EvalError):
    """Argument outside a builtin's domain (log of non-positive, singular inverse, ...)."""


class NonFiniteInputError(LawError):
    """svd3 received a matrix with NaN or Inf entries."""
