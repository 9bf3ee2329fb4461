"""Exceptions shared across the workbench."""


class PsiError(Exception):
    """Base class."""


class PsiSyntaxError(PsiError):
    def __init__(self, message: str, position: int | None = None):
        super().__init__(message if position is None else f"{message} (at {position})")
        self.position = position


class IllFormed(PsiError):
    """Unguarded assertion or a bad input pattern."""


class ArityMismatch(PsiError):
    pass


class DepthExceeded(PsiError):
    def __init__(self, bound: int, what: str = "depth"):
        super().__init__(f"{what} bound {bound} exceeded")
        self.bound = bound


class GeneratorExhausted(PsiError):
    pass


class NotPreNormalised(PsiError):
    """A restricted datum sits under an output prefix in a pi-F agent."""


class GoldenMismatch(PsiError):
    def __init__(self, step: int, expected: str, actual: str):
        super().__init__(f"step {step}: expected {expected}\n  got {actual}")
        self.step = step
        self.expected = expected
        self.actual = actual
