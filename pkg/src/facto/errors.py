"""Exception types raised by facto."""

from __future__ import annotations


class FactoError(Exception):
    """Base class for all errors raised by the library."""


class BoundExceeded(FactoError):
    """A construction would exceed the configured morphism bound."""

    def __init__(self, what: str, size: int, bound: int):
        super().__init__(f"{what}: {size} morphisms exceeds bound {bound} (set FACTO_MAX_MOR to raise it)")
        self.what = what
        self.size = size
        self.bound = bound


class NotComposable(FactoError):
    pass


class MissingComposite(FactoError):
    pass


class NonCommutingSquare(FactoError):
    def __init__(self, square, msg: str = "square does not commute"):
        super().__init__(f"{msg}: {square}")
        self.square = square


class NoFactorization(FactoError):
    def __init__(self, morphism, msg: str = "no factorization"):
        super().__init__(f"{msg} for {morphism}")
        self.morphism = morphism


class HypothesisFailed(FactoError):
    """A theorem-level check was requested on an instance violating a hypothesis."""

    def __init__(self, which: str, witness=None):
        super().__init__(f"hypothesis failed: {which}" + (f" (witness {witness})" if witness is not None else ""))
        self.which = which
        self.witness = witness


class NotMono(FactoError):
    def __init__(self, morphism):
        super().__init__(f"not a monomorphism: {morphism}")
        self.morphism = morphism


class NotCartesian(FactoError):
    def __init__(self, reason: str, witness=None):
        super().__init__(f"not cartesian: {reason}" + (f" (witness {witness})" if witness is not None else ""))
        self.reason = reason
        self.witness = witness


class NoUniqueArrow(FactoError):
    def __init__(self, what: str, count: int):
        super().__init__(f"expected a unique arrow for {what}, found {count}")
        self.what = what
        self.count = count


class InternalDisagreement(FactoError):
    """Two independent computations of the same quantity differ."""

    def __init__(self, what: str, left, right):
        super().__init__(f"internal disagreement in {what}: {left!r} != {right!r}")
        self.what = what
        self.left = left
        self.right = right


class SpecSyntaxError(FactoError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.msg = msg
        self.line = line
        self.col = col


class LoadError(FactoError):
    def __init__(self, msg: str, line: int | None = None):
        super().__init__(msg if line is None else f"line {line}: {msg}")
        self.msg = msg
        self.line = line
