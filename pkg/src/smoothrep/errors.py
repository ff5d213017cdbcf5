"""Exception types shared by every module.

Each error maps onto one CLI exit code (see ``smoothrep.cli``).
"""

from __future__ import annotations

from typing import Any


class SmoothRepError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(SmoothRepError, ValueError):
    """An argument violated a documented precondition."""


class NotInvertible(SmoothRepError, ValueError):
    def __init__(self, a: int, m: int) -> None:
        super().__init__(f"{a} is not invertible modulo {m}")
        self.a = a
        self.m = m


class NonResidue(SmoothRepError, ValueError):
    def __init__(self, a: int, p: int) -> None:
        super().__init__(f"{a} is a quadratic non-residue modulo {p}")
        self.a = a
        self.p = p


class FactorBudgetExceeded(SmoothRepError):
    """Factoring gave up on a composite cofactor.

    ``partial`` is the factorization found so far and ``composite`` the
    unsplit cofactor.  Generators attach their partial ``state`` as well.
    """

    def __init__(self, partial: Any, composite: int, state: Any = None) -> None:
        digits = len(str(composite))
        super().__init__(f"factoring budget exhausted on a {digits}-digit composite")
        self.partial = partial
        self.composite = composite
        self.state = state


class NotRepresentable(SmoothRepError):
    def __init__(self, p: int, a: int) -> None:
        super().__init__(f"class {a} mod {p} has no squarefree {p}-smooth representative")
        self.p = p
        self.a = a


class SearchExhausted(SmoothRepError):
    """A bounded search ran out of room; ``partial`` holds whatever was built."""

    def __init__(self, message: str, partial: Any = None) -> None:
        super().__init__(message)
        self.partial = partial


class VerificationFailure(SmoothRepError):
    """A result contradicted the representability theorem or a certificate failed."""

    def __init__(self, message: str, p: int | None = None, report: Any = None) -> None:
        super().__init__(message)
        self.p = p
        self.report = report


class NotFound(SmoothRepError):
    pass


class CapExceeded(SmoothRepError, ValueError):
    pass
