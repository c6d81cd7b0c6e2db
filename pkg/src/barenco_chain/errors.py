"""Exception types raised by the simulator."""

from __future__ import annotations


class BarencoChainError(Exception):
    """Base class for all errors raised by this package."""


class NotHermitianError(BarencoChainError, ValueError):
    """Input to a Hermitian-only routine violates the Hermiticity tolerance."""


class NoConvergenceError(BarencoChainError, ArithmeticError):
    """The Jacobi eigensolver exhausted its sweep budget."""


class WrongSizeError(BarencoChainError, ValueError):
    """Parameters describe a chain of the wrong length for the requested builder."""


class UnsupportedSizeError(BarencoChainError, ValueError):
    """Requested gate size is not supported."""


class DivisionByZeroError(BarencoChainError, ZeroDivisionError):
    """The XXZ anisotropy term is undefined for a vanishing exchange coupling."""


class DimensionMismatchError(BarencoChainError, ValueError):
    """Two operators that must act on the same space have different dimensions."""


class NotUnitaryError(BarencoChainError, ArithmeticError):
    """An operator expected to be unitary is not (usually integrator drift upstream)."""


class ImaginaryCouplingError(BarencoChainError, ValueError):
    """Perturbed (k, l) make the exchange coupling sqrt(l^2 - k^2) non-real."""


class BudgetExceededError(BarencoChainError, RuntimeError):
    """Step refinement would exceed the maximum step budget."""
