"""Exception hierarchy.

Two families: :class:`InvalidInput` for malformed or inconsistent data
(the CLI maps these to exit code 2) and :class:`NumericalFailure` for
singular systems, divergent integrals and similar (exit code 3).
"""

from __future__ import annotations


class InvalidInput(ValueError):
    """Input data is malformed, non-finite, or dimensionally inconsistent."""


class DimensionMismatch(InvalidInput):
    pass


class NotLagrangian(InvalidInput):
    pass


class NumericalFailure(ArithmeticError):
    """A computation hit a singular or ill-posed configuration.

    ``singular_value`` carries the offending smallest singular value (or
    determinant modulus) when one is available.
    """

    def __init__(self, message: str, singular_value: float | None = None):
        if singular_value is not None:
            message = f"{message} (smallest singular value {singular_value:.3e})"
        super().__init__(message)
        self.singular_value = singular_value


class SingularHessianBlock(NumericalFailure):
    pass


class DegenerateCriticalPoint(NumericalFailure):
    pass


class DivergentIntegral(NumericalFailure):
    pass


class BranchTrackingFailure(NumericalFailure):
    pass


class SingularLeviForm(NumericalFailure):
    pass


class FiberNotTransversal(NumericalFailure):
    pass


class NotTransversalToFiber(FiberNotTransversal):
    pass


class NoGeneratingFunction(NumericalFailure):
    pass


class EigenvalueTwo(NumericalFailure):
    pass


class CayleySingular(NumericalFailure):
    pass


class SingularMixedBlock(NumericalFailure):
    pass


class QuadratureFailure(NumericalFailure):
    pass
