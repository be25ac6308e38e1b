"""Positivity of complex Lagrangian planes and canonical maps relative to weights.

Every verdict is computed along two independent routes: directly from the
Hermitian ``b``-forms, and through the weight-comparison characterization.
Disagreement between decisive routes is surfaced as ``InconsistentRoutes``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidInput, NotLagrangian, NotTransversalToFiber, NumericalFailure
from .forms import (
    DEFAULT_TOL,
    SINGULAR_RTOL,
    HolomorphicQuadraticForm,
    QuadraticWeight,
    check_invertible,
    compare_weights,
    scaled_tol,
)
from .symplectic import ComplexCanonicalMap, hermitian_b, map_from_generating, push_weight, symplectic_J

DECISIVE_MARGIN = 1e-7


class Status(str, Enum):
    STRICTLY_POSITIVE = "StrictlyPositive"
    DEGENERATE_POSITIVE = "DegeneratePositive"
    NOT_POSITIVE = "NotPositive"
    INCONSISTENT_ROUTES = "InconsistentRoutes"

    def __str__(self) -> str:
        return self.value


def classify(min_eigenvalue: float, tol: float) -> Status:
    if min_eigenvalue > tol:
        return Status.STRICTLY_POSITIVE
    if min_eigenvalue < -tol:
        return Status.NOT_POSITIVE
    return Status.DEGENERATE_POSITIVE


@dataclass(frozen=True)
class RouteOutcome:
    """Raw output of one decision route."""

    name: str
    status: Status | None
    min_eigenvalue: float | None
    eigenvalues: np.ndarray | None = None
    witness: np.ndarray | None = None
    tol: float | None = None
    error: str | None = None
    detail: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class PositivityVerdict:
    status: Status
    min_eigenvalue: float
    witness: np.ndarray
    route_agreement: bool
    direct: RouteOutcome
    characterization: RouteOutcome
    tol: float

    @property
    def is_positive(self) -> bool:
        return self.status in (Status.STRICTLY_POSITIVE, Status.DEGENERATE_POSITIVE)


@dataclass(frozen=True)
class CLagrangianPlane:
    """Complex Lagrangian subspace of ``C^{2n}`` spanned by the columns of ``basis``."""

    basis: np.ndarray

    def __post_init__(self):
        B = np.atleast_2d(np.asarray(self.basis, dtype=complex))
        if B.ndim != 2 or B.shape[0] != 2 * B.shape[1]:
            raise InvalidInput(f"Lagrangian basis must be 2n x n, got {B.shape}")
        if not np.all(np.isfinite(B)):
            raise InvalidInput("Lagrangian basis contains non-finite entries")
        n = B.shape[1]
        s = np.linalg.svd(B, compute_uv=False)
        if s[-1] < SINGULAR_RTOL * s[0]:
            raise NotLagrangian(f"basis is rank deficient (smallest singular value {s[-1]:.3e})")
        defect = np.max(np.abs(B.T @ symplectic_J(n) @ B))
        if defect > 1e-8 * s[0] ** 2:
            raise NotLagrangian(f"symplectic form does not vanish on the plane (defect {defect:.3e})")
        B = B.copy()
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @property
    def n(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def graph_of(cls, phi_hess: np.ndarray) -> "CLagrangianPlane":
        """``{(x, phi'' x)}`` for a symmetric ``phi''``."""
        phi_hess = np.atleast_2d(phi_hess)
        return cls(np.vstack([np.eye(phi_hess.shape[0]), phi_hess]))

    def orthonormal_basis(self) -> np.ndarray:
        Qm, _ = np.linalg.qr(self.basis)
        return Qm


def hermitian_route(name: str, H: np.ndarray, tol: float, scale_with=()) -> RouteOutcome:
    H = (H + H.conj().T) / 2
    t = scaled_tol(tol, H, *scale_with)
    w, V = np.linalg.eigh(H)
    return RouteOutcome(name, classify(w[0], t), float(w[0]), w, V[:, 0], t)


def _comparison_route(name: str, phi_a: QuadraticWeight, phi_b: QuadraticWeight, tol: float, **detail) -> RouteOutcome:
    cmp = compare_weights(phi_a, phi_b, tol)
    return RouteOutcome(
        name, classify(cmp.min_eigenvalue, cmp.tol), cmp.min_eigenvalue, cmp.eigenvalues, cmp.witness, cmp.tol,
        detail=detail,
    )


def combine_routes(direct: RouteOutcome, char: RouteOutcome, tol: float) -> PositivityVerdict:
    status = direct.status
    if not char.ok:
        # a decisively positive direct verdict forces the characterization to exist
        agree = direct.status == Status.NOT_POSITIVE
        if direct.min_eigenvalue > DECISIVE_MARGIN:
            status = Status.INCONSISTENT_ROUTES
    else:
        agree = direct.status == char.status
        opposed = (direct.min_eigenvalue > DECISIVE_MARGIN and char.min_eigenvalue < -DECISIVE_MARGIN) or (
            direct.min_eigenvalue < -DECISIVE_MARGIN and char.min_eigenvalue > DECISIVE_MARGIN
        )
        if opposed:
            status = Status.INCONSISTENT_ROUTES
        elif not agree:
            # differing labels count as agreement only when both margins sit in the degenerate band
            agree = abs(direct.min_eigenvalue) <= DECISIVE_MARGIN and abs(char.min_eigenvalue) <= DECISIVE_MARGIN
    return PositivityVerdict(status, direct.min_eigenvalue, direct.witness, bool(agree), direct, char, direct.tol or tol)


def error_route(name: str, exc: Exception) -> RouteOutcome:
    return RouteOutcome(name, None, None, error=f"{type(exc).__name__}: {exc}")


# ---------------------------------------------------------------------------


def lagrangian_positivity(plane: CLagrangianPlane, phi0: QuadraticWeight, tol: float = DEFAULT_TOL) -> PositivityVerdict:
    """Positivity of ``plane`` relative to ``Lambda_phi0``.

    Direct route: inertia of ``b`` restricted to the plane. Characterization
    route: write the plane as ``Lambda_Psi`` with ``Psi = -Im phi`` pluriharmonic
    and compare ``Psi`` against ``phi0``.
    """
    if plane.n != phi0.n:
        raise InvalidInput(f"plane lives in C^{2 * plane.n} but weight in C^{phi0.n}")
    b = hermitian_b(phi0)
    direct = hermitian_route("hermitian_form", b.restrict(plane.orthonormal_basis()), tol, (b.B,))
    n = plane.n
    X, Xi = plane.basis[:n], plane.basis[n:]
    try:
        check_invertible(X, NotTransversalToFiber, "projection of the plane to the base")
        phi_hess = Xi @ np.linalg.inv(X)
        phi_hess = (phi_hess + phi_hess.T) / 2
        psi = QuadraticWeight(0.5j * phi_hess, np.zeros((n, n)))
        char = _comparison_route("weight_comparison", phi0, psi, tol, phi_hessian=phi_hess, psi=psi)
    except NumericalFailure as exc:
        char = error_route("weight_comparison", exc)
    return combine_routes(direct, char, tol)


def map_positivity(
    M: ComplexCanonicalMap, phi1: QuadraticWeight, phi2: QuadraticWeight, tol: float = DEFAULT_TOL
) -> PositivityVerdict:
    """Positivity of ``M`` relative to ``(Lambda_phi1, Lambda_phi2)``.

    Direct route: spectrum of ``M^* B1 M - B2``. Characterization route: push
    ``phi2`` forward, require strict plurisubharmonicity, compare with ``phi1``.
    """
    if not (M.n == phi1.n == phi2.n):
        raise InvalidInput("map and weights have inconsistent dimensions")
    B1, B2 = hermitian_b(phi1).B, hermitian_b(phi2).B
    direct = hermitian_route("hermitian_form", M.M.conj().T @ B1 @ M.M - B2, tol, (B1, B2))
    try:
        pushed = push_weight(M, phi2)
        levi = pushed.levi_eigenvalues()
        if levi[0] <= scaled_tol(tol, pushed.L):
            char = RouteOutcome(
                "weight_comparison", Status.NOT_POSITIVE, float(levi[0]), levi, None, scaled_tol(tol, pushed.L),
                detail={"pushed_weight": pushed, "reason": "pushed weight not strictly plurisubharmonic"},
            )
        else:
            char = _comparison_route("weight_comparison", phi1, pushed, tol, pushed_weight=pushed)
    except NumericalFailure as exc:
        char = error_route("weight_comparison", exc)
    return combine_routes(direct, char, tol)


def generating_positivity_matrix(phi: HolomorphicQuadraticForm, phi1: QuadraticWeight) -> np.ndarray:
    """Hermitian matrix in ``(x, theta)`` whose sign decides positivity against ``(phi1, model)``."""
    n = phi1.n
    if phi.m != 2 * n:
        raise InvalidInput(f"generating function must live on C^{2 * n}")
    check_invertible(phi1.L, NotTransversalToFiber, "Levi matrix L")
    H = phi.Q
    E = np.hstack([H[:n, :n] + 2j * phi1.A, H[:n, n:]])
    G = np.hstack([H[n:, :n], H[n:, n:]])
    Linv = np.linalg.inv(phi1.L)
    top = np.zeros((2 * n, 2 * n), complex)
    top[:n, :n] = phi1.L.conj()
    top[n:, n:] = np.eye(n)
    # L conj(x).x - L^{-1} w.conj(w) with w = phi'_x + 2iAx: note L^{-1}, not its conjugate
    return top - E.conj().T @ Linv @ E - G.conj().T @ G


def positivity_via_generating(
    phi: HolomorphicQuadraticForm, phi1: QuadraticWeight, tol: float = DEFAULT_TOL
) -> PositivityVerdict:
    """Positivity against ``(phi1, |x|^2/2)`` read off a generating function ``phi(x, theta)``."""
    n = phi1.n
    direct = hermitian_route("generating_inequality", generating_positivity_matrix(phi, phi1), tol, (phi1.L,))
    try:
        M = map_from_generating(phi, n)
        via_map = map_positivity(M, phi1, QuadraticWeight.model(n), tol)
        char = RouteOutcome(
            "induced_map", via_map.status, via_map.min_eigenvalue, via_map.direct.eigenvalues,
            via_map.witness, via_map.tol, detail={"map": M},
        )
    except (NumericalFailure, InvalidInput) as exc:
        char = error_route("induced_map", exc)
    return combine_routes(direct, char, tol)
