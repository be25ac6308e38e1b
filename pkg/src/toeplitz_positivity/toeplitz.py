"""Toeplitz operators with Gaussian symbols ``e^{2q}`` on ``H_{Phi0}``.

The pipeline: admissibility flags, the exact Weyl symbol ``c e^{iF}`` obtained
from the heat-flow convolution, the canonical map (from the polarized phase,
cross-checked against the Cayley map of ``F``), and the boundedness,
trace-class, unitarity and trace verdicts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, DivergentIntegral, EigenvalueTwo, NumericalFailure
from .fio import NondegeneratePhase
from .forms import (
    DEFAULT_TOL,
    ComplexQuadraticSymbolExponent,
    HolomorphicQuadraticForm,
    QuadraticWeight,
    gaussian_reduce,
    scaled_tol,
    split_herm_plh,
    symmetric_from_bilinear,
)
from .positivity import PositivityVerdict, RouteOutcome, combine_routes, error_route, hermitian_route, map_positivity
from .symplectic import ComplexCanonicalMap, cayley_map, fundamental_matrix, symplectic_J

NONDEGENERACY_RTOL = 1e-10


@dataclass(frozen=True)
class GaussianSymbol:
    """Weyl symbol ``a(x, xi) = c exp(i F(x, xi))``."""

    c: complex
    F: HolomorphicQuadraticForm

    @property
    def n(self) -> int:
        return self.F.m // 2

    def __call__(self, x, xi) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        xi = np.asarray(xi, dtype=complex)
        return self.c * np.exp(1j * self.F(np.concatenate(np.broadcast_arrays(x, xi), axis=-1)))

    def on_plane(self, x, phi0: QuadraticWeight) -> np.ndarray:
        """Value at the point of ``Lambda_phi0`` above ``x``."""
        g = phi0.graph_point(x)
        n = phi0.n
        return self(g[..., :n], g[..., n:])


@dataclass(frozen=True)
class Admissibility:
    densely_defined: bool
    densely_defined_margin: float
    convergent: bool
    convergence_margin: float
    nondegenerate: bool
    nondegeneracy_det: float
    nondegeneracy_marginal: bool


@dataclass(frozen=True)
class ToeplitzReport:
    admissibility: Admissibility
    weyl: GaussianSymbol | None
    kappa: ComplexCanonicalMap | None
    cayley_residual: float | None
    bounded: PositivityVerdict | None
    trace_class: bool
    unitary_up_to_phase: bool
    unitary_amplitude_defect: float | None
    trace: complex | None
    restricted_hessian: np.ndarray | None

    @property
    def bounded_label(self) -> str:
        if self.bounded is None:
            return "undetermined"
        if self.bounded.is_positive:
            return "bounded"
        return "unbounded (by example-class evidence)"


def admissibility(q: ComplexQuadraticSymbolExponent, phi0: QuadraticWeight, tol: float = DEFAULT_TOL) -> Admissibility:
    """Flags for ``Phi_herm - 2 Re q > 0``, ``4 Phi_herm - 2 Re q > 0`` and ``det(L0/2 - q''_{y conj y}) != 0``."""
    if q.n != phi0.n:
        raise DimensionMismatch("symbol exponent and weight dimensions differ")
    herm, _ = split_herm_plh(phi0)
    Sh, Sq = herm.hessian(), q.real_part().hessian()
    t = scaled_tol(tol, Sh, Sq)
    dense = float(np.linalg.eigvalsh(Sh - 2 * Sq)[0])
    conv = float(np.linalg.eigvalsh(4 * Sh - 2 * Sq)[0])
    n = phi0.n
    det = float(abs(np.linalg.det(phi0.L / 2 - q.levi())))
    floor = NONDEGENERACY_RTOL * np.linalg.norm(phi0.L / 2, 2) ** n
    return Admissibility(dense > t, dense, conv > t, conv, det > floor, det, det <= floor)


def _convolution_exponent(q: ComplexQuadraticSymbolExponent, phi0: QuadraticWeight) -> HolomorphicQuadraticForm:
    """``-2 (x - y)^T L0 (conj x - conj y) + 2 q(y)`` over ``(Re y, Im y, x, conj x)``."""
    n = q.n
    I, Z = np.eye(n), np.zeros((n, n))
    Sy = np.hstack([I, 1j * I, Z, Z])
    Syb = np.hstack([I, -1j * I, Z, Z])
    Sx = np.hstack([Z, Z, I, Z])
    Sxb = np.hstack([Z, Z, Z, I])
    E = symmetric_from_bilinear(Sx - Sy, -2 * phi0.L, Sxb - Syb)
    E = E + symmetric_from_bilinear(Sy, 2 * q.Q1, Sy)
    E = E + symmetric_from_bilinear(Syb, 2 * q.Q2, Sy)
    E = E + symmetric_from_bilinear(Syb, 2 * q.Q3, Syb)
    return HolomorphicQuadraticForm(E)


def plane_coordinates(phi0: QuadraticWeight) -> np.ndarray:
    """``P`` with ``P (Re x, Im x)`` the point of ``Lambda_phi0`` above ``x``."""
    n = phi0.n
    I = np.eye(n)
    W = np.block([[I, 1j * I], [I, -1j * I]])
    S = np.block([[I, np.zeros((n, n))], [-2j * phi0.A, -1j * phi0.L]])
    return S @ W


def weyl_symbol(q: ComplexQuadraticSymbolExponent, phi0: QuadraticWeight) -> GaussianSymbol:
    """Exact Weyl symbol of ``Top(e^{2q})`` by Gaussian heat-flow convolution."""
    adm = admissibility(q, phi0)
    if not adm.convergent:
        raise DivergentIntegral(
            "convolution integral diverges: 4 Phi_herm - 2 Re q is not positive definite",
            singular_value=adm.convergence_margin,
        )
    n = phi0.n
    red = gaussian_reduce(_convolution_exponent(q, phi0), 2 * n)
    C = (2 / np.pi) ** n * float(np.real(np.linalg.det(phi0.L)))
    c = C * np.exp(red.log_amplitude)
    # conj x = L0^{-1} (i xi - 2 A0 x) on Lambda_phi0
    Linv = np.linalg.inv(phi0.L)
    S = np.block([[np.eye(n), np.zeros((n, n))], [-2 * Linv @ phi0.A, 1j * Linv]])
    F = -1j * S.T @ red.reduced.Q @ S
    return GaussianSymbol(complex(c), HolomorphicQuadraticForm((F + F.T) / 2))


def toeplitz_map(q: ComplexQuadraticSymbolExponent, phi0: QuadraticWeight) -> ComplexCanonicalMap:
    """Canonical map of ``Top(e^{2q})`` from the polarized Toeplitz phase."""
    return NondegeneratePhase.toeplitz(q, phi0).canonical_map()


def cayley_cross_check(kappa: ComplexCanonicalMap, symbol: GaussianSymbol) -> float | None:
    """``max |kappa - cayley_map(F)|``; ``None`` when ``F`` has fundamental eigenvalue +-2."""
    try:
        return float(np.max(np.abs(kappa.M - cayley_map(symbol.F).M)))
    except EigenvalueTwo:
        return None


def restricted_phase_hessian(symbol: GaussianSymbol, phi0: QuadraticWeight) -> np.ndarray:
    """Complex symmetric ``C`` with ``F|_Lambda(r) = 1/2 r^T C r`` in real coordinates."""
    P = plane_coordinates(phi0)
    C = P.T @ symbol.F.Q @ P
    return (C + C.T) / 2


def _plane_volume(phi0: QuadraticWeight) -> float:
    """Density of ``sigma^n / n!`` on ``Lambda_phi0`` in real coordinates."""
    P = plane_coordinates(phi0)
    Omega = P.T @ symplectic_J(phi0.n).T @ P
    return float(np.sqrt(abs(np.linalg.det(Omega.real))))


def symbol_trace(symbol: GaussianSymbol, phi0: QuadraticWeight) -> complex:
    """``(2 pi)^{-n} int_Lambda a sigma^n/n!`` as an exact Gaussian integral."""
    n = phi0.n
    C = restricted_phase_hessian(symbol, phi0)
    red = gaussian_reduce(HolomorphicQuadraticForm(1j * C), 2 * n)
    return complex(symbol.c * (2 * np.pi) ** (-n) * _plane_volume(phi0) * np.exp(red.log_amplitude))


def analyze(q: ComplexQuadraticSymbolExponent, phi0: QuadraticWeight, tol: float = DEFAULT_TOL) -> ToeplitzReport:
    adm = admissibility(q, phi0, tol)
    if not adm.convergent:
        return ToeplitzReport(adm, None, None, None, None, False, False, None, None, None)
    symbol = weyl_symbol(q, phi0)
    C = restricted_phase_hessian(symbol, phi0)
    direct = hermitian_route("restricted_phase", C.imag, tol, (C,))

    kappa, residual = None, None
    if adm.nondegenerate:
        try:
            kappa = toeplitz_map(q, phi0)
            residual = cayley_cross_check(kappa, symbol)
        except NumericalFailure as exc:
            kappa = None
            char = error_route("map_positivity", exc)
    if kappa is not None:
        mp = map_positivity(kappa, phi0, phi0, tol)
        char = RouteOutcome(
            "map_positivity", mp.status, mp.min_eigenvalue, mp.direct.eigenvalues, mp.witness, mp.tol,
            detail={"route_agreement": mp.route_agreement},
        )
    elif adm.nondegeneracy_marginal or not adm.nondegenerate:
        char = RouteOutcome("map_positivity", None, None, error="NondegeneracyMarginal")
    bounded = combine_routes(direct, char, tol)

    trace_class = bounded.status.value == "StrictlyPositive"
    Fm = fundamental_matrix(symbol.F)
    expected = abs(np.linalg.det(np.eye(2 * phi0.n) - Fm / 2)) ** 0.5
    amp_defect = abs(abs(symbol.c) - expected)
    unitary = bool(np.max(np.abs(C.imag)) <= scaled_tol(tol, C) and amp_defect <= scaled_tol(tol, expected))
    trace = symbol_trace(symbol, phi0) if trace_class else None
    return ToeplitzReport(adm, symbol, kappa, residual, bounded, trace_class, unitary, amp_defect, trace, C)
