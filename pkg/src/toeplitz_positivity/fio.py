"""Exact kernel calculus for metaplectic Fourier integral operators.

A phase ``phi(x, y, theta)`` is one holomorphic quadratic form over the joint
variables. Its canonical relation is ``(y, -phi'_y) -> (x, phi'_x)`` on
``phi'_theta = 0``. Bergman kernels take the form ``a e^{2 Psi(x, conj y)}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidInput,
    NotTransversalToFiber,
    SingularLeviForm,
    SingularMixedBlock,
)
from .forms import (
    DEFAULT_TOL,
    SINGULAR_RTOL,
    ComplexQuadraticSymbolExponent,
    FormComparison,
    HolomorphicQuadraticForm,
    QuadraticWeight,
    check_invertible,
    compare_weights,
    critical_value_hol,
    polarize,
    real_critical_value,
    spectrum_comparison,
    track_log_det,
)
from .positivity import (
    CLagrangianPlane,
    PositivityVerdict,
    RouteOutcome,
    Status,
    classify,
    lagrangian_positivity,
    map_positivity,
)
from .symplectic import ComplexCanonicalMap


@dataclass(frozen=True)
class BergmanKernel:
    """Kernel ``amplitude * exp(2 Psi(x, conj y))``; ``Psi`` lives on ``C^n x C^n``."""

    amplitude: complex
    Psi: HolomorphicQuadraticForm
    branch: str = "homotopy"

    @property
    def n(self) -> int:
        return self.Psi.m // 2

    def __call__(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        z = np.concatenate(np.broadcast_arrays(x, y.conj()), axis=-1)
        return self.amplitude * np.exp(2 * self.Psi(z))


@dataclass(frozen=True)
class NondegeneratePhase:
    """Holomorphic quadratic phase ``phi(x, y, theta)`` stored as one symmetric matrix."""

    n_x: int
    n_y: int
    N: int
    form: HolomorphicQuadraticForm

    def __post_init__(self):
        if self.form.m != self.n_x + self.n_y + self.N:
            raise DimensionMismatch("phase matrix size does not match n_x + n_y + N")
        if self.N:
            rows = self.form.Q[self.theta_index]
            s = np.linalg.svd(rows, compute_uv=False)
            if s[-1] < SINGULAR_RTOL * max(s[0], 1e-300):
                raise InvalidInput("phase is degenerate: theta-gradient relations are rank deficient")

    @property
    def x_index(self) -> np.ndarray:
        return np.arange(self.n_x)

    @property
    def y_index(self) -> np.ndarray:
        return np.arange(self.n_x, self.n_x + self.n_y)

    @property
    def theta_index(self) -> np.ndarray:
        return np.arange(self.n_x + self.n_y, self.form.m)

    @classmethod
    def from_generating(cls, g: HolomorphicQuadraticForm, n: int) -> "NondegeneratePhase":
        """``g(x, theta) - y.theta``; its relation is the map generated by ``g``."""
        Q = np.zeros((3 * n, 3 * n), complex)
        ix, iy, it = np.arange(n), np.arange(n, 2 * n), np.arange(2 * n, 3 * n)
        xt = np.r_[ix, it]
        Q[np.ix_(xt, xt)] = g.Q
        Q[np.ix_(iy, it)] = -np.eye(n)
        Q[np.ix_(it, iy)] = -np.eye(n)
        return cls(n, n, n, HolomorphicQuadraticForm(Q))

    @classmethod
    def toeplitz(cls, q: ComplexQuadraticSymbolExponent, phi0: QuadraticWeight) -> "NondegeneratePhase":
        """``(2/i)(Psi0(x, theta) - Psi0(y, theta) + q(y, theta))`` with ``conj y -> theta`` in ``q``."""
        n = phi0.n
        if q.n != n:
            raise DimensionMismatch("symbol exponent and weight dimensions differ")
        P0 = polarize(phi0).Q
        ix, iy, it = np.arange(n), np.arange(n, 2 * n), np.arange(2 * n, 3 * n)
        Q = np.zeros((3 * n, 3 * n), complex)
        xt, yt = np.r_[ix, it], np.r_[iy, it]
        Q[np.ix_(xt, xt)] += P0
        Q[np.ix_(yt, yt)] -= P0
        Q[np.ix_(yt, yt)] += q.polarized().Q
        return cls(n, n, n, HolomorphicQuadraticForm(-2j * Q))

    def canonical_map(self) -> ComplexCanonicalMap:
        if self.n_x != self.n_y:
            raise DimensionMismatch("canonical relation is a map only when n_x = n_y")
        n = self.n_x
        Q = self.form.Q
        if self.N:
            # nullspace of the theta-gradient: the critical manifold
            Vh = np.linalg.svd(Q[self.theta_index])[2]
            Z = Vh[self.N :].conj().T
        else:
            Z = np.eye(self.form.m)
        X, Y = Z[self.x_index], Z[self.y_index]
        Xi = Q[self.x_index] @ Z
        Eta = -Q[self.y_index] @ Z
        src = np.vstack([Y, Eta])
        check_invertible(src, SingularMixedBlock, "input side of the canonical relation")
        return ComplexCanonicalMap(np.vstack([X, Xi]) @ np.linalg.inv(src))


def _phase_weight(phase: NondegeneratePhase, phi2: QuadraticWeight) -> QuadraticWeight:
    """``-Im phi(x, y, theta) + phi2(y)`` as a weight on the joint space."""
    if phi2.n != phase.n_y:
        raise DimensionMismatch("weight dimension must equal n_y")
    A = 0.5j * phase.form.Q
    L = np.zeros_like(A)
    iy = phase.y_index
    A[np.ix_(iy, iy)] += phi2.A
    L[np.ix_(iy, iy)] += phi2.L
    return QuadraticWeight(A, L)


def _realified_index(index: np.ndarray, m: int) -> np.ndarray:
    return np.r_[index, index + m]


def image_weight(phase: NondegeneratePhase, phi2: QuadraticWeight) -> QuadraticWeight:
    """Critical value over ``(y, theta)`` of ``-Im phi + phi2(y)``, realified."""
    S = _phase_weight(phase, phi2).hessian()
    keep = _realified_index(phase.x_index, phase.form.m)
    reduced, _ = real_critical_value(S, keep)
    return QuadraticWeight.from_hessian(reduced)


def critical_signature(phase: NondegeneratePhase, phi2: QuadraticWeight) -> tuple[int, int, int]:
    """Signature of the realified Hessian of ``(y, theta) -> -Im phi(0, y, theta) + phi2(y)``.

    It is ``(n_y + N + k, n_y + N - k, 0)`` with ``k`` the number of negative Levi
    eigenvalues of the image weight, so the standard saddle ``(n_y + N, n_y + N)``
    signals a strictly plurisubharmonic image.
    """
    S = _phase_weight(phase, phi2).hessian()
    drop = _realified_index(np.r_[phase.y_index, phase.theta_index], phase.form.m)
    return spectrum_comparison(S[np.ix_(drop, drop)]).signature


def _kernel_objective(phase: NondegeneratePhase, phi2: QuadraticWeight) -> HolomorphicQuadraticForm:
    """``i phi(x, w, theta) + 2 Psi2(w, z)`` over ``(x, z, w, theta)``."""
    nx, ny, N = phase.n_x, phase.n_y, phase.N
    m = nx + ny + ny + N
    # phase variables (x, y, theta) sit at (0..nx, nx+ny.., nx+2ny..)
    embed = np.r_[np.arange(nx), np.arange(nx + ny, nx + 2 * ny), np.arange(nx + 2 * ny, m)]
    Q = phase.form.embed(m, embed).Q * 1j
    Psi2 = polarize(phi2).embed(m, np.r_[np.arange(nx + ny, nx + 2 * ny), np.arange(nx, nx + ny)]).Q
    return HolomorphicQuadraticForm(Q + 2 * Psi2)


def kernel_from_phase(phase: NondegeneratePhase, phi2: QuadraticWeight) -> BergmanKernel:
    """Bergman kernel of the FIO with phase ``phase`` followed by ``Pi_{phi2}``.

    The amplitude is normalized against the identity phase built from ``phi2``,
    whose kernel is the projection kernel; the square root is continued along
    the straight homotopy from the identity Hessian. For ``N != n_y`` no
    identity reference exists and the principal branch is used (flagged).
    """
    obj = _kernel_objective(phase, phi2)
    keep = phase.n_x + phase.n_y
    reduced, _ = critical_value_hol(obj, keep)
    H = obj.Q[keep:, keep:]
    a2 = projection_kernel(phi2).amplitude
    if phase.N == phase.n_y and phase.n_x == phase.n_y:
        ref = NondegeneratePhase.toeplitz(ComplexQuadraticSymbolExponent.zero(phase.n_y), phi2)
        H_id = _kernel_objective(ref, phi2).Q[keep:, keep:]
        log_ratio = track_log_det(-H_id, -H, 0.0)
        branch = "homotopy"
    else:
        log_ratio = np.log(np.linalg.det(-H))
        branch = "principal"
    amplitude = a2 * np.exp(-0.5 * log_ratio)
    return BergmanKernel(complex(amplitude), HolomorphicQuadraticForm(reduced.Q / 2), branch)


def _kernel_map_blocks(Psi: HolomorphicQuadraticForm) -> tuple[np.ndarray, np.ndarray]:
    n = Psi.m // 2
    Q = Psi.Q
    Pyy, Pyt, Pty, Ptt = Q[:n, :n], Q[:n, n:], Q[n:, :n], Q[n:, n:]
    I, Z = np.eye(n), np.zeros((n, n))
    src = np.block([[Z, I], [2j * Pty, 2j * Ptt]])
    dst = np.block([[I, Z], [-2j * Pyy, -2j * Pyt]])
    return src, dst


def kernel_relation_map(Psi: HolomorphicQuadraticForm) -> ComplexCanonicalMap:
    """``kappa_Psi: (theta, -(2/i) Psi'_theta) -> (y, (2/i) Psi'_y)``."""
    if Psi.m % 2:
        raise DimensionMismatch("kernel weight must live on C^n x C^n")
    n = Psi.m // 2
    check_invertible(Psi.Q[n:, :n], SingularMixedBlock, "mixed block of the kernel weight")
    src, dst = _kernel_map_blocks(Psi)
    return ComplexCanonicalMap(dst @ np.linalg.inv(src))


def map_from_kernel(Psi: HolomorphicQuadraticForm, Psi2: HolomorphicQuadraticForm) -> ComplexCanonicalMap:
    """``kappa = kappa_Psi o kappa_Psi2^{-1}``."""
    if Psi.m != Psi2.m:
        raise DimensionMismatch("kernel weights have different dimensions")
    return kernel_relation_map(Psi) @ kernel_relation_map(Psi2).inverse()


def kernel_weight_from_map(M: ComplexCanonicalMap, phi2: QuadraticWeight) -> HolomorphicQuadraticForm:
    """Kernel weight ``Psi`` with ``map_from_kernel(Psi, polarize(phi2)) = M``."""
    if M.n != phi2.n:
        raise DimensionMismatch("map and weight dimensions differ")
    n = M.n
    K = M.M @ kernel_relation_map(polarize(phi2)).M
    a, b, c, d = K[:n, :n], K[:n, n:], K[n:, :n], K[n:, n:]
    check_invertible(b, NotTransversalToFiber, "image plane projection (kernel weight mixed block)")
    bi = np.linalg.inv(b)
    Q = np.block([[0.5j * d @ bi, 0.5j * (c - d @ bi @ a)], [-0.5j * bi, 0.5j * bi @ a]])
    scale = max(1.0, float(np.max(np.abs(Q))))
    if np.max(np.abs(Q - Q.T)) > 1e-7 * scale:
        raise InvalidInput("recovered kernel weight is not symmetric")
    return HolomorphicQuadraticForm((Q + Q.T) / 2)


@dataclass(frozen=True)
class DominationReport:
    """Spectrum of ``F(x, y) = phi(x) + phi2*(y) - 2 Re Psi(x, y)`` on ``C^{2n}``."""

    comparison: FormComparison
    kernel_dimension: int

    @property
    def psd(self) -> bool:
        return self.comparison.psd

    @property
    def min_eigenvalue(self) -> float:
        return self.comparison.min_eigenvalue

    @property
    def witness(self) -> np.ndarray:
        return self.comparison.witness


def _doubled_weights(Psi: HolomorphicQuadraticForm, phi: QuadraticWeight, phi2: QuadraticWeight):
    if Psi.m != phi.n + phi2.n:
        raise DimensionMismatch("kernel weight dimension must be n + n")
    upper = phi.direct_sum(phi2.conj_reflected())
    lower = QuadraticWeight(Psi.Q, np.zeros_like(Psi.Q))
    return upper, lower


def kernel_domination_check(
    Psi: HolomorphicQuadraticForm, phi: QuadraticWeight, phi2: QuadraticWeight, tol: float = DEFAULT_TOL
) -> DominationReport:
    upper, lower = _doubled_weights(Psi, phi, phi2)
    cmp = compare_weights(upper, lower, tol)
    return DominationReport(cmp, int(cmp.kernel.shape[1]))


@dataclass(frozen=True)
class EquivalenceReport:
    """The three equivalent positivity conditions for a canonical map."""

    map_positive: PositivityVerdict
    kernel_plane_positive: PositivityVerdict
    kernel_dominated: RouteOutcome
    Psi: HolomorphicQuadraticForm

    @property
    def statuses(self) -> tuple[Status, Status, Status]:
        return (self.map_positive.direct.status, self.kernel_plane_positive.direct.status, self.kernel_dominated.status)

    @property
    def agree(self) -> bool:
        return len(set(self.statuses)) == 1


def prop32_equivalence(
    M: ComplexCanonicalMap, phi1: QuadraticWeight, phi2: QuadraticWeight, tol: float = DEFAULT_TOL
) -> EquivalenceReport:
    """(i) ``M`` positive for ``(phi1, phi2)``; (ii) the plane of ``2 Re Psi`` positive
    relative to ``phi1(x) + phi2*(y)``; (iii) ``2 Re Psi <= phi1 + phi2*``.

    ``Psi`` is the kernel weight of ``M``; ``y`` stands for the conjugated
    second argument throughout, so (ii) and (iii) live on ``C^{2n}``.
    """
    i_verdict = map_positivity(M, phi1, phi2, tol)
    Psi = kernel_weight_from_map(M, phi2)
    upper, lower = _doubled_weights(Psi, phi1, phi2)
    plane = CLagrangianPlane(np.vstack([np.eye(Psi.m), -2j * Psi.Q]))
    ii_verdict = lagrangian_positivity(plane, upper, tol)
    cmp = compare_weights(upper, lower, tol)
    iii = RouteOutcome(
        "kernel_domination", classify(cmp.min_eigenvalue, cmp.tol), cmp.min_eigenvalue, cmp.eigenvalues,
        cmp.witness, cmp.tol,
    )
    return EquivalenceReport(i_verdict, ii_verdict, iii, Psi)


def projection_kernel(phi: QuadraticWeight) -> BergmanKernel:
    """Orthogonal projection onto ``H_phi``: ``det(L)/pi^n * exp(2 Psi(x, conj y))``.

    As an operator on ``L^2(e^{-2 phi})`` the kernel is integrated against
    ``e^{-2 phi(y)} L(dy)``.
    """
    w = phi.levi_eigenvalues()
    if w[0] <= SINGULAR_RTOL * max(1.0, abs(w[-1])):
        raise SingularLeviForm("Levi matrix is not positive definite", singular_value=float(w[0]))
    a2 = float(np.prod(w)) / np.pi**phi.n
    return BergmanKernel(a2, polarize(phi), "positive")
