"""Complex symplectic linear algebra on ``C^{2n}``.

Points of phase space are stacked as ``(x, xi)``. The symplectic form is
``sigma((x, xi), (y, eta)) = xi.y - x.eta``, i.e. ``sigma(t, s) = (J t).s``
with ``J = [[0, I], [-I, 0]]`` and no complex conjugation. An antilinear map
is stored as the matrix ``K`` acting on the conjugated vector,
``iota(rho) = K conj(rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CayleySingular,
    DimensionMismatch,
    EigenvalueTwo,
    FiberNotTransversal,
    InvalidInput,
    NoGeneratingFunction,
    SingularLeviForm,
)
from .forms import (
    DEFAULT_TOL,
    SINGULAR_RTOL,
    HolomorphicQuadraticForm,
    QuadraticWeight,
    check_invertible,
    frozen,
)

_SYMPLECTIC_RTOL = 1e-8


def symplectic_J(n: int) -> np.ndarray:
    Z, I = np.zeros((n, n)), np.eye(n)
    return np.block([[Z, I], [-I, Z]])


def sigma(t, s) -> complex:
    t = np.asarray(t, dtype=complex)
    s = np.asarray(s, dtype=complex)
    n = t.shape[-1] // 2
    return np.sum(t[..., n:] * s[..., :n] - t[..., :n] * s[..., n:], axis=-1)


@dataclass(frozen=True)
class SymplecticContext:
    """``J`` and the antilinear reflection ``Gamma(y, eta) = (conj y, -conj eta)``."""

    n: int

    @property
    def J(self) -> np.ndarray:
        return symplectic_J(self.n)

    @property
    def Gamma(self) -> "AntilinearInvolution":
        n = self.n
        return AntilinearInvolution(np.diag(np.r_[np.ones(n), -np.ones(n)]).astype(complex))

    def sigma(self, t, s) -> complex:
        return sigma(t, s)


@dataclass(frozen=True)
class ComplexCanonicalMap:
    """Linear map ``(y, eta) -> (x, xi)`` with ``M^T J M = J``."""

    M: np.ndarray

    def __post_init__(self):
        M = np.atleast_2d(np.asarray(self.M, dtype=complex))
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
            raise DimensionMismatch(f"canonical map must be 2n x 2n, got {M.shape}")
        J = symplectic_J(M.shape[0] // 2)
        defect = np.max(np.abs(M.T @ J @ M - J))
        if defect > _SYMPLECTIC_RTOL * max(1.0, np.linalg.norm(M, 2) ** 2):
            raise InvalidInput(f"matrix is not symplectic (defect {defect:.3e})")
        object.__setattr__(self, "M", frozen(M))

    @property
    def n(self) -> int:
        return self.M.shape[0] // 2

    @classmethod
    def identity(cls, n: int) -> "ComplexCanonicalMap":
        return cls(np.eye(2 * n))

    @classmethod
    def diagonal(cls, scale) -> "ComplexCanonicalMap":
        """``(y, eta) -> (D y, D^{-1} eta)`` for a diagonal ``D``."""
        d = np.atleast_1d(np.asarray(scale, dtype=complex))
        return cls(np.diag(np.r_[d, 1 / d]))

    def blocks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        n = self.n
        M = self.M
        return M[:n, :n], M[:n, n:], M[n:, :n], M[n:, n:]

    def __call__(self, rho) -> np.ndarray:
        return np.asarray(rho, dtype=complex) @ self.M.T

    def __matmul__(self, other: "ComplexCanonicalMap") -> "ComplexCanonicalMap":
        if self.n != other.n:
            raise DimensionMismatch(f"dimension mismatch: {self.n} vs {other.n}")
        return ComplexCanonicalMap(self.M @ other.M)

    def inverse(self) -> "ComplexCanonicalMap":
        J = symplectic_J(self.n)
        return ComplexCanonicalMap(-J @ self.M.T @ J)

    def symplectic_defect(self) -> float:
        J = symplectic_J(self.n)
        return float(np.linalg.norm(self.M.T @ J @ self.M - J))


@dataclass(frozen=True)
class AntilinearInvolution:
    """``iota(rho) = K conj(rho)``."""

    K: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "K", frozen(np.atleast_2d(self.K)))

    def __call__(self, rho) -> np.ndarray:
        return np.asarray(rho, dtype=complex).conj() @ self.K.T

    def compose(self, other: "AntilinearInvolution") -> np.ndarray:
        """Matrix of the complex-linear map ``self o other``."""
        return self.K @ other.K.conj()

    def conjugate_by(self, M: ComplexCanonicalMap) -> "AntilinearInvolution":
        """``M^{-1} o iota o M``."""
        return AntilinearInvolution(M.inverse().M @ self.K @ M.M.conj())

    def involution_defect(self) -> float:
        return float(np.linalg.norm(self.compose(self) - np.eye(self.K.shape[0])))


@dataclass(frozen=True)
class HermitianFormOnPhase:
    """``b(nu, mu) = (1/i) sigma(nu, iota(mu)) = mu^* B nu``; ``b(mu, mu) = mu^* B mu``."""

    B: np.ndarray

    def __post_init__(self):
        B = np.atleast_2d(np.asarray(self.B, dtype=complex))
        if np.max(np.abs(B - B.conj().T)) > 1e-8 * max(1.0, np.max(np.abs(B))):
            raise InvalidInput("b-form matrix is not Hermitian")
        object.__setattr__(self, "B", frozen((B + B.conj().T) / 2))

    def __call__(self, nu, mu=None) -> complex:
        nu = np.asarray(nu, dtype=complex)
        mu = nu if mu is None else np.asarray(mu, dtype=complex)
        return np.einsum("...i,ij,...j->...", mu.conj(), self.B, nu)

    def restrict(self, basis: np.ndarray) -> np.ndarray:
        """Hermitian matrix ``basis^* B basis``."""
        R = basis.conj().T @ self.B @ basis
        return (R + R.conj().T) / 2


# ---------------------------------------------------------------------------
# operations on weights


def involution_of(phi: QuadraticWeight) -> AntilinearInvolution:
    """The antilinear involution fixing ``Lambda_phi`` pointwise."""
    check_invertible(phi.L, SingularLeviForm, "Levi matrix L")
    P, Q = phi.graph_coefficients()
    # K conj(P x + Q conj x) = P x + Q conj x for all x
    src = np.hstack([P.conj(), Q.conj()])
    dst = np.hstack([Q, P])
    K = np.linalg.solve(src.T, dst.T).T
    return AntilinearInvolution(K)


def hermitian_b(phi: QuadraticWeight) -> HermitianFormOnPhase:
    iota = involution_of(phi)
    J = symplectic_J(phi.n)
    return HermitianFormOnPhase(-1j * iota.K.T @ J)


def push_weight(M: ComplexCanonicalMap, phi: QuadraticWeight) -> QuadraticWeight:
    """Weight ``phi'`` with ``M(Lambda_phi) = Lambda_phi'``."""
    if M.n != phi.n:
        raise DimensionMismatch(f"map acts on C^{2 * M.n} but weight lives on C^{phi.n}")
    n = phi.n
    P, Q = phi.graph_coefficients()
    MP, MQ = M.M @ P, M.M @ Q
    alpha, beta, gamma, delta = MP[:n], MQ[:n], MP[n:], MQ[n:]
    # real-linear map x -> alpha x + beta conj(x), written on (x, conj x)
    W = np.block([[alpha, beta], [beta.conj(), alpha.conj()]])
    check_invertible(W, FiberNotTransversal, "projection of the image plane to the base")
    cd = np.hstack([gamma, delta]) @ np.linalg.inv(W)
    c, d = cd[:, :n], cd[:, n:]
    return QuadraticWeight(0.5j * c, 1j * d)


def shear_map(phi: QuadraticWeight) -> ComplexCanonicalMap:
    """``(y, eta) -> (y, eta + (2/i) A y)``; carries ``Lambda_{phi_herm}`` onto ``Lambda_phi``."""
    n = phi.n
    return ComplexCanonicalMap(np.block([[np.eye(n), np.zeros((n, n))], [-2j * phi.A, np.eye(n)]]))


@dataclass(frozen=True)
class ModelReduction:
    """Certificate: ``kappa = kappa_C o kappa_A^{-1}`` sends ``Lambda_phi`` to the model plane."""

    kappa: ComplexCanonicalMap
    shear: ComplexCanonicalMap
    C: np.ndarray
    residual: float


def reduce_to_model(phi: QuadraticWeight) -> ModelReduction:
    """Canonical map taking ``phi`` to ``|x|^2 / 2``.

    ``C = L^{-1/2}`` is the Hermitian inverse square root, so ``C^* L C = I``,
    and ``kappa_C = diag(conj(C)^{-1}, C^*)``.
    """
    check_invertible(phi.L, SingularLeviForm, "Levi matrix L")
    w, U = np.linalg.eigh(phi.L)
    if w[0] <= 0:
        raise SingularLeviForm("Levi matrix L is not positive definite", singular_value=float(w[0]))
    C = U @ np.diag(w**-0.5) @ U.conj().T
    n = phi.n
    kappa_C = ComplexCanonicalMap(
        np.block([[np.linalg.inv(C.conj()), np.zeros((n, n))], [np.zeros((n, n)), C.conj().T]])
    )
    shear = shear_map(phi)
    kappa = kappa_C @ shear.inverse()
    pushed = push_weight(kappa, phi)
    model = QuadraticWeight.model(n)
    residual = float(np.linalg.norm(pushed.A - model.A) + np.linalg.norm(pushed.L - model.L))
    return ModelReduction(kappa, shear, C, residual)


# ---------------------------------------------------------------------------
# generating functions and the Cayley correspondence


def generating_function(M: ComplexCanonicalMap) -> HolomorphicQuadraticForm:
    """``phi(x, eta)`` with ``M: (phi'_eta, eta) -> (x, phi'_x)``."""
    M11, M12, M21, M22 = M.blocks()
    check_invertible(M11, NoGeneratingFunction, "block y -> x of the canonical map")
    M11i = np.linalg.inv(M11)
    H = np.block([[M21 @ M11i, M22 - M21 @ M11i @ M12], [M11i, -M11i @ M12]])
    return _symmetrized(H, "generating function Hessian")


def map_from_generating(phi: HolomorphicQuadraticForm, n: int) -> ComplexCanonicalMap:
    """Inverse of :func:`generating_function`; requires ``phi''_{eta x}`` invertible."""
    H = phi.Q
    Hxx, Hxe, Hex, Hee = H[:n, :n], H[:n, n:], H[n:, :n], H[n:, n:]
    check_invertible(Hex, NoGeneratingFunction, "mixed block of the generating function")
    M11 = np.linalg.inv(Hex)
    M12 = -M11 @ Hee
    M21 = Hxx @ M11
    M22 = Hxe + Hxx @ M12
    return ComplexCanonicalMap(np.block([[M11, M12], [M21, M22]]))


def fundamental_matrix(F: HolomorphicQuadraticForm) -> np.ndarray:
    """``J F''``, the matrix of the Hamilton field of ``F``."""
    if F.m % 2:
        raise DimensionMismatch("phase must live on C^{2n}")
    return symplectic_J(F.m // 2) @ F.Q


def cayley_map(F: HolomorphicQuadraticForm) -> ComplexCanonicalMap:
    """``kappa = (1 - Fm/2)(1 + Fm/2)^{-1}`` with ``Fm`` the fundamental matrix."""
    Fm = fundamental_matrix(F)
    I = np.eye(F.m)
    ev = np.linalg.eigvals(Fm)
    gap = float(np.min(np.abs(np.r_[ev - 2, ev + 2])))
    if gap < SINGULAR_RTOL * max(1.0, np.linalg.norm(Fm, 2)):
        raise EigenvalueTwo("fundamental matrix has an eigenvalue +-2", singular_value=gap)
    return ComplexCanonicalMap((I - Fm / 2) @ np.linalg.inv(I + Fm / 2))


def cayley_phase(M: ComplexCanonicalMap) -> HolomorphicQuadraticForm:
    """Inverse of :func:`cayley_map`."""
    I = np.eye(2 * M.n)
    check_invertible(I + M.M, CayleySingular, "1 + kappa")
    Fm = 2 * np.linalg.solve(I + M.M, I - M.M)
    return _symmetrized(-symplectic_J(M.n) @ Fm, "Weyl phase Hessian")


def _symmetrized(H: np.ndarray, what: str) -> HolomorphicQuadraticForm:
    scale = max(1.0, float(np.max(np.abs(H))))
    if np.max(np.abs(H - H.T)) > 1e-7 * scale:
        raise InvalidInput(f"{what} is not symmetric; input map is not symplectic")
    return HolomorphicQuadraticForm((H + H.T) / 2)


def is_symplectic(M: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    M = np.asarray(M, dtype=complex)
    J = symplectic_J(M.shape[0] // 2)
    return bool(np.max(np.abs(M.T @ J @ M - J)) <= tol * max(1.0, np.linalg.norm(M, 2) ** 2))
