"""Real-valued and holomorphic quadratic forms on complex vector spaces.

Conventions used throughout the package:

* a holomorphic quadratic form with symmetric matrix ``Q`` evaluates as
  ``q(z) = 1/2 z^T Q z``;
* a real quadratic weight with data ``(A, L)`` evaluates as
  ``Phi(x) = Re(x^T A x) + 1/2 x^T L conj(x)`` with ``A`` complex symmetric
  and ``L`` Hermitian, so that ``dPhi/dx = A x + 1/2 L conj(x)``;
* ``C^n`` is realified as ``x <-> (Re x, Im x)`` in that block order, and a
  real quadratic form is stored through its Hessian ``S``,
  ``Phi(r) = 1/2 r^T S r``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    BranchTrackingFailure,
    DimensionMismatch,
    DivergentIntegral,
    InvalidInput,
    SingularHessianBlock,
)

DEFAULT_TOL = 1e-9
SINGULAR_RTOL = 1e-8
_SYMMETRY_RTOL = 1e-8


# ---------------------------------------------------------------------------
# small linear-algebra helpers


def frozen(a, dtype=complex) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("matrix contains non-finite entries")
    arr.setflags(write=False)
    return arr


def scaled_tol(tol: float, *mats) -> float:
    """``tol`` scaled by the largest 2-norm among ``mats`` (never below ``tol``)."""
    scale = 1.0
    for m in mats:
        m = np.asarray(m)
        if m.size:
            scale = max(scale, float(np.linalg.norm(m, 2)) if m.ndim == 2 else float(np.max(np.abs(m))))
    return tol * scale


def check_invertible(mat, err_cls, what: str, rtol: float = SINGULAR_RTOL) -> None:
    """Raise ``err_cls`` unless ``mat`` has smallest/largest singular value >= rtol."""
    mat = np.asarray(mat)
    if mat.size == 0:
        return
    s = np.linalg.svd(mat, compute_uv=False)
    if s[0] == 0.0 or s[-1] < rtol * s[0]:
        raise err_cls(f"{what} is singular", singular_value=float(s[-1]))


def _check_symmetric(M: np.ndarray, name: str, hermitian: bool = False) -> np.ndarray:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidInput(f"{name} must be a square matrix, got shape {M.shape}")
    other = M.conj().T if hermitian else M.T
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if M.size and np.max(np.abs(M - other)) > _SYMMETRY_RTOL * scale:
        kind = "Hermitian" if hermitian else "symmetric"
        raise InvalidInput(f"{name} is not {kind}")
    return (M + other) / 2


def realify(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    return np.concatenate([x.real, x.imag], axis=-1)


def complexify(r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    n = r.shape[-1] // 2
    return r[..., :n] + 1j * r[..., n:]


def symmetric_from_bilinear(left: np.ndarray, B: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Matrix ``S`` with ``1/2 v^T S v = (left v)^T B (right v)`` for all ``v``."""
    X = left.T @ B @ right
    return X + X.T


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class QuadraticWeight:
    """Real quadratic weight ``Re(x^T A x) + 1/2 x^T L conj(x)`` on ``C^n``.

    ``L`` is twice the Levi matrix ``d^2 Phi / dx dconj(x)``; the weight is
    strictly plurisubharmonic exactly when ``L`` is positive definite.
    """

    A: np.ndarray
    L: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=complex))
        L = np.atleast_2d(np.asarray(self.L, dtype=complex))
        if A.shape != L.shape:
            raise DimensionMismatch(f"A has shape {A.shape} but L has shape {L.shape}")
        object.__setattr__(self, "A", frozen(_check_symmetric(A, "A")))
        object.__setattr__(self, "L", frozen(_check_symmetric(L, "L", hermitian=True)))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @classmethod
    def model(cls, n: int, scale: float = 1.0) -> "QuadraticWeight":
        """``scale * |x|^2 / 2``."""
        return cls(np.zeros((n, n)), scale * np.eye(n))

    @classmethod
    def zero(cls, n: int) -> "QuadraticWeight":
        return cls(np.zeros((n, n)), np.zeros((n, n)))

    @classmethod
    def re_of(cls, h: "HolomorphicQuadraticForm") -> "QuadraticWeight":
        """The pluriharmonic weight ``Re h``."""
        return cls(h.Q / 2, np.zeros_like(h.Q))

    @classmethod
    def minus_im_of(cls, h: "HolomorphicQuadraticForm") -> "QuadraticWeight":
        """The pluriharmonic weight ``-Im h = Re(i h)``."""
        return cls(1j * h.Q / 2, np.zeros_like(h.Q))

    @classmethod
    def from_hessian(cls, S: np.ndarray) -> "QuadraticWeight":
        """Inverse of :meth:`hessian`."""
        S = np.asarray(S, dtype=float)
        n = S.shape[0] // 2
        Suu, Suv, Svv = S[:n, :n], S[:n, n:], S[n:, n:]
        Lr = (Suu + Svv) / 2
        Ar = (Suu - Svv) / 4
        Ai = -(Suv + Suv.T) / 4
        Li = (Suv - Suv.T) / 2
        return cls(Ar + 1j * Ai, Lr + 1j * Li)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        quad = np.einsum("...i,ij,...j->...", x, self.A, x)
        herm = np.einsum("...i,ij,...j->...", x, self.L, x.conj())
        return quad.real + 0.5 * herm.real

    def gradient(self, x) -> np.ndarray:
        """Holomorphic derivative ``dPhi/dx``."""
        x = np.asarray(x, dtype=complex)
        return x @ self.A.T + 0.5 * x.conj() @ self.L.T

    def graph_point(self, x) -> np.ndarray:
        """The point ``(x, (2/i) dPhi/dx)`` of ``Lambda_Phi``."""
        x = np.asarray(x, dtype=complex)
        return np.concatenate([x, (2 / 1j) * self.gradient(x)], axis=-1)

    def graph_coefficients(self) -> tuple[np.ndarray, np.ndarray]:
        """``(P, Q)`` with ``graph_point(x) = P x + Q conj(x)``."""
        n = self.n
        P = np.vstack([np.eye(n), -2j * self.A])
        Q = np.vstack([np.zeros((n, n)), -1j * self.L])
        return P, Q

    def hessian(self) -> np.ndarray:
        """Real ``2n x 2n`` Hessian over ``(Re x, Im x)``."""
        Ar, Ai, Lr, Li = self.A.real, self.A.imag, self.L.real, self.L.imag
        Suu = 2 * Ar + Lr
        Svv = -2 * Ar + Lr
        Suv = -2 * Ai + Li
        S = np.block([[Suu, Suv], [Suv.T, Svv]])
        return (S + S.T) / 2

    def levi_eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.L)

    def is_strictly_psh(self, tol: float = DEFAULT_TOL) -> bool:
        return bool(self.levi_eigenvalues()[0] > scaled_tol(tol, self.L))

    def is_pluriharmonic(self, tol: float = DEFAULT_TOL) -> bool:
        return bool(np.max(np.abs(self.L), initial=0.0) <= scaled_tol(tol, self.A))

    def conj_reflected(self) -> "QuadraticWeight":
        """The weight ``y -> Phi(conj(y))``."""
        return QuadraticWeight(self.A.conj(), self.L.T)

    def direct_sum(self, other: "QuadraticWeight") -> "QuadraticWeight":
        """The weight ``(x, y) -> Phi(x) + Phi_other(y)``."""
        n, m = self.n, other.n
        A = np.zeros((n + m, n + m), complex)
        L = np.zeros((n + m, n + m), complex)
        A[:n, :n], A[n:, n:] = self.A, other.A
        L[:n, :n], L[n:, n:] = self.L, other.L
        return QuadraticWeight(A, L)

    def __add__(self, other: "QuadraticWeight") -> "QuadraticWeight":
        _same_dim(self, other)
        return QuadraticWeight(self.A + other.A, self.L + other.L)

    def __sub__(self, other: "QuadraticWeight") -> "QuadraticWeight":
        _same_dim(self, other)
        return QuadraticWeight(self.A - other.A, self.L - other.L)

    def __neg__(self) -> "QuadraticWeight":
        return QuadraticWeight(-self.A, -self.L)

    def __mul__(self, c: float) -> "QuadraticWeight":
        c = float(c)
        return QuadraticWeight(c * self.A, c * self.L)

    __rmul__ = __mul__

    def allclose(self, other: "QuadraticWeight", atol: float = 1e-10) -> bool:
        return (
            self.n == other.n
            and np.allclose(self.A, other.A, atol=atol, rtol=0)
            and np.allclose(self.L, other.L, atol=atol, rtol=0)
        )


def _same_dim(a, b) -> None:
    if a.n != b.n:
        raise DimensionMismatch(f"dimension mismatch: {a.n} vs {b.n}")


@dataclass(frozen=True)
class HolomorphicQuadraticForm:
    """``q(z) = 1/2 z^T Q z`` on ``C^m`` with ``Q`` complex symmetric."""

    Q: np.ndarray

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=complex))
        object.__setattr__(self, "Q", frozen(_check_symmetric(Q, "Q")))

    @property
    def m(self) -> int:
        return self.Q.shape[0]

    @classmethod
    def zero(cls, m: int) -> "HolomorphicQuadraticForm":
        return cls(np.zeros((m, m)))

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return 0.5 * np.einsum("...i,ij,...j->...", z, self.Q, z)

    def gradient(self, z) -> np.ndarray:
        return np.asarray(z, dtype=complex) @ self.Q.T

    def block(self, rows, cols) -> np.ndarray:
        return self.Q[np.ix_(np.atleast_1d(rows), np.atleast_1d(cols))]

    def embed(self, size: int, index) -> "HolomorphicQuadraticForm":
        """Same form viewed on ``C^size`` through the coordinates ``index``."""
        index = np.asarray(index)
        if index.shape != (self.m,):
            raise DimensionMismatch("embedding index has the wrong length")
        Q = np.zeros((size, size), complex)
        Q[np.ix_(index, index)] = self.Q
        return HolomorphicQuadraticForm(Q)

    def __add__(self, other: "HolomorphicQuadraticForm") -> "HolomorphicQuadraticForm":
        if self.m != other.m:
            raise DimensionMismatch(f"dimension mismatch: {self.m} vs {other.m}")
        return HolomorphicQuadraticForm(self.Q + other.Q)

    def __mul__(self, c: complex) -> "HolomorphicQuadraticForm":
        return HolomorphicQuadraticForm(complex(c) * self.Q)

    __rmul__ = __mul__

    def pullback(self, T: np.ndarray) -> "HolomorphicQuadraticForm":
        """The form ``w -> q(T w)``."""
        return HolomorphicQuadraticForm(T.T @ self.Q @ T)


@dataclass(frozen=True)
class ComplexQuadraticSymbolExponent:
    """``q(y) = y^T Q1 y + conj(y)^T Q2 y + conj(y)^T Q3 conj(y)`` on ``C^n``."""

    Q1: np.ndarray
    Q2: np.ndarray
    Q3: np.ndarray

    def __post_init__(self):
        Q1 = np.atleast_2d(np.asarray(self.Q1, dtype=complex))
        Q2 = np.atleast_2d(np.asarray(self.Q2, dtype=complex))
        Q3 = np.atleast_2d(np.asarray(self.Q3, dtype=complex))
        if not (Q1.shape == Q2.shape == Q3.shape) or Q2.shape[0] != Q2.shape[1]:
            raise DimensionMismatch("Q1, Q2, Q3 must be square with equal shapes")
        object.__setattr__(self, "Q1", frozen(_check_symmetric(Q1, "Q1")))
        object.__setattr__(self, "Q2", frozen(Q2))
        object.__setattr__(self, "Q3", frozen(_check_symmetric(Q3, "Q3")))

    @property
    def n(self) -> int:
        return self.Q2.shape[0]

    @classmethod
    def zero(cls, n: int) -> "ComplexQuadraticSymbolExponent":
        z = np.zeros((n, n))
        return cls(z, z, z)

    @classmethod
    def radial(cls, lam: complex, n: int = 1) -> "ComplexQuadraticSymbolExponent":
        """``q(y) = (lam/2) |y|^2``."""
        z = np.zeros((n, n))
        return cls(z, 0.5 * complex(lam) * np.eye(n), z)

    def __call__(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=complex)
        yb = y.conj()
        return (
            np.einsum("...i,ij,...j->...", y, self.Q1, y)
            + np.einsum("...i,ij,...j->...", yb, self.Q2, y)
            + np.einsum("...i,ij,...j->...", yb, self.Q3, yb)
        )

    def is_radial(self, tol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self.Q1)) <= tol and np.max(np.abs(self.Q3)) <= tol)

    def real_part(self) -> QuadraticWeight:
        """``Re q`` as a weight."""
        return QuadraticWeight(self.Q1 + self.Q3.conj(), self.Q2.T + self.Q2.conj())

    def levi(self) -> np.ndarray:
        """Matrix of ``d^2 q / dy_j dconj(y)_k``."""
        return self.Q2.T

    def polarized(self) -> HolomorphicQuadraticForm:
        """``q(y, theta) = y^T Q1 y + theta^T Q2 y + theta^T Q3 theta`` on ``C^{2n}``."""
        return HolomorphicQuadraticForm(np.block([[2 * self.Q1, self.Q2.T], [self.Q2, 2 * self.Q3]]))


@dataclass(frozen=True)
class FormComparison:
    """Spectral comparison of two weights, realified on ``R^{2n}``."""

    min_eigenvalue: float
    eigenvalues: np.ndarray
    signature: tuple[int, int, int]
    psd: bool
    pd: bool
    witness: np.ndarray
    tol: float
    kernel: np.ndarray = field(repr=False, default=None)


# ---------------------------------------------------------------------------
# operations


def split_herm_plh(phi: QuadraticWeight) -> tuple[QuadraticWeight, QuadraticWeight]:
    """Hermitian and pluriharmonic parts; they re-sum to ``phi`` exactly."""
    z = np.zeros_like(phi.A)
    return QuadraticWeight(z, phi.L), QuadraticWeight(phi.A, z)


def polarize(phi: QuadraticWeight) -> HolomorphicQuadraticForm:
    """Holomorphic ``Psi`` on ``C^n x C^n`` with ``Psi(x, conj(x)) = Phi(x)``."""
    return HolomorphicQuadraticForm(np.block([[phi.A, phi.L / 2], [phi.L.T / 2, phi.A.conj()]]))


def spectrum_comparison(S: np.ndarray, tol: float = DEFAULT_TOL, scale_with=()) -> FormComparison:
    """Signature bookkeeping for a real symmetric Hessian ``S``."""
    S = (np.asarray(S, dtype=float) + np.asarray(S, dtype=float).T) / 2
    t = scaled_tol(tol, *scale_with) if scale_with else scaled_tol(tol, S)
    w, V = np.linalg.eigh(S)
    pos = int(np.sum(w > t))
    neg = int(np.sum(w < -t))
    zero = len(w) - pos - neg
    return FormComparison(
        min_eigenvalue=float(w[0]),
        eigenvalues=w,
        signature=(pos, neg, zero),
        psd=bool(w[0] >= -t),
        pd=bool(w[0] > t),
        witness=V[:, 0],
        tol=t,
        kernel=V[:, np.abs(w) <= t],
    )


def compare_weights(phi_a: QuadraticWeight, phi_b: QuadraticWeight, tol: float = DEFAULT_TOL) -> FormComparison:
    """Spectrum of the realified Hessian of ``phi_a - phi_b``.

    ``psd`` means ``phi_a >= phi_b`` everywhere; zero-margin cases come back
    psd but not pd, with the kernel directions attached.
    """
    _same_dim(phi_a, phi_b)
    Sa, Sb = phi_a.hessian(), phi_b.hessian()
    return spectrum_comparison(Sa - Sb, tol, scale_with=(Sa, Sb))


def critical_value_hol(
    form: HolomorphicQuadraticForm, m: int
) -> tuple[HolomorphicQuadraticForm, np.ndarray]:
    """Eliminate the trailing ``form.m - m`` variables at their critical point.

    Returns the Schur complement ``P - R^T T^{-1} R`` on the first ``m``
    variables and the ``k x m`` matrix sending retained variables to the
    critical values of the eliminated ones.
    """
    Q = form.Q
    if not 0 <= m <= form.m:
        raise DimensionMismatch(f"cannot retain {m} of {form.m} variables")
    P, R, T = Q[:m, :m], Q[m:, :m], Q[m:, m:]
    if T.size == 0:
        return HolomorphicQuadraticForm(P), np.zeros((0, m), complex)
    check_invertible(T, SingularHessianBlock, "Hessian block over eliminated variables")
    crit = -np.linalg.solve(T, R)
    return HolomorphicQuadraticForm(P + R.T @ crit), crit


def real_critical_value(S: np.ndarray, keep) -> tuple[np.ndarray, np.ndarray]:
    """Real Schur complement of a symmetric Hessian, keeping indices ``keep``.

    Returns the reduced Hessian and the eliminated block (for signature checks).
    """
    from .errors import DegenerateCriticalPoint

    S = np.asarray(S, dtype=float)
    keep = np.asarray(keep)
    drop = np.setdiff1d(np.arange(S.shape[0]), keep)
    P = S[np.ix_(keep, keep)]
    R = S[np.ix_(drop, keep)]
    T = S[np.ix_(drop, drop)]
    check_invertible(T, DegenerateCriticalPoint, "real Hessian over eliminated variables")
    red = P - R.T @ np.linalg.solve(T, R)
    return (red + red.T) / 2, T


class GaussianReduction(NamedTuple):
    log_amplitude: complex
    reduced: HolomorphicQuadraticForm


def track_log_det(start: np.ndarray, end: np.ndarray, log_det_start: complex, max_halvings: int = 40) -> complex:
    """Continue ``log det`` along the segment from ``start`` to ``end``.

    The branch is fixed by ``log_det_start`` and followed continuously; a path
    through a singular matrix raises :class:`BranchTrackingFailure`.
    """
    start = np.asarray(start, dtype=complex)
    end = np.asarray(end, dtype=complex)
    if start.size == 0:
        return complex(log_det_start)
    scale = max(np.linalg.norm(start, 2), np.linalg.norm(end, 2), 1e-300)
    floor = start.shape[0] * np.log(scale) + np.log(1e-13)

    def slog(t):
        sign, logabs = np.linalg.slogdet((1 - t) * start + t * end)
        if sign == 0 or logabs < floor:
            raise BranchTrackingFailure(f"determinant vanishes along the homotopy near t={t:.6g}")
        return sign, logabs

    t, h = 0.0, 1 / 16
    sign0, abs0 = slog(0.0)
    acc = complex(log_det_start)
    halvings = 0
    while t < 1.0:
        t1 = min(1.0, t + h)
        sign1, abs1 = slog(t1)
        step_arg = np.angle(sign1 / sign0)
        if abs(step_arg) > np.pi / 8 or abs(abs1 - abs0) > 2.0:
            halvings += 1
            if halvings > max_halvings:
                raise BranchTrackingFailure(f"homotopy step collapsed near t={t:.6g}")
            h /= 2
            continue
        acc += (abs1 - abs0) + 1j * step_arg
        t, sign0, abs0 = t1, sign1, abs1
        h = min(2 * h, 1 / 8)
    return acc


def gaussian_reduce(exponent: HolomorphicQuadraticForm, d: int, constant: complex = 0.0) -> GaussianReduction:
    """Exact Gaussian integral over the first ``d`` variables, taken real.

    ``exponent`` is ``1/2 v^T E v`` with ``v = (t, p)``, ``t`` in ``R^d`` and
    ``p`` complex parameters. Returns ``log`` of
    ``exp(constant) (2 pi)^{d/2} det(-M)^{-1/2}`` (``M`` the ``t``-block) with
    the square root continued from the real branch along
    ``Re M + s i Im M``, plus the completed-square form in ``p``.
    """
    E = exponent.Q
    M = E[:d, :d]
    if d:
        w = np.linalg.eigvalsh(M.real)
        if w[-1] >= -scaled_tol(DEFAULT_TOL, M.real):
            raise DivergentIntegral(
                "real part of the Hessian over integrated variables is not negative definite",
                singular_value=float(w[-1]),
            )
        _, logabs0 = np.linalg.slogdet(-M.real)
        log_det = track_log_det(-M.real, -M, logabs0)
    else:
        log_det = 0.0
    log_amp = complex(constant) + 0.5 * d * np.log(2 * np.pi) - 0.5 * log_det
    if E.shape[0] == d:
        return GaussianReduction(log_amp, HolomorphicQuadraticForm(np.zeros((0, 0))))
    # stationary phase is exact for Gaussians; reorder so the integrated block trails
    m = E.shape[0] - d
    perm = np.r_[d : d + m, 0:d]
    reduced, _ = critical_value_hol(HolomorphicQuadraticForm(E[np.ix_(perm, perm)]), m)
    return GaussianReduction(log_amp, reduced)
