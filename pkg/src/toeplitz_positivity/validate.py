"""Truncated-matrix oracle on the one-dimensional model Bargmann space.

Matrices are taken in the orthonormal basis ``e_k = z^k / sqrt(pi k!)`` of
``H_{|z|^2/2}(C)``, so ``T_jk = <e^{2q} e_k, e_j>``. Radial symbols have
closed-form diagonal entries; general symbols go through polar quadrature
(Gauss-Legendre in the radius, FFT/trapezoid in the angle).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, roots_legendre

from .errors import DimensionMismatch, DivergentIntegral, InvalidInput, QuadratureFailure
from .forms import ComplexQuadraticSymbolExponent

MAX_ORDER = 200
QUADRATURE_TOL = 1e-8
_TAIL = 1e-16


@dataclass(frozen=True)
class TruncatedOperator:
    N: int
    entries: np.ndarray
    method: str
    error_estimate: float = 0.0


@dataclass(frozen=True)
class SpectralReport:
    operator_norm: float
    singular_values: np.ndarray
    trace_partial: complex
    unitary_defect: float
    decay_fit: float


def _coefficients(q: ComplexQuadraticSymbolExponent) -> tuple[complex, complex, complex]:
    """``2q(z) - |z|^2 = a z^2 + b |z|^2 + g conj(z)^2``."""
    if q.n != 1:
        raise DimensionMismatch("the truncation oracle is one-dimensional")
    return complex(2 * q.Q1[0, 0]), complex(2 * q.Q2[0, 0] - 1), complex(2 * q.Q3[0, 0])


def _decay_rate(q: ComplexQuadraticSymbolExponent) -> float:
    """``c`` with ``|e^{2q - |z|^2}| <= e^{-c |z|^2}``, sharp in the worst direction."""
    a, b, g = _coefficients(q)
    return -b.real - abs(a + g.conjugate())


def _check_order(N: int) -> None:
    if not 1 <= N <= MAX_ORDER:
        raise InvalidInput(f"truncation order must lie in [1, {MAX_ORDER}], got {N}")


def _radial_matrix(q: ComplexQuadraticSymbolExponent, N: int) -> np.ndarray:
    _, b, _ = _coefficients(q)
    k = np.arange(N)
    return np.diag(np.exp(-(k + 1) * np.log(-b)))


def _series_matrix(q: ComplexQuadraticSymbolExponent, N: int) -> np.ndarray:
    """Moment series from expanding ``e^{a z^2 + g conj(z)^2}``."""
    a, b, g = _coefficients(q)
    if abs(a) + abs(g) >= -b.real:
        raise InvalidInput("moment series does not converge absolutely for this symbol")
    log_mb = np.log(-b)
    la = np.log(a) if a != 0 else None
    lg = np.log(g) if g != 0 else None
    T = np.zeros((N, N), complex)
    lf = gammaln(np.arange(N) + 1)
    for j in range(N):
        for k in range(N):
            if (k - j) % 2:
                continue
            m0 = max(0, (j - k) // 2)
            total = 0j
            m = m0
            while True:
                l = m + (k - j) // 2
                if (m and la is None) or (l and lg is None):
                    break
                p = k + 2 * m
                log_term = (
                    (m * la if m else 0)
                    + (l * lg if l else 0)
                    + gammaln(p + 1)
                    - gammaln(m + 1)
                    - gammaln(l + 1)
                    - (p + 1) * log_mb
                    - 0.5 * (lf[j] + lf[k])
                )
                term = np.exp(log_term)
                total += term
                if m > m0 + 5 and abs(term) < 1e-18 * max(abs(total), 1e-300):
                    break
                m += 1
                if m > m0 + 20000:
                    raise QuadratureFailure("moment series failed to converge")
            T[j, k] = total
    return T


def _radius(c: float, N: int) -> float:
    """Cut ``R`` past which ``r^{2N-1} e^{-c r^2} / Gamma(N)`` stays below the tail bound."""
    p = 2 * N - 1
    r = np.sqrt(max(p, 1) / (2 * c))
    step = 0.25 / np.sqrt(c)
    while p * np.log(r) - c * r * r - gammaln(N) - np.log(np.pi) > np.log(_TAIL):
        r += step
    return float(r + step)


def _quadrature_matrix(q: ComplexQuadraticSymbolExponent, N: int, n_r: int, n_theta: int, R: float) -> np.ndarray:
    a, b, g = _coefficients(q)
    x, w = roots_legendre(n_r)
    r = 0.5 * R * (x + 1)
    w = 0.5 * R * w
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    # e^{r^2 (a e^{2i th} + g e^{-2i th})}, Fourier-analyzed in theta
    ang = np.exp(np.outer(r * r, a * np.exp(2j * theta) + g * np.exp(-2j * theta)))
    coef = np.fft.fft(ang, axis=1) / n_theta  # coef[:, d] multiplies e^{i d theta}
    lf = gammaln(np.arange(N) + 1)
    j = np.arange(N)[:, None]
    k = np.arange(N)[None, :]
    log_r = np.log(r)
    T = np.zeros((N, N), complex)
    for i in range(n_r):
        # int e^{i(k-j) th} f dth = 2 pi coef_{j-k}
        c_jk = coef[i, (j - k) % n_theta]
        log_fac = (j + k + 1) * log_r[i] + b.real * r[i] ** 2 - 0.5 * (lf[j] + lf[k])
        T += w[i] * 2 * np.exp(log_fac + 1j * b.imag * r[i] ** 2) * c_jk
    return T


def truncated_matrix(q: ComplexQuadraticSymbolExponent, N: int, method: str = "auto") -> TruncatedOperator:
    """``N x N`` matrix of ``Top(e^{2q})`` on the model space.

    ``method`` is ``"auto"`` (analytic for radial symbols, quadrature
    otherwise), ``"analytic"`` (closed form or moment series) or ``"quadrature"``.
    """
    _check_order(N)
    c = _decay_rate(q)
    if c <= 0:
        raise DivergentIntegral("2 Re q - |z|^2 is not negative definite", singular_value=c)
    if method not in ("auto", "analytic", "quadrature"):
        raise InvalidInput(f"unknown method {method!r}")
    radial = q.is_radial()
    if method == "auto":
        method = "analytic" if radial else "quadrature"
    if method == "analytic":
        T = _radial_matrix(q, N) if radial else _series_matrix(q, N)
        return TruncatedOperator(N, T, "analytic")
    a, b, g = _coefficients(q)
    R = _radius(c, N)
    n_r = int(max(96, 3 * N + 2 * abs(b.imag) * R * R + 80))
    n_theta = int(2 ** np.ceil(np.log2(2 * N + 4 * R * R * (abs(a) + abs(g)) + 64)))
    coarse = _quadrature_matrix(q, N, n_r, n_theta, R)
    fine = _quadrature_matrix(q, N, int(1.5 * n_r), 2 * n_theta, R)
    # relative to the entry scale: unbounded symbols have huge entries
    err = float(np.max(np.abs(fine - coarse)) / max(1.0, np.max(np.abs(fine))))
    if err > QUADRATURE_TOL:
        raise QuadratureFailure(f"estimated quadrature error {err:.3e} exceeds {QUADRATURE_TOL:.0e}")
    return TruncatedOperator(N, fine, "quadrature", err)


def spectral_report(T: TruncatedOperator) -> SpectralReport:
    s = np.linalg.svd(T.entries, compute_uv=False)
    defect = float(np.linalg.norm(T.entries.conj().T @ T.entries - np.eye(T.N), 2))
    pos = s[s > 0]
    if len(pos) >= 2:
        slope = np.polyfit(np.arange(len(pos)), np.log(pos), 1)[0]
        ratio = float(np.exp(slope))
    else:
        ratio = float("nan")
    return SpectralReport(float(s[0]), s, complex(np.trace(T.entries)), defect, ratio)


def projection_matrix(N: int, a2: float = 1 / np.pi, n_r: int | None = None) -> np.ndarray:
    """Truncated matrix of the operator with kernel ``a2 e^{x conj y}`` on ``L^2(e^{-|y|^2})``.

    Writes ``x = r e^{i(beta + psi)}``, ``y = s e^{i beta}``; both angular
    integrals are done by FFT and the radial ones by Gauss-Legendre.
    """
    _check_order(N)
    n_r = n_r or 40 + 2 * N
    R = _radius(0.5, N) + 2.0
    x, w = roots_legendre(n_r)
    r = 0.5 * R * (x + 1)
    w = 0.5 * R * w
    n_theta = int(2 ** np.ceil(np.log2(2 * N + 2 * R * R + 64)))
    psi = 2 * np.pi * np.arange(n_theta) / n_theta
    rho = np.outer(r, r)
    # g_j(rho) e^{-rho}, with g_j(rho) = int e^{rho e^{i psi}} e^{-i j psi} dpsi
    g = 2 * np.pi * np.fft.fft(np.exp(rho[..., None] * (np.exp(1j * psi) - 1)), axis=-1)[..., :N] / n_theta
    # rotation factor int e^{i (k - j) beta} dbeta, by the same trapezoid rule
    d = np.arange(N)[None, :] - np.arange(N)[:, None]
    rot = 2 * np.pi * np.exp(1j * d[..., None] * psi).mean(axis=-1)
    lf = gammaln(np.arange(N) + 1)
    # e^{-r^2 - s^2 + r s} = e^{-r^2/2} e^{-(r - s)^2 / 2} e^{-s^2/2}
    U = w[:, None] * np.exp((np.arange(N) + 1) * np.log(r)[:, None] - r[:, None] ** 2 / 2 - 0.5 * lf)
    K = np.exp(-((r[:, None] - r[None, :]) ** 2) / 2)
    P = np.einsum("aj,abj,bk->jk", U, K[..., None] * g, U, optimize=True)
    return a2 / np.pi * rot * P


def projection_idempotence(N: int, a2: float = 1 / np.pi) -> float:
    """``||P^2 - P|| + ||P - I||`` for the truncated projection with constant ``a2``."""
    P = projection_matrix(N, a2)
    check = projection_matrix(N, a2, 64 + 2 * N)
    err = float(np.max(np.abs(P - check)) / max(1.0, np.max(np.abs(check))))
    if err > QUADRATURE_TOL:
        raise QuadratureFailure(f"estimated quadrature error {err:.3e} exceeds {QUADRATURE_TOL:.0e}")
    return float(np.linalg.norm(P @ P - P, 2) + np.linalg.norm(P - np.eye(N), 2))
