"""Random instances with known ground truth, for tests, demos and sweeps.

Positive canonical maps are produced through the Cayley correspondence: a
Weyl phase ``F`` whose restriction to the model plane has imaginary part of
known sign yields a map whose positivity status is known in advance.
"""

from __future__ import annotations

import numpy as np

from .errors import EigenvalueTwo
from .forms import ComplexQuadraticSymbolExponent, HolomorphicQuadraticForm, QuadraticWeight
from .positivity import Status
from .symplectic import ComplexCanonicalMap, cayley_map, reduce_to_model


def model_plane_parametrization(n: int) -> np.ndarray:
    """``T`` with ``T (u, v) = (x, -i conj x)``, ``x = u + i v``: a real basis of the model plane."""
    I = np.eye(n)
    return np.block([[I, 1j * I], [-1j * I, -I]])


def random_complex(rng: np.random.Generator, shape, scale: float = 1.0) -> np.ndarray:
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def random_symmetric(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    X = random_complex(rng, (n, n), scale)
    return (X + X.T) / 2


def random_weight(rng: np.random.Generator, n: int, plh_scale: float = 0.5) -> QuadraticWeight:
    """Strictly plurisubharmonic weight with a random pluriharmonic part."""
    X = random_complex(rng, (n, n), 0.5)
    L = X @ X.conj().T + 0.5 * np.eye(n)
    return QuadraticWeight(random_symmetric(rng, n, plh_scale), L)


def phase_with_model_restriction(G: np.ndarray) -> HolomorphicQuadraticForm:
    """Weyl phase ``F`` whose restriction to the model plane is ``1/2 r^T G r`` in real coordinates."""
    n = G.shape[0] // 2
    Tinv = np.linalg.inv(model_plane_parametrization(n))
    F = Tinv.T @ G @ Tinv
    return HolomorphicQuadraticForm((F + F.T) / 2)


def random_model_map(
    rng: np.random.Generator, n: int, status: Status = Status.STRICTLY_POSITIVE, im_floor: float = 0.1
) -> tuple[ComplexCanonicalMap, HolomorphicQuadraticForm]:
    """Canonical map with prescribed positivity status relative to the model pair.

    ``StrictlyPositive``: ``Im F`` positive definite on the model plane.
    ``NotPositive``: one eigendirection of ``Im F`` flipped to negative.
    ``DegeneratePositive``: ``Im F = 0`` (a real-symplectic, unitary-type map).
    """
    for _ in range(100):
        Gr = rng.standard_normal((2 * n, 2 * n))
        Gr = (Gr + Gr.T) / 2
        X = rng.standard_normal((2 * n, 2 * n))
        Gi = X @ X.T / (2 * n) + im_floor * np.eye(2 * n)
        if status == Status.NOT_POSITIVE:
            w, V = np.linalg.eigh(Gi)
            w[0] = -w[0]
            Gi = V @ np.diag(w) @ V.T
        elif status == Status.DEGENERATE_POSITIVE:
            Gi = np.zeros_like(Gi)
        F = phase_with_model_restriction(Gr + 1j * Gi)
        try:
            return cayley_map(F), F
        except EigenvalueTwo:
            continue
    raise RuntimeError("could not sample a Cayley-admissible phase")


def random_map_instance(
    rng: np.random.Generator, n: int, status: Status = Status.STRICTLY_POSITIVE
) -> tuple[ComplexCanonicalMap, QuadraticWeight, QuadraticWeight]:
    """``(M, phi1, phi2)`` with random strictly psh weights and known positivity status."""
    phi1, phi2 = random_weight(rng, n), random_weight(rng, n)
    kappa0, _ = random_model_map(rng, n, status)
    R1, R2 = reduce_to_model(phi1).kappa, reduce_to_model(phi2).kappa
    return R1.inverse() @ kappa0 @ R2, phi1, phi2


def random_symbol_exponent(rng: np.random.Generator, n: int, scale: float = 0.3) -> ComplexQuadraticSymbolExponent:
    """``q`` with ``|x|^2/2 - 2 Re q`` positive definite (densely defined on the model space)."""
    for _ in range(1000):
        q = ComplexQuadraticSymbolExponent(
            random_symmetric(rng, n, scale / 2),
            random_complex(rng, (n, n), scale / 2) - scale * np.eye(n),
            random_symmetric(rng, n, scale / 2),
        )
        S = QuadraticWeight.model(n).hessian() - 2 * q.real_part().hessian()
        if np.linalg.eigvalsh(S)[0] > 0.05:
            return q
    raise RuntimeError("could not sample an admissible symbol exponent")


def random_admissible_lambda(rng: np.random.Generator) -> complex:
    """``lambda`` with ``Re lambda < 1/2`` and bounded magnitude."""
    return complex(rng.uniform(-3.0, 0.49), rng.uniform(-3.0, 3.0))
