import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toeplitz_positivity import (
    ComplexQuadraticSymbolExponent,
    HolomorphicQuadraticForm,
    QuadraticWeight,
    compare_weights,
    critical_value_hol,
    gaussian_reduce,
    polarize,
    split_herm_plh,
)
from toeplitz_positivity.errors import (
    BranchTrackingFailure,
    DimensionMismatch,
    DivergentIntegral,
    InvalidInput,
    SingularHessianBlock,
)
from toeplitz_positivity.forms import complexify, realify, track_log_det
from toeplitz_positivity.instances import random_complex, random_symmetric, random_weight

seeds = st.integers(min_value=0, max_value=2**32 - 1)


# ---------------------------------------------------------------- weights


def test_weight_validation():
    with pytest.raises(InvalidInput):
        QuadraticWeight(np.array([[0, 1], [0, 0]]), np.eye(2))
    with pytest.raises(InvalidInput):
        QuadraticWeight(np.zeros((2, 2)), np.array([[1, 1j], [1j, 1]]))
    with pytest.raises(DimensionMismatch):
        QuadraticWeight(np.zeros((2, 2)), np.eye(3))
    with pytest.raises(InvalidInput):
        QuadraticWeight(np.array([[np.nan]]), np.eye(1))


def test_weight_evaluation_matches_definition():
    rng = np.random.default_rng(0)
    phi = random_weight(rng, 3)
    x = random_complex(rng, (20, 3))
    manual = np.real(np.einsum("bi,ij,bj->b", x, phi.A, x)) + 0.5 * np.einsum("bi,ij,bj->b", x, phi.L, x.conj()).real
    assert np.allclose(phi(x), manual)
    imag = 0.5 * np.einsum("bi,ij,bj->b", x, phi.L, x.conj()).imag
    assert np.max(np.abs(imag)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 3))
def test_hessian_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    phi = random_weight(rng, n)
    S = phi.hessian()
    assert np.allclose(S, S.T)
    assert QuadraticWeight.from_hessian(S).allclose(phi)
    x = random_complex(rng, (5, n))
    r = realify(x)
    assert np.allclose(0.5 * np.einsum("bi,ij,bj->b", r, S, r), phi(x))
    assert np.allclose(complexify(r), x)


def test_gradient_and_graph_point():
    rng = np.random.default_rng(1)
    phi = random_weight(rng, 2)
    x = random_complex(rng, 2)
    eps = 1e-6
    num = np.array(
        [
            (phi(x + eps * e) - phi(x - eps * e)) / (2 * eps) - 1j * (phi(x + 1j * eps * e) - phi(x - 1j * eps * e)) / (2 * eps)
            for e in np.eye(2)
        ]
    ) / 2
    assert np.allclose(phi.gradient(x), num, atol=1e-7)
    g = phi.graph_point(x)
    assert np.allclose(g[:2], x)
    assert np.allclose(g[2:], (2 / 1j) * phi.gradient(x))


def test_psh_and_pluriharmonic_flags():
    assert QuadraticWeight.model(2).is_strictly_psh()
    assert not QuadraticWeight(np.zeros((1, 1)), -np.eye(1)).is_strictly_psh()
    plh = QuadraticWeight(np.array([[1.0]]), np.zeros((1, 1)))
    assert plh.is_pluriharmonic() and not plh.is_strictly_psh()


# ---------------------------------------------------------------- split / polarize


def test_split_examples():
    herm, plh = split_herm_plh(QuadraticWeight(np.array([[1.0]]), np.array([[1.0]])))
    assert np.allclose(herm.A, 0) and np.allclose(herm.L, 1)
    assert np.allclose(plh.A, 1) and np.allclose(plh.L, 0)
    herm, plh = split_herm_plh(QuadraticWeight.model(1))
    assert herm.allclose(QuadraticWeight.model(1)) and plh.allclose(QuadraticWeight.zero(1))


def test_split_resums_exactly():
    rng = np.random.default_rng(2)
    phi = random_weight(rng, 3)
    herm, plh = split_herm_plh(phi)
    assert np.array_equal(herm.A + plh.A, phi.A) and np.array_equal(herm.L + plh.L, phi.L)
    x = random_complex(rng, (100, 3))
    assert np.max(np.abs(herm(x) + plh(x) - phi(x))) < 1e-12 * np.max(1 + np.abs(x) ** 2)


def test_polarize_examples():
    psi = polarize(QuadraticWeight.model(1))
    assert np.allclose(psi.Q, [[0, 0.5], [0.5, 0]])  # Psi(x, y) = x y / 2
    psi = polarize(QuadraticWeight(np.array([[1.0]]), np.zeros((1, 1))))
    x = np.array([0.3 + 0.8j, -1.2 + 0.1j])
    assert np.allclose(psi(np.stack([x, x.conj()], axis=-1)), np.real(x**2))
    assert np.allclose(polarize(QuadraticWeight.zero(2)).Q, 0)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 3))
def test_polarize_identity(seed, n):
    rng = np.random.default_rng(seed)
    phi = random_weight(rng, n)
    psi = polarize(phi)
    x = random_complex(rng, (100, n))
    err = np.abs(psi(np.concatenate([x, x.conj()], axis=-1)) - phi(x))
    assert np.all(err < 1e-12 * (1 + np.sum(np.abs(x) ** 2, axis=-1)) * max(1, np.max(np.abs(psi.Q))))


# ---------------------------------------------------------------- comparison


def test_compare_examples():
    c = compare_weights(QuadraticWeight.model(1), QuadraticWeight.model(1, 0.25))
    assert c.pd and np.allclose(c.eigenvalues, [0.75, 0.75])
    c = compare_weights(QuadraticWeight.model(2), QuadraticWeight.model(2))
    assert c.signature == (0, 0, 4) and c.psd and not c.pd
    # -Im(x^2/2) = Re((i/2) x^2)
    c = compare_weights(QuadraticWeight.model(1), QuadraticWeight(np.array([[0.5j]]), np.zeros((1, 1))))
    assert c.psd and not c.pd and c.kernel.shape[1] == 1
    with pytest.raises(DimensionMismatch):
        compare_weights(QuadraticWeight.model(1), QuadraticWeight.model(2))


def test_compare_witness_attains_minimum():
    rng = np.random.default_rng(3)
    a, b = random_weight(rng, 2), random_weight(rng, 2)
    c = compare_weights(a, b)
    assert sum(c.signature) == 4
    S = a.hessian() - b.hessian()
    assert np.isclose(c.witness @ S @ c.witness, c.min_eigenvalue)
    assert c.psd == (c.min_eigenvalue >= -c.tol)


# ---------------------------------------------------------------- critical values


def test_critical_value_examples():
    # z w - w^2/2: eliminate w
    red, crit = critical_value_hol(HolomorphicQuadraticForm([[0, 1], [1, -1]]), 1)
    assert np.allclose(red.Q, [[1]]) and np.allclose(crit, [[1]])
    lam = -1.0
    # x t - (1 - lam) y t + y z over (x, z | y, t)
    Q = np.zeros((4, 4), complex)
    Q[0, 3] = Q[3, 0] = 1
    Q[2, 3] = Q[3, 2] = -(1 - lam)
    Q[2, 1] = Q[1, 2] = 1
    red, _ = critical_value_hol(HolomorphicQuadraticForm(Q), 2)
    assert np.allclose(red.Q, [[0, 1 / (1 - lam)], [1 / (1 - lam), 0]])
    P = np.array([[2.0, 1], [1, 3]])
    red, _ = critical_value_hol(HolomorphicQuadraticForm(np.block([[P, np.zeros((2, 1))], [np.zeros((1, 2)), np.array([[5.0]])]])), 2)
    assert np.allclose(red.Q, P)
    with pytest.raises(SingularHessianBlock):
        critical_value_hol(HolomorphicQuadraticForm([[1, 1], [1, 0]]), 1)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_critical_value_substitution_and_nesting(seed):
    rng = np.random.default_rng(seed)
    form = HolomorphicQuadraticForm(random_symmetric(rng, 5) + 3 * np.eye(5))
    red, crit = critical_value_hol(form, 2)
    z = random_complex(rng, 2)
    assert np.isclose(form(np.r_[z, crit @ z]), red(z))
    # eliminate the last variable first, then the remaining two
    step, _ = critical_value_hol(form, 4)
    nested, _ = critical_value_hol(step, 2)
    assert np.linalg.norm(nested.Q - red.Q) < 1e-10 * max(1, np.linalg.norm(red.Q))


# ---------------------------------------------------------------- Gaussian integrals


def hermite_integral(E: np.ndarray, d: int, p: np.ndarray, nodes: int) -> complex:
    """Tensor Gauss-Hermite value of the integral of exp(1/2 v^T E v), v = (t, p), over t in R^d."""
    M = E[:d, :d]
    Lc = np.linalg.cholesky(-M.real)
    T = np.linalg.inv(Lc).T  # t = T s turns -Re M into the identity
    x, w = np.polynomial.hermite_e.hermegauss(nodes)
    total = 0j
    for idx in itertools.product(range(nodes), repeat=d):
        s = x[list(idx)]
        t = T @ s
        v = np.r_[t, p]
        val = np.exp(0.5 * v @ E @ v + 0.5 * s @ s)
        total += np.prod(w[list(idx)]) * val
    return total * abs(np.linalg.det(T))


def test_gaussian_reduce_examples():
    red = gaussian_reduce(HolomorphicQuadraticForm([[-1.0]]), 1)
    assert np.isclose(np.exp(red.log_amplitude), np.sqrt(2 * np.pi))
    assert red.reduced.m == 0
    # exp(-4|y|^2/2 - |y|^2) over C = R^2: pi/3
    red = gaussian_reduce(HolomorphicQuadraticForm(-6 * np.eye(2)), 2)
    assert np.isclose(np.exp(red.log_amplitude), np.pi / 3)
    # (1/2pi) * (2/3) * int exp(-(2/3)|x|^2) * 2 dx = 1
    red = gaussian_reduce(HolomorphicQuadraticForm(-(4 / 3) * np.eye(2)), 2)
    assert np.isclose(np.exp(red.log_amplitude) * 2 * (2 / 3) / (2 * np.pi), 1)
    with pytest.raises(DivergentIntegral):
        gaussian_reduce(HolomorphicQuadraticForm([[1.0]]), 1)


def test_gaussian_reduce_against_quadrature():
    rng = np.random.default_rng(4)
    for k in range(50):
        d = 1 + k % 4
        m = 1 + k % 2
        X = rng.standard_normal((d, d))
        M = -(X @ X.T + d * np.eye(d)) + 1j * 0.6 * random_symmetric(rng, d).real
        R = 0.3 * random_complex(rng, (m, d))
        P = 0.3 * random_symmetric(rng, m)
        E = np.block([[M, R.T], [R, P]])
        p = 0.5 * random_complex(rng, m)
        red = gaussian_reduce(HolomorphicQuadraticForm(E), d)
        exact = np.exp(red.log_amplitude + red.reduced(p))
        nodes = {1: 40, 2: 24, 3: 14, 4: 10}[d]
        quad = hermite_integral(E, d, p, nodes)
        assert abs(exact - quad) < 1e-6 * abs(quad), (d, exact, quad)


def test_track_log_det_follows_branch():
    # det of exp(i t) traced around: diag(-1) is reached continuously from 1 through i
    start = np.eye(1, dtype=complex)
    end = np.array([[1j]])
    assert np.isclose(track_log_det(start, end, 0.0), 1j * np.pi / 2)
    with pytest.raises(BranchTrackingFailure):
        track_log_det(np.eye(1), -np.eye(1), 0.0)


# ---------------------------------------------------------------- symbol exponents


def test_symbol_exponent_real_part():
    rng = np.random.default_rng(5)
    n = 2
    q = ComplexQuadraticSymbolExponent(random_symmetric(rng, n), random_complex(rng, (n, n)), random_symmetric(rng, n))
    y = random_complex(rng, (10, n))
    assert np.allclose(q.real_part()(y), np.real(q(y)))
    assert np.allclose(q.levi(), q.Q2.T)
    pol = q.polarized()
    assert np.allclose(pol(np.concatenate([y, y.conj()], axis=-1)), q(y))
    assert ComplexQuadraticSymbolExponent.radial(-1.0).is_radial()
    with pytest.raises(InvalidInput):
        ComplexQuadraticSymbolExponent(np.array([[0, 1], [0, 0]]), np.eye(2), np.zeros((2, 2)))
