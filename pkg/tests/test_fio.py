import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toeplitz_positivity import (
    ComplexCanonicalMap,
    ComplexQuadraticSymbolExponent,
    HolomorphicQuadraticForm,
    NondegeneratePhase,
    QuadraticWeight,
    Status,
    generating_function,
    image_weight,
    kernel_domination_check,
    kernel_from_phase,
    map_from_kernel,
    polarize,
    projection_kernel,
    prop32_equivalence,
    push_weight,
)
from toeplitz_positivity.errors import InvalidInput, SingularHessianBlock, SingularLeviForm, SingularMixedBlock
from toeplitz_positivity.fio import critical_signature, kernel_weight_from_map
from toeplitz_positivity.instances import random_complex, random_model_map, random_symbol_exponent, random_weight

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.integers(1, 3)
MODEL = QuadraticWeight.model(1)


def lam_phase(lam: complex) -> NondegeneratePhase:
    return NondegeneratePhase.toeplitz(ComplexQuadraticSymbolExponent.radial(lam), MODEL)


def kernel_form(c: complex) -> HolomorphicQuadraticForm:
    """``Psi(x, z) = c x z / 2`` on ``C x C``."""
    return HolomorphicQuadraticForm([[0, c / 2], [c / 2, 0]])


# ---------------------------------------------------------------- phases


def test_phase_validation():
    with pytest.raises(InvalidInput):
        NondegeneratePhase(1, 1, 1, HolomorphicQuadraticForm(np.zeros((3, 3))))
    with pytest.raises(InvalidInput):
        NondegeneratePhase(1, 1, 1, HolomorphicQuadraticForm(np.zeros((2, 2))))


def test_identity_phase_is_the_identity():
    phase = lam_phase(0.0)
    # (2/i)(x theta / 2 - y theta / 2)
    expected = np.zeros((3, 3), complex)
    expected[0, 2] = expected[2, 0] = -1j
    expected[1, 2] = expected[2, 1] = 1j
    assert np.allclose(phase.form.Q, expected)
    assert np.allclose(phase.canonical_map().M, np.eye(2))


# ---------------------------------------------------------------- image weights


def test_image_weight_examples():
    assert image_weight(lam_phase(0.0), MODEL).allclose(MODEL)
    assert image_weight(lam_phase(-1.0), MODEL).allclose(QuadraticWeight.model(1, 0.25))
    assert critical_signature(lam_phase(-1.0), MODEL) == (2, 2, 0)


@settings(max_examples=30, deadline=None)
@given(seeds, dims)
def test_image_weight_matches_push_weight(seed, n):
    rng = np.random.default_rng(seed)
    phi2 = random_weight(rng, n)
    phase = NondegeneratePhase.toeplitz(random_symbol_exponent(rng, n), phi2)
    img = image_weight(phase, phi2)
    pushed = push_weight(phase.canonical_map(), phi2)
    assert np.linalg.norm(img.A - pushed.A) + np.linalg.norm(img.L - pushed.L) < 1e-9
    # the saddle is standard exactly when the image weight is strictly plurisubharmonic
    k = int(np.sum(np.linalg.eigvalsh(img.L) < 0))
    assert critical_signature(phase, phi2) == (2 * n + k, 2 * n - k, 0)


def test_image_weight_from_generating_phase():
    rng = np.random.default_rng(1)
    for n in (1, 2):
        M, _ = random_model_map(rng, n)
        phase = NondegeneratePhase.from_generating(generating_function(M), n)
        assert np.allclose(phase.canonical_map().M, M.M)
        img = image_weight(phase, QuadraticWeight.model(n))
        assert img.allclose(push_weight(M, QuadraticWeight.model(n)), 1e-9)


# ---------------------------------------------------------------- kernels


def test_kernel_examples():
    k = kernel_from_phase(lam_phase(0.0), MODEL)
    assert np.allclose(k.Psi.Q, kernel_form(1.0).Q)
    assert np.isclose(k.amplitude, 1 / np.pi)
    k = kernel_from_phase(lam_phase(-1.0), MODEL)
    assert np.allclose(k.Psi.Q, kernel_form(0.5).Q)  # 2 Psi = x z / (1 - lambda)
    x, y = np.array([0.3 + 0.2j]), np.array([-0.4 + 1.0j])
    assert np.isclose(k(x, y), k.amplitude * np.exp(x[0] * y[0].conj() / 2))


def test_kernel_amplitude_for_complex_lambda():
    # sum_k (1 - lam)^{-(k+1)} e_k(x) conj(e_k(y)) = e^{x conj y / (1 - lam)} / (pi (1 - lam))
    rng = np.random.default_rng(2)
    for _ in range(10):
        lam = complex(rng.uniform(-3, 0.45), rng.uniform(-3, 3))
        k = kernel_from_phase(lam_phase(lam), MODEL)
        assert k.branch == "homotopy"
        assert abs(k.amplitude - 1 / (np.pi * (1 - lam))) < 1e-12
        assert np.allclose(k.Psi.Q, kernel_form(1 / (1 - lam)).Q)


def test_kernel_singular_block():
    # phi = x theta, no y coupling: the (y, theta) Hessian of the kernel objective vanishes
    Q = np.zeros((3, 3), complex)
    Q[0, 2] = Q[2, 0] = 1
    with pytest.raises(SingularHessianBlock):
        kernel_from_phase(NondegeneratePhase(1, 1, 1, HolomorphicQuadraticForm(Q)), MODEL)


@settings(max_examples=30, deadline=None)
@given(seeds, dims)
def test_kernel_recovers_map(seed, n):
    rng = np.random.default_rng(seed)
    phi2 = random_weight(rng, n)
    phase = NondegeneratePhase.toeplitz(random_symbol_exponent(rng, n), phi2)
    k = kernel_from_phase(phase, phi2)
    M = map_from_kernel(k.Psi, polarize(phi2))
    assert np.max(np.abs(M.M - phase.canonical_map().M)) < 1e-9 * max(1, np.max(np.abs(M.M)))
    assert M.symplectic_defect() < 1e-10 * max(1, np.linalg.norm(M.M, 2) ** 2)


def test_map_from_kernel_examples():
    assert np.allclose(map_from_kernel(kernel_form(1.0), kernel_form(1.0)).M, np.eye(2))
    assert np.allclose(map_from_kernel(kernel_form(0.5), kernel_form(1.0)).M, np.diag([2, 0.5]))
    with pytest.raises(SingularMixedBlock):
        map_from_kernel(HolomorphicQuadraticForm(np.eye(2)), kernel_form(1.0))


def test_kernel_weight_from_map_inverts_map_from_kernel():
    rng = np.random.default_rng(3)
    for n in (1, 2, 3):
        phi2 = random_weight(rng, n)
        M, _ = random_model_map(rng, n)
        Psi = kernel_weight_from_map(M, phi2)
        assert np.allclose(map_from_kernel(Psi, polarize(phi2)).M, M.M)


# ---------------------------------------------------------------- domination


def test_domination_examples():
    rep = kernel_domination_check(polarize(MODEL), MODEL, MODEL)
    assert rep.psd and rep.kernel_dimension == 2
    k = kernel_from_phase(lam_phase(-1.0), MODEL)
    rep = kernel_domination_check(k.Psi, QuadraticWeight.model(1, 0.25), MODEL)
    assert rep.min_eigenvalue >= -1e-10 and rep.kernel_dimension == 2
    perturbed = HolomorphicQuadraticForm(polarize(MODEL).Q + 0.1 * np.array([[0, 1], [1, 0]]))
    rep = kernel_domination_check(perturbed, MODEL, MODEL)
    assert not rep.psd
    F = rep.comparison
    assert F.witness.shape == (4,) and F.min_eigenvalue < 0


# ---------------------------------------------------------------- three-way equivalence


def test_equivalence_examples():
    rep = prop32_equivalence(ComplexCanonicalMap.identity(1), MODEL, MODEL)
    assert rep.agree and rep.statuses[0] == Status.DEGENERATE_POSITIVE
    rep = prop32_equivalence(ComplexCanonicalMap.diagonal([2.0]), MODEL, MODEL)
    assert rep.agree and rep.statuses[0] == Status.STRICTLY_POSITIVE
    rep = prop32_equivalence(ComplexCanonicalMap.diagonal([0.6]), MODEL, MODEL)
    assert rep.agree and rep.statuses[0] == Status.NOT_POSITIVE


# ---------------------------------------------------------------- projection kernels


def test_projection_kernel_constants():
    assert np.isclose(projection_kernel(MODEL).amplitude, 1 / np.pi)
    assert np.isclose(projection_kernel(QuadraticWeight.model(1, 2.0)).amplitude, 2 / np.pi)
    L = np.diag([1.0, 3.0])
    k = projection_kernel(QuadraticWeight(np.zeros((2, 2)), L))
    assert np.isclose(k.amplitude, (1 / np.pi) * (3 / np.pi))
    with pytest.raises(SingularLeviForm):
        projection_kernel(QuadraticWeight.zero(1))


def test_projection_kernel_reproduces_holomorphic_functions():
    # int a2 e^{2 Psi(x, conj y)} f(y) e^{-2 phi(y)} dy = f(x) for f = monomials, by polar quadrature
    from scipy.special import roots_legendre

    phi = QuadraticWeight(np.array([[0.2 + 0.1j]]), np.array([[1.5]]))
    k = projection_kernel(phi)
    r, wr = roots_legendre(120)
    R = 9.0
    r, wr = 0.5 * R * (r + 1), 0.5 * R * wr
    th = 2 * np.pi * np.arange(128) / 128
    Y = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    W = (wr[:, None] * r[:, None] * np.full((1, 128), 2 * np.pi / 128)).ravel()
    x = np.array([0.3 - 0.4j])
    for f in (lambda z: np.ones_like(z), lambda z: z, lambda z: z**3):
        vals = k(np.broadcast_to(x, (Y.size, 1)), Y[:, None]) * f(Y) * np.exp(-2 * phi(Y[:, None]))
        assert abs(np.sum(W * vals) - f(x)[0]) < 1e-9
