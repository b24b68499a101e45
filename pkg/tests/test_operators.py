import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpb.errors import SingularSymbol
from kpb.operators import (BlochParams, basis_modes, build_A, build_L, build_M,
                           convolution_matrix, derivative_symbol)
from kpb.waves import FourierCoeffs, solve_wave

ZERO = solve_wave(0.0)
ULP = np.finfo(float).eps


def _diag_at(op, n):
    i = list(op.basis_modes).index(n)
    return op.entries[i, i]


def _coeffs_on_grid(values, modes):
    m = len(values)
    fft = np.fft.fft(values) / m
    return np.array([fft[n % m] for n in modes])


def test_params_infer_zero_mean():
    assert BlochParams(1, 0.5).zero_mean is True
    assert BlochParams(1, 0.5, 0.25).zero_mean is False
    with pytest.raises(ValueError):
        BlochParams(1, 0.5, 0.25, zero_mean=True)
    with pytest.raises(ValueError):
        BlochParams(1, 0.5, 0.7)
    with pytest.raises(ValueError):
        BlochParams(2, 0.5)


def test_basis_excludes_mode_zero_only_for_periodic():
    assert 0 not in basis_modes(3, True)
    assert len(basis_modes(3, False)) == 7


def test_convolution_of_zero_is_identity():
    modes = basis_modes(5, False)
    np.testing.assert_array_equal(convolution_matrix(FourierCoeffs.zeros(3), modes),
                                  np.eye(len(modes)))


def test_convolution_of_cosine_has_half_amplitude_off_diagonals():
    a = 0.3
    q = convolution_matrix(FourierCoeffs.from_cosine(np.array([0.0, a])),
                           basis_modes(4, False))
    np.testing.assert_allclose(np.diag(q, 1), a / 2)
    np.testing.assert_allclose(np.diag(q, -1), a / 2)
    off = q - np.diag(np.diag(q)) - np.diag(np.diag(q, 1), 1) - np.diag(np.diag(q, -1), -1)
    assert np.all(off == 0)


def test_convolution_matches_pointwise_product():
    rng = np.random.default_rng(7)
    nf, ng, grid = 6, 10, 256
    f = FourierCoeffs.from_cosine(rng.normal(size=nf + 1) * 0.3)
    modes = basis_modes(nf + ng, False)
    g = np.zeros(len(modes), complex)
    inner = np.abs(modes) <= ng
    g[inner] = rng.normal(size=inner.sum()) + 1j * rng.normal(size=inner.sum())
    z = 2 * np.pi * np.arange(grid) / grid
    basis = np.exp(1j * np.outer(z, modes))
    f_vals = basis[:, np.abs(modes) <= nf] @ f.c
    product = _coeffs_on_grid((1 + f_vals) * (basis @ g), modes)
    np.testing.assert_allclose(convolution_matrix(f, modes) @ g, product, atol=1e-12)


def test_L_diagonal_examples():
    assert abs(_diag_at(build_L(ZERO, BlochParams(1, 0.8)), 1) - 0.64) < 1e-15
    assert abs(_diag_at(build_L(ZERO, BlochParams(1, 0.3, 0.25)), -1) - (-0.2775)) < 1e-15
    assert abs(_diag_at(build_L(ZERO, BlochParams(-1, 0.8)), 1) - (-0.64)) < 1e-15


def test_A_diagonal_examples():
    assert _diag_at(build_A(ZERO, BlochParams(1, 0.0)), 2) == -6j
    assert abs(_diag_at(build_A(ZERO, BlochParams(1, 0.3, 0.25)), 0) - (-0.125625j)) < 1e-15
    kp2 = build_A(ZERO, BlochParams(-1, 2.0))
    assert _diag_at(kp2, 2) == -4j and _diag_at(kp2, -1) == -4j


def test_M_at_zero_lambda_is_minus_K_A():
    p = BlochParams(1, 0.3, 0.25)
    k = derivative_symbol(p)
    m = build_M(ZERO, p, 0.0).entries
    np.testing.assert_allclose(m, -k[:, None] * build_A(ZERO, p).entries, rtol=1e-15, atol=1e-13)
    kr = k.imag
    np.testing.assert_allclose(np.diag(m).real, -kr ** 4 + kr ** 2 - 0.09, rtol=1e-15)
    assert np.all(m - np.diag(np.diag(m)) == 0)


def test_M_applied_on_grid_matches_symbol():
    # a = 0: M e^{inz} = (lam K - K^4 - K^2 - sigma ell^2) e^{inz}
    p, lam, grid = BlochParams(1, 0.5, n_trunc=6), 1.0, 64
    m = build_M(ZERO, p, lam)
    z = 2 * np.pi * np.arange(grid) / grid
    for j, n in enumerate(m.basis_modes):
        e = np.exp(1j * n * z)
        d1 = 1j * n * e
        direct = lam * d1 - n ** 4 * e + n ** 2 * e - 0.25 * e
        got = _coeffs_on_grid(direct, m.basis_modes)
        np.testing.assert_allclose(m.entries[:, j], got, atol=1e-12)


def test_factorization_small_truncation(wave):
    # full-size truncation sits at the ulp floor; see the relative test below
    w = wave(0.1)
    p = BlochParams(1, 0.3, 0.25, n_trunc=8)
    k = derivative_symbol(p)
    a = build_A(w, p).entries
    rng = np.random.default_rng(3)
    for lam in rng.normal(size=5) + 1j * rng.normal(size=5):
        m = build_M(w, p, lam).entries
        rhs = k[:, None] * (lam * np.eye(len(k)) - a)
        assert np.max(np.abs(m - rhs)) <= 1e-12


@pytest.mark.parametrize("gamma", [0.0, 0.25, -0.4, 0.5])
def test_factorization_relative_error_at_ulp_level(wave, gamma):
    w = wave(0.1)
    p = BlochParams(1, 0.3, gamma)
    k = derivative_symbol(p)
    a = build_A(w, p).entries
    lam = 0.7 - 1.3j
    m = build_M(w, p, lam).entries
    rhs = k[:, None] * (lam * np.eye(len(k)) - a)
    assert np.max(np.abs(m - rhs)) <= 8 * ULP * np.max(np.abs(m))


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-0.2, 0.2), ell=st.floats(0, 2), gamma=st.floats(-0.45, 0.5),
       sigma=st.sampled_from([1, -1]))
def test_A_is_minus_K_L_and_L_is_hermitian(a, ell, gamma, sigma):
    w = solve_wave(a, 16)
    p = BlochParams(sigma, ell, gamma, n_trunc=20)
    if gamma != 0 and abs(gamma) < 1e-6:
        return
    k = derivative_symbol(p)
    lm = build_L(w, p).entries
    am = build_A(w, p).entries
    scale = max(1.0, np.max(np.abs(am)))
    assert np.max(np.abs(am + k[:, None] * lm)) <= 8 * ULP * scale
    assert np.max(np.abs(lm - lm.conj().T)) <= 1e-13


def test_decomposition_absolute_at_moderate_truncation(wave):
    w = wave(0.2)
    p = BlochParams(1, 0.5, 0.25, n_trunc=6)
    k = derivative_symbol(p)
    diff = build_A(w, p).entries + k[:, None] * build_L(w, p).entries
    assert np.max(np.abs(diff)) <= 1e-13


def test_zero_mean_subspace_is_invariant(wave):
    # the full-basis symbol d/dz (d^2 + (1+P)/k^2) kills the mean of any input
    w = wave(0.2)
    modes = np.arange(-16, 17)
    d = 1j * modes
    op = d[:, None] * (convolution_matrix(w.coeffs, modes) / w.k_sq + np.diag(d ** 2))
    v = np.random.default_rng(5).normal(size=len(modes)) + 0j
    v[modes == 0] = 0
    assert (op @ v)[modes == 0][0] == 0


def test_singular_symbol_rejected():
    p = BlochParams(1, 0.5, 0.25)
    object.__setattr__(p, "gamma", 0.0)  # bypass validation to keep mode 0
    with pytest.raises(SingularSymbol):
        build_A(ZERO, p)
