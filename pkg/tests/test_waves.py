import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpb.errors import InvalidAmplitude, NonConvergence
from kpb.waves import (FourierCoeffs, eval_wave, ode_residual, solve_wave,
                       wave_asymptotic)


def test_zero_amplitude_gives_zero_wave():
    w = solve_wave(0.0)
    assert w.k_sq == 1.0
    assert w.residual == 0.0
    assert np.all(w.coeffs.c == 0)
    assert ode_residual(w) == 0.0


def test_k_sq_at_a_tenth_matches_expansion(wave):
    assert abs(wave(0.1).k_sq - 0.99791667) < 1e-4


def test_second_order_coefficients_at_a_tenth(wave):
    p = wave(0.1).cos_amps
    assert abs(p[0] - (-2.5e-3)) < 1e-4
    assert abs(p[2] - 8.333e-4) < 1e-4


def test_newton_residual_confirmed_by_collocation(wave):
    assert ode_residual(wave(0.2), 256) <= 1e-10


def test_mode_one_is_exactly_a(wave):
    for a in (0.05, -0.1, 0.2):
        w = wave(a)
        assert w.cos_amps[1] == a
        assert w.coeffs[1] == a / 2


def test_asymptotic_closed_form():
    assert wave_asymptotic(0.0).k_sq == 1.0
    w = wave_asymptotic(0.1)
    np.testing.assert_allclose(w.cos_amps[:3], [-2.5e-3, 0.1, 8.3333e-4], atol=1e-8)
    assert abs(w.k_sq - 0.99791667) < 1e-8


def test_eval_wave_examples():
    assert eval_wave(solve_wave(0.0), 1.234) == 0.0
    assert abs(eval_wave(wave_asymptotic(0.1), 0.0) - 0.09833) < 1e-5


def test_eval_wave_is_even(wave):
    w = wave(0.2)
    z = np.random.default_rng(1).uniform(-10, 10, 100)
    np.testing.assert_allclose([eval_wave(w, x) for x in z],
                               [eval_wave(w, -x) for x in z], atol=1e-15)


def test_asymptotic_residual_is_cubic_and_positive():
    # measured constant is about 0.058; bound leaves headroom
    for a in (0.05, 0.1, 0.2):
        r = ode_residual(wave_asymptotic(a))
        assert 0 < r <= 0.1 * a ** 3


def test_asymptotic_residual_scales_cubically():
    r1 = ode_residual(wave_asymptotic(0.05))
    r2 = ode_residual(wave_asymptotic(0.1))
    assert 7.0 < r2 / r1 < 9.0


def test_quartic_remainder_of_k_sq(wave):
    amps = np.array([0.05, 0.1, 0.2])
    rem = [abs(wave(a).k_sq - (1 - 5 * a * a / 24)) / a ** 4 for a in amps]
    assert max(rem) <= 2.0
    # one constant fits all three: remainders agree closely
    assert np.ptp(rem) < 0.01


def test_negating_a_is_half_period_shift(wave):
    for a in (0.05, 0.1, 0.2):
        p, m = wave(a), wave(-a)
        sign = (-1.0) ** np.arange(len(p.cos_amps))
        np.testing.assert_allclose(m.cos_amps, sign * p.cos_amps, rtol=0, atol=1e-12)
        assert abs(m.k_sq - p.k_sq) <= 1e-12


def test_coefficient_decay_ratio_below_half(wave):
    for a in (0.05, 0.1, 0.2):
        p = np.abs(wave(a).cos_amps)
        for n in range(3, 12):
            if p[n] < 1e-300:
                break
            assert p[n] <= p[2] * 0.5 ** (n - 2)


def test_coefficients_represent_real_even_function(wave):
    c = wave(0.2).coeffs
    assert c.is_real_function()
    assert np.all(c.c.imag == 0)
    np.testing.assert_array_equal(c.c, c.c[::-1])


def test_fourier_coeffs_indexing():
    f = FourierCoeffs.from_cosine(np.array([1.0, 0.4, 0.2]))
    assert f.n_max == 2
    assert f[0] == 1.0 and f[1] == 0.2 and f[-2] == 0.1
    assert f[5] == 0
    np.testing.assert_array_equal(f.modes, np.arange(-2, 3))


def test_amplitude_out_of_range():
    with pytest.raises(InvalidAmplitude):
        solve_wave(0.31)
    with pytest.raises(ValueError):
        solve_wave(0.1, n_trunc=4)


def test_iteration_cap_raises_nonconvergence():
    with pytest.raises(NonConvergence):
        solve_wave(0.2, tol=1e-30, max_iter=2)


def test_ode_residual_grid_must_resolve_products(wave):
    with pytest.raises(ValueError):
        ode_residual(wave(0.1), grid_size=64)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=-0.25, max_value=0.25, allow_nan=False))
def test_solver_contract_holds_across_amplitudes(a):
    w = solve_wave(a, 32, 1e-12)
    assert w.k_sq > 0
    assert w.residual <= 1e-12
    assert ode_residual(w) <= 10 * 1e-12 + 1e-14
    assert w.cos_amps[1] == a


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=0.01, max_value=0.2))
def test_k_sq_is_even_in_a(a):
    assert abs(solve_wave(a).k_sq - solve_wave(-a).k_sq) <= 1e-12
