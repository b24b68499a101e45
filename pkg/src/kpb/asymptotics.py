"""Closed-form small-amplitude predictors.

All predictors are leading order in ``a``; the dropped remainders are
absorbed into comparison tolerances by callers.
"""
from dataclasses import dataclass

import numpy as np

from .errors import OutOfRange, SingularSymbol


def dispersion_mu(k, ell, sigma=1):
    """Symbol of the unperturbed self-adjoint factor: ``k**2 - 1 + sigma ell**2 / k**2``."""
    k = np.asarray(k, dtype=float)
    return k ** 2 - 1.0 + sigma * ell ** 2 / k ** 2


def dispersion_omega(k, ell, sigma=1):
    """Dispersion relation ``-k**3 + k - sigma ell**2 / k``."""
    k = np.asarray(k, dtype=float)
    return -k ** 3 + k - sigma * ell ** 2 / k


def _shifted(n, p):
    k = n + p.gamma
    if k == 0:
        raise SingularSymbol(f"n + gamma = 0 for n={n}, gamma={p.gamma}")
    return k


def mu_n(n, p):
    """Eigenvalue of the unperturbed L on mode ``n``."""
    return float(dispersion_mu(_shifted(n, p), p.ell, p.sigma))


def omega_n(n, p):
    """Imaginary part of the unperturbed A eigenvalue on mode ``n``."""
    return float(dispersion_omega(_shifted(n, p), p.ell, p.sigma))


def ell_a_sq(a):
    """Squared transverse wavenumber of the KP-I periodic threshold, ``a**2/12``."""
    return a * a / 12.0


def _check_gamma(gamma):
    if not 0 < gamma <= 0.5:
        raise OutOfRange(f"gamma must lie in (0, 1/2], got {gamma}")


def ell_c(gamma):
    """Transverse wavenumber where modes 0 and -1 collide: ``sqrt(3) g (1-g)``."""
    _check_gamma(gamma)
    return np.sqrt(3.0) * gamma * (1.0 - gamma)


def ell_c_sq(gamma):
    _check_gamma(gamma)
    return 3.0 * gamma ** 2 * (1.0 - gamma) ** 2


def eps_a(gamma, a):
    """Half-width in ``ell**2`` of the KP-I Bloch instability interval."""
    _check_gamma(gamma)
    return (gamma * (1.0 - gamma)) ** 1.5 * abs(a)


def ell_0_sq(gamma):
    """Zero of ``mu_0`` in ``ell**2``."""
    _check_gamma(gamma)
    return gamma ** 2 * (1.0 - gamma ** 2)


def ell_minus_sq(gamma):
    """Zero of ``mu_{-1}`` in ``ell**2``."""
    _check_gamma(gamma)
    return gamma * (1.0 - gamma) ** 2 * (2.0 - gamma)


def ell_mp_sq(m, p):
    """KP-II collision locus of modes ``m`` and ``-p`` at ``a = 0``."""
    if m < 1 or p < 1:
        raise ValueError("m and p must be positive integers")
    return float(m * p * (m * m - m * p + p * p - 1))


def reduced_lambda_sq_periodic(a, ell, sigma=1):
    """Leading-order ``lam**2 = -ell**2 (ell**2 - sigma a**2/12)``."""
    return -ell ** 2 * (ell ** 2 - sigma * a * a / 12.0)


@dataclass(frozen=True)
class ReducedMatrix2:
    entries: np.ndarray
    regime: str  # "periodic" or "bloch"
    a: float
    ell: float
    gamma: float

    def eigenvalues(self):
        return np.linalg.eigvals(self.entries)


@dataclass(frozen=True)
class BlochReduction:
    matrix: ReducedMatrix2
    eps: float
    x_roots: np.ndarray
    eigenvalues: np.ndarray
    discriminant: float

    @property
    def unstable(self):
        return self.discriminant < 0


@dataclass(frozen=True)
class BubblePrediction:
    center_ell_sq: float
    half_width_ell_sq: float
    regime: str


def reduced_matrix_periodic(a, ell, sigma=1):
    """Action of A on the two long-wave modes in the (odd, even) basis.

    For KP-II (``sigma=-1``) ``ell**2`` is replaced by ``-ell**2``.
    """
    l2 = sigma * ell ** 2
    ent = np.array([[0.0, l2 - a * a / 12.0], [-l2, 0.0]], dtype=complex)
    return ReducedMatrix2(ent, "periodic", float(a), float(ell), 0.0)


def collision_omega(gamma):
    """Common value of omega_0 and omega_{-1} at ``ell = ell_c``."""
    return -2.0 * gamma * (1.0 - gamma) * (1.0 - 2.0 * gamma)


def reduced_matrix_bloch(a, ell, gamma):
    """2x2 reduction near the mode-0 / mode-(-1) collision.

    ``eps = ell**2 - ell_c**2``.  The eigenvalues are
    ``i (collision_omega + X)`` with ``X`` the roots of
    ``X**2 + X (eps/g - eps/(1-g)) + g (1-g) a**2 / 4 - eps**2 / (g (1-g))``.
    """
    _check_gamma(gamma)
    g = gamma
    eps = ell ** 2 - ell_c_sq(g)
    w_c = collision_omega(g)
    ent = 1j * np.array([
        [w_c - eps / g, 0.5 * g * a],
        [0.5 * (g - 1.0) * a, w_c - eps / (g - 1.0)],
    ])
    b = eps / g - eps / (1.0 - g)
    c = 0.25 * g * (1.0 - g) * a * a - eps * eps / (g * (1.0 - g))
    roots = np.roots([1.0, b, c]).astype(complex)
    disc = eps * eps / (g * g * (1.0 - g) ** 2) - g * (1.0 - g) * a * a
    matrix = ReducedMatrix2(ent, "bloch", float(a), float(ell), float(g))
    return BlochReduction(matrix, float(eps), roots, 1j * (w_c + roots), float(disc))


def bubble_prediction(a, gamma):
    if gamma == 0:
        return BubblePrediction(0.5 * ell_a_sq(a), 0.5 * ell_a_sq(a), "periodic")
    return BubblePrediction(ell_c_sq(gamma), eps_a(gamma, a), "bloch")
