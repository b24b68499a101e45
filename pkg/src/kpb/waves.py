"""Small-amplitude periodic profiles of the normalized travelling-wave ODE.

The profile ``P`` is 2*pi-periodic and even, and together with the squared
wavenumber ``k_sq`` it solves

    k_sq * P'' + P + P**2 / 2 = 0.

It is stored as complex exponential Fourier coefficients; because ``P`` is
even and real those coefficients are real and symmetric, and the cosine
amplitudes ``p_n`` are ``c_0`` and ``2 c_n`` for ``n >= 1``.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidAmplitude, NonConvergence

MAX_AMPLITUDE = 0.3
DEFAULT_N = 32
DEFAULT_TOL = 1e-12
MAX_ITER = 50


@dataclass(frozen=True)
class FourierCoeffs:
    """Exponential Fourier coefficients on modes ``-N..N``.

    ``c[j]`` is the coefficient of ``exp(i (j - N) z)``.
    """

    c: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=complex)
        if c.ndim != 1 or len(c) % 2 != 1:
            raise ValueError("coefficient array must have odd length 2N+1")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def n_max(self):
        return (len(self.c) - 1) // 2

    @property
    def modes(self):
        return np.arange(-self.n_max, self.n_max + 1)

    def __getitem__(self, n):
        if abs(n) > self.n_max:
            return 0j
        return self.c[n + self.n_max]

    def is_real_function(self, tol=0.0):
        return bool(np.all(np.abs(self.c - np.conj(self.c[::-1])) <= tol))

    @classmethod
    def from_cosine(cls, p):
        """Build from cosine amplitudes ``p_0..p_N`` of ``sum p_n cos(n z)``."""
        p = np.asarray(p, dtype=float)
        half = p[1:] / 2.0
        return cls(np.concatenate([half[::-1], p[:1], half]).astype(complex))

    @classmethod
    def zeros(cls, n_max):
        return cls(np.zeros(2 * n_max + 1, dtype=complex))


@dataclass(frozen=True)
class Wave:
    a: float
    k_sq: float
    coeffs: FourierCoeffs
    n_trunc: int
    residual: float

    @property
    def cos_amps(self):
        """Cosine amplitudes ``p_0..p_N``."""
        c = self.coeffs.c.real
        n = self.coeffs.n_max
        return np.concatenate([c[n:n + 1], 2.0 * c[n + 1:]])


def _square_cos(p):
    """Cosine amplitudes of ``P**2`` truncated to the modes of ``p``."""
    n = len(p) - 1
    c = np.concatenate([p[:0:-1] / 2.0, p[:1], p[1:] / 2.0])
    d = np.convolve(c, c)[2 * n:3 * n + 1]
    out = 2.0 * d
    out[0] = d[0]
    return out


def _square_jacobian(p):
    """d(_square_cos(p))_n / dp_m as an (N+1) x (N+1) array."""
    n = len(p) - 1
    c = np.concatenate([p[:0:-1] / 2.0, p[:1], p[1:] / 2.0])

    def cx(j):
        j = np.asarray(j)
        out = np.zeros(j.shape)
        inside = np.abs(j) <= n
        out[inside] = c[j[inside] + n]
        return out

    rows = np.arange(n + 1)[:, None]
    cols = np.arange(n + 1)[None, :]
    # d c_{+-m} / d p_m = 1/2 for m >= 1, d c_0 / d p_0 = 1
    jac_d = cx(rows - cols) + cx(rows + cols)
    jac_d[:, 0] = 2.0 * cx(rows[:, 0])
    jac = 2.0 * jac_d
    jac[0, :] = jac_d[0, :]
    return jac


def _galerkin_residual(p, k_sq):
    n2 = np.arange(len(p)) ** 2
    return -k_sq * n2 * p + p + 0.5 * _square_cos(p)


def wave_asymptotic(a):
    """Second-order small-amplitude expansion of the profile.

    Returns cosine amplitudes ``(-a**2/4, a, a**2/12)`` and
    ``k_sq = 1 - 5 a**2 / 24``.  ``residual`` is the Galerkin defect of the
    truncated expansion, not zero.
    """
    a = float(a)
    p = np.array([-a * a / 4.0, a, a * a / 12.0])
    k_sq = 1.0 - 5.0 * a * a / 24.0
    res = float(np.max(np.abs(_galerkin_residual(p, k_sq))))
    return Wave(a=a, k_sq=k_sq, coeffs=FourierCoeffs.from_cosine(p),
                n_trunc=2, residual=res)


def solve_wave(a, n_trunc=DEFAULT_N, tol=DEFAULT_TOL, max_iter=MAX_ITER):
    """Newton-Galerkin solve for the even profile with first cosine mode ``a``.

    Unknowns are the cosine amplitudes ``p_0..p_N`` and ``k_sq``; the extra
    equation ``p_1 = a`` removes the translation freedom.  The iteration starts
    from :func:`wave_asymptotic`.

    Raises
    ------
    InvalidAmplitude
        if ``|a| > 0.3``.
    NonConvergence
        if the Galerkin residual is not below ``tol`` after ``max_iter`` steps.
    """
    a = float(a)
    if not np.isfinite(a) or abs(a) > MAX_AMPLITUDE:
        raise InvalidAmplitude(f"|a| must be <= {MAX_AMPLITUDE}, got {a}")
    if n_trunc < 8:
        raise ValueError("n_trunc must be >= 8")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a == 0.0:
        return Wave(a=0.0, k_sq=1.0,
                    coeffs=FourierCoeffs.zeros(n_trunc),
                    n_trunc=n_trunc, residual=0.0)

    guess = wave_asymptotic(a)
    p = np.zeros(n_trunc + 1)
    p[:3] = guess.cos_amps
    k_sq = guess.k_sq
    n2 = np.arange(n_trunc + 1) ** 2

    for _ in range(max_iter):
        f = _galerkin_residual(p, k_sq)
        res = float(np.max(np.abs(f)))
        if res <= tol:
            break
        jac = np.zeros((n_trunc + 2, n_trunc + 2))
        jac[:n_trunc + 1, :n_trunc + 1] = (
            np.diag(1.0 - k_sq * n2) + 0.5 * _square_jacobian(p))
        jac[:n_trunc + 1, -1] = -n2 * p
        jac[-1, 1] = 1.0
        rhs = np.concatenate([f, [p[1] - a]])
        step = np.linalg.solve(jac, rhs)
        p = p - step[:-1]
        k_sq = k_sq - step[-1]
    else:
        f = _galerkin_residual(p, k_sq)
        res = float(np.max(np.abs(f)))
        if res > tol:
            raise NonConvergence(
                f"Newton residual {res:.3e} > {tol:.1e} after {max_iter} "
                f"iterations (a={a}, N={n_trunc})")

    p[1] = a
    return Wave(a=a, k_sq=float(k_sq), coeffs=FourierCoeffs.from_cosine(p),
                n_trunc=n_trunc, residual=res)


def eval_wave(w, z):
    """Evaluate ``sum p_n cos(n z)``; ``z`` may be an array."""
    p = w.cos_amps
    z = np.asarray(z, dtype=float)
    n = np.arange(len(p))
    return np.cos(np.multiply.outer(z, n)) @ p


def ode_residual(w, grid_size=256):
    """Max of ``|k_sq P'' + P + P**2/2|`` on a uniform grid, by direct summation."""
    if grid_size < 4 * w.n_trunc:
        raise ValueError("grid_size must be >= 4 * n_trunc")
    z = 2.0 * np.pi * np.arange(grid_size) / grid_size
    p = w.cos_amps
    n = np.arange(len(p))
    basis = np.cos(np.outer(z, n))
    val = basis @ p
    d2 = basis @ (-(n ** 2) * p)
    return float(np.max(np.abs(w.k_sq * d2 + val + 0.5 * val ** 2)))
