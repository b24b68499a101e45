"""Truncated Fourier (Hill) matrices of the linearized KP operators.

For Floquet exponent ``gamma`` a perturbation is ``exp(i gamma z)`` times a
2*pi-periodic function, so every derivative acts on mode ``n`` as
``i (n + gamma)``.  With ``q`` the coefficients of ``1 + P`` and ``K`` the
diagonal symbol ``i (n + gamma)``:

    L = -K**2 - Q / k_sq - sigma ell**2 K**-2          (self-adjoint)
    A = -K L                                             (spectral problem)
    M(lam) = lam K - K**4 - K**2 Q / k_sq - sigma ell**2 = K (lam I - A)

At ``gamma = 0`` mode 0 is dropped (zero-mean functions).
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import SingularSymbol

DEFAULT_N = 48


@dataclass(frozen=True)
class BlochParams:
    """One operator configuration.

    ``zero_mean`` is derived from ``gamma`` when left as ``None``.
    """

    sigma: int
    ell: float
    gamma: float = 0.0
    n_trunc: int = DEFAULT_N
    zero_mean: Optional[bool] = None

    def __post_init__(self):
        if self.sigma not in (1, -1):
            raise ValueError(f"sigma must be +1 or -1, got {self.sigma}")
        if not self.ell >= 0:
            raise ValueError(f"ell must be >= 0, got {self.ell}")
        if not -0.5 < self.gamma <= 0.5:
            raise ValueError(f"gamma must lie in (-1/2, 1/2], got {self.gamma}")
        if self.n_trunc < 1:
            raise ValueError("n_trunc must be >= 1")
        expected = self.gamma == 0
        if self.zero_mean is None:
            object.__setattr__(self, "zero_mean", expected)
        elif bool(self.zero_mean) != expected:
            raise ValueError("zero_mean must be True exactly when gamma == 0")
        object.__setattr__(self, "sigma", int(self.sigma))
        object.__setattr__(self, "ell", float(self.ell))
        object.__setattr__(self, "gamma", float(self.gamma))

    def replace(self, **changes):
        kw = dict(sigma=self.sigma, ell=self.ell, gamma=self.gamma,
                  n_trunc=self.n_trunc)
        kw.update(changes)
        return BlochParams(**kw)


def basis_modes(n_trunc, zero_mean):
    modes = np.arange(-n_trunc, n_trunc + 1)
    if zero_mean:
        modes = modes[modes != 0]
    return modes


@dataclass(frozen=True)
class OperatorMatrix:
    kind: str  # "A", "L" or "M"
    basis_modes: np.ndarray
    entries: np.ndarray
    params: BlochParams
    lam: Optional[complex] = field(default=None)

    @property
    def dim(self):
        return len(self.basis_modes)


def convolution_matrix(f, modes):
    """Matrix of multiplication by ``1 + f`` on the given modes.

    Entry ``(m, n)`` is ``q_{m-n}`` with ``q_0 = 1 + f_0`` and ``q_j = f_j``.
    """
    modes = np.asarray(modes)
    diff = modes[:, None] - modes[None, :]
    nf = f.n_max
    out = np.zeros(diff.shape, dtype=complex)
    inside = np.abs(diff) <= nf
    out[inside] = f.c[diff[inside] + nf]
    out[diff == 0] += 1.0
    return out


def _symbols(p):
    modes = basis_modes(p.n_trunc, p.zero_mean)
    k = modes + p.gamma
    if np.any(k == 0):
        raise SingularSymbol(f"mode with n + gamma = 0 retained (gamma={p.gamma})")
    return modes, k


def _perturbation(w, modes):
    """``Q / k_sq - I``: vanishes identically for the zero wave."""
    pert = convolution_matrix(w.coeffs, modes) / w.k_sq
    pert[np.diag_indices_from(pert)] -= 1.0
    return pert


def build_L(w, p):
    """Self-adjoint factor: ``diag(mu(n + gamma)) - (Q / k_sq - I)``."""
    modes, k = _symbols(p)
    mu = k ** 2 - 1.0 + p.sigma * p.ell ** 2 / k ** 2
    ent = np.diag(mu).astype(complex) - _perturbation(w, modes)
    return OperatorMatrix("L", modes, ent, p)


def build_A(w, p):
    """``i diag(omega(n + gamma)) + i K_m (Q / k_sq - I)``, equal to ``-K L``."""
    modes, k = _symbols(p)
    omega = -k ** 3 + k - p.sigma * p.ell ** 2 / k
    ent = 1j * k[:, None] * _perturbation(w, modes)
    ent[np.diag_indices_from(ent)] += 1j * omega
    return OperatorMatrix("A", modes, ent, p)


def build_M(w, p, lam):
    """``lam K - K**4 - K**2 Q / k_sq - sigma ell**2``, equal to ``K (lam I - A)``."""
    modes, k = _symbols(p)
    omega = -k ** 3 + k - p.sigma * p.ell ** 2 / k
    ent = (k ** 2)[:, None] * _perturbation(w, modes)
    ent[np.diag_indices_from(ent)] += k * omega + 1j * lam * k
    return OperatorMatrix("M", modes, ent, p, lam=complex(lam))


def derivative_symbol(p):
    """Diagonal of ``K = diag(i (n + gamma))`` on the retained modes."""
    _, k = _symbols(p)
    return 1j * k
