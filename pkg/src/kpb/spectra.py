"""Eigenvalues of the assembled operators and stability bookkeeping."""
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import NoConvergence, NotHermitian, ParamMismatch
from .operators import BlochParams, build_A, build_L

RE_TOL = 1e-8
INV_TOL = 1e-6
EIG_TOL = 1e-10
HERMITIAN_TOL = 1e-13


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: np.ndarray
    max_real_part: float
    unstable_count: int
    off_axis_count: int
    symmetry_residual_imag_axis: float
    symmetry_residual_real_axis: Optional[float]
    params: Optional[BlochParams]
    re_tol: float


@dataclass(frozen=True)
class NegativeCountReport:
    eigenvalues: np.ndarray
    negative_count: int
    min_abs_eigenvalue: float
    invertible: bool
    params: Optional[BlochParams] = None
    inv_tol: float = INV_TOL


def _matrix(m):
    return m.entries if hasattr(m, "entries") else np.asarray(m)


def eig_general(m, tol=EIG_TOL):
    """Eigenpairs of a dense matrix, returned as ``(values, vectors)``.

    Matrices that are real, or purely imaginary, are decomposed in real
    arithmetic so the conjugate-pair structure of their spectra is exact.
    Every pair satisfies ``|M v - lam v| <= tol |M|_F |v|``.
    """
    a = np.asarray(_matrix(m))
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError("expected a non-empty square matrix")
    try:
        if not np.iscomplexobj(a) or not np.any(a.imag):
            vals, vecs = scipy.linalg.eig(a.real)
        elif not np.any(a.real):
            vals, vecs = scipy.linalg.eig(a.imag)
            vals = 1j * vals
        else:
            vals, vecs = scipy.linalg.eig(a)
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(str(exc)) from exc
    if not np.all(np.isfinite(vals)):
        raise NoConvergence("non-finite eigenvalues")
    scale = tol * max(np.linalg.norm(a), np.finfo(float).tiny)
    resid = np.linalg.norm(a @ vecs - vecs * vals, axis=0)
    if np.any(resid > scale * np.linalg.norm(vecs, axis=0)):
        raise NoConvergence(f"eigen-residual {resid.max():.3e} exceeds contract")
    return vals.astype(complex), vecs


def _check_hermitian(a):
    if np.max(np.abs(a - a.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise NotHermitian("matrix is not Hermitian to 1e-13")


def eig_hermitian(m):
    """Ascending real eigenvalues of a Hermitian matrix."""
    if hasattr(m, "kind") and m.kind != "L":
        raise NotHermitian(f"expected an L matrix, got kind {m.kind}")
    a = np.asarray(_matrix(m))
    _check_hermitian(a)
    if np.iscomplexobj(a) and not np.any(a.imag):
        a = a.real
    try:
        return scipy.linalg.eigvalsh(a)
    except scipy.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc


def _nearest_gap(targets, pool):
    if len(targets) == 0:
        return 0.0
    return float(np.max(np.min(np.abs(targets[:, None] - pool[None, :]), axis=1)))


def classify(eigs, p=None, re_tol=RE_TOL):
    """Count eigenvalues in the open right half-plane and audit symmetries.

    ``unstable_count`` counts ``Re lam > re_tol``; ``off_axis_count`` counts
    both members of each ``(lam, -conj(lam))`` pair.

    The imaginary-axis residual is the largest distance from ``-conj(lam)`` to
    the computed set; at ``gamma == 0`` the same is done for ``conj(lam)``.
    """
    if re_tol <= 0:
        raise ValueError("re_tol must be positive")
    eigs = np.asarray(eigs, dtype=complex)
    max_re = float(np.max(eigs.real)) + 0.0 if len(eigs) else 0.0
    real_axis = None
    if p is None or p.gamma == 0:
        real_axis = _nearest_gap(np.conj(eigs), eigs)
    return SpectrumReport(
        eigenvalues=eigs,
        max_real_part=max_re,
        unstable_count=int(np.sum(eigs.real > re_tol)),
        off_axis_count=int(np.sum(np.abs(eigs.real) > re_tol)),
        symmetry_residual_imag_axis=_nearest_gap(-np.conj(eigs), eigs),
        symmetry_residual_real_axis=real_axis,
        params=p,
        re_tol=re_tol,
    )


def negative_count(m, inv_tol=INV_TOL):
    vals = eig_hermitian(m)
    min_abs = float(np.min(np.abs(vals))) if len(vals) else np.inf
    return NegativeCountReport(
        eigenvalues=vals,
        negative_count=int(np.sum(vals < -inv_tol)),
        min_abs_eigenvalue=min_abs,
        invertible=bool(min_abs > inv_tol),
        params=getattr(m, "params", None),
        inv_tol=inv_tol,
    )


def krein_audit(sr, nr):
    """``k_u <= n(L)`` whenever L is invertible; False flags a bug."""
    if sr.params is not None and nr.params is not None and sr.params != nr.params:
        raise ParamMismatch(f"{sr.params} != {nr.params}")
    return (not nr.invertible) or sr.unstable_count <= nr.negative_count


def spectrum(w, p, re_tol=RE_TOL):
    vals, _ = eig_general(build_A(w, p))
    return classify(vals, p, re_tol)


def analyze(w, p, re_tol=RE_TOL, inv_tol=INV_TOL):
    """Spectrum of A, negative count of L and the Krein audit at one point."""
    sr = spectrum(w, p, re_tol)
    nr = negative_count(build_L(w, p), inv_tol)
    return sr, nr, krein_audit(sr, nr)


def translation_kernel_check(w, n_trunc=None):
    """Relative size of ``A(ell=0)`` applied to the coefficients of ``P'``.

    Translation invariance puts ``P'`` in the kernel; the discrete residual
    measures truncation and solver error.  Returns 0 for the zero wave.
    """
    n_trunc = w.n_trunc if n_trunc is None else n_trunc
    p = BlochParams(sigma=1, ell=0.0, gamma=0.0, n_trunc=n_trunc)
    a = build_A(w, p)
    modes = a.basis_modes
    v = np.array([1j * n * w.coeffs[int(n)] for n in modes])
    norm = np.linalg.norm(v)
    if norm == 0:
        return 0.0
    return float(np.linalg.norm(a.entries @ v) / norm)
