"""Parameter sweeps, bisection of stability boundaries, collision location."""
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import asymptotics as asy
from .errors import BubbleNotFound, ComputationError, NoSignChange
from .operators import DEFAULT_N, BlochParams
from .spectra import INV_TOL, RE_TOL, analyze, spectrum

GAMMA_MIN = 0.05
BISECT_TOL = 1e-6
BUBBLE_STEP = 1e-3
BUBBLE_MARGIN = 0.05


@dataclass(frozen=True)
class StabilityRecord:
    a: float
    ell: float
    gamma: float
    sigma: int
    max_real_part: float
    unstable_count: int
    off_axis_count: int
    negative_count: int
    l_invertible: bool
    krein_ok: bool
    symmetry_residual_imag_axis: float = 0.0
    symmetry_residual_real_axis: Optional[float] = None


@dataclass(frozen=True)
class BoundaryResult:
    critical_ell: float
    bracket: tuple
    iterations: int
    predictor: float
    relative_gap: float


@dataclass(frozen=True)
class BubbleResult:
    ell_lo: float
    ell_hi: float
    center_ell_sq: float
    half_width_ell_sq: float
    prediction: asy.BubblePrediction
    center_gap: float
    half_width_gap: float
    asymmetry: float
    lower: BoundaryResult
    upper: BoundaryResult


class ScanError(ComputationError):
    """Some grid points failed; ``records`` holds the ones that succeeded."""

    def __init__(self, records, failures):
        self.records = records
        self.failures = failures
        (g, l), exc = failures[0]
        super().__init__(f"{len(failures)} scan point(s) failed, first at "
                         f"gamma={g}, ell={l}: {exc}")


def worker_count():
    env = os.environ.get("KPB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _check_gamma(gamma):
    if gamma != 0 and not GAMMA_MIN <= gamma <= 0.5:
        raise ValueError(
            f"scan gamma must be 0 or in [{GAMMA_MIN}, 1/2], got {gamma}")


def evaluate(w, sigma, gamma, ell, n_trunc=DEFAULT_N, re_tol=RE_TOL,
             inv_tol=INV_TOL):
    p = BlochParams(sigma=sigma, ell=ell, gamma=gamma, n_trunc=n_trunc)
    sr, nr, ok = analyze(w, p, re_tol, inv_tol)
    return StabilityRecord(
        a=w.a, ell=float(ell), gamma=float(gamma), sigma=int(sigma),
        max_real_part=sr.max_real_part, unstable_count=sr.unstable_count,
        off_axis_count=sr.off_axis_count, negative_count=nr.negative_count,
        l_invertible=nr.invertible, krein_ok=ok,
        symmetry_residual_imag_axis=sr.symmetry_residual_imag_axis,
        symmetry_residual_real_axis=sr.symmetry_residual_real_axis)


def scan(w, sigma, gamma_list, ell_list, n_trunc=DEFAULT_N, re_tol=RE_TOL,
         inv_tol=INV_TOL, workers=None):
    """Evaluate every ``(gamma, ell)`` grid point; records sorted by (gamma, ell)."""
    gammas = [float(g) for g in gamma_list]
    ells = [float(l) for l in ell_list]
    for g in gammas:
        _check_gamma(g)
    if any(not l > 0 for l in ells):
        raise ValueError("scan requires ell > 0")
    points = sorted((g, l) for g in gammas for l in ells)
    workers = worker_count() if workers is None else workers

    def job(pt):
        try:
            return evaluate(w, sigma, pt[0], pt[1], n_trunc, re_tol, inv_tol), None
        except ComputationError as exc:
            return None, (pt, exc)

    if workers <= 1 or len(points) < 2:
        out = [job(pt) for pt in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(job, points))
    records = [r for r, _ in out if r is not None]
    failures = [f for _, f in out if f is not None]
    if failures:
        raise ScanError(records, failures)
    return records


def _unstable(w, sigma, gamma, ell, n_trunc, re_tol):
    p = BlochParams(sigma=sigma, ell=ell, gamma=gamma, n_trunc=n_trunc)
    return spectrum(w, p, re_tol).unstable_count > 0


def _bisect(indicator, lo, hi, tol):
    """Shrink ``[lo, hi]`` around the switch of a boolean indicator."""
    f_lo = indicator(lo)
    if f_lo == indicator(hi):
        raise NoSignChange(f"indicator equal at both ends of ({lo}, {hi})")
    its = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if indicator(mid) == f_lo:
            lo = mid
        else:
            hi = mid
        its += 1
    return lo, hi, its


def _predicted_edge(a, gamma, ell_sq):
    if gamma == 0:
        return asy.ell_a_sq(a)
    c, h = asy.ell_c_sq(gamma), asy.eps_a(gamma, a)
    return c - h if ell_sq <= c else c + h


def find_critical_ell(w, sigma, gamma, bracket, bisect_tol=BISECT_TOL,
                      n_trunc=DEFAULT_N, re_tol=RE_TOL):
    """Bisect in ``ell`` on the indicator ``unstable_count > 0``.

    The predictor is ``ell_a`` at ``gamma = 0`` and the nearer leading-order
    bubble edge otherwise; ``relative_gap`` compares squares.
    """
    lo, hi = map(float, bracket)
    if not 0 < lo < hi:
        raise ValueError("bracket must satisfy 0 < lo < hi")
    lo, hi, its = _bisect(
        lambda l: _unstable(w, sigma, gamma, l, n_trunc, re_tol),
        lo, hi, bisect_tol)
    crit = 0.5 * (lo + hi)
    pred_sq = _predicted_edge(w.a, gamma, crit ** 2)
    gap = abs(crit ** 2 - pred_sq) / pred_sq if pred_sq > 0 else np.inf
    return BoundaryResult(crit, (lo, hi), its, float(np.sqrt(max(pred_sq, 0.0))),
                          float(gap))


def find_bubble(w, gamma, coarse_step=BUBBLE_STEP, sigma=1,
                bisect_tol=BISECT_TOL, n_trunc=DEFAULT_N, re_tol=RE_TOL,
                workers=None):
    """Locate the unstable ``ell**2`` interval near the 0/-1 mode collision.

    A coarse grid of step ``coarse_step`` in ``ell**2`` covers
    ``(0, ell_minus**2 + 0.05]``; both edges are then bisected in ``ell``.
    """
    if not GAMMA_MIN <= gamma <= 0.5:
        raise ValueError(f"gamma must lie in [{GAMMA_MIN}, 1/2]")
    top = asy.ell_minus_sq(gamma) + BUBBLE_MARGIN
    grid = np.arange(1, int(np.floor(top / coarse_step)) + 1) * coarse_step
    recs = scan(w, sigma, [gamma], np.sqrt(grid), n_trunc=n_trunc,
                re_tol=re_tol, workers=workers)
    hot = [i for i, r in enumerate(recs) if r.unstable_count > 0]
    if not hot:
        raise BubbleNotFound(
            f"no unstable point on the coarse grid (a={w.a}, gamma={gamma}, "
            f"step={coarse_step})")
    i_lo, i_hi = hot[0], hot[-1]
    ell_grid = np.sqrt(grid)
    lo_left = ell_grid[i_lo - 1] if i_lo > 0 else 0.5 * ell_grid[0]
    lower = find_critical_ell(w, sigma, gamma, (lo_left, ell_grid[i_lo]),
                              bisect_tol, n_trunc, re_tol)
    if i_hi + 1 >= len(ell_grid):
        raise BubbleNotFound("instability reaches the top of the scan window")
    upper = find_critical_ell(w, sigma, gamma, (ell_grid[i_hi], ell_grid[i_hi + 1]),
                              bisect_tol, n_trunc, re_tol)
    lo_sq, hi_sq = lower.critical_ell ** 2, upper.critical_ell ** 2
    center, half = 0.5 * (lo_sq + hi_sq), 0.5 * (hi_sq - lo_sq)
    pred = asy.bubble_prediction(w.a, gamma)
    return BubbleResult(
        ell_lo=lower.critical_ell, ell_hi=upper.critical_ell,
        center_ell_sq=center, half_width_ell_sq=half, prediction=pred,
        center_gap=abs(center - pred.center_ell_sq) / pred.center_ell_sq,
        half_width_gap=(abs(half - pred.half_width_ell_sq) / pred.half_width_ell_sq
                        if pred.half_width_ell_sq > 0 else np.inf),
        asymmetry=center - pred.center_ell_sq,
        lower=lower, upper=upper)


def collision_locator(m, p, ell_bracket=None, sigma=-1, tol=1e-15):
    """``ell`` where the unperturbed frequencies of modes ``m`` and ``-p`` meet.

    Bisection on the sign of ``omega_m - omega_{-p}`` from the closed-form
    dispersion relation.  A zero at the lower end is returned exactly.
    """
    if m < 1 or p < 1:
        raise ValueError("m and p must be positive integers")
    if ell_bracket is None:
        ell_bracket = (0.0, np.sqrt(m * p * (m * m + p * p)) + 1.0)
    lo, hi = map(float, ell_bracket)

    def diff(ell):
        return float(asy.dispersion_omega(m, ell, sigma)
                     - asy.dispersion_omega(-p, ell, sigma))

    f_lo, f_hi = diff(lo), diff(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoSignChange(f"no collision of modes {m}, {-p} in ({lo}, {hi})")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = diff(mid)
        if f_mid == 0 or hi - lo <= tol * max(1.0, abs(mid)):
            return mid
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def dispersion_curve(sigma, ell, k_range, samples=401):
    """Rows ``(k, omega(k), mu(k))`` on ``samples`` points of ``k_range``."""
    k_lo, k_hi = map(float, k_range)
    if k_lo <= 0 <= k_hi or k_lo >= k_hi:
        raise ValueError("k_range must be increasing and exclude 0")
    k = np.linspace(k_lo, k_hi, samples)
    return np.column_stack([k, asy.dispersion_omega(k, ell, sigma),
                            asy.dispersion_mu(k, ell, sigma)])
