"""End-to-end verification checks with pinned expected values and tolerances.

Each ``check_*`` returns a :class:`CheckResult`; ``run_all`` is what
``kpb verify`` executes.  ``quick=True`` coarsens the scan grids only, never
the tolerances.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import asymptotics as asy
from .errors import NoSignChange
from .operators import BlochParams, build_A, build_L, build_M, derivative_symbol
from .scanner import collision_locator, find_bubble, find_critical_ell, scan
from .spectra import eig_general, eig_hermitian, spectrum, translation_kernel_check
from .waves import ode_residual, solve_wave

# expected values and tolerances; provenance in trailing comments
TOL = {
    "k_sq_quartic": 2.0,         # |k_sq - (1 - 5a^2/24)| <= C a^4, k_a^2 expansion
    "p2_quartic": 2.0,           # |p_2 - a^2/12| <= C a^4 + 1e-12, P_a expansion
    "newton_residual": 1e-10,
    "translation_kernel": 1e-8,  # A_a(0) P_a' = 0
    "critical_rel": 0.05,        # ell_a^2 = a^2/12
    "re_tol": 1e-8,
    "growth_rel": 0.10,          # lam^2 = -ell^2 (ell^2 - a^2/12)
    "center_rel": 0.02,          # ell_c^2 = 3 g^2 (1-g)^2
    "half_width_rel": 0.15,      # eps_a = (g (1-g))^{3/2} |a|
    "pair_match": 1e-8,
    "krein_min_points": 200,     # k_u <= n(L)
    "symmetry": 1e-8,
    "factorization": 1e-12,      # M(lam) = K (lam I - A)
    "collision_ell_sq": 1e-6,    # ell_mp^2 = mp (m^2 - mp + p^2 - 1)
    "collision_gap": 1e-8,
    "truncation": 1e-8,
    "unperturbed": 1e-12,        # i omega_n, mu_n
}

WAVE_N = 32
OP_N = 48
SEED = 20240611


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    detail: str
    metrics: dict = field(default_factory=dict)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number:2d} {self.title}: {self.detail}"


@lru_cache(maxsize=None)
def _wave(a, n=WAVE_N):
    return solve_wave(a, n, 1e-12)


@lru_cache(maxsize=None)
def _grids(quick):
    """Scan grids shared by criteria 3-6."""
    per_decade = 16 if quick else 64
    step = 4e-3 if quick else 1e-3
    ells = np.logspace(np.log10(0.005), np.log10(2.0),
                       int(round(per_decade * np.log10(2.0 / 0.005))) + 1)
    periodic = scan(_wave(0.1), 1, [0.0], ells)
    bloch = {}
    for g in (0.25, 0.5):
        top = asy.ell_minus_sq(g) + 0.05
        sq = np.arange(1, int(np.floor(top / step)) + 1) * step
        bloch[g] = scan(_wave(0.05), 1, [g], np.sqrt(sq))
    return periodic, bloch


def check_wave_accuracy(quick=False):
    worst = {}
    ok = True
    for a in (0.05, 0.1, 0.2):
        w = _wave(a)
        p = w.cos_amps
        dk = abs(w.k_sq - (1 - 5 * a * a / 24))
        dp = abs(p[2] - a * a / 12)
        res = max(w.residual, ode_residual(w, 256))
        ok &= dk <= TOL["k_sq_quartic"] * a ** 4
        ok &= dp <= TOL["p2_quartic"] * a ** 4 + 1e-12
        ok &= res <= TOL["newton_residual"]
        worst[a] = (dk / a ** 4, dp / a ** 4, res)
    detail = "; ".join(f"a={a}: dk/a^4={v[0]:.3g}, dp2/a^4={v[1]:.3g}, res={v[2]:.1e}"
                       for a, v in worst.items())
    return CheckResult(1, "wave accuracy", bool(ok), detail, {"per_a": worst})


def check_translation_kernel(quick=False):
    r1 = translation_kernel_check(_wave(0.1, 32), 32)
    r2 = translation_kernel_check(_wave(0.2, 48), 48)
    ok = max(r1, r2) <= TOL["translation_kernel"]
    return CheckResult(2, "translation kernel", ok,
                       f"a=0.1,N=32: {r1:.2e}; a=0.2,N=48: {r2:.2e}",
                       {"a0.1": r1, "a0.2": r2})


def check_periodic_threshold(quick=False):
    a = 0.1
    w = _wave(a)
    br = find_critical_ell(w, 1, 0.0, (0.005, 0.1))
    ok = br.relative_gap <= TOL["critical_rel"]
    worst_re = max(spectrum(w, BlochParams(1, l)).max_real_part
                   for l in (0.1, 0.5, 1.0, 2.0))
    ok &= worst_re <= TOL["re_tol"]
    sr = spectrum(w, BlochParams(1, a / np.sqrt(24)))
    lam = sr.eigenvalues[np.argmax(sr.eigenvalues.real)]
    growth_gap = abs(lam.real - a * a / 24) / (a * a / 24)
    ok &= sr.unstable_count == 1
    ok &= abs(lam.imag) <= TOL["re_tol"]
    ok &= growth_gap <= TOL["growth_rel"]
    detail = (f"ell*={br.critical_ell:.6f} (gap {br.relative_gap:.2%}), "
              f"max Re for ell>=0.1: {worst_re:.1e}, k_u={sr.unstable_count}, "
              f"lam={lam.real:.4e}{lam.imag:+.1e}i (gap {growth_gap:.2%})")
    return CheckResult(3, "KP-I periodic threshold", bool(ok), detail,
                       {"critical_ell": br.critical_ell, "gap": br.relative_gap,
                        "growth_gap": growth_gap})


def _bubble_check(g, recs, quick):
    w = _wave(0.05)
    b = find_bubble(w, g, coarse_step=4e-3 if quick else 1e-3)
    lo, hi = b.ell_lo ** 2, b.ell_hi ** 2
    inside = [r for r in recs if lo < r.ell ** 2 < hi]
    outside = [r for r in recs if not lo <= r.ell ** 2 <= hi]
    pair_err = 0.0
    pair_ok = len(inside) > 0
    for r in inside:
        sr = spectrum(w, BlochParams(1, r.ell, g))
        off = sr.eigenvalues[np.abs(sr.eigenvalues.real) > TOL["re_tol"]]
        pair_ok &= sr.unstable_count == 1 and len(off) == 2
        if len(off) == 2:
            pair_err = max(pair_err, abs(off[0].real + off[1].real))
    pair_ok &= pair_err <= TOL["pair_match"]
    out_re = max((r.max_real_part for r in outside), default=0.0)
    return b, inside, pair_ok, pair_err, out_re


def check_bloch_bubble(quick=False):
    _, bloch = _grids(quick)
    b, inside, pair_ok, pair_err, out_re = _bubble_check(0.25, bloch[0.25], quick)
    ok = (b.center_gap <= TOL["center_rel"] and b.half_width_gap <= TOL["half_width_rel"]
          and pair_ok and out_re <= TOL["re_tol"])
    b2, inside2, pair_ok2, pair_err2, out_re2 = _bubble_check(0.5, bloch[0.5], quick)
    ok &= b2.center_gap <= TOL["center_rel"]
    ok &= pair_ok2 and out_re2 <= TOL["re_tol"]
    detail = (f"g=0.25: center {b.center_ell_sq:.6f} (gap {b.center_gap:.2%}), "
              f"half-width {b.half_width_ell_sq:.4e} (gap {b.half_width_gap:.2%}), "
              f"{len(inside)} inside pts pair err {pair_err:.1e}, outside max Re {out_re:.1e}; "
              f"g=0.5: center {b2.center_ell_sq:.6f} (gap {b2.center_gap:.2%}), "
              f"outside max Re {out_re2:.1e}")
    return CheckResult(4, "KP-I Bloch bubble", bool(ok), detail,
                       {"center": b.center_ell_sq, "half_width": b.half_width_ell_sq,
                        "center_0.5": b2.center_ell_sq})


def _all_records(quick):
    periodic, bloch = _grids(quick)
    return list(periodic) + [r for recs in bloch.values() for r in recs]


def check_krein(quick=False):
    recs = _all_records(quick)
    inv = [r for r in recs if r.l_invertible]
    bad = [r for r in inv if not r.krein_ok]
    enough = quick or len(recs) >= TOL["krein_min_points"]
    ok = not bad and enough
    return CheckResult(5, "Krein inequality", ok,
                       f"{len(recs)} points, {len(inv)} invertible, {len(bad)} violations",
                       {"points": len(recs), "violations": len(bad)})


def _pairing_residual(x, y):
    cost = np.abs(x[:, None] - y[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


def check_symmetries(quick=False):
    recs = _all_records(quick)
    imag_res = max(r.symmetry_residual_imag_axis for r in recs)
    real_res = max(r.symmetry_residual_real_axis for r in recs if r.gamma == 0)
    rng = np.random.default_rng(SEED)
    refl = 0.0
    for _ in range(20):
        a = float(rng.uniform(-0.2, 0.2))
        ell = float(rng.uniform(0.01, 2.0))
        g = float(rng.uniform(0.05, 0.45))
        w = _wave(round(a, 6))
        plus, _ = eig_general(build_A(w, BlochParams(1, ell, g)))
        minus, _ = eig_general(build_A(w, BlochParams(1, ell, -g)))
        imag_res = max(imag_res, spectrum(w, BlochParams(1, ell, g)).symmetry_residual_imag_axis)
        refl = max(refl, _pairing_residual(plus, -minus))
    tol = TOL["symmetry"]
    ok = imag_res <= tol and real_res <= tol and refl <= tol
    return CheckResult(6, "spectral symmetries", ok,
                       f"imag-axis {imag_res:.1e}, real-axis (g=0) {real_res:.1e}, "
                       f"g-reflection {refl:.1e}",
                       {"imag": imag_res, "real": real_res, "reflection": refl})


def check_factorization(quick=False):
    w = _wave(0.1)
    p = BlochParams(1, 0.3, 0.25, OP_N)
    a_mat = build_A(w, p).entries
    k = np.diag(derivative_symbol(p))
    rng = np.random.default_rng(SEED)
    worst = rel = 0.0
    for _ in range(10):
        lam = complex(*rng.normal(size=2))
        m = build_M(w, p, lam).entries
        diff = np.abs(m - k @ (lam * np.eye(len(k)) - a_mat))
        worst = max(worst, float(diff.max()))
        rel = max(rel, float(diff.max() / np.abs(m).max()))
    ok = worst <= TOL["factorization"]
    return CheckResult(7, "factorization M = K(lam I - A)", ok,
                       f"max abs entry error {worst:.2e} (N={OP_N}, max|M| "
                       f"{np.abs(m).max():.2e}, rel {rel:.1e})",
                       {"abs": worst, "rel": rel})


def check_kp2_long_wave(quick=False):
    w = _wave(0.1)
    worst = max(spectrum(w, BlochParams(-1, l)).max_real_part
                for l in (0.005, 0.01, 0.02, 0.05))
    try:
        find_critical_ell(w, -1, 0.0, (0.005, 0.05))
        no_change = False
    except NoSignChange:
        no_change = True
    ok = worst <= TOL["re_tol"] and no_change
    return CheckResult(8, "KP-II long-wave stability", ok,
                       f"max Re {worst:.1e}, NoSignChange={no_change}",
                       {"max_re": worst})


def check_kp2_collisions(quick=False):
    w0 = solve_wave(0.0, WAVE_N)
    ok = True
    parts = []
    for m, p in ((2, 1), (3, 1), (2, 2)):
        ell = collision_locator(m, p)
        err = abs(ell ** 2 - asy.ell_mp_sq(m, p))
        params = BlochParams(-1, ell, 0.0, OP_N)
        vals, vecs = eig_general(build_A(w0, params))
        modes = list(build_A(w0, params).basis_modes)
        i_m = int(np.argmax(np.abs(vecs[modes.index(m)])))
        i_p = int(np.argmax(np.abs(vecs[modes.index(-p)])))
        gap = abs(vals[i_m] - vals[i_p]) if i_m != i_p else np.inf
        ok &= err <= TOL["collision_ell_sq"] and gap <= TOL["collision_gap"]
        parts.append(f"({m},{p}) ell={ell:.9f} err {err:.1e} gap {gap:.1e}")
    return CheckResult(9, "KP-II collisions", bool(ok), "; ".join(parts))


TRUNCATION_POINTS = (
    (0.1, 1, 0.0, 0.1 / np.sqrt(24)),
    (0.1, 1, 0.0, 0.1),
    (0.1, 1, 0.0, 1.0),
    (0.05, 1, 0.25, np.sqrt(0.1055)),
    (0.05, 1, 0.25, np.sqrt(0.05)),
    (0.05, 1, 0.5, np.sqrt(0.1875)),
    (0.1, -1, 0.0, 0.02),
    (0.2, 1, 0.3, 0.4),
    (0.2, -1, 0.1, 1.5),
    (0.15, 1, 0.0, 0.03),
)


def check_truncation(quick=False):
    worst = 0.0
    for a, s, g, ell in TRUNCATION_POINTS:
        w = _wave(a)
        lo = spectrum(w, BlochParams(s, ell, g, 48)).eigenvalues
        hi = spectrum(w, BlochParams(s, ell, g, 64)).eigenvalues
        small = lo[np.abs(lo) <= 10]
        worst = max(worst, float(np.max(np.min(np.abs(small[:, None] - hi[None, :]), axis=1))))
    ok = worst <= TOL["truncation"]
    return CheckResult(10, "truncation convergence N=48->64", ok,
                       f"max shift of |lam|<=10 eigenvalues {worst:.1e}",
                       {"shift": worst})


def check_unperturbed(quick=False):
    w0 = solve_wave(0.0, WAVE_N)
    rng = np.random.default_rng(SEED)
    err_a = err_l = 0.0
    for _ in range(5):
        s = int(rng.choice([1, -1]))
        ell = float(rng.uniform(0.05, 2.0))
        g = float(rng.choice([0.0, rng.uniform(-0.45, 0.5)]))
        p = BlochParams(s, ell, g, OP_N)
        a_mat = build_A(w0, p)
        vals, _ = eig_general(a_mat)
        expect = 1j * np.array([asy.omega_n(int(n), p) for n in a_mat.basis_modes])
        err_a = max(err_a, _pairing_residual(vals, expect))
        mus = np.sort([asy.mu_n(int(n), p) for n in a_mat.basis_modes])
        err_l = max(err_l, float(np.max(np.abs(eig_hermitian(build_L(w0, p)) - mus))))
    ok = max(err_a, err_l) <= TOL["unperturbed"]
    return CheckResult(11, "unperturbed spectrum oracle", ok,
                       f"A vs i*omega_n {err_a:.1e}, L vs mu_n {err_l:.1e}",
                       {"A": err_a, "L": err_l})


CHECKS = (
    check_wave_accuracy,
    check_translation_kernel,
    check_periodic_threshold,
    check_bloch_bubble,
    check_krein,
    check_symmetries,
    check_factorization,
    check_kp2_long_wave,
    check_kp2_collisions,
    check_truncation,
    check_unperturbed,
)


def run_all(quick=False):
    return [check(quick) for check in CHECKS]
