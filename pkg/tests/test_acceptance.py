"""Acceptance criteria, one PASS/FAIL line per check at the stated tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are also repeated in the terminal summary.
"""

import math

import numpy as np
import pytest

from qwalk3.core import (
    CoinParameters,
    SpinVector,
    build_coin,
    evolve,
    iter_evolve,
    localized_initial_state,
    position_distribution,
)
from qwalk3.limit import (
    ab_constants,
    empirical_moment,
    kolmogorov_distance,
    limit_density,
    limit_distribution,
    limit_measure_origin,
    localization_mass,
    nu,
    series_truncation,
    support_half_width,
    two_state_correspondence_density,
)
from qwalk3.spectral import eigenvalues, evolve_via_fourier, fourier_coin, rotation_decomposition
from qwalk3.uniform import (
    comb_envelope,
    delocalized_initial_state,
    example_spin,
    limit_measure_delocalized,
    uniform_plateau_report,
)

from conftest import PI4, UNIFORM_SPIN, random_spin


def _match(a, b):
    b = list(b)
    worst = 0.0
    for z in a:
        i = int(np.argmin([abs(z - w) for w in b]))
        worst = max(worst, abs(z - b.pop(i)))
    return worst


# 1. origin limit value ---------------------------------------------------------


def test_c1_analytic_origin_value(acceptance):
    v = limit_measure_origin(PI4, UNIFORM_SPIN, 0)
    acceptance.check("C1 analytic lim P(X_t=0) in [0.374, 0.375)", 0.374 <= v < 0.375, f"value {v:.10f}")


def test_c1_simulated_single_time(acceptance, origin_trajectory):
    lim = limit_measure_origin(PI4, UNIFORM_SPIN, 0)
    p = origin_trajectory(PI4, UNIFORM_SPIN, range(5000, 5101))[5000][0]
    err = abs(p - lim)
    acceptance.check("C1 |P(X_5000=0) - lim| < 2e-3", err < 2e-3, f"P = {p:.8f}, error {err:.3e}")


def test_c1_time_average(acceptance, origin_trajectory):
    lim = limit_measure_origin(PI4, UNIFORM_SPIN, 0)
    traj = origin_trajectory(PI4, UNIFORM_SPIN, range(5000, 5101))
    avg = math.fsum(traj[t][0] for t in range(5000, 5101)) / 101
    err = abs(avg - lim)
    acceptance.check("C1 [5000,5100] average within 2e-4", err < 2e-4, f"average {avg:.8f}, error {err:.3e}")


# 2. localization mass identity ---------------------------------------------------


@pytest.fixture(scope="module")
def mass_configs():
    rng = np.random.default_rng(7)
    q = math.sqrt(2 - math.sqrt(2))
    out = [
        (PI4, UNIFORM_SPIN),
        (CoinParameters.grover(), SpinVector(1, 0, 0)),
        (CoinParameters.grover(), SpinVector(0, 1, 0)),
        (PI4, SpinVector(1 / (2 * q), -q / 2, 1 / (2 * q))),
    ]
    while len(out) < 24:
        theta = rng.uniform(0.05, 2 * math.pi - 0.05)
        if abs(math.sin(theta)) > 0.05:
            out.append((CoinParameters.from_theta(theta), random_spin(rng)))
    return out


def test_c2_series_identity(acceptance, mass_configs):
    worst = 0.0
    for params, spin in mass_configs:
        r = series_truncation(params, 1e-16)
        total = math.fsum(limit_measure_origin(params, spin, np.arange(-r, r + 1)))
        worst = max(worst, abs(total - localization_mass(params, spin)))
    acceptance.check(
        "C2 sum_x lim P = Delta within 1e-10", worst < 1e-10, f"{len(mass_configs)} configs, worst {worst:.2e}"
    )


def test_c2_mass_identity(acceptance, mass_configs):
    worst = 0.0
    for params, spin in mass_configs:
        law = limit_distribution(params, spin)
        worst = max(worst, abs(law.atom_mass + law.continuous_mass() - 1.0))
    acceptance.check(
        "C2 Delta + integral f = 1 within 1e-6", worst < 1e-6, f"{len(mass_configs)} configs, worst {worst:.2e}"
    )


# 3. no-localization cases ------------------------------------------------------


def test_c3a_vanishing_constants(acceptance):
    p = CoinParameters.from_cs(1 / 3, -2 * math.sqrt(2) / 3)
    a, b = ab_constants(p, UNIFORM_SPIN)
    masses = limit_measure_origin(p, UNIFORM_SPIN, np.arange(-50, 51))
    delta = localization_mass(p, UNIFORM_SPIN)
    ok = abs(a) < 1e-12 and abs(b) < 1e-12 and delta == 0.0 and np.all(masses == 0.0)
    acceptance.check("C3a A=B=0, Delta=0, all masses 0", ok, f"|A|={abs(a):.1e} |B|={abs(b):.1e} Delta={delta:.1e}")


def test_c3b_delta_zero(acceptance):
    q = math.sqrt(2 - math.sqrt(2))
    spin = SpinVector(1 / (2 * q), -q / 2, 1 / (2 * q))
    delta = localization_mass(PI4, spin)
    acceptance.check("C3b Delta = 0 within 1e-12", abs(delta) < 1e-12, f"Delta={delta:.2e}")


# 4. spectral consistency --------------------------------------------------------

SPECTRAL_THETAS = [0.3, math.pi / 4, math.acos(-1 / 3), 2.6, 4.4]


def test_c4_eigenvalues(acceptance):
    ks = -math.pi + 2 * math.pi * np.arange(256) / 256
    worst, flat = 0.0, 0.0
    for theta in SPECTRAL_THETAS:
        p = CoinParameters.from_theta(theta)
        for k in ks:
            lams = eigenvalues(p, k)
            flat = max(flat, abs(lams[0] - 1))
            worst = max(worst, _match(lams, np.linalg.eigvals(fourier_coin(p, k).matrix)))
    acceptance.check("C4 closed-form spectrum vs numerical within 1e-10", worst < 1e-10, f"worst {worst:.2e}")
    acceptance.check("C4 lambda_1 = 1", flat == 0.0, f"worst {flat:.1e}")


def test_c4_rotations(acceptance):
    worst = 0.0
    for theta in SPECTRAL_THETAS:
        p = CoinParameters.from_theta(theta)
        prod = np.linalg.multi_dot(rotation_decomposition(p))
        worst = max(worst, np.abs(prod - build_coin(p).entries).max())
    acceptance.check("C4 five-rotation product = C within 1e-12", worst < 1e-12, f"worst {worst:.2e}")


def test_c4_fourier_evolution(acceptance):
    configs = [
        (PI4, UNIFORM_SPIN),
        (CoinParameters.grover(), SpinVector(1, 0, 0)),
        (CoinParameters.from_theta(4.2), SpinVector.normalized(0.6, 0.5j, 0.4 - 0.3j)),
    ]
    worst = 0.0
    for params, spin in configs:
        s = localized_initial_state(spin)
        for t in (1, 10, 50, 200):
            a = evolve_via_fourier(params, s, t)
            b = evolve(s, build_coin(params), t)
            worst = max(worst, np.abs(a.window(-t, t) - b.window(-t, t)).max())
    acceptance.check("C4 Fourier evolution = direct within 1e-8", worst < 1e-8, f"worst {worst:.2e}")


# 5. weak limit ---------------------------------------------------------------------


@pytest.fixture(scope="module")
def weak_setup(origin_trajectory):
    return origin_trajectory(PI4, UNIFORM_SPIN, [2000])[2000], limit_distribution(PI4, UNIFORM_SPIN)


def test_c5_kolmogorov(acceptance, weak_setup):
    dist, _ = weak_setup
    d = kolmogorov_distance(dist, 2000, PI4, UNIFORM_SPIN)
    acceptance.check("C5 Kolmogorov distance at t=2000 < 0.05", d < 0.05, f"distance {d:.4f}")


@pytest.mark.parametrize("r", [1, 2])
def test_c5_moments(acceptance, weak_setup, r):
    dist, law = weak_setup
    emp, lim = empirical_moment(dist, 2000, r), law.moment(r)
    err = abs(emp - lim)
    acceptance.check(f"C5 moment r={r} within 5e-3", err < 5e-3, f"empirical {emp:.6f}, limit {lim:.6f}")


def test_c5_support(acceptance, weak_setup):
    dist, law = weak_setup
    y = dist.positions / 2000
    outside = float(dist.masses[np.abs(y) > law.support_half_width + 0.02].sum())
    acceptance.check("C5 mass outside support+0.02 < 1e-3", outside < 1e-3, f"mass {outside:.2e}")


# 6-7. discrete uniform measures -----------------------------------------------------

C13 = CoinParameters.from_cs(1 / 3, 2 * math.sqrt(2) / 3)
N = 5
PLATEAUS = {"ex1": (-1, 8, 1 / 49), "ex2": (0, 9, 1 / 49), "ex3": (-1, 9, 1 / 98)}


@pytest.fixture(scope="module")
def uniform_runs():
    out = {}
    for name in PLATEAUS:
        spin = example_spin(name)
        env = comb_envelope(N, C13)
        xs = range(-6, 2 * N + 5)
        lim = np.array([limit_measure_delocalized(env, C13, spin, x) for x in xs])
        errs = {}
        for t, st in enumerate(iter_evolve(delocalized_initial_state(env, C13, spin), build_coin(C13), 5000)):
            if t in (500, 5000):
                p = position_distribution(st)
                errs[t] = float(np.abs(np.array([p[x] for x in xs]) - lim).max())
        out[name] = errs
    return out


@pytest.mark.parametrize("name", list(PLATEAUS))
def test_c6_plateau(acceptance, name):
    lo, hi, value = PLATEAUS[name]
    rep = uniform_plateau_report(N, C13, example_spin(name))
    vals = [rep.masses[x] for x in range(lo, hi + 1)]
    ratio = max(vals) / min(vals)
    ok = rep.support == (lo, hi) and abs(ratio - 1) <= 1e-12 and abs(rep.plateau - value) <= 1e-12 * value
    acceptance.check(
        f"C6 {name}: {hi - lo + 1} equal masses on {lo}..{hi}",
        ok,
        f"support {rep.support}, plateau {rep.plateau:.12g}, max/min-1 {ratio - 1:.1e}",
    )


@pytest.mark.parametrize("name", list(PLATEAUS))
def test_c6_simulated(acceptance, uniform_runs, name):
    err = uniform_runs[name][5000]
    acceptance.check(f"C6 {name}: simulated t=5000 within 2e-3 per position", err < 2e-3, f"max error {err:.3e}")


def test_c6_total_mass(acceptance):
    total = uniform_plateau_report(N, C13, example_spin("ex1")).total_mass
    ok = abs(total - 10 / 49) < 1e-12 and total < 0.5
    acceptance.check("C6 ex1 total limit mass = 10/49 < 1/2", ok, f"total {total:.15f}")


def test_c7_example3_fastest(acceptance, uniform_runs):
    e = {name: uniform_runs[name][500] for name in PLATEAUS}
    ok = e["ex3"] < e["ex1"] and e["ex3"] < e["ex2"]
    acceptance.check(
        "C7 ex3 error at t=500 below ex1 and ex2", ok, ", ".join(f"{k} {v:.2e}" for k, v in e.items())
    )


# 8. two-state correspondence ----------------------------------------------------------


def test_c8_two_state(acceptance):
    p = CoinParameters.from_theta(math.pi / 2)
    spin = SpinVector(-0.5, 1 / math.sqrt(2), -0.5)
    h = support_half_width(p)
    xs = np.linspace(-h, h, 52)[1:-1]
    gap = float(np.abs(limit_density(p, spin, xs) - two_state_correspondence_density(p, xs)).max())
    delta = localization_mass(p, spin)
    ok = abs(delta) < 1e-12 and gap < 1e-10
    acceptance.check("C8 Delta=0 and density match at 50 points within 1e-10", ok, f"Delta {delta:.1e}, gap {gap:.1e}")


# 9. property suite --------------------------------------------------------------------------------


def test_c9_norm_conservation(acceptance):
    rng = np.random.default_rng(11)
    worst = 0.0
    for theta in [0.4, math.pi / 4, math.acos(-1 / 3), 2.8, 4.5]:
        coin = build_coin(CoinParameters.from_theta(theta))
        for t, st in enumerate(iter_evolve(localized_initial_state(random_spin(rng)), coin, 2000)):
            if t % 100 == 0:
                worst = max(worst, abs(1.0 - st.norm2()))
    acceptance.check("C9 norm drift over 2000 steps < 1e-10", worst < 1e-10, f"worst {worst:.2e}")


def test_c9_unitarity(acceptance):
    worst = 0.0
    for theta in np.linspace(0.01, 2 * math.pi - 0.01, 100):
        if abs(math.sin(theta)) < 1e-3:
            continue
        m = build_coin(CoinParameters.from_theta(theta)).entries
        worst = max(worst, np.abs(m.T @ m - np.eye(3)).max())
    acceptance.check("C9 coin unitarity within 1e-12", worst < 1e-12, f"worst {worst:.2e}")


def test_c9_mirror_symmetry(acceptance):
    rng = np.random.default_rng(13)
    ok = True
    for theta in [0.7, 2.0, 3.9, 5.1]:
        coin = build_coin(CoinParameters.from_theta(theta))
        spin = random_spin(rng)
        p = position_distribution(evolve(localized_initial_state(spin), coin, 300))
        q = position_distribution(evolve(localized_initial_state(spin.mirrored()), coin, 300))
        ok &= p.support_lo == -q.support_hi and np.array_equal(p.masses, q.masses[::-1])
    acceptance.check("C9 mirror symmetry exact", bool(ok))


def test_c9_nu_range(acceptance):
    grid = [t for t in np.linspace(0, 2 * math.pi, 104)[1:-1] if abs(math.sin(t)) > 1e-9]
    vals = [nu(CoinParameters.from_theta(t)) for t in grid]
    ok = len(vals) >= 100 and all(-1 < v < 0 for v in vals)
    acceptance.check("C9 nu in (-1, 0) over theta sweep", ok, f"{len(vals)} points, range [{min(vals):.4f}, {max(vals):.4f}]")
