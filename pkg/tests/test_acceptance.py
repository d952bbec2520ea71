"""End-to-end acceptance checks, one test per criterion, at the stated tolerances."""

import time

import numpy as np

from entmono.measures import (
    concurrence_pure,
    concurrence_two_qubit,
    fef_2xd,
    fef_pure,
    fef_two_qubit,
    fidelity_from_fef,
)
from entmono.monogamy import (
    ckw_residual,
    counterexample_row,
    fef_monogamy_residual,
    fidelity_monogamy_residual,
)
from entmono.states import (
    DensityOperator,
    embed_qubit_op,
    haar_pure,
    random_density,
    sigma_gamma_pair,
    sigma_gamma_state,
    tilde_bell_state,
)
from entmono.telesim import build_channel, exact_average_fidelity, mc_average_fidelity

GRID = (0.2, 0.5, 0.75, 0.9, 0.99)


def _gaussian(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_criterion_01_fef_of_sigma_gamma(report):
    worst_err, worst_time = 0.0, 0.0
    for g in GRID:
        t0 = time.perf_counter()
        value = fef_2xd(sigma_gamma_state(g).view((2, 4)), restarts=32).value
        worst_time = max(worst_time, time.perf_counter() - t0)
        worst_err = max(worst_err, abs(value - g))
    ok = worst_err <= 1e-6 and worst_time < 1.0
    assert report(1, ok, f"max |F - gamma| = {worst_err:.2e}, slowest point {worst_time:.3f} s")


def test_criterion_02_pair_fef_and_fidelity(report):
    fef_err = fid_err = 0.0
    for g in GRID:
        rho = sigma_gamma_pair(g, (1, 3))
        fef_err = max(fef_err, abs(fef_two_qubit(rho).value - (6 * g + 1) / 7))
        fid_err = max(fid_err, abs(exact_average_fidelity(build_channel(rho)) - (4 * g + 3) / 7))
    ok = fef_err <= 1e-12 and fid_err <= 1e-9
    assert report(2, ok, f"max F_13 error {fef_err:.2e}, max f_13 error {fid_err:.2e}")


def test_criterion_03_violation_flags(report):
    flags = {}
    for g in (0.5, 0.6, 0.75, 0.9, 0.99, 1.0):
        row = counterexample_row(g, restarts=32, seed=0)
        flags[g] = (row.fef_violated, row.fid_violated)
    ok = all(flags[g] == (True, True) for g in (0.5, 0.6, 0.75, 0.9, 0.99)) and flags[1.0] == (False, False)
    assert report(3, ok, "flags " + ", ".join(f"{g}:{int(a)}{int(b)}" for g, (a, b) in flags.items()))


def test_criterion_04_concurrence_proxy(report):
    margin, err = np.inf, 0.0
    for g in (0.5, 0.75, 0.9, 0.99):
        closed = (12 * g - 5) / 7
        margin = min(margin, closed - (2 * g - 1))
        err = max(err, abs(concurrence_two_qubit(sigma_gamma_pair(g, (1, 3))) - closed))
    ok = margin >= 1e-9 and err <= 1e-12
    assert report(4, ok, f"min margin {margin:.3e}, max Wootters error {err:.2e}")


def test_criterion_05_pure_state_monogamy(report):
    worst, gap, count = np.inf, 0.0, 0
    for n, trials in ((3, 200), (4, 50)):
        for s in np.random.SeedSequence(2024 + n).spawn(trials):
            psi = haar_pure((2,) * n, s)
            c, f, t = ckw_residual(psi), fef_monogamy_residual(psi), fidelity_monogamy_residual(psi)
            worst = min(worst, c.residual, f.residual, t.residual)
            gap = max(gap, abs(t.residual - f.residual))
            count += 1
    ok = worst >= -1e-9 and gap <= 1e-12
    assert report(5, ok, f"{count} states, min residual {worst:.3e}, max |fid - fef| {gap:.2e}")


def test_criterion_06_pure_state_identities(report):
    worst = 0.0
    for d in (2, 3, 4):
        for seed in range(200):
            phi = haar_pure((2, d), 30_000 * d + seed)
            c, f = concurrence_pure(phi), fef_pure(phi)
            worst = max(worst, abs(c - (2 * f - 1)), abs(c - (3 * fidelity_from_fef(f) - 2)))
    ok = worst <= 1e-10
    assert report(6, ok, f"600 states, max deviation {worst:.2e}")


def test_criterion_07_mixed_bound_and_convexity(report):
    slack = np.inf
    for seed in range(500):
        rho = random_density((2, 2), 40_000 + seed)
        slack = min(slack, concurrence_two_qubit(rho) - (2 * fef_two_qubit(rho).value - 1))
    excess = -np.inf
    for s in np.random.SeedSequence(41).spawn(100):
        a, b = s.spawn(2)
        r1, r2 = random_density((2, 2), a), random_density((2, 2), b)
        f1, f2 = fef_two_qubit(r1).value, fef_two_qubit(r2).value
        for lam in (0.25, 0.5, 0.75):
            mix = DensityOperator(lam * r1.matrix + (1 - lam) * r2.matrix, (2, 2))
            excess = max(excess, fef_two_qubit(mix).value - (lam * f1 + (1 - lam) * f2))
    ok = slack >= -1e-9 and excess <= 1e-9
    assert report(7, ok, f"min C - (2F - 1) {slack:.3e}, max convexity excess {excess:.3e}")


def test_criterion_08_transfer_identity(report):
    rng = np.random.default_rng(8)
    phi = tilde_bell_state("phi+").amplitudes
    worst = 0.0
    for _ in range(100):
        a, b = _gaussian(rng, (2, 2)), _gaussian(rng, (4, 4))
        lhs = np.kron(a, b) @ phi
        rhs = np.kron(np.eye(2), b @ embed_qubit_op(a).T) @ phi
        worst = max(worst, np.abs(lhs - rhs).max())
    ok = worst <= 1e-12
    assert report(8, ok, f"100 pairs, max deviation {worst:.2e}")


def test_criterion_09_teleportation_simulation(report):
    within = 0
    for seed in range(20):
        est = mc_average_fidelity(build_channel(random_density((2, 2), 50_000 + seed)), 100_000, seed)
        within += abs(est.mc_mean - est.exact_value) <= 4 * est.mc_std_err
    err = 0.0
    for seed in range(50):
        rho = random_density((2, 2), 60_000 + seed)
        err = max(err, abs(exact_average_fidelity(build_channel(rho)) - fidelity_from_fef(fef_two_qubit(rho).value)))
    ok = within >= 19 and err <= 1e-9
    assert report(9, ok, f"{within}/20 MC means within 4 se, max exact error {err:.2e}")


def test_criterion_10_optimizer_cross_validation(report):
    worst = 0.0
    for seed in range(200):
        rho = random_density((2, 2), 70_000 + seed)
        worst = max(worst, abs(fef_2xd(rho, seed=seed).value - fef_two_qubit(rho).value))
    ok = worst <= 1e-8
    assert report(10, ok, f"200 states, max |fef_2xd - fef_two_qubit| {worst:.2e}")
