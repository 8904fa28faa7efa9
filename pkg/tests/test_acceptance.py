"""Acceptance criteria, one test each.

Every test prints a single ``PASS`` or ``FAIL`` line with the measured
value, the tolerance and the wall time.  Run with ``pytest -s`` to see them.
"""
import time

import numpy as np
import pytest

from realdirac.algebra import METRIC, build_eta_set, build_s_map, clifford_residual, s_decode, s_encode
from realdirac.cli import main
from realdirac.perturbation import (
    CouplingOperator,
    anticommutator_residue,
    first_order_source,
    quadratic_identity_residual,
    quadratic_remainder,
)
from realdirac.potentials import charge_density, laplacian_residual, radial_poisson
from realdirac.radial import (
    FINE_STRUCTURE,
    PhysParams,
    RadialGrid,
    StateLabel,
    build_phi_state,
    solve_radial,
)


def report(number, title, ok, detail):
    print(f"\n{'PASS' if ok else 'FAIL'} [{number}] {title}: {detail}")
    assert ok, detail


def closed_form_energy(n, kappa, za):
    # E = [1 + (Z alpha / (n - |kappa| + sqrt(kappa^2 - (Z alpha)^2)))^2]^(-1/2)
    denom = n - abs(kappa) + np.sqrt(kappa ** 2 - za ** 2)
    return 1.0 / np.sqrt(1.0 + (za / denom) ** 2)


def test_1_spectrum_equivalence():
    states = [(n, k) for n in (1, 2, 3) for k in (-2, -1, 1, 2) if abs(k) <= n and k != n]
    t0 = time.perf_counter()
    worst = 0.0
    for za in (FINE_STRUCTURE, 0.2, 0.5):
        params = PhysParams(alpha=za)
        for n, k in states:
            sol = solve_radial(StateLabel(n, k), params, RadialGrid.default(params, n))
            ref = closed_form_energy(n, k, za)
            worst = max(worst, abs(sol.energy - ref) / ref)
    dt = time.perf_counter() - t0
    report(1, "spectrum equivalence", worst <= 1e-8 and dt < 10,
           f"{3 * len(states)} states, max rel error {worst:.2e} (tol 1e-8), {dt:.2f} s (limit 10 s)")


def test_2_two_s_fixture():
    t0 = time.perf_counter()
    params = PhysParams(alpha=0.2)
    sol = solve_radial(StateLabel(2, -1), params, RadialGrid.default(params, 2))
    rng = np.random.default_rng(29)
    m = 200
    pts = np.column_stack([np.exp(rng.uniform(np.log(0.05), np.log(100), m)), rng.uniform(0, np.pi, m),
                           rng.uniform(0, 2 * np.pi, m), rng.uniform(-20, 20, m)])
    phi = build_phi_state(sol, build_s_map(), pts)
    r, th, az, x0 = pts.T
    g, f = sol.interpolate(r)
    w = sol.k0 * x0
    pattern = np.column_stack([
        -g * np.cos(w), -g * np.sin(w), 0 * g, 0 * g,
        f * np.cos(th) * np.cos(w), f * np.cos(th) * np.sin(w),
        -f * np.sin(th) * np.cos(w - az), f * np.sin(th) * np.sin(w - az),
    ])
    c = np.sum(phi * pattern) / np.sum(pattern * pattern)
    dev = np.max(np.abs(phi - c * pattern)) / np.max(np.abs(phi))
    zero_rows = np.max(np.abs(phi[:, 2:4]))
    dt = time.perf_counter() - t0
    ok = dev <= 1e-10 and zero_rows == 0 and c != 0 and dt < 1
    report(2, "2s1/2 component pattern", ok,
           f"deviation {dev:.2e} (tol 1e-10), rows 3-4 max {zero_rows:.1e}, c = {c:.6f}, {dt:.2f} s (limit 1 s)")


def test_3_stationarity():
    t0 = time.perf_counter()
    eta = build_eta_set()
    worst, all_zero = 0.0, True
    for za in (FINE_STRUCTURE, 0.2):
        params = PhysParams(alpha=za)
        for n, k in ((1, -1), (2, -1), (2, 1)):
            sol = solve_radial(StateLabel(n, k), params, RadialGrid.default(params, n))
            rep = first_order_source(sol, eta_set=eta)
            worst = max(worst, rep.source_norm)
            all_zero = all_zero and rep.phi1_zero
    params = PhysParams(alpha=0.2)
    sol = solve_radial(StateLabel(1, -1), params, RadialGrid.default(params))
    control = first_order_source(sol, eta_set=eta, omega=0.05, strict=False)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-10 and all_zero and control.ret_adv_norm > 1e-3 and dt < 30
    report(3, "stationarity theorem", ok,
           f"max source_norm {worst:.2e} (tol 1e-10), phi1_zero {all_zero}, "
           f"control ret_adv_norm {control.ret_adv_norm:.3e} (> 1e-3), {dt:.2f} s (limit 30 s)")


def test_4_quadratic_identity():
    t0 = time.perf_counter()
    eta = build_eta_set()
    worst = 0.0
    for s in (0.05, 0.1, 0.2):
        a = CouplingOperator.constant(s, eta)
        m = s * eta[0]
        m3 = m @ m @ m
        worst = max(worst, np.max(np.abs(quadratic_remainder(a)[0] - (m3 - m3 @ m))))
    spot = quadratic_identity_residual(CouplingOperator.constant(0.1, eta))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-13 and abs(spot - 0.0009) <= 1e-13 and dt < 1
    report(4, "quadratic identity", ok,
           f"remainder vs a^3 - a^4 {worst:.2e} (tol 1e-13), spot {spot!r} (0.0009), {dt:.2f} s (limit 1 s)")


def test_5_particular_solution():
    t0 = time.perf_counter()
    params = PhysParams(alpha=FINE_STRUCTURE)
    res, gauss = [], 0.0
    for points in (4000, 8000):
        sol = solve_radial(StateLabel(1, -1), params, RadialGrid.default(params, points=points))
        rho = charge_density(sol)
        pot = radial_poisson(rho)
        res.append(laplacian_residual(pot, rho))
        gauss = max(gauss, abs(sol.grid.r[-1] * pot.a0[-1] - rho.total_charge))
    ratio = res[0] / res[1]
    dt = time.perf_counter() - t0
    ok = res[0] <= 1e-4 and 3.5 <= ratio <= 4.5 and gauss <= 1e-8 and dt < 5
    report(5, "particular solution", ok,
           f"laplacian residual {res[0]:.2e} (tol 1e-4), refinement ratio {ratio:.2f} (~4), "
           f"Gauss tail {gauss:.1e} (tol 1e-8), {dt:.2f} s (limit 5 s)")


def test_6_algebraic_substrate():
    t0 = time.perf_counter()
    eta = build_eta_set()
    smap = build_s_map()
    direct = max(np.max(np.abs(eta[a] @ eta[b] + eta[b] @ eta[a] - 2 * METRIC[a, b] * np.eye(8)))
                 for a in range(4) for b in range(4))
    cliff = max(clifford_residual(eta), direct)
    rng = np.random.default_rng(6)
    spinors = rng.normal(size=(100, 4)) + 1j * rng.normal(size=(100, 4))
    trip = np.max(np.abs(s_decode(s_encode(spinors, smap), smap) - spinors))
    scal = 0.0
    for s, t in rng.uniform(-0.9, 0.9, size=(50, 2)):
        a, b = CouplingOperator.constant(s, eta), CouplingOperator.constant(t, eta)
        ma, mb = s * eta[0], t * eta[0]
        raw = np.max(np.abs(ma @ mb + mb @ ma - 2 * s * t * np.eye(8)))
        scal = max(scal, anticommutator_residue(a, b), raw)
    dt = time.perf_counter() - t0
    ok = cliff <= 1e-14 and trip <= 1e-13 and scal <= 1e-14 and dt < 1
    report(6, "algebraic substrate", ok,
           f"Clifford {cliff:.1e} (tol 1e-14), round trip {trip:.1e} (tol 1e-13), "
           f"scalarity {scal:.1e} (tol 1e-14), {dt:.2f} s (limit 1 s)")


@pytest.fixture
def quiet(capsys):
    def run(*argv):
        code = main(list(argv))
        capsys.readouterr()
        return code
    return run


def test_7_verify_exit_codes(quiet):
    codes = (quiet("verify"), quiet("verify", "--points", "50"), quiet("verify", "--alpha", "1.5", "--Z", "1"))
    report(7, "verify exit codes", codes == (0, 1, 2),
           f"default/under-resolved/supercritical -> {codes} (expected (0, 1, 2))")
