"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` (lines are printed even
under output capture).
"""
import csv
import itertools
import json
import sys
from pathlib import Path

import numpy as np
import pytest

from poissonbath.cli import main
from poissonbath.lindblad import propagate, pure_state, steady_state
from poissonbath.models import collective_model, effective_decay_rate, effective_decay_rate_quadrature
from poissonbath.multitime import MultiTimeSpec, multitime_exact, multitime_regression
from poissonbath.composite import CompositeSetup
from poissonbath.operators import apply_superop, sigma_minus, sigma_x, sigma_z, vectorize
from poissonbath.poisson import (
    PoissonMEParams,
    gaussian_liouvillian,
    hermitian_coupling_liouvillian,
    poisson_liouvillian,
)
from poissonbath.telegraph import (
    BathParams,
    CorrelatorIndex,
    CorrelatorSpec,
    bath_gibbs,
    bath_liouvillian,
    correlationlike_analytic,
    correlationlike_numeric,
    npoint_analytic,
    npoint_numeric,
    two_point_analytic,
    whitenoise_area,
)

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
BATH_SETS = {
    "detailed-balance": BathParams.detailed_balance(3.0, 2.0, 0.3, 0.7, 0.4, 1.3),
    "G+=0": BathParams(3.0, 2.0, 0.0, 2.0, 0.0, 1.5, 0.9),
}
INDICES = [CorrelatorIndex(l, k) for l in (1, -1) for k in (1, -1)]


@pytest.fixture
def report(capsys):
    def _report(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}", file=sys.stdout)
        assert ok, f"criterion {number}: {detail}"
    return _report


def run_cli(sub, config, out):
    assert main([sub, "--config", str(config), "--out", str(out)]) == 0
    with open(Path(out) / f"{sub}.csv", encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    return rows


def test_criterion_1_decay_rate_triangle(report):
    worst = 0.0
    for N, mu in itertools.product(range(1, 7), (0.1, 0.5, 1.0, 2.0)):
        closed = effective_decay_rate(N, mu)
        quad = effective_decay_rate_quadrature(N, mu)
        m = collective_model(N)
        gen = poisson_liouvillian(PoissonMEParams(m.H_S, m.L, mu, 0.0, 1.0))
        D1 = m.dicke(1)
        elem = apply_superop(gen, np.outer(D1, D1.conj()))[0, 0].real
        vals = (closed, quad, elem)
        worst = max(worst, max(abs(a - b) / abs(a) for a, b in itertools.combinations(vals, 2)))
    report(1, worst < 1e-8, f"max pairwise relative difference {worst:.2e} (tol 1e-8) over 24 (N, mu)")


def test_criterion_2_decay_rate_sweep(report, tmp_path):
    rows = run_cli("decay_rate", CONFIGS / "decay_rate_sweep.json", tmp_path / "decay")
    x = np.array([float(r["mu2N"]) for r in rows])
    rate = np.array([float(r["poisson"]) for r in rows])
    quad = np.array([float(r["poisson_quadrature"]) for r in rows])
    gauss = np.array([float(r["gaussian"]) for r in rows])
    target = 2 * x / (1 + 4 * x)
    err = np.max(np.abs(rate - target) / target)
    err_q = np.max(np.abs(quad - target) / target)
    low = abs(rate[0] / (2 * x[0]) - 1)
    high = abs(rate[-1] / 0.5 - 1)
    ok = (err < 1e-8 and err_q < 1e-8 and low < 0.01 and high < 0.01
          and np.isclose(x[0], 1e-3) and np.isclose(x[-1], 1e3) and np.allclose(gauss, 2 * x))
    report(2, ok, f"{len(x)} points, rel err {err:.1e} (quadrature {err_q:.1e}), "
                  f"asymptote deviations {low:.1e} (2x) / {high:.1e} (1/2)")


def test_criterion_3_gaussian_limit(report):
    H = 0.5 * sigma_z()
    dists = []
    for mu in (0.2, 0.1, 0.05):
        g = 0.25 / mu**2
        p = PoissonMEParams(H, sigma_minus(), mu, g, g)
        dists.append(np.linalg.norm(poisson_liouvillian(p) - gaussian_liouvillian(p), 2))
    ratios = [dists[0] / dists[1], dists[1] / dists[2]]
    ok = dists[0] > dists[1] > dists[2] and all(abs(r / 4 - 1) <= 0.15 for r in ratios)
    report(3, ok, f"distances {', '.join(f'{d:.3e}' for d in dists)}; ratios "
                  f"{ratios[0]:.3f}, {ratios[1]:.3f} (target 4 +- 15%)")


def test_criterion_4_bath_correlators(report):
    grid = np.linspace(0.0, 3.0, 10)
    worst = {"two-point": 0.0, "correlation-like": 0.0, "4-point": 0.0}
    odd = 0.0
    for p in BATH_SETS.values():
        for i1, i2 in itertools.product(INDICES, INDICES):
            for t in grid:
                num = npoint_numeric(p, CorrelatorSpec((i1, i2), (t, 0.0)))
                worst["two-point"] = max(worst["two-point"], abs(num - two_point_analytic(p, i1, i2, t)))
            for init in (1, -1):
                for t, s in itertools.product(grid, grid):
                    num = correlationlike_numeric(p, i1, i2, init, t, s)
                    ana = correlationlike_analytic(p, i1, i2, init, t, s)
                    worst["correlation-like"] = max(worst["correlation-like"], abs(num - ana))
        patterns = [idx for idx in itertools.product(INDICES, repeat=4)
                    if idx[0].k == -idx[1].k and idx[2].k == -idx[3].k]
        for idx in patterns:
            for a, b in itertools.product(grid, grid):
                spec = CorrelatorSpec(idx, (a + 0.4 + b, 0.4 + b, b, 0.0))
                worst["4-point"] = max(worst["4-point"], abs(npoint_analytic(p, spec) - npoint_numeric(p, spec)))
        for n in (1, 3):
            for idx in itertools.product(INDICES, repeat=n):
                for t in grid[::3]:
                    times = tuple(t + 0.5 * j for j in range(n))[::-1]
                    spec = CorrelatorSpec(idx, times)
                    odd = max(odd, abs(npoint_numeric(p, spec)), abs(npoint_analytic(p, spec)))
    ok = max(worst.values()) < 1e-9 and odd < 1e-12
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report(4, ok, f"max |analytic - oracle|: {detail} (tol 1e-9); odd orders {odd:.1e} (tol 1e-12)")


def test_criterion_5_white_noise_area(report):
    errs = []
    for gm in (1e2, 1e3, 1e4):
        p = BathParams.white_noise(gm, 0.5, 1.0, 1.0, omega1=3.0, omega2=2.0)
        res = whitenoise_area(p)
        assert np.isclose(res.area, res.area_quadrature, rtol=1e-8)
        errs.append(res.relative_error)
    ok = errs[0] > errs[1] > errs[2] and errs[2] < 1e-3
    report(5, ok, "relative errors vs mu^2 G1+ = 0.25: " + ", ".join(f"{e:.2e}" for e in errs))


def test_criterion_6_composite_convergence(report, tmp_path):
    rows = run_cli("converge", CONFIGS / "collective5_converge.json", tmp_path / "converge")
    cfg = json.loads((CONFIGS / "collective5_converge.json").read_text())
    assert cfg["model"]["N"] == 5 and cfg["poisson"]["mu"] == 0.7 and cfg["bath"]["gamma_minus"] == [10, 30, 100]
    ok, parts = True, []
    for name in ("p_ground", "jx"):
        devs = [float(r["max_dev"]) for r in rows if r["observable"] == name]
        ok &= devs[0] > devs[1] > devs[2] and devs[2] < 0.05
        parts.append(f"{name} " + " > ".join(f"{d:.4f}" for d in devs))
    report(6, ok, "; ".join(parts) + " (last rung < 0.05)")


def test_criterion_7_steady_states(report):
    beta, w = 1.5, 1.0
    p = PoissonMEParams(0.5 * w * sigma_z(), sigma_minus(), 2.0, np.exp(-beta * w), 1.0)
    rho = steady_state(poisson_liouvillian(p))
    gibbs = np.array([1.0, np.exp(-beta * w)]) / (1 + np.exp(-beta * w))
    err_a = np.max(np.abs(np.diag(rho).real - gibbs))

    m = collective_model(6, w)
    gen = poisson_liouvillian(PoissonMEParams(m.H_S, m.L, 2.0, np.exp(-beta * w), 1.0))
    pops = np.diag(steady_state(gen)).real
    err_b = np.max(np.abs(pops[1:] / pops[:-1] / np.exp(-beta * w) - 1))

    err_c = max(np.max(np.abs(bath_liouvillian(b) @ vectorize(bath_gibbs(b)))) for b in BATH_SETS.values())
    ok = err_a < 1e-8 and err_b < 1e-8 and err_c < 1e-12
    report(7, ok, f"(a) qubit Gibbs {err_a:.1e}, (b) N=6 ladder ratio {err_b:.1e}, (c) bath residual {err_c:.1e}")


def test_criterion_8_multitime(report):
    H = 0.5 * sigma_z()
    rho0 = pure_state([1, 1])
    grid = np.linspace(0, 2, 5)
    devs = []
    n1 = 0.0
    for gm in (10.0, 30.0, 100.0):
        bath = BathParams.white_noise(gm, 0.5, np.exp(-1.0), 1.0, beta=1.0)
        s = CompositeSetup(H, sigma_minus(), bath, rho0)
        p = s.poisson_params()
        gen = poisson_liouvillian(p)
        worst = 0.0
        for t2, tau in itertools.product(grid, grid):
            spec = MultiTimeSpec(sigma_x(), (t2 + tau, t2))
            worst = max(worst, abs(multitime_exact(s, spec) - multitime_regression(p, rho0, spec, gen=gen)))
        devs.append(worst)
        for t in grid:
            ref = propagate(gen, rho0, [0.0, t], method="expm").expect(sigma_x())[-1]
            n1 = max(n1, abs(multitime_regression(p, rho0, MultiTimeSpec(sigma_x(), (t,)), gen=gen) - ref))
    ok = devs[0] > devs[1] > devs[2] and n1 < 1e-12
    report(8, ok, "two-time max deviation " + " > ".join(f"{d:.4f}" for d in devs)
                  + f"; n=1 vs propagation {n1:.1e} (tol 1e-12)")


def test_criterion_9_hermitian_special_case(report):
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(5):
        A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        B = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        X, H = 0.5 * (A + A.conj().T), 0.5 * (B + B.conj().T)
        g1, g2 = rng.uniform(0.1, 2.0, size=2)
        lhs = hermitian_coupling_liouvillian(H, X, 0.8, g1 + g2)
        rhs = poisson_liouvillian(PoissonMEParams(H, X, 0.8, g1, g2))
        worst = max(worst, np.linalg.norm(lhs - rhs, 2))
    report(9, worst < 1e-9, f"max superoperator-norm difference {worst:.1e} over 5 random inputs (tol 1e-9)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
