import numpy as np
import pytest

from poissonbath.composite import (
    CompositeSetup,
    composite_liouvillian,
    composite_trajectory,
    convergence_study,
    partial_trace_bath,
    partial_trace_system,
    reduced_trajectory,
)
from poissonbath.errors import CostGuardExceeded, DimensionMismatch
from poissonbath.lindblad import gksl_liouvillian, propagate, pure_state
from poissonbath.models import collective_model, symmetric_isometry
from poissonbath.operators import apply_superop, kron, sigma_minus, sigma_x, sigma_z, vectorize
from poissonbath.telegraph import BathParams, bath_gibbs

TIMES = np.linspace(0, 2, 11)


def qubit_setup(lam=0.0, rho0=None):
    bath = BathParams(3.0, 2.0, 0.4, 1.5, 0.3, 1.2, lam)
    return CompositeSetup(0.5 * sigma_z(), sigma_minus(), bath, pure_state([1, 1]) if rho0 is None else rho0)


def test_setup_validation():
    s = qubit_setup()
    assert s.dim == 8
    assert np.allclose(s.initial_state(), kron(s.rho_S0, bath_gibbs(s.bath)))
    with pytest.raises(DimensionMismatch):
        CompositeSetup(np.zeros((3, 3)), sigma_minus(), s.bath, s.rho_S0)


def test_zero_coupling_decouples():
    s = qubit_setup(lam=0.0)
    traj = composite_trajectory(s, TIMES, method="expm")
    free = propagate(gksl_liouvillian(s.H_S), s.rho_S0, TIMES, method="expm")
    for rho, ref in zip(traj.states, free.states):
        assert np.max(np.abs(partial_trace_bath(rho, 2) - ref)) < 1e-9
        bath = partial_trace_system(rho, 2)
        assert np.allclose(bath, bath_gibbs(s.bath), atol=1e-9)
        assert np.allclose(rho, kron(partial_trace_bath(rho, 2), bath), atol=1e-9)


def test_interaction_has_no_bath_only_part(rng):
    s = qubit_setup(lam=0.8)
    M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho_s = M @ M.conj().T
    rho_s /= np.trace(rho_s)
    out = apply_superop(composite_liouvillian(s), kron(rho_s, bath_gibbs(s.bath)))
    # Tr_B[H_int rho_eq] = 0, so only the system Hamiltonian survives the bath trace
    expected = -1j * (s.H_S @ rho_s - rho_s @ s.H_S)
    assert np.allclose(partial_trace_bath(out, 2), expected, atol=1e-12)


def test_reduced_trajectory_start_and_trace():
    s = qubit_setup(lam=1.1)
    traj = reduced_trajectory(s, TIMES)
    assert np.allclose(traj.states[0], s.rho_S0, atol=1e-12)
    full = composite_trajectory(s, TIMES)
    assert np.allclose(np.trace(full.states, axis1=1, axis2=2), 1, atol=1e-8)


def test_cost_guard():
    m = collective_model(5, representation="full")  # composite dim 128 > 64
    bath = BathParams(3.0, 2.0, 0.0, 10.0, 1.0, 10.0, 7.0)
    s = CompositeSetup(m.H_S, m.L, bath, pure_state(m.ground_state()))
    with pytest.raises(CostGuardExceeded):
        reduced_trajectory(s, TIMES)


def test_symmetric_sector_confinement():
    N = 3
    m = collective_model(N, representation="full")
    bath = BathParams(3.0, 2.0, 0.0, 10.0, 1.0, 10.0, 7.0)
    s = CompositeSetup(m.H_S, m.L, bath, pure_state(m.ground_state() + m.dicke(1)))
    traj = reduced_trajectory(s, np.linspace(0, 2, 5))
    iso = symmetric_isometry(N)
    for rho in traj.states:
        assert abs(1 - np.trace(iso.conj().T @ rho @ iso).real) < 1e-10


def test_convergence_study_single_qubit():
    mu, beta = 0.5, 1.0
    g1p = np.exp(-beta)
    factory = lambda g: BathParams.white_noise(g, mu, g1p, 1.0, beta=beta)  # noqa: E731
    s = CompositeSetup(0.5 * sigma_z(), sigma_minus(), factory(10.0), pure_state([1, 1]))
    obs = {"p_ground": np.diag([1.0, 0.0]), "sx": sigma_x()}
    rows = convergence_study(s, factory, [10.0, 30.0, 100.0], np.linspace(0, 10, 101), obs)
    assert len(rows) == 6
    for name in obs:
        devs = [r.max_dev for r in rows if r.observable == name]
        assert devs[0] > devs[1] > devs[2]
        assert devs[2] < devs[0] / 5
        assert all(np.isfinite(devs))
    assert rows[-1].lam == pytest.approx(50.0)
    assert rows[-1].markov_ratio == pytest.approx(1.0 / 100.0)
    with pytest.raises(ValueError):
        convergence_study(s, factory, [30.0, 10.0], TIMES, obs)


def test_lambda_recomputed_per_rung():
    p = BathParams.white_noise(100.0, 0.7, 0.0, 1.0, omega1=3.0, omega2=2.0)
    assert p.lam == pytest.approx(70.0)
