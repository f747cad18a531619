"""Exact system (x) bath dynamics and convergence to the Poisson master equation."""
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import CostGuardExceeded, DimensionMismatch
from .lindblad import Trajectory, check_density_matrix, gksl_liouvillian, propagate
from .operators import as_operator, dagger, kron
from .poisson import PoissonMEParams, poisson_liouvillian
from .telegraph import BathParams, bath_gibbs, bath_hamiltonian, bath_jumps, coupling_operator

# a composite dim D needs a dense D^2 x D^2 generator: 128 would be 4.3 GB per copy
MAX_COMPOSITE_DIM = 64
BATH_DIM = 4


@dataclass(frozen=True)
class CompositeSetup:
    """System ``(H_S, L)`` coupled to the telegraph bath, starting from ``rho_S0 (x) rho_eq``."""

    H_S: np.ndarray
    L: np.ndarray
    bath: BathParams
    rho_S0: np.ndarray

    def __post_init__(self):
        H = as_operator(self.H_S, "H_S")
        L = as_operator(self.L, "L")
        rho = check_density_matrix(self.rho_S0)
        if not H.shape == L.shape == rho.shape:
            raise DimensionMismatch("H_S, L and rho_S0 must share one shape")
        object.__setattr__(self, "H_S", H)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "rho_S0", rho)

    @property
    def system_dim(self):
        return self.H_S.shape[0]

    @property
    def dim(self):
        return self.system_dim * BATH_DIM

    def initial_state(self):
        return kron(self.rho_S0, bath_gibbs(self.bath))

    def poisson_params(self):
        return PoissonMEParams(self.H_S, self.L, self.bath.mu,
                               self.bath.gamma1_plus, self.bath.gamma2_plus)

    def with_bath(self, bath):
        return CompositeSetup(self.H_S, self.L, bath, self.rho_S0)


def composite_hamiltonian(s: CompositeSetup):
    eye_s, eye_b = np.eye(s.system_dim), np.eye(BATH_DIM)
    H_int = kron(s.L, coupling_operator(s.bath, -1)) + kron(dagger(s.L), coupling_operator(s.bath, +1))
    return kron(s.H_S, eye_b) + kron(eye_s, bath_hamiltonian(s.bath)) + H_int


def composite_liouvillian(s: CompositeSetup):
    eye_s = np.eye(s.system_dim)
    jumps = [(rate, kron(eye_s, op)) for rate, op in bath_jumps(s.bath)]
    return gksl_liouvillian(composite_hamiltonian(s), jumps)


def partial_trace_bath(rho_SB, system_dim):
    r = np.asarray(rho_SB).reshape(system_dim, BATH_DIM, system_dim, BATH_DIM)
    return np.einsum("ajbj->ab", r)


def partial_trace_system(rho_SB, system_dim):
    r = np.asarray(rho_SB).reshape(system_dim, BATH_DIM, system_dim, BATH_DIM)
    return np.einsum("ajak->jk", r)


def _guard(s: CompositeSetup):
    if s.dim > MAX_COMPOSITE_DIM:
        raise CostGuardExceeded(
            f"composite dimension {s.dim} exceeds {MAX_COMPOSITE_DIM}; use the symmetric representation"
        )


def composite_trajectory(s: CompositeSetup, times, method="auto"):
    _guard(s)
    return propagate(composite_liouvillian(s), s.initial_state(), times, method=method)


def reduced_trajectory(s: CompositeSetup, times, method="auto"):
    """Trajectory of ``Tr_B rho_SB(t)``."""
    full = composite_trajectory(s, times, method)
    d = s.system_dim
    states = np.array([partial_trace_bath(r, d) for r in full.states])
    return Trajectory(times=full.times, states=states).validate()


class ConvergenceRow(NamedTuple):
    gamma_minus: float
    lam: float
    observable: str
    max_dev: float
    final_dev: float
    markov_ratio: float


def convergence_study(setup: CompositeSetup, bath_for: Callable[[float], BathParams],
                      gamma_minus_values, times, observables: dict, method="auto"):
    """Compare composite and Poisson-ME trajectories along a ladder of bath decay rates.

    ``bath_for(gamma_minus)`` builds the bath for one rung; every rung must
    share the same ``mu = lam / G1-``. Returns one row per (rung, observable).
    """
    gamma_minus_values = list(gamma_minus_values)
    if any(b <= a for a, b in zip(gamma_minus_values, gamma_minus_values[1:])):
        raise ValueError("gamma_minus values must be strictly ascending")
    baths = [bath_for(g) for g in gamma_minus_values]
    mu = baths[0].mu
    if any(not np.isclose(b.mu, mu, rtol=1e-12) for b in baths):
        raise ValueError("mu must be identical across the ladder")

    ref_setup = setup.with_bath(baths[0])
    ref = propagate(poisson_liouvillian(ref_setup.poisson_params()), setup.rho_S0, times, method="expm")
    ref_vals = {name: ref.expect(op).real for name, op in observables.items()}

    rows = []
    for g, bath in zip(gamma_minus_values, baths):
        traj = reduced_trajectory(setup.with_bath(bath), times, method)
        ratio = float(max(bath.markov_ratios()))
        for name, op in observables.items():
            dev = np.abs(traj.expect(op).real - ref_vals[name])
            rows.append(ConvergenceRow(g, bath.lam, name, float(dev.max()), float(dev[-1]), ratio))
    return rows
