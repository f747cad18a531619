"""Concrete systems: single qubit and the collective N-spin (Dicke) model."""
import itertools
from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from .errors import SizeGuardExceeded
from .operators import (
    as_operator,
    dagger,
    hermitian_eig,
    kron_all,
    operator_function,
    sigma_minus,
    sigma_z,
)
from .quadrature import expweight_integrate

MAX_N_FULL = 12
MAX_N_SYMMETRIC = 64


@dataclass(frozen=True)
class CollectiveModel:
    """``H_S = (omega/2) sum_i sigma_z_i`` coupled through ``L = sum_i sigma_minus_i``.

    In the ``"symmetric"`` representation the basis is ``|j=N/2, m>`` with
    ``m = -N/2 ... N/2`` ascending, so index ``k`` holds ``k`` excitations.
    The ``"full"`` representation uses the ``2**N`` product basis with qubit 0
    as the most significant factor.
    """

    N: int
    omega: float
    representation: str
    H_S: np.ndarray
    L: np.ndarray

    @property
    def dim(self):
        return self.H_S.shape[0]

    @property
    def Jx(self):
        """``sum_i sigma_x_i = L + L^+``."""
        return self.L + dagger(self.L)

    def ground_state(self):
        return dicke_state(self.N, 0, self.representation)

    def dicke(self, k):
        return dicke_state(self.N, k, self.representation)


def _lowering_symmetric(N):
    j = N / 2.0
    m = np.arange(N + 1) - j
    # <j, m-1| J- |j, m> sits at row k-1, column k
    elem = np.sqrt(j * (j + 1) - m[1:] * (m[1:] - 1))
    return np.diag(elem, k=1).astype(complex)


def _collective_full(N, single):
    eye = np.eye(2, dtype=complex)
    total = np.zeros((2**N, 2**N), dtype=complex)
    for i in range(N):
        factors = [eye] * N
        factors[i] = single
        total += kron_all(*factors)
    return total


def collective_model(N, omega=1.0, representation="symmetric"):
    if N < 1:
        raise ValueError("N must be at least 1")
    if representation == "symmetric":
        if N > MAX_N_SYMMETRIC:
            raise SizeGuardExceeded(f"symmetric representation supports N <= {MAX_N_SYMMETRIC}")
        H = omega * np.diag(np.arange(N + 1) - N / 2.0).astype(complex)
        L = _lowering_symmetric(N)
    elif representation == "full":
        if N > MAX_N_FULL:
            raise SizeGuardExceeded(f"full representation supports N <= {MAX_N_FULL}")
        H = 0.5 * omega * _collective_full(N, sigma_z())
        L = _collective_full(N, sigma_minus())
    else:
        raise ValueError(f"unknown representation {representation!r}")
    return CollectiveModel(N=N, omega=omega, representation=representation, H_S=H, L=L)


def qubit_model(omega=1.0):
    return collective_model(1, omega, "symmetric")


def dicke_state(N, k, representation="symmetric"):
    """Normalized ket of the symmetric state with ``k`` excitations."""
    if not 0 <= k <= N:
        raise ValueError(f"excitation number {k} outside 0..{N}")
    if representation == "symmetric":
        psi = np.zeros(N + 1, dtype=complex)
        psi[k] = 1.0
        return psi
    if representation != "full":
        raise ValueError(f"unknown representation {representation!r}")
    psi = np.zeros(2**N, dtype=complex)
    for excited in itertools.combinations(range(N), k):
        idx = sum(1 << (N - 1 - i) for i in excited)
        psi[idx] = 1.0
    return psi / np.sqrt(comb(N, k, exact=True))


def symmetric_isometry(N):
    """Columns are the full-space Dicke states ``|D_{N,k}>``, ``k = 0..N``."""
    return np.column_stack([dicke_state(N, k, "full") for k in range(N + 1)])


def gibbs_state(H, beta):
    """``exp(-beta H) / Tr exp(-beta H)``, shifted by the ground energy for stability."""
    H = as_operator(H, "H")
    eig = hermitian_eig(H)
    w0 = eig.eigenvalues[0]
    rho = operator_function(None, lambda w: np.exp(-beta * (w - w0)), eig=eig)
    return rho / np.trace(rho).real


def sector_gibbs_populations(N, omega, beta):
    """Boltzmann weights over Dicke levels inside the symmetric sector (no degeneracy)."""
    k = np.arange(N + 1)
    w = np.exp(-beta * omega * k)
    return w / w.sum()


def full_gibbs_populations(N, omega, beta):
    """Full-space Gibbs probability of each excitation number, including ``C(N, k)``."""
    k = np.arange(N + 1)
    w = comb(N, k) * np.exp(-beta * omega * k)
    return w / w.sum()


def effective_decay_rate(N, mu, gamma2_plus=1.0):
    """Decay rate from ``|D_{N,1}>`` to ``|0>``: ``2 G mu^2 N / (1 + 4 mu^2 N)``."""
    x = mu * mu * N
    return 2.0 * gamma2_plus * x / (1.0 + 4.0 * x)


def effective_decay_rate_quadrature(N, mu, gamma2_plus=1.0):
    """Same rate by quadrature of ``G int p(a) sin^2(a sqrt(N)) da``."""
    root = np.sqrt(N)
    return gamma2_plus * float(expweight_integrate(lambda a: np.sin(a * root) ** 2, mu))


def gaussian_decay_rate(N, mu, gamma2_plus=1.0):
    return 2.0 * gamma2_plus * mu * mu * N

