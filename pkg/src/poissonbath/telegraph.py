"""Dissipative two-qubit bath emitting random-telegraph / Poisson noise.

Bath space is ``qubit1 (x) qubit2`` with single-qubit basis ``(|g>, |e>)``.
The coupling operators are ``B(+) = lam s1- s2+`` and ``B(-) = lam s1+ s2-``
and they enter the n-point correlators as left (``l = +1``) or right
(``l = -1``) multiplications.

Every correlator reduces to one pattern: a bath coherence ``|g e><e g|``
(or its adjoint) created from a diagonal bath state ``D`` and closed again by
the trace. Its value is ``lam^2 * w * exp(i k2 dw t) * exp(-(g1 + g2) t / 2)``
with ``w = P_D(e1, g2)`` if ``l2 k2 = +1`` and ``w = P_D(g1, e2)`` otherwise;
``D`` is the Gibbs state for two-point functions and ``exp(L_B s) Q rho_B^{+-}``
for the correlation-like factors.
"""
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import CostGuardExceeded, NegativeRate
from .lindblad import gksl_liouvillian
from .operators import (
    kron,
    left_superop,
    matrix_exponential,
    right_superop,
    sigma_minus,
    sigma_plus,
    sigma_z,
    trace_row,
    vectorize,
)

MAX_NUMERIC_ORDER = 6
DB_RTOL = 1e-12


@dataclass(frozen=True)
class BathParams:
    omega1: float
    omega2: float
    gamma1_plus: float
    gamma1_minus: float
    gamma2_plus: float
    gamma2_minus: float
    lam: float
    beta: float = None  # set only in detailed-balance mode

    def __post_init__(self):
        rates = (self.gamma1_plus, self.gamma1_minus, self.gamma2_plus, self.gamma2_minus)
        if any(r < 0 for r in rates):
            raise NegativeRate("bath jump rates must be non-negative")
        if not (self.gamma1 > 0 and self.gamma2 > 0):
            raise ValueError("each bath qubit needs a positive total rate")
        if not self.gamma1_minus > 0:
            raise ValueError("gamma1_minus must be positive (mu = lam / gamma1_minus)")
        if self.beta is not None:
            for w, gp, gm in ((self.omega1, self.gamma1_plus, self.gamma1_minus),
                              (self.omega2, self.gamma2_plus, self.gamma2_minus)):
                if gp == 0 or abs(gm / gp - np.exp(self.beta * w)) > DB_RTOL * np.exp(self.beta * w):
                    raise ValueError("rates violate detailed balance gamma-/gamma+ = exp(beta omega)")

    @classmethod
    def detailed_balance(cls, omega1, omega2, beta, gamma1_plus, gamma2_plus, lam):
        """Fix the decay rates from the excitation rates via ``G-/G+ = exp(beta w)``."""
        return cls(
            omega1, omega2,
            gamma1_plus, gamma1_plus * np.exp(beta * omega1),
            gamma2_plus, gamma2_plus * np.exp(beta * omega2),
            lam, beta,
        )

    @classmethod
    def white_noise(cls, gamma_minus, mu, gamma1_plus, gamma2_plus,
                    omega1=None, omega2=None, beta=None):
        """Bath with ``G1- = G2- = gamma_minus`` and ``lam = mu * gamma_minus``.

        With ``beta`` given, the bath frequencies follow from detailed balance,
        ``w_i = log(gamma_minus / G_i+) / beta``; otherwise both must be passed.
        """
        lam = mu * gamma_minus
        if beta is not None:
            if gamma1_plus <= 0 or gamma2_plus <= 0:
                raise ValueError("detailed-balance mode needs positive excitation rates")
            omega1 = np.log(gamma_minus / gamma1_plus) / beta
            omega2 = np.log(gamma_minus / gamma2_plus) / beta
            return cls(omega1, omega2, gamma1_plus, gamma1_plus * np.exp(beta * omega1),
                       gamma2_plus, gamma2_plus * np.exp(beta * omega2), lam, beta)
        if omega1 is None or omega2 is None:
            raise ValueError("omega1 and omega2 are required without beta")
        return cls(omega1, omega2, gamma1_plus, gamma_minus, gamma2_plus, gamma_minus, lam)

    @property
    def gamma1(self):
        return self.gamma1_plus + self.gamma1_minus

    @property
    def gamma2(self):
        return self.gamma2_plus + self.gamma2_minus

    @property
    def mu(self):
        return self.lam / self.gamma1_minus

    @property
    def delta_omega(self):
        return self.omega1 - self.omega2

    @property
    def tau_B(self):
        """Bath correlation time ``1 / G1-``."""
        return 1.0 / self.gamma1_minus

    def markov_ratios(self):
        """``G_i+ / G1-``; the white-noise description needs both to be small."""
        return self.gamma1_plus / self.gamma1_minus, self.gamma2_plus / self.gamma1_minus

    def derived(self):
        r1, r2 = self.markov_ratios()
        return {
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "mu": self.mu,
            "tau_B": self.tau_B,
            "markov_ratio_1": r1,
            "markov_ratio_2": r2,
        }


class CorrelatorIndex(NamedTuple):
    """``l``: +1 left / -1 right multiplication; ``k``: which coupling ``B(k)``."""

    l: int
    k: int

    @classmethod
    def make(cls, l, k):
        l, k = _sign(l), _sign(k)
        return cls(l, k)


def _sign(x):
    if x in (1, "+", "+1"):
        return 1
    if x in (-1, "-", "-1"):
        return -1
    raise ValueError(f"expected a sign (+1/-1), got {x!r}")


@dataclass(frozen=True)
class CorrelatorSpec:
    indices: tuple
    times: tuple

    def __post_init__(self):
        idx = tuple(CorrelatorIndex.make(*i) for i in self.indices)
        times = tuple(float(t) for t in self.times)
        if len(idx) != len(times):
            raise ValueError("indices and times must have equal length")
        if any(t < 0 for t in times):
            raise ValueError("correlator times must be non-negative")
        if any(a < b for a, b in zip(times, times[1:])):
            raise ValueError("correlator times must be descending")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "times", times)

    def __len__(self):
        return len(self.indices)


# ---------------------------------------------------------------- operators

def _bath_ops():
    eye = np.eye(2)
    return {
        "s1+": kron(sigma_plus(), eye),
        "s1-": kron(sigma_minus(), eye),
        "s2+": kron(eye, sigma_plus()),
        "s2-": kron(eye, sigma_minus()),
        "s1z": kron(sigma_z(), eye),
        "s2z": kron(eye, sigma_z()),
    }


BATH_OPS = _bath_ops()


def bath_hamiltonian(p: BathParams):
    return 0.5 * (p.omega1 * BATH_OPS["s1z"] + p.omega2 * BATH_OPS["s2z"])


def bath_jumps(p: BathParams):
    return [
        (p.gamma1_plus, BATH_OPS["s1+"]),
        (p.gamma1_minus, BATH_OPS["s1-"]),
        (p.gamma2_plus, BATH_OPS["s2+"]),
        (p.gamma2_minus, BATH_OPS["s2-"]),
    ]


def coupling_operator(p: BathParams, k):
    """``B(+) = lam s1- s2+``, ``B(-) = lam s1+ s2-``."""
    if _sign(k) == 1:
        return p.lam * BATH_OPS["s1-"] @ BATH_OPS["s2+"]
    return p.lam * BATH_OPS["s1+"] @ BATH_OPS["s2-"]


def coupling_superop(p: BathParams, index):
    l, k = CorrelatorIndex.make(*index)
    B = coupling_operator(p, k)
    return left_superop(B) if l == 1 else right_superop(B)


def bath_liouvillian(p: BathParams):
    return gksl_liouvillian(bath_hamiltonian(p), bath_jumps(p))


def _qubit_eq(gp, gm):
    return np.diag([gm, gp]).astype(complex) / (gp + gm)


def bath_gibbs(p: BathParams):
    return kron(_qubit_eq(p.gamma1_plus, p.gamma1_minus), _qubit_eq(p.gamma2_plus, p.gamma2_minus))


def rho_B(sign):
    """``rho_B^+ = |g1 e2><g1 e2|``, ``rho_B^- = |e1 g2><e1 g2|``."""
    rho = np.zeros((4, 4), dtype=complex)
    # product index = 2 * (qubit1 excited) + (qubit2 excited)
    rho[(1, 1) if _sign(sign) == 1 else (2, 2)] = 1.0
    return rho


def q_projector(p: BathParams):
    """``Q = 1 - rho_eq Tr`` on the 16-dim bath Liouville space."""
    return np.eye(16) - np.outer(vectorize(bath_gibbs(p)), trace_row(4))


# ------------------------------------------------------------ closed forms

def _excited_prob(gp, gamma, excited0, s):
    eq = gp / gamma
    return eq + (excited0 - eq) * np.exp(-gamma * s)


def _coherence_weight(l2k2, pops):
    pe1, pe2 = pops
    if l2k2 == 1:
        return pe1 * (1.0 - pe2)
    return (1.0 - pe1) * pe2


def _envelope(p: BathParams, k2, t):
    return np.exp(1j * k2 * p.delta_omega * t - 0.5 * (p.gamma1 + p.gamma2) * t)


def two_point_analytic(p: BathParams, idx1, idx2, t):
    """``Tr[B1 exp(L_B t) B2 rho_eq]``; zero unless ``k1 = -k2``."""
    (_, k1), (l2, k2) = CorrelatorIndex.make(*idx1), CorrelatorIndex.make(*idx2)
    if k1 == k2:
        return 0j
    pops = (p.gamma1_plus / p.gamma1, p.gamma2_plus / p.gamma2)
    w = _coherence_weight(l2 * k2, pops)
    return complex(p.lam**2 * w * _envelope(p, k2, t))


def correlationlike_analytic(p: BathParams, idx1, idx2, init, t, s):
    """``Tr[B1 exp(L_B t) B2 exp(L_B s) Q rho_B^init]``; zero unless ``k1 = -k2``."""
    (_, k1), (l2, k2) = CorrelatorIndex.make(*idx1), CorrelatorIndex.make(*idx2)
    if k1 == k2:
        return 0j
    # rho_B^+ = |g1 e2>, rho_B^- = |e1 g2>
    e1, e2 = (0.0, 1.0) if _sign(init) == 1 else (1.0, 0.0)
    pops_s = (
        _excited_prob(p.gamma1_plus, p.gamma1, e1, s),
        _excited_prob(p.gamma2_plus, p.gamma2, e2, s),
    )
    pops_eq = (p.gamma1_plus / p.gamma1, p.gamma2_plus / p.gamma2)
    w = _coherence_weight(l2 * k2, pops_s) - _coherence_weight(l2 * k2, pops_eq)
    return complex(p.lam**2 * w * _envelope(p, k2, t))


def npoint_analytic(p: BathParams, spec: CorrelatorSpec):
    """Product decomposition of an even-order correlator; odd orders vanish."""
    n = len(spec)
    if n == 0:
        return 1.0 + 0j
    if n % 2:
        return 0j
    idx, t = spec.indices, spec.times
    value = two_point_analytic(p, idx[n - 2], idx[n - 1], t[n - 2] - t[n - 1])
    # pairs (2j-1, 2j), 1-based, each fed by rho_B^{l k} of the following index
    for j in range(0, n - 2, 2):
        nxt = idx[j + 2]
        value *= correlationlike_analytic(
            p, idx[j], idx[j + 1], nxt.l * nxt.k, t[j] - t[j + 1], t[j + 1] - t[j + 2]
        )
        if value == 0:
            break
    return complex(value)


def npoint_numeric(p: BathParams, spec: CorrelatorSpec):
    """Evaluate the n-point correlator literally in the bath Liouville space.

    ``Tr[B1 e^{L(t1-t2)} Q B2 e^{L(t2-t3)} Q ... Q Bn rho_eq]`` with dense
    propagators and an explicit ``Q`` matrix.
    """
    n = len(spec)
    if n > MAX_NUMERIC_ORDER:
        raise CostGuardExceeded(f"numeric correlators are limited to n <= {MAX_NUMERIC_ORDER}")
    LB = bath_liouvillian(p)
    Q = q_projector(p)
    v = vectorize(bath_gibbs(p))
    for i in range(n - 1, -1, -1):
        v = coupling_superop(p, spec.indices[i]) @ v
        if i > 0:
            v = matrix_exponential(LB * (spec.times[i - 1] - spec.times[i])) @ (Q @ v)
    return complex(trace_row(4) @ v)


def correlationlike_numeric(p: BathParams, idx1, idx2, init, t, s):
    LB = bath_liouvillian(p)
    v = matrix_exponential(LB * s) @ (q_projector(p) @ vectorize(rho_B(init)))
    v = coupling_superop(p, idx2) @ v
    v = matrix_exponential(LB * t) @ v
    v = coupling_superop(p, idx1) @ v
    return complex(trace_row(4) @ v)


# --------------------------------------------------------- white-noise limit

def satisfies_white_noise_constraints(indices: Sequence):
    """``k_{2i-1} = -k_{2i}`` and ``l_{2j+1} k_{2j+1} = -l_{2j} k_{2j}``."""
    idx = [CorrelatorIndex.make(*i) for i in indices]
    n = len(idx)
    if n == 0 or n % 2:
        return False
    if any(idx[i].k != -idx[i + 1].k for i in range(0, n, 2)):
        return False
    return all(idx[i + 1].l * idx[i + 1].k == -idx[i].l * idx[i].k for i in range(1, n - 1, 2))


def white_noise_weight(p: BathParams, indices: Sequence):
    """Amplitude of the delta-train a 2n-point correlator tends to.

    ``(2 mu)^{2n} G/2`` with ``G = G1+`` if ``l_{2n} k_{2n} = +1`` else ``G2+``;
    zero for index patterns violating the white-noise constraints.
    """
    if not satisfies_white_noise_constraints(indices):
        return 0.0
    last = CorrelatorIndex.make(*indices[-1])
    rate = p.gamma1_plus if last.l * last.k == 1 else p.gamma2_plus
    return 0.5 * rate * (2.0 * p.mu) ** len(indices)


class WhiteNoiseArea(NamedTuple):
    area: float
    area_quadrature: float
    limit: float
    tau_B: float
    noise_rates: tuple

    @property
    def relative_error(self):
        return abs(self.area - self.limit) / self.limit


def whitenoise_area(p: BathParams, rtol=1e-10):
    """Half-line area of ``|chi_2(t)|`` for the ``G1+``-type two-point function.

    Tends to ``mu^2 G1+`` in the white-noise limit. The closed form is checked
    against adaptive quadrature over ``[0, 40/(g1+g2)]`` plus the analytic tail.
    """
    i1, i2 = CorrelatorIndex(1, -1), CorrelatorIndex(1, 1)
    decay = 0.5 * (p.gamma1 + p.gamma2)
    amp = abs(two_point_analytic(p, i1, i2, 0.0))
    area = amp / decay
    cut = 40.0 / (p.gamma1 + p.gamma2)
    body, _ = quad(lambda t: abs(two_point_analytic(p, i1, i2, t)), 0.0, cut,
                   epsabs=0.0, epsrel=rtol, limit=200)
    tail = amp * np.exp(-decay * cut) / decay
    return WhiteNoiseArea(
        area=area,
        area_quadrature=body + tail,
        limit=p.mu**2 * p.gamma1_plus,
        tau_B=p.tau_B,
        noise_rates=(p.gamma1_plus, p.gamma2_plus),
    )
