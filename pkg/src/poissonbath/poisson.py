"""Poisson-noise master equation with nonlinear multiple-jump operators.

For a coupling operator ``L`` and noise strength ``a`` the jump family is::

    La      = -i L g_a(L^+ L)           g_a(x) = sin(a sqrt(x)) / sqrt(x)
    LaDag   = -i g_a(L^+ L) L^+
    Ma      = cos(a sqrt(L^+ L)) - 1
    Na      = cos(a sqrt(L L^+)) - 1

and the generator averages the dissipators of these operators over the
exponential density ``p(a) = exp(-a/mu)/mu``. In the eigenbasis of
``L^+ L`` every averaged matrix element reduces to a Laplace transform of a
product of trigonometric functions, which is what the ``"closed"`` method
evaluates; ``"quadrature"`` sums the literal dissipators over quadrature
nodes instead and serves as an independent check.

``LaDag`` is the absorption jump written out term by term from its power
series; it equals ``-adjoint(La)``. The global sign drops out of every
dissipator.
"""
from dataclasses import dataclass

import numpy as np

from .errors import CostGuardExceeded, DimensionMismatch, NegativeRate, NonHermitianInput
from .lindblad import dissipator, gksl_liouvillian
from .operators import (
    as_operator,
    commutator_superop,
    dagger,
    hermitian_eig,
    is_hermitian,
    operator_function,
    sinc_sqrt,
)
from .quadrature import expweight_integrate


@dataclass(frozen=True)
class PoissonMEParams:
    """Inputs of the Poisson-noise master equation.

    ``gamma2_plus`` is the rate of emission-type kicks (jumps ``La``, ``Ma``),
    ``gamma1_plus`` the rate of absorption-type kicks (``LaDag``, ``Na``).
    """

    H_S: np.ndarray
    L: np.ndarray
    mu: float
    gamma1_plus: float
    gamma2_plus: float

    def __post_init__(self):
        H = as_operator(self.H_S, "H_S")
        L = as_operator(self.L, "L")
        if H.shape != L.shape:
            raise DimensionMismatch(f"H_S {H.shape} and L {L.shape} differ in shape")
        if not is_hermitian(H):
            raise NonHermitianInput("H_S is not Hermitian")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.gamma1_plus < 0 or self.gamma2_plus < 0:
            raise NegativeRate("noise rates must be non-negative")
        object.__setattr__(self, "H_S", H)
        object.__setattr__(self, "L", L)

    @property
    def dim(self):
        return self.H_S.shape[0]


@dataclass(frozen=True)
class JumpFamily:
    a: float
    La: np.ndarray
    LaDagger: np.ndarray
    Ma: np.ndarray
    Na: np.ndarray


def _cos_minus_one(a):
    return lambda x: np.cos(a * np.sqrt(np.clip(x, 0.0, None))) - 1.0


def jump_family(L, a, eig_LdL=None, eig_LLd=None):
    """Jump operators for a single kick of strength ``a``."""
    if a < 0:
        raise ValueError("noise strength must be non-negative")
    L = as_operator(L, "L")
    Ld = dagger(L)
    if eig_LdL is None:
        eig_LdL = hermitian_eig(Ld @ L)
    if eig_LLd is None:
        eig_LLd = hermitian_eig(L @ Ld)
    scale = max(eig_LdL.eigenvalues[-1], 0.0)
    g = operator_function(None, lambda x: sinc_sqrt(a, x, scale), eig=eig_LdL)
    return JumpFamily(
        a=a,
        La=-1j * L @ g,
        LaDagger=-1j * g @ Ld,
        Ma=operator_function(None, _cos_minus_one(a), eig=eig_LdL),
        Na=operator_function(None, _cos_minus_one(a), eig=eig_LLd),
    )


# Laplace transforms against p(a) = exp(-a/mu)/mu

def one_minus_lorentz(mu, k):
    """``int p(a) (1 - cos(k a)) da = mu^2 k^2 / (1 + mu^2 k^2)``."""
    m = (mu * np.asarray(k, dtype=float)) ** 2
    return m / (1.0 + m)


def avg_sinc_sinc(mu, u, v):
    """``int p(a) sin(a u) sin(a v) / (u v) da``; finite at ``u = 0`` or ``v = 0``."""
    mu2 = mu * mu
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return 2.0 * mu2 / ((1.0 + mu2 * (u - v) ** 2) * (1.0 + mu2 * (u + v) ** 2))


def avg_cos1_cos1(mu, u, v):
    """``int p(a) (cos(a u) - 1)(cos(a v) - 1) da``."""
    c = lambda k: one_minus_lorentz(mu, k)  # noqa: E731
    return c(u) + c(v) - 0.5 * (c(u - v) + c(u + v))


def _emission_closed(L, mu):
    L = as_operator(L, "L")
    d = L.shape[0]
    x, V = hermitian_eig(dagger(L) @ L)
    u = np.sqrt(np.clip(x, 0.0, None))
    K = L @ V
    G = avg_sinc_sinc(mu, u[:, None], u[None, :])
    C = avg_cos1_cos1(mu, u[:, None], u[None, :])
    to_eigen = np.kron(V.T, dagger(V))
    # column-stacked Hadamard weights
    jump = np.kron(K.conj(), K) * G.reshape(-1, order="F")[None, :]
    kick = np.kron(V.conj(), V) * C.reshape(-1, order="F")[None, :]
    X = (V * (x * np.diag(G) + np.diag(C))) @ dagger(V)
    eye = np.eye(d)
    return (jump + kick) @ to_eigen - 0.5 * (np.kron(eye, X) + np.kron(X.T, eye))


def _emission_quadrature(L, mu):
    L = as_operator(L, "L")
    Ld = dagger(L)
    eig_LdL = hermitian_eig(Ld @ L)
    eig_LLd = hermitian_eig(L @ Ld)

    def integrand(nodes):
        out = []
        for a in nodes:
            fam = jump_family(L, a, eig_LdL, eig_LLd)
            out.append(dissipator(fam.La) + dissipator(fam.Ma))
        return np.array(out)

    return expweight_integrate(integrand, mu)


# dense generators scale as dim^4; 65 covers the symmetric N <= 64 model (~0.3 GB)
MAX_SYSTEM_DIM = 65



def _guard(dim):
    if dim > MAX_SYSTEM_DIM:
        raise CostGuardExceeded(f"system dimension {dim} exceeds {MAX_SYSTEM_DIM} for a dense generator")


_BLOCK_CACHE = {}
_CACHE_LIMIT = 64


def averaged_dissipator(L, mu, which="emission", method="closed"):
    """``int p(a) [D(La) + D(Ma)] da`` (emission) or ``[D(LaDag) + D(Na)]`` (absorption).

    The absorption block of ``L`` is the emission block of ``L^+``.
    Closed-form blocks are cached per ``(L, mu)``.
    """
    if not mu > 0:
        raise ValueError("mu must be positive")
    L = as_operator(L, "L")
    _guard(L.shape[0])
    if which == "absorption":
        L = dagger(L)
    elif which != "emission":
        raise ValueError(f"which must be 'emission' or 'absorption', got {which!r}")
    if method == "quadrature":
        return _emission_quadrature(L, mu)
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    key = (L.shape, L.tobytes(), float(mu))
    block = _BLOCK_CACHE.get(key)
    if block is None:
        if len(_BLOCK_CACHE) >= _CACHE_LIMIT:
            _BLOCK_CACHE.clear()
        block = _emission_closed(L, mu)
        block.setflags(write=False)
        _BLOCK_CACHE[key] = block
    return block


def poisson_liouvillian(p: PoissonMEParams, method="closed"):
    _guard(p.dim)
    gen = commutator_superop(p.H_S)
    if p.gamma2_plus:
        gen = gen + p.gamma2_plus * averaged_dissipator(p.L, p.mu, "emission", method)
    if p.gamma1_plus:
        gen = gen + p.gamma1_plus * averaged_dissipator(p.L, p.mu, "absorption", method)
    return gen


def gaussian_liouvillian(p: PoissonMEParams):
    """Weak-coupling limit: rates ``2 mu^2 Gamma`` on the linear jumps ``L`` and ``L^+``."""
    _guard(p.dim)
    return gksl_liouvillian(
        p.H_S,
        [(2 * p.mu**2 * p.gamma2_plus, p.L), (2 * p.mu**2 * p.gamma1_plus, dagger(p.L))],
    )


def hermitian_coupling_liouvillian(H_S, X, mu, gamma_sum):
    """Generator for a Hermitian coupling ``L = L^+ = X``.

    Builds ``-i[H,.] + gamma_sum * int p(a) (sin(aX) . sin(aX) + cos(aX) . cos(aX) - 1) da``
    by quadrature over ``a``.
    """
    H_S = as_operator(H_S, "H_S")
    X = as_operator(X, "X")
    if not is_hermitian(X):
        raise NonHermitianInput("coupling operator X is not Hermitian")
    if X.shape != H_S.shape:
        raise DimensionMismatch("H_S and X differ in shape")
    if gamma_sum < 0:
        raise NegativeRate("gamma_sum must be non-negative")
    eig = hermitian_eig(X)

    def integrand(nodes):
        out = []
        for a in nodes:
            S = operator_function(None, lambda w: np.sin(a * w), eig=eig)
            C = operator_function(None, lambda w: np.cos(a * w), eig=eig)
            out.append(np.kron(S.conj(), S) + np.kron(C.conj(), C))
        return np.array(out)

    avg = expweight_integrate(integrand, mu)
    d = X.shape[0]
    return commutator_superop(H_S) + gamma_sum * (avg - np.eye(d * d))
