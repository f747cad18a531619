"""Multi-time correlation functions of a system operator.

The counting-field derivatives are realized as left insertions of ``A_S``
between propagation segments::

    <A(t1) ... A(tn)> = Tr[A e^{L (t1-t2)} A ... A e^{L tn} rho0]
"""
from dataclasses import dataclass

import numpy as np

from .composite import CompositeSetup, _guard, composite_liouvillian
from .errors import CostGuardExceeded
from .lindblad import check_density_matrix
from .operators import as_operator, kron, left_superop, matrix_exponential, superop_dim, trace_row, vectorize
from .poisson import PoissonMEParams, poisson_liouvillian

MAX_INSERTIONS = 4


@dataclass(frozen=True)
class MultiTimeSpec:
    A_S: np.ndarray
    times: tuple

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        if not times:
            raise ValueError("at least one insertion time is required")
        if len(times) > MAX_INSERTIONS:
            raise CostGuardExceeded(f"at most {MAX_INSERTIONS} insertions are supported")
        if any(t < 0 for t in times) or any(a < b for a, b in zip(times, times[1:])):
            raise ValueError("insertion times must be non-negative and descending")
        object.__setattr__(self, "A_S", as_operator(self.A_S, "A_S"))
        object.__setattr__(self, "times", times)


def insertion_chain(gen, insert, v0, times):
    """``Tr[I e^{G(t1-t2)} I ... I e^{G tn} v0]`` for an insertion superoperator ``I``."""
    d = superop_dim(gen)
    cache = {}

    def prop(dt):
        key = round(dt, 14)
        if key not in cache:
            cache[key] = matrix_exponential(gen * dt)
        return cache[key]

    n = len(times)
    v = prop(times[-1]) @ v0
    for i in range(n - 1, -1, -1):
        v = insert @ v
        if i > 0:
            v = prop(times[i - 1] - times[i]) @ v
    return complex(trace_row(d) @ v)


def multitime_exact(s: CompositeSetup, spec: MultiTimeSpec):
    _guard(s)
    A = kron(spec.A_S, np.eye(4))
    return insertion_chain(composite_liouvillian(s), left_superop(A), vectorize(s.initial_state()), spec.times)


def multitime_regression(p: PoissonMEParams, rho0, spec: MultiTimeSpec, gen=None):
    """Same correlator with the Poisson-ME generator acting on the system alone."""
    rho0 = check_density_matrix(rho0)
    if gen is None:
        gen = poisson_liouvillian(p)
    return insertion_chain(gen, left_superop(spec.A_S), vectorize(rho0), spec.times)
