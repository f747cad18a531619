"""GKSL generators, time propagation and steady states."""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from .errors import (
    DegenerateKernel,
    DimensionMismatch,
    InvalidState,
    NegativeRate,
    NonHermitianHamiltonian,
    NoPhysicalState,
    StepSizeUnderflow,
    ToleranceNotMet,
)
from .operators import (
    as_operator,
    commutator_superop,
    dagger,
    is_hermitian,
    matrix_exponential,
    superop_dim,
    trace_row,
    unvectorize,
    vectorize,
)

RTOL = 1e-8
ATOL = 1e-10
KERNEL_RTOL = 1e-10
# ||gen||_1 * t_max above which "auto" propagation switches from RK45 to exact stepping
STIFFNESS_GUARD = 2000.0


def check_density_matrix(rho, herm_tol=1e-10, trace_tol=1e-10, pos_tol=1e-8):
    """Validate and return ``rho`` as a complex array.

    Raises :class:`InvalidState` if ``rho`` is not Hermitian, not unit-trace
    or has an eigenvalue below ``-pos_tol``.
    """
    rho = as_operator(rho, "density matrix")
    if np.max(np.abs(rho - dagger(rho))) > herm_tol:
        raise InvalidState("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > trace_tol:
        raise InvalidState(f"density matrix has trace {tr}")
    lam_min = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))[0]
    if lam_min < -pos_tol:
        raise InvalidState(f"density matrix has negative eigenvalue {lam_min:.3e}")
    return rho


def pure_state(psi):
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


@dataclass
class Trajectory:
    """Density matrices sampled on a time grid.

    ``states`` has shape ``(len(times), d, d)``; ``observables`` maps a name
    to a real series of the same length as ``times``.
    """

    times: np.ndarray
    states: np.ndarray
    observables: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.times)

    def expect(self, A, name=None):
        A = as_operator(A)
        vals = np.einsum("ij,tji->t", A, self.states)
        if name is not None:
            self.observables[name] = vals.real
        return vals

    def validate(self, trace_tol=1e-8, herm_tol=1e-9, pos_tol=1e-7):
        for t, rho in zip(self.times, self.states):
            try:
                check_density_matrix(rho, herm_tol=herm_tol, trace_tol=trace_tol, pos_tol=pos_tol)
            except InvalidState as exc:
                raise ToleranceNotMet(f"state at t={t:g} violates density-matrix invariants: {exc}") from exc
        return self


def dissipator(A):
    """Superoperator of ``rho -> A rho A^+ - {A^+ A, rho}/2``."""
    A = as_operator(A)
    d = A.shape[0]
    eye = np.eye(d)
    AdA = dagger(A) @ A
    return np.kron(A.conj(), A) - 0.5 * (np.kron(eye, AdA) + np.kron(AdA.T, eye))


def gksl_liouvillian(H, jumps=()):
    """GKSL generator ``-i[H, .] + sum_k rate_k D[A_k]``.

    ``jumps`` is an iterable of ``(rate, A)`` pairs with non-negative rates.
    """
    H = as_operator(H, "Hamiltonian")
    if not is_hermitian(H):
        raise NonHermitianHamiltonian("Hamiltonian is not Hermitian")
    gen = commutator_superop(H)
    for rate, A in jumps:
        if rate < 0:
            raise NegativeRate(f"jump rate {rate} is negative")
        if rate == 0:
            continue
        A = as_operator(A, "jump operator")
        if A.shape != H.shape:
            raise DimensionMismatch(f"jump operator shape {A.shape} does not match Hamiltonian {H.shape}")
        gen = gen + rate * dissipator(A)
    return gen


def _check_times(times):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-d sequence")
    if times[0] != 0.0:
        raise ValueError("times must start at 0")
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be ascending")
    return times


def _propagate_expm(gen, v0, times):
    out = np.empty((times.size, v0.size), dtype=complex)
    out[0] = v0
    dts = np.diff(times)
    cache = {}
    v = v0
    for i, dt in enumerate(dts, start=1):
        key = round(float(dt), 14)
        if key not in cache:
            cache[key] = matrix_exponential(gen * dt)
        v = cache[key] @ v
        out[i] = v
    return out


def _propagate_rk45(gen, v0, times, rtol, atol):
    if times[-1] == 0.0:
        return np.tile(v0, (times.size, 1))
    sol = solve_ivp(
        lambda t, y: gen @ y,
        (0.0, times[-1]),
        v0,
        method="RK45",
        t_eval=times,
        rtol=rtol,
        atol=atol,
    )
    if sol.status != 0:
        raise StepSizeUnderflow(f"adaptive integration stalled: {sol.message}")
    return sol.y.T


def propagate(gen, rho0, times, method="auto", rtol=RTOL, atol=ATOL, validate=True):
    """Integrate ``d rho/dt = gen rho`` and sample on ``times``.

    ``method`` is ``"rk45"`` (adaptive Dormand-Prince), ``"expm"`` (exact
    stepping with cached propagators per distinct step) or ``"auto"``, which
    uses RK45 unless the generator is stiff over the horizon or the adaptive
    solver stalls, in which case it falls back to exact stepping.
    """
    gen = np.asarray(gen, dtype=complex)
    d = superop_dim(gen)
    rho0 = check_density_matrix(rho0)
    if rho0.shape[0] != d:
        raise DimensionMismatch(f"state of dim {rho0.shape[0]} does not match generator of dim {d}")
    times = _check_times(times)
    v0 = vectorize(rho0)

    if method == "expm":
        vs = _propagate_expm(gen, v0, times)
    elif method == "rk45":
        vs = _propagate_rk45(gen, v0, times, rtol, atol)
    elif method == "auto":
        stiffness = np.linalg.norm(gen, 1) * times[-1]
        if stiffness > STIFFNESS_GUARD:
            vs = _propagate_expm(gen, v0, times)
        else:
            try:
                vs = _propagate_rk45(gen, v0, times, rtol, atol)
            except StepSizeUnderflow:
                vs = _propagate_expm(gen, v0, times)
    else:
        raise ValueError(f"unknown propagation method {method!r}")

    states = vs.reshape(times.size, d, d, order="C").transpose(0, 2, 1)
    traj = Trajectory(times=times, states=np.ascontiguousarray(states))
    if validate:
        traj.validate()
    return traj


def kernel_dimension(gen, rtol=KERNEL_RTOL):
    s = scipy.linalg.svdvals(np.asarray(gen, dtype=complex))
    if s[0] == 0:
        return s.size
    return int(np.sum(s < rtol * s[0]))


def steady_state(gen, rtol=KERNEL_RTOL, residual_tol=1e-10):
    """Unique stationary state of a generator.

    Solves ``gen v = 0`` with the trace condition appended as an extra row,
    then Hermitizes and renormalizes.
    """
    gen = np.asarray(gen, dtype=complex)
    d = superop_dim(gen)
    kdim = kernel_dimension(gen, rtol)
    if kdim != 1:
        raise DegenerateKernel(f"generator kernel has dimension {kdim}, expected 1", kernel_dim=kdim)
    A = np.vstack([gen, trace_row(d)[None, :]])
    b = np.zeros(A.shape[0], dtype=complex)
    b[-1] = 1.0
    v, *_ = np.linalg.lstsq(A, b, rcond=None)
    rho = unvectorize(v, d)
    rho = 0.5 * (rho + dagger(rho))
    rho = rho / np.trace(rho)
    lam_min = np.linalg.eigvalsh(rho)[0]
    if lam_min < -1e-8:
        raise NoPhysicalState(f"kernel vector is not positive semidefinite (min eigenvalue {lam_min:.3e})")
    resid = np.linalg.norm(gen @ vectorize(rho))
    if resid > residual_tol * max(1.0, np.linalg.norm(gen, 2)):
        raise ToleranceNotMet(f"steady-state residual {resid:.3e} too large")
    return rho


def expectation(A, rho):
    """``Tr[A rho]`` as a complex number."""
    A = np.asarray(A, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    if A.shape != rho.shape:
        raise DimensionMismatch(f"operator {A.shape} and state {rho.shape} differ in shape")
    return complex(np.einsum("ij,ji->", A, rho))
