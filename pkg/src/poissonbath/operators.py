"""Dense operator algebra and Liouville-space plumbing.

Operators are plain complex ``numpy`` arrays of shape ``(d, d)``.
Superoperators act on column-stacked operators, so they have shape
``(d*d, d*d)`` and obey::

    vec(A @ X @ B) == kron(B.T, A) @ vec(X)

which gives ``left(A) = kron(I, A)`` and ``right(B) = kron(B.T, I)``.

Single-qubit basis ordering is ``(|g>, |e>)``; with that choice
``sigma_z = diag(-1, 1)`` and ``sigma_minus = |g><e|``.
"""
from typing import Callable, NamedTuple

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NonHermitianInput, Overflow

HERMITIAN_RTOL = 1e-10
# relative eigenvalue threshold below which sin(a*sqrt(x))/sqrt(x) uses its x -> 0 limit
SINGULAR_RTOL = 1e-12


class HermitianEig(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_operator(M, name="operator"):
    """Return ``M`` as a finite, square complex array."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{name} must be a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def dagger(M):
    return np.conj(np.transpose(M))


def is_hermitian(M, rtol=HERMITIAN_RTOL):
    M = np.asarray(M)
    scale = max(np.linalg.norm(M), 1.0)
    return np.max(np.abs(M - dagger(M)), initial=0.0) <= rtol * scale


def hermitian_eig(M, rtol=HERMITIAN_RTOL):
    """Eigendecomposition of a Hermitian operator, eigenvalues ascending.

    Raises :class:`NonHermitianInput` when ``M`` deviates from its adjoint by
    more than ``rtol * ||M||``.
    """
    M = as_operator(M)
    if not is_hermitian(M, rtol):
        raise NonHermitianInput("matrix is not Hermitian within tolerance")
    w, V = np.linalg.eigh(0.5 * (M + dagger(M)))
    return HermitianEig(w, V)


def operator_function(M, f: Callable, eig=None):
    """Evaluate ``f(M)`` as ``V diag(f(w)) V^dagger``.

    ``f`` is applied to the real eigenvalue array and must be vectorized.
    A precomputed :class:`HermitianEig` can be passed to skip the decomposition.
    """
    if eig is None:
        eig = hermitian_eig(M)
    w, V = eig
    fw = np.asarray(f(w))
    return (V * fw) @ dagger(V)


def sinc_sqrt(a, x, scale=None):
    """``sin(a*sqrt(x))/sqrt(x)`` elementwise with the removable point ``x=0 -> a``.

    Eigenvalues below ``SINGULAR_RTOL * scale`` (``scale`` defaults to
    ``max(x)``) are treated as zero; tiny negative round-off is clipped.
    """
    x = np.asarray(x, dtype=float)
    if scale is None:
        scale = np.max(np.abs(x), initial=0.0)
    small = x < SINGULAR_RTOL * max(scale, 1e-300)
    root = np.sqrt(np.where(small, 1.0, x))
    return np.where(small, a, np.sin(a * root) / root)


def matrix_exponential(M):
    """Matrix exponential by Pade scaling-and-squaring.

    Works for operators and superoperators alike; raises :class:`Overflow`
    when the result is not representable.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    with np.errstate(over="ignore", invalid="ignore"):
        E = scipy.linalg.expm(M)
    if not np.all(np.isfinite(E)):
        raise Overflow("matrix exponential overflowed")
    return E


def kron(A, B):
    return np.kron(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex))


def kron_all(*ops):
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def vectorize(rho):
    """Column-stack an operator into a vector."""
    rho = np.asarray(rho)
    return rho.reshape(-1, order="F")


def unvectorize(v, dim=None):
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.shape[0])))
    if dim * dim != v.shape[0]:
        raise DimensionMismatch(f"vector of length {v.shape[0]} is not a vectorized {dim}x{dim} operator")
    return v.reshape(dim, dim, order="F")


def superop_dim(S):
    """Hilbert-space dimension underlying a superoperator."""
    n = np.asarray(S).shape[0]
    d = int(round(np.sqrt(n)))
    if d * d != n:
        raise DimensionMismatch(f"superoperator side {n} is not a perfect square")
    return d


def left_superop(A):
    A = as_operator(A)
    return np.kron(np.eye(A.shape[0]), A)


def right_superop(B):
    B = as_operator(B)
    return np.kron(B.T, np.eye(B.shape[0]))


def left_right_superops(A):
    """Return ``(A_+, A_-)`` with ``A_+ rho = A rho`` and ``A_- rho = rho A``."""
    return left_superop(A), right_superop(A)


def sandwich_superop(A, B=None):
    """Superoperator of ``rho -> A rho B`` (``B`` defaults to ``A^dagger``)."""
    A = as_operator(A)
    B = dagger(A) if B is None else as_operator(B)
    if A.shape != B.shape:
        raise DimensionMismatch("operands have different shapes")
    return np.kron(B.T, A)


def commutator_superop(H):
    """Superoperator of ``rho -> -i [H, rho]``."""
    H = as_operator(H)
    eye = np.eye(H.shape[0])
    return -1j * (np.kron(eye, H) - np.kron(H.T, eye))


def apply_superop(S, rho):
    rho = np.asarray(rho, dtype=complex)
    if S.shape[1] != rho.size:
        raise DimensionMismatch(f"superoperator of side {S.shape[1]} cannot act on {rho.shape} operator")
    return unvectorize(S @ vectorize(rho), rho.shape[0])


def trace_row(dim):
    """Row vector ``t`` with ``t @ vec(rho) == trace(rho)``."""
    return vectorize(np.eye(dim)).astype(complex)


# single-qubit operators, basis (|g>, |e>)
def sigma_minus():
    return np.array([[0, 1], [0, 0]], dtype=complex)


def sigma_plus():
    return np.array([[0, 0], [1, 0]], dtype=complex)


def sigma_z():
    return np.array([[-1, 0], [0, 1]], dtype=complex)


def sigma_x():
    return np.array([[0, 1], [1, 0]], dtype=complex)


def sigma_y():
    return np.array([[0, 1j], [-1j, 0]], dtype=complex)


def projector(dim, k):
    P = np.zeros((dim, dim), dtype=complex)
    P[k, k] = 1.0
    return P


def ket(dim, k):
    v = np.zeros(dim, dtype=complex)
    v[k] = 1.0
    return v
