"""Dense complex linear algebra for composite quantum systems.

Everything here works on plain ``numpy`` arrays: operators and density
matrices are square ``complex128`` matrices, composite systems are described
by a tuple of local dimensions (subsystem ordering matches the Kronecker
ordering, first factor = leftmost subsystem, row-major joint indexing).

All functions are pure; nothing is modified in place.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "kron",
    "dagger",
    "partial_transpose",
    "partial_trace",
    "eig_hermitian",
    "trace_norm",
]


def _as_square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    return a


def _check_dims(a: np.ndarray, dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise ValueError(f"local dimensions must be positive, got {dims}")
    if int(np.prod(dims)) != a.shape[0]:
        raise ValueError(
            f"subsystem dimensions {dims} do not multiply to matrix "
            f"dimension {a.shape[0]}"
        )
    return dims


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; joint dimension is the product of the factors."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a, dtype=complex).conj().T


def partial_transpose(
    rho: np.ndarray, dims: Sequence[int], subsystem: int
) -> np.ndarray:
    """Transpose the indices of one subsystem only.

    Involutive and trace preserving; Hermiticity is preserved as well.
    ``subsystem`` indexes into ``dims``.
    """
    rho = _as_square(rho, "rho")
    dims = _check_dims(rho, dims)
    k = len(dims)
    if not 0 <= subsystem < k:
        raise ValueError(f"subsystem index {subsystem} out of range for {dims}")
    t = rho.reshape(dims + dims)
    t = np.swapaxes(t, subsystem, k + subsystem)
    return t.reshape(rho.shape).copy()


def partial_trace(
    rho: np.ndarray, dims: Sequence[int], keep: int | Iterable[int]
) -> np.ndarray:
    """Reduced matrix over the kept subsystems (input trace is preserved).

    ``keep`` is a subsystem index or an iterable of them; the kept subsystems
    stay in their original order.
    """
    rho = _as_square(rho, "rho")
    dims = _check_dims(rho, dims)
    k = len(dims)
    keep_set = {keep} if isinstance(keep, (int, np.integer)) else set(int(i) for i in keep)
    if not keep_set or not keep_set.issubset(range(k)):
        raise ValueError(f"keep={sorted(keep_set)} invalid for {k} subsystems")

    t = rho.reshape(dims + dims)
    # Trace out from the highest subsystem index down so that the axis
    # positions of the lower, still-untraced subsystems stay valid.
    n_left = k
    for i in sorted(set(range(k)) - keep_set, reverse=True):
        t = np.trace(t, axis1=i, axis2=n_left + i)
        n_left -= 1
    d_kept = int(np.prod([dims[i] for i in sorted(keep_set)]))
    return t.reshape(d_kept, d_kept)


def eig_hermitian(
    a: np.ndarray, herm_tol: float = 1e-10
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, V)`` with eigenvalues ``w`` real and ascending and the
    columns of ``V`` the corresponding orthonormal eigenvectors.  The input
    must be Hermitian to ``herm_tol`` in relative Frobenius norm; symmetrize
    with ``(a + dagger(a)) / 2`` first if drift is expected.
    """
    a = _as_square(a)
    norm = np.linalg.norm(a)
    deviation = np.linalg.norm(a - a.conj().T)
    if norm > 0 and deviation / norm > herm_tol:
        raise ValueError(
            "matrix is not Hermitian: ||A - A^dag||_F / ||A||_F = "
            f"{deviation / norm:.3e} exceeds {herm_tol:.1e}"
        )
    w, v = np.linalg.eigh((a + a.conj().T) / 2)
    return w, v


def trace_norm(a: np.ndarray) -> float:
    """Sum of singular values (= sum of |eigenvalues| for Hermitian input)."""
    a = _as_square(a)
    return float(np.linalg.svd(a, compute_uv=False).sum())
