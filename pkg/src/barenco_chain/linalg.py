"""Dense complex linear algebra for the small (2, 4, 8) matrices used by the simulator.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The Hermitian
eigensolver is a cyclic Jacobi iteration (see :mod:`barenco_chain._kernels`);
unitary exponentials are assembled from its eigendecomposition.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import TYPE_CHECKING

import numpy as np

from barenco_chain import _kernels
from barenco_chain.errors import NoConvergenceError, NotHermitianError

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

HERMITIAN_RTOL = 1e-12
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 50

IDENTITY2 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

for _m in (IDENTITY2, SIGMA_X, SIGMA_Y, SIGMA_Z):
    _m.flags.writeable = False


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in ascending order; column ``j`` of ``eigenvectors`` pairs with ``eigenvalues[j]``."""

    eigenvalues: NDArray[np.float64]
    eigenvectors: NDArray[np.complex128]

    def reconstruct(self) -> NDArray[np.complex128]:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(a: ArrayLike) -> NDArray[np.complex128]:
    """Coerce to a square complex128 matrix, rejecting anything else."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def kron(*factors: ArrayLike) -> NDArray[np.complex128]:
    """Kronecker product with standard block ordering: ``a[i, j] * b`` fills block ``(i, j)``."""
    if not factors:
        raise ValueError("kron needs at least one factor")
    return reduce(np.kron, (as_matrix(f) for f in factors))


def adjoint(a: ArrayLike) -> NDArray[np.complex128]:
    return as_matrix(a).conj().T


def hermiticity_defect(h: ArrayLike) -> float:
    m = as_matrix(h)
    return float(np.max(np.abs(m - m.conj().T)))


def check_hermitian(h: ArrayLike) -> NDArray[np.complex128]:
    m = as_matrix(h)
    scale = float(np.max(np.abs(m)))
    defect = hermiticity_defect(m)
    if defect > HERMITIAN_RTOL * scale:
        raise NotHermitianError(f"max|H - H^dagger| = {defect:.3e} exceeds {HERMITIAN_RTOL:g} * max|H| = {scale:.3e}")
    return m


def herm_eig(h: ArrayLike) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues come back sorted ascending (stable for ties). Each eigenvector
    is rephased so that its largest-magnitude entry is real and positive, which
    makes the output reproducible for identical input. Within a degenerate
    eigenspace any orthonormal basis may be returned.

    Raises
    ------
    NotHermitianError
        If ``max|H - H^dagger| > 1e-12 max|H|``.
    NoConvergenceError
        If the off-diagonal norm is still above ``1e-13 ||H||_F`` after 50 sweeps.
    """
    m = check_hermitian(h)
    a = 0.5 * (m + m.conj().T)
    v = np.eye(a.shape[0], dtype=np.complex128)
    sweeps = _kernels.jacobi_inplace(a, v, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    if sweeps < 0:
        raise NoConvergenceError(f"Jacobi did not converge within {JACOBI_MAX_SWEEPS} sweeps")
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    v = v[:, order]
    for j in range(v.shape[1]):
        i = np.argmax(np.abs(v[:, j]))
        pivot = v[i, j]
        v[:, j] *= np.conj(pivot) / abs(pivot)
        v[i, j] = abs(pivot)
    return EigenDecomposition(eigenvalues=w, eigenvectors=v)


def expm_i(h: ArrayLike, s: float) -> NDArray[np.complex128]:
    """Return ``exp(-i s H)`` for Hermitian ``H`` via its eigendecomposition."""
    eig = herm_eig(h)
    v = eig.eigenvectors
    return (v * np.exp(-1j * s * eig.eigenvalues)) @ v.conj().T


def unitarity_defect(u: ArrayLike) -> float:
    """Largest entrywise deviation of ``U^dagger U`` from the identity."""
    m = as_matrix(u)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def block_diag(*blocks: ArrayLike) -> NDArray[np.complex128]:
    mats = [as_matrix(b) for b in blocks]
    n = sum(b.shape[0] for b in mats)
    out = np.zeros((n, n), dtype=np.complex128)
    i = 0
    for b in mats:
        d = b.shape[0]
        out[i : i + d, i : i + d] = b
        i += d
    return out
