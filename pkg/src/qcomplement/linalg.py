"""Small dense complex-matrix kernel for one- and two-qubit operators.

Matrices are plain ``numpy`` arrays of shape (2, 2) or (4, 4). The joint
two-qubit basis is ordered ``|bob, alice>`` with flat index
``2 * bob + alice``, so Alice's operators act as ``kron(I, M)``.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

DEFAULT_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class HermitianEig(NamedTuple):
    """Ascending eigenvalues and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


class PolarFactors(NamedTuple):
    """Left polar decomposition ``M = P @ U``."""

    psd_part: np.ndarray
    unitary_part: np.ndarray


def as_matrix(m, dims=(2, 4)) -> np.ndarray:
    """Coerce ``m`` to a complex square matrix with an allowed dimension."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] not in dims:
        raise ValueError(f"expected a square matrix of dimension {dims}, got shape {arr.shape}")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def is_hermitian(m, tol: float = DEFAULT_TOL) -> bool:
    m = as_matrix(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def is_unitary(m, tol: float = DEFAULT_TOL) -> bool:
    m = as_matrix(m)
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= tol)


def is_psd(m, tol: float = DEFAULT_TOL) -> bool:
    if not is_hermitian(m, tol):
        return False
    return bool(eig_hermitian(m).eigenvalues[0] >= -tol)


def _require_hermitian(m: np.ndarray, tol: float) -> None:
    dev = np.max(np.abs(m - m.conj().T))
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (max |H - H^dagger| = {dev:.3e} > {tol:.1e})")


def _eig2(h: np.ndarray) -> HermitianEig:
    p = h[0, 0].real
    r = h[1, 1].real
    # symmetrise the off-diagonal so tiny Hermiticity errors do not bias the result
    q = 0.5 * (h[0, 1] + np.conj(h[1, 0]))
    half_diff = 0.5 * (p - r)
    mean = 0.5 * (p + r)
    radius = np.hypot(half_diff, abs(q))
    if radius == 0.0:
        return HermitianEig(np.array([mean, mean]), np.eye(2, dtype=complex))
    if q == 0:
        # already diagonal: keep the basis exact
        vecs = np.eye(2, dtype=complex) if p <= r else np.eye(2, dtype=complex)[:, ::-1]
        return HermitianEig(np.array([min(p, r), max(p, r)]), vecs)
    # rotation half-angle; hypot avoids forming (p - r)^2 + 4|q|^2 directly
    half = 0.5 * np.arctan2(abs(q), half_diff)
    c, s = np.cos(half), np.sin(half)
    # exp(i arg q) stays finite for subnormal q, unlike q / |q|
    phase = np.exp(1j * np.angle(q))
    v_hi = np.array([c, np.conj(phase) * s], dtype=complex)
    v_lo = np.array([-phase * s, c], dtype=complex)
    vals = np.array([mean - radius, mean + radius])
    return HermitianEig(vals, np.column_stack([v_lo, v_hi]))


def eig_hermitian(h, tol: float = DEFAULT_TOL) -> HermitianEig:
    """Eigen-decompose a 2x2 or 4x4 Hermitian matrix, eigenvalues ascending.

    The 2x2 case is solved in closed form; the 4x4 case defers to LAPACK.
    Raises ``ValueError`` if ``h`` deviates from Hermitian by more than ``tol``.
    """
    h = as_matrix(h)
    _require_hermitian(h, tol)
    if h.shape[0] == 2:
        return _eig2(h)
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return HermitianEig(w, v)


def kron(b, a) -> np.ndarray:
    """Tensor product with ``b`` on Bob's (first) factor and ``a`` on Alice's."""
    b = as_matrix(b, dims=(2,))
    a = as_matrix(a, dims=(2,))
    return np.kron(b, a)


def partial_trace_alice(rho) -> np.ndarray:
    """Trace out Alice's (second) qubit of a 4x4 operator, leaving Bob's 2x2 block.

    Linear; no positivity or normalisation is assumed.
    """
    rho = as_matrix(rho, dims=(4,))
    return np.einsum("iaja->ij", rho.reshape(2, 2, 2, 2))


def partial_trace_bob(rho) -> np.ndarray:
    rho = as_matrix(rho, dims=(4,))
    return np.einsum("aiaj->ij", rho.reshape(2, 2, 2, 2))


def polar_decompose(m) -> PolarFactors:
    """Left polar decomposition of a 2x2 matrix via the SVD.

    For singular input the SVD already completes the unitary on the null
    space, so any rank is handled.
    """
    m = as_matrix(m, dims=(2,))
    w, s, vh = np.linalg.svd(m)
    p = (w * s) @ w.conj().T
    return PolarFactors(0.5 * (p + p.conj().T), w @ vh)


def trace_norm(h, tol: float = DEFAULT_TOL) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(eig_hermitian(h, tol).eigenvalues)))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
