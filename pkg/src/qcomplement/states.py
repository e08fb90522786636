"""Two-qubit states, Schmidt form, and the entanglement measures used throughout.

The pure-state entanglement measure is ``E = 2 * lambda_min`` of either
reduced density matrix. Its mixed-state extension (the generalized
entanglement of formation) is evaluated through the concurrence.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    SIGMA_Y,
    as_matrix,
    eig_hermitian,
    partial_trace_alice,
    partial_trace_bob,
)

NORM_TOL = 1e-12
STATE_TOL = 1e-10
# rounding can push a psd spectrum slightly negative; deeper dips are errors
PSD_CLIP = 1e-12
# spectral weight below this is treated as absent when building decompositions
CLIP_TOL = 1e-12

_YY = np.kron(SIGMA_Y, SIGMA_Y)


@dataclass(frozen=True)
class PureState:
    """Amplitudes ``(a00, a01, a10, a11)`` in the ``|bob, alice>`` basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.shape != (4,):
            raise ValueError("a two-qubit pure state needs exactly 4 amplitudes")
        norm = np.sum(np.abs(amp) ** 2)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalised (sum |a|^2 = {norm!r})")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        amp = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(amp / np.linalg.norm(amp))

    @classmethod
    def canonical(cls, a: float) -> "PureState":
        """``sqrt(a)|00> + sqrt(1 - a)|11>``."""
        if not 0.0 <= a <= 1.0:
            raise ValueError(f"Schmidt weight must lie in [0, 1], got {a}")
        return cls(np.array([np.sqrt(a), 0.0, 0.0, np.sqrt(1.0 - a)], dtype=complex))

    @property
    def matrix(self) -> np.ndarray:
        """Amplitudes reshaped so that row = Bob index, column = Alice index."""
        return self.amplitudes.reshape(2, 2)

    def density(self) -> "JointDensity":
        return JointDensity(np.outer(self.amplitudes, self.amplitudes.conj()))

    def reduced_bob(self) -> "ReducedState":
        m = self.matrix
        return ReducedState(m @ m.conj().T)

    def reduced_alice(self) -> "ReducedState":
        m = self.matrix
        return ReducedState(m.T @ m.conj())


def _clean_density(m: np.ndarray, dim: int) -> np.ndarray:
    m = as_matrix(m, dims=(dim,))
    if np.max(np.abs(m - m.conj().T)) > STATE_TOL:
        raise ValueError("density matrix is not Hermitian")
    m = 0.5 * (m + m.conj().T)
    tr = np.trace(m).real
    if abs(tr - 1.0) > STATE_TOL:
        raise ValueError(f"density matrix trace is {tr!r}, expected 1")
    eig = eig_hermitian(m)
    lo = eig.eigenvalues[0]
    if lo < -PSD_CLIP:
        raise ValueError(f"density matrix has negative eigenvalue {lo!r}")
    if lo < 0.0:
        w = np.clip(eig.eigenvalues, 0.0, None)
        v = eig.eigenvectors
        m = (v * w) @ v.conj().T
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class JointDensity:
    """A 4x4 two-qubit density operator in the ``|bob, alice>`` basis."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _clean_density(self.matrix, 4))

    def reduced_bob(self) -> "ReducedState":
        return ReducedState(partial_trace_alice(self.matrix))

    def reduced_alice(self) -> "ReducedState":
        return ReducedState(partial_trace_bob(self.matrix))


@dataclass(frozen=True)
class ReducedState:
    """A single-qubit density operator."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _clean_density(self.matrix, 2))


@dataclass(frozen=True)
class SchmidtForm:
    """Local unitaries taking a state to ``sqrt(w)|00> + sqrt(1-w)|11>``.

    ``schmidt_weight`` is the smaller Schmidt weight ``w <= 1/2``; applying
    ``kron(bob_unitary, alice_unitary)`` to the source state yields the
    canonical form.
    """

    schmidt_weight: float
    bob_unitary: np.ndarray = field(repr=False)
    alice_unitary: np.ndarray = field(repr=False)

    def local_unitary(self) -> np.ndarray:
        return np.kron(self.bob_unitary, self.alice_unitary)


def as_density(state) -> np.ndarray:
    """Return the 4x4 density matrix for a PureState, JointDensity, or array."""
    if isinstance(state, PureState):
        return np.outer(state.amplitudes, state.amplitudes.conj())
    if isinstance(state, JointDensity):
        return state.matrix
    arr = np.asarray(state, dtype=complex)
    if arr.shape == (4,):
        return np.outer(arr, arr.conj())
    return as_matrix(arr, dims=(4,))


def _reduced_matrix(state) -> np.ndarray:
    if isinstance(state, ReducedState):
        return state.matrix
    return as_matrix(state, dims=(2,))


def schmidt_decompose(psi: PureState) -> SchmidtForm:
    """Schmidt weight and local unitaries of a two-qubit pure state."""
    w, s, vh = np.linalg.svd(psi.matrix)
    # numpy orders singular values descending; the canonical |00> term carries the smaller one
    u_small, u_large = w[:, 1], w[:, 0]
    v_small, v_large = vh[1, :], vh[0, :]
    bob = np.vstack([u_small.conj(), u_large.conj()])
    alice = np.vstack([v_small.conj(), v_large.conj()])
    weight = float(min(s[1] ** 2, 0.5))
    return SchmidtForm(weight, bob, alice)


def canonicalize(psi: PureState) -> tuple[PureState, SchmidtForm]:
    """Return the canonical ``sqrt(w)|00> + sqrt(1-w)|11>`` form and its Schmidt record."""
    form = schmidt_decompose(psi)
    return PureState.canonical(form.schmidt_weight), form


def entanglement_pure(reduced) -> float:
    """``E = 2 * lambda_min`` of a reduced single-qubit state."""
    m = _reduced_matrix(reduced)
    lo = eig_hermitian(m).eigenvalues[0]
    return float(min(max(2.0 * lo, 0.0), 1.0))


def entanglement_of_state(psi: PureState) -> float:
    return entanglement_pure(psi.reduced_bob())


def entropy_of_entanglement(lam: float) -> float:
    """Binary entropy in bits of the reduced-state spectrum ``{lam, 1 - lam}``."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"eigenvalue must lie in [0, 1], got {lam}")
    out = 0.0
    for p in (lam, 1.0 - lam):
        if p > 0.0:
            out -= p * np.log2(p)
    return float(out)


def concurrence_pure(psi: PureState) -> float:
    a = psi.amplitudes
    return float(min(2.0 * abs(a[0] * a[3] - a[1] * a[2]), 1.0))


def concurrence_mixed(rho) -> float:
    """Wootters concurrence ``max(0, mu1 - mu2 - mu3 - mu4)``.

    The ``mu_k`` (square roots of the eigenvalues of
    ``rho (Y x Y) rho* (Y x Y)``) are the singular values of
    ``tau = V^T (Y x Y) V`` where the columns of ``V`` are the eigenvectors
    of ``rho`` scaled by the square roots of their weights. Working with
    ``tau`` avoids square roots of tiny eigenvalues, which would cost half
    the significant digits for low-rank states.
    """
    rho = as_density(rho)
    eig = eig_hermitian(rho)
    keep = eig.eigenvalues > 0.0
    v = eig.eigenvectors[:, keep] * np.sqrt(eig.eigenvalues[keep])
    tau = v.T @ _YY @ v
    mu = np.zeros(4)
    if tau.size:
        sv = np.linalg.svd(tau, compute_uv=False)
        mu[: sv.size] = sv
    return float(min(max(mu[0] - mu[1] - mu[2] - mu[3], 0.0), 1.0))


def entanglement_from_concurrence(c):
    """Map concurrence to the ``2 * lambda_min`` measure: ``1 - sqrt(1 - C^2)``."""
    c = np.clip(c, 0.0, 1.0)
    # 1 - sqrt(1 - c^2) written without cancellation for small c
    return c * c / (1.0 + np.sqrt(1.0 - c * c))


def eof_generalized(rho) -> float:
    """Convex-roof extension of ``E = 2 * lambda_min`` to mixed two-qubit states.

    Because ``1 - sqrt(1 - C^2)`` is convex and increasing in the
    concurrence, and Wootters' optimal decomposition has every member at
    concurrence ``C(rho)``, the minimum over decompositions is attained in
    closed form.
    """
    return float(entanglement_from_concurrence(concurrence_mixed(rho)))


def decomposition_average(rho, mixing: np.ndarray) -> float:
    """Average pure-state entanglement of the decomposition generated by ``mixing``.

    ``mixing`` is a ``K x K`` unitary (``K >= rank``); its first ``rank``
    columns act on the scaled eigenvectors ``sqrt(p_i)|e_i>`` of ``rho``.
    Every pure-state decomposition of ``rho`` arises this way, so the
    result is an upper bound on :func:`eof_generalized`.
    """
    rho = as_density(rho)
    eig = eig_hermitian(rho)
    keep = eig.eigenvalues > CLIP_TOL
    scaled = (eig.eigenvectors[:, keep] * np.sqrt(eig.eigenvalues[keep])).T
    vecs = mixing[:, : scaled.shape[0]] @ scaled
    weights = np.sum(np.abs(vecs) ** 2, axis=1)
    mats = vecs.reshape(-1, 2, 2)
    raw = 2.0 * np.abs(mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0])
    safe = np.where(weights > 0, weights, 1.0)
    conc = np.where(weights > 0, raw / safe, 0.0)
    return float(np.sum(weights * entanglement_from_concurrence(conc)))


def random_pure_state(rng: np.random.Generator) -> PureState:
    z = rng.normal(size=4) + 1j * rng.normal(size=4)
    return PureState.normalized(z)


def random_density(rng: np.random.Generator, rank: int | None = None) -> JointDensity:
    """Random two-qubit state of the given rank (1-4) from a Ginibre ensemble."""
    if rank is None:
        rank = int(rng.integers(1, 5))
    if not 1 <= rank <= 4:
        raise ValueError("rank must be between 1 and 4")
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = g @ g.conj().T
    return JointDensity(rho / np.trace(rho).real)


def bell_state(kind: str = "phi+") -> PureState:
    s = 1.0 / np.sqrt(2.0)
    table = {
        "phi+": [s, 0, 0, s],
        "phi-": [s, 0, 0, -s],
        "psi+": [0, s, s, 0],
        "psi-": [0, s, -s, 0],
    }
    try:
        return PureState(np.array(table[kind], dtype=complex))
    except KeyError:
        raise ValueError(f"unknown Bell state {kind!r}") from None


def classical_mixture() -> JointDensity:
    """``(|00><00| + |11><11|) / 2``: perfectly correlated but separable."""
    return JointDensity(np.diag([0.5, 0.0, 0.0, 0.5]).astype(complex))
