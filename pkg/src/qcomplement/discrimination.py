"""Bob's minimum-error guess of Alice's outcome.

Bob holds ``rho_B,0`` with prior ``pi_0`` or ``rho_B,1`` with prior ``pi_1``.
The optimal two-element measurement follows from the sign structure of
``T = pi_1 rho_B,1 - pi_0 rho_B,0``: the positive eigenspace of ``T``
(plus its null space) decides "Alice obtained 1", the negative eigenspace
decides "Alice obtained 0".
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import DEFAULT_TOL, I2, as_matrix, eig_hermitian, trace_norm
from .measurement import OutcomeEnsemble, PovmParams, normalization
from .states import ReducedState

PRIOR_TOL = 1e-12
# eigenvalues of T smaller than this in magnitude count as zero
ZERO_EIG = 1e-12


def _mat(state) -> np.ndarray:
    if state is None:
        return np.eye(2, dtype=complex) / 2
    if isinstance(state, ReducedState):
        return state.matrix
    return as_matrix(state, dims=(2,))


@dataclass(frozen=True)
class DiscriminationProblem:
    """Two single-qubit hypotheses with priors.

    A ``None`` state stands for a zero-prior hypothesis; it never
    contributes to ``T``.
    """

    prior0: float
    prior1: float
    state0: Optional[ReducedState]
    state1: Optional[ReducedState]

    def __post_init__(self):
        if min(self.prior0, self.prior1) < -PRIOR_TOL or abs(self.prior0 + self.prior1 - 1.0) > PRIOR_TOL:
            raise ValueError(f"priors must be a probability pair, got ({self.prior0}, {self.prior1})")

    @classmethod
    def from_ensemble(cls, ens: OutcomeEnsemble) -> "DiscriminationProblem":
        p0, p1 = ens.probs
        total = p0 + p1
        return cls(p0 / total, p1 / total, ens.bob_states[0], ens.bob_states[1])

    def weighted(self, i: int) -> np.ndarray:
        prior = (self.prior0, self.prior1)[i]
        state = (self.state0, self.state1)[i]
        if state is None:
            return np.zeros((2, 2), dtype=complex)
        return prior * _mat(state)


@dataclass(frozen=True)
class HelstromSolution:
    t_matrix: np.ndarray
    eigenvalues: np.ndarray
    n_negative: int
    n_positive: int
    n_zero: int
    pi0: np.ndarray
    pi1: np.ndarray
    err_given0: float
    err_given1: float
    gain0: float
    gain1: float
    avg_gain: float

    @property
    def avg_error(self) -> float:
        return 0.5 * (1.0 - self.avg_gain)


def build_t(problem: DiscriminationProblem) -> np.ndarray:
    t = problem.weighted(1) - problem.weighted(0)
    return 0.5 * (t + t.conj().T)


def split_spectrum(t, tol: float = DEFAULT_TOL):
    """Eigenvalues of ``T`` with the projectors deciding 0 and 1.

    Returns ``(pi0, pi1, eigenvalues, (n_negative, n_positive, n_zero))``.
    Zero eigenvalues join ``pi1``; the choice does not change the error.
    """
    eig = eig_hermitian(t, tol)
    vals, vecs = eig.eigenvalues, eig.eigenvectors
    neg = vals < -ZERO_EIG
    pos = vals > ZERO_EIG
    sel = vecs[:, neg]
    pi0 = sel @ sel.conj().T
    pi1 = np.eye(vals.size, dtype=complex) - pi0
    counts = (int(neg.sum()), int(pos.sum()), int(vals.size - neg.sum() - pos.sum()))
    return pi0, pi1, vals, counts


def optimal_povm(t, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Optimal projectors ``(pi0, pi1)``: the negative eigenspace of ``T`` decides 0."""
    pi0, pi1, _, _ = split_spectrum(t, tol)
    return pi0, pi1


def error_probabilities(pi0, pi1, problem: DiscriminationProblem) -> tuple[float, float]:
    """``P(e | A=0) = Tr[pi1 rho_B,0]`` and ``P(e | A=1) = Tr[pi0 rho_B,1]``.

    An undefined conditional state has no error contribution.
    """
    e0 = 0.0 if problem.state0 is None else float(np.trace(pi1 @ _mat(problem.state0)).real)
    e1 = 0.0 if problem.state1 is None else float(np.trace(pi0 @ _mat(problem.state1)).real)
    return e0, e1


def gains(err_given0: float, err_given1: float, problem: DiscriminationProblem) -> tuple[float, float, float]:
    g0 = 1.0 - 2.0 * err_given0
    g1 = 1.0 - 2.0 * err_given1
    return g0, g1, problem.prior0 * g0 + problem.prior1 * g1


def solve(problem: DiscriminationProblem) -> HelstromSolution:
    t = build_t(problem)
    pi0, pi1, vals, (n_neg, n_pos, n_zero) = split_spectrum(t)
    e0, e1 = error_probabilities(pi0, pi1, problem)
    g0, g1, g = gains(e0, e1, problem)
    return HelstromSolution(t, vals, n_neg, n_pos, n_zero, pi0, pi1, e0, e1, g0, g1, g)


def helstrom_bound(t) -> float:
    """Minimum average error ``(1 - ||T||_1) / 2``."""
    return 0.5 * (1.0 - trace_norm(t))


def average_error(pi0, pi1, problem: DiscriminationProblem) -> float:
    e0, e1 = error_probabilities(pi0, pi1, problem)
    return problem.prior0 * e0 + problem.prior1 * e1


# ----------------------------------------------------------------------------
# closed forms on the canonical state sqrt(a)|00> + sqrt(1-a)|11>
# ----------------------------------------------------------------------------

def t_closed(a: float, params: PovmParams) -> np.ndarray:
    lam, b, phi = params.strength, params.skew, params.phase
    n = normalization(lam)
    k = (1.0 + 2.0 * lam) / n
    off = -2.0 * math.sqrt(a * (1.0 - a) * b * (1.0 - b)) * k
    return np.array(
        [
            [a * (-1.0 + 2.0 * b) * k, off * complex(math.cos(phi), -math.sin(phi))],
            [off * complex(math.cos(phi), math.sin(phi)), (-1.0 + a) * (-1.0 + 2.0 * b) * k],
        ]
    )


def t_eigenvalues_closed(a: float, params: PovmParams) -> tuple[float, float]:
    lam, b = params.strength, params.skew
    lead = 1.0 - 2.0 * a - 2.0 * b + 4.0 * a * b
    root = math.sqrt(max(-4.0 * (-a + a * a) + (-1.0 + 2.0 * a + 2.0 * b - 4.0 * a * b) ** 2, 0.0))
    scale = (1.0 + 2.0 * lam) / (2.0 * (1.0 + 2.0 * lam + 2.0 * lam * lam))
    return (lead - root) * scale, (lead + root) * scale


def _discriminant(a: float, b: float) -> float:
    return math.sqrt(max(1.0 + 4.0 * (1.0 - 2.0 * a) ** 2 * (-1.0 + b) * b, 0.0))


def projector_diagonals_closed(a: float, params: PovmParams) -> tuple[float, float]:
    """``pi0[0,0]`` and ``pi1[0,0]`` of the optimal projectors.

    Only the diagonal entries have a compact closed form, so only these
    are offered as a cross-check.
    """
    b = params.skew
    s = _discriminant(a, b)
    return (1.0 - 2.0 * b + s) / (2.0 * s), (-1.0 + 2.0 * b + s) / (2.0 * s)


def _gain_parts(a: float, params: PovmParams):
    lam, b = params.strength, params.skew
    s = _discriminant(a, b)
    num0 = (
        -8.0 * a**2 * (-1.0 + b) * b * (1.0 + 2.0 * lam)
        - (-1.0 + 2.0 * b) * (b + 2.0 * b * lam + lam**2)
        + a * (-1.0 - 6.0 * b + 4.0 * b * (-3.0 + lam) * lam - 2.0 * lam * (1.0 + lam) + 8.0 * b**2 * (1.0 + 2.0 * lam))
    )
    den0 = s * (b + 2.0 * b * lam + lam**2 - a * (-1.0 + 2.0 * b) * (1.0 + 2.0 * lam))
    num1 = (
        8.0 * a**2 * (-1.0 + b) * b * (1.0 + 2.0 * lam)
        + (-1.0 + 2.0 * b) * (b + 2.0 * b * lam - (1.0 + lam) ** 2)
        - a * (1.0 + 2.0 * lam + 2.0 * lam**2 + 8.0 * b**2 * (1.0 + 2.0 * lam) - 2.0 * b * (5.0 + 10.0 * lam + 2.0 * lam**2))
    )
    den1 = s * ((1.0 + lam) ** 2 - b * (1.0 + 2.0 * lam) + a * (-1.0 + 2.0 * b) * (1.0 + 2.0 * lam))
    return num0, den0, num1, den1


def error_probabilities_closed(a: float, params: PovmParams) -> tuple[float, float]:
    """Per-outcome error probabilities of the optimal strategy in closed form.

    Undefined (``nan``) where an outcome has zero probability.
    """
    num0, den0, num1, den1 = _gain_parts(a, params)
    e0 = 0.5 * (1.0 + num0 / den0) if den0 != 0 else math.nan
    e1 = 0.5 * (1.0 - num1 / den1) if den1 != 0 else math.nan
    return e0, e1


def gains_closed(a: float, params: PovmParams) -> tuple[float, float]:
    num0, den0, num1, den1 = _gain_parts(a, params)
    g0 = -num0 / den0 if den0 != 0 else math.nan
    g1 = num1 / den1 if den1 != 0 else math.nan
    return g0, g1


def random_projective_rule(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """A uniformly random rank-1 projective decision rule ``(pi0, pi1)``."""
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    p = np.outer(v, v.conj())
    return p, I2 - p
