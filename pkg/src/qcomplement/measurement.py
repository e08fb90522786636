"""Alice's two-outcome weak-measurement family and what it does to a shared pair.

The family is parameterised by a strength ``Lambda >= 0`` (0 is projective,
large values approach the identity), a skew ``b = sin^2(theta)`` in
``[0, 1/2]`` selecting the measured axis, and a phase ``phi``::

    m0 = (Lambda * I + P) / sqrt(1 + 2 Lambda (1 + Lambda))
    m1 = (Lambda * I + (I - P)) / sqrt(1 + 2 Lambda (1 + Lambda))

with ``P`` the projector onto ``cos(theta)|0> + exp(-i phi) sin(theta)|1>``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .linalg import I2, as_matrix, dagger, eig_hermitian, partial_trace_alice, polar_decompose
from .states import JointDensity, PureState, ReducedState, as_density

TWO_PI = 2.0 * math.pi
# outcomes rarer than this have no conditional state
ZERO_PROB = 1e-14
COMPLETENESS_TOL = 1e-10
_PARAM_SLACK = 1e-12


def _check_strength(strength: float) -> float:
    strength = float(strength)
    if not strength >= 0.0 or not math.isfinite(strength):
        raise ValueError(f"measurement strength must be a finite value >= 0, got {strength}")
    return strength


def normalization(strength):
    """``1 + 2 Lambda (1 + Lambda)``, equal to ``Lambda^2 + (Lambda + 1)^2``."""
    return 1.0 + 2.0 * strength * (1.0 + strength)


@dataclass(frozen=True)
class PovmParams:
    """Strength, skew ``b = sin^2(theta)`` and phase of a family member.

    The skew is the stored parameter; :meth:`from_theta` accepts the angle
    form with ``theta`` in ``[0, pi/4]``.
    """

    strength: float
    skew: float = 0.0
    phase: float = 0.0

    def __post_init__(self):
        _check_strength(self.strength)
        b = float(self.skew)
        if not -_PARAM_SLACK <= b <= 0.5 + _PARAM_SLACK:
            raise ValueError(f"skew b must lie in [0, 1/2], got {b}")
        phi = float(self.phase)
        if not 0.0 <= phi < TWO_PI:
            raise ValueError(f"phase must lie in [0, 2 pi), got {phi}")
        object.__setattr__(self, "strength", float(self.strength))
        object.__setattr__(self, "skew", min(max(b, 0.0), 0.5))
        object.__setattr__(self, "phase", phi)

    @classmethod
    def from_theta(cls, strength: float, theta: float, phase: float = 0.0) -> "PovmParams":
        if not -_PARAM_SLACK <= theta <= math.pi / 4 + _PARAM_SLACK:
            raise ValueError(f"theta must lie in [0, pi/4], got {theta}")
        return cls(strength, math.sin(theta) ** 2, phase)

    @property
    def theta(self) -> float:
        return math.asin(math.sqrt(self.skew))

    @property
    def cos2theta(self) -> float:
        return 1.0 - 2.0 * self.skew

    @property
    def sin2theta(self) -> float:
        return 2.0 * math.sqrt(self.skew * (1.0 - self.skew))


class MeasurementPair(NamedTuple):
    m0: np.ndarray
    m1: np.ndarray

    def completeness_residual(self) -> float:
        total = dagger(self.m0) @ self.m0 + dagger(self.m1) @ self.m1
        return float(np.max(np.abs(total - I2)))

    def elements(self) -> tuple[np.ndarray, np.ndarray]:
        """POVM elements ``E_i = m_i^dagger m_i``."""
        return dagger(self.m0) @ self.m0, dagger(self.m1) @ self.m1


def axis_projector(skew: float, phase: float) -> np.ndarray:
    c2 = 1.0 - skew
    off = math.sqrt(skew * (1.0 - skew))
    e = complex(math.cos(phase), math.sin(phase))
    return np.array([[c2, e * off], [e.conjugate() * off, skew]], dtype=complex)


def build_povm(params: PovmParams) -> MeasurementPair:
    """Hermitian positive implementation of the family member ``params``."""
    lam = params.strength
    proj = axis_projector(params.skew, params.phase)
    scale = 1.0 / math.sqrt(normalization(lam))
    m0 = (lam * I2 + proj) * scale
    m1 = (lam * I2 + (I2 - proj)) * scale
    return MeasurementPair(m0, m1)


def disturbance(strength: float) -> float:
    """``D = 1 / (1 + 2 Lambda (1 + Lambda))``; independent of axis and phase."""
    lam = _check_strength(strength)
    return 1.0 / normalization(lam)


def quality(strength: float) -> float:
    """Pointer overlap ``F = 2 Lambda (1 + Lambda) / (1 + 2 Lambda (1 + Lambda))``."""
    lam = _check_strength(strength)
    return 2.0 * lam * (1.0 + lam) / normalization(lam)


@dataclass(frozen=True)
class OutcomeEnsemble:
    """Outcome probabilities and conditional states after Alice measures.

    ``bob_states[i]`` and ``joint_posts[i]`` are ``None`` when outcome ``i``
    has probability below ``ZERO_PROB``.
    """

    probs: tuple[float, float]
    bob_states: tuple[Optional[ReducedState], Optional[ReducedState]]
    joint_posts: tuple[Optional[JointDensity], Optional[JointDensity]]
    unnormalized: tuple[np.ndarray, np.ndarray]

    @property
    def prob0(self) -> float:
        return self.probs[0]

    @property
    def prob1(self) -> float:
        return self.probs[1]

    @property
    def defined(self) -> tuple[bool, bool]:
        return tuple(s is not None for s in self.bob_states)

    def bob_unnormalized(self, i: int) -> np.ndarray:
        """``Tr_A[(I x m_i) rho (I x m_i)^dagger]`` without dividing by the probability."""
        return partial_trace_alice(self.unnormalized[i])


def apply_measurement(state, pair: MeasurementPair) -> OutcomeEnsemble:
    """Alice applies ``pair`` to her qubit of ``state`` (pure or mixed)."""
    resid = pair.completeness_residual()
    if resid > COMPLETENESS_TOL:
        raise ValueError(f"measurement pair is not complete (residual {resid:.3e})")
    rho = as_density(state)
    probs, bobs, joints, raws = [], [], [], []
    for m in pair:
        k = np.kron(I2, as_matrix(m, dims=(2,)))
        raw = k @ rho @ k.conj().T
        p = float(np.trace(raw).real)
        raws.append(raw)
        probs.append(max(p, 0.0))
        if p < ZERO_PROB:
            bobs.append(None)
            joints.append(None)
            continue
        joint = raw / p
        joints.append(JointDensity(joint))
        bobs.append(ReducedState(partial_trace_alice(joint)))
    return OutcomeEnsemble(tuple(probs), tuple(bobs), tuple(joints), tuple(raws))


def _check_weight(a: float) -> float:
    a = float(a)
    if not 0.0 <= a <= 0.5:
        raise ValueError(f"Schmidt weight a must lie in [0, 1/2], got {a}")
    return a


def outcome_probabilities_closed(a: float, params: PovmParams) -> tuple[float, float]:
    """Alice's outcome probabilities on ``sqrt(a)|00> + sqrt(1-a)|11>`` in closed form."""
    a = _check_weight(a)
    lam = params.strength
    n = normalization(lam)
    d0, d1 = outcome_weights(a, lam, params.skew)
    return d0 / (2.0 * n), d1 / (2.0 * n)


def outcome_weights(a, lam, skew):
    """``N^2 +- (2a-1)(1+2 Lambda) cos 2theta`` written as sums of non-negative terms.

    The signed form cancels catastrophically when an outcome is nearly impossible.
    """
    k = 1.0 + 2.0 * lam
    hi = lam * lam + k * (1.0 - skew)
    lo = lam * lam + k * skew
    return 2.0 * (a * hi + (1.0 - a) * lo), 2.0 * (a * lo + (1.0 - a) * hi)


def bob_states_closed(a: float, params: PovmParams):
    """Bob's conditional states on the canonical state in closed form.

    Returns a pair whose entries are ``ReducedState`` or ``None`` for a
    vanishing-probability outcome.
    """
    a = _check_weight(a)
    lam = params.strength
    s2 = params.sin2theta
    cos_sq = 1.0 - params.skew
    root = math.sqrt(a * (1.0 - a))
    e_minus = complex(math.cos(params.phase), -math.sin(params.phase))
    off = root * (1.0 + 2.0 * lam) * s2
    den0, den1 = outcome_weights(a, lam, params.skew)
    p0, p1 = outcome_probabilities_closed(a, params)
    out = []
    if p0 < ZERO_PROB:
        out.append(None)
    else:
        r00 = 2.0 * a * (lam**2 + (1.0 + 2.0 * lam) * cos_sq) / den0
        r11 = 2.0 * (1.0 - a) * (lam**2 + (1.0 + 2.0 * lam) * params.skew) / den0
        r01 = off * e_minus / den0
        out.append(ReducedState(np.array([[r00, r01], [r01.conjugate(), r11]])))
    if p1 < ZERO_PROB:
        out.append(None)
    else:
        r00 = 2.0 * a * (lam**2 + (1.0 + 2.0 * lam) * params.skew) / den1
        r11 = 2.0 * (1.0 - a) * (lam**2 + (1.0 + 2.0 * lam) * cos_sq) / den1
        r01 = -off * e_minus / den1
        out.append(ReducedState(np.array([[r00, r01], [r01.conjugate(), r11]])))
    return tuple(out)


@dataclass(frozen=True)
class PointerModel:
    """Single-qubit pointer realisation of a strength-``Lambda`` measurement.

    The spin ``sqrt(beta)|up> + sqrt(1-beta)|down>`` couples to a pointer that
    ends in ``cos t|0> + sin t|1>`` (spin up) or ``sin t|0> + cos t|1>``
    (spin down), ``t`` being ``pointer_angle``; ``overlap`` is the inner
    product of the two pointer states.
    """

    pointer_angle: float
    overlap: float
    spin_weight: float = 0.5

    def pointer_states(self) -> tuple[np.ndarray, np.ndarray]:
        c, s = math.cos(self.pointer_angle), math.sin(self.pointer_angle)
        return np.array([c, s], dtype=complex), np.array([s, c], dtype=complex)

    def coupled_state(self) -> np.ndarray:
        """Spin-pointer state after the interaction, ordered ``|spin, pointer>``."""
        up, down = self.pointer_states()
        beta = self.spin_weight
        return math.sqrt(beta) * np.kron([1, 0], up) + math.sqrt(1.0 - beta) * np.kron([0, 1], down)

    def readout_operators(self) -> MeasurementPair:
        """Spin operators induced by reading the pointer in ``{|0>, |1>}``."""
        up, down = self.pointer_states()
        m_plus = np.diag([up[0], down[0]])
        m_minus = np.diag([up[1], down[1]])
        return MeasurementPair(m_plus, m_minus)

    def error_probability(self) -> float:
        """Probability that the pointer reading contradicts the spin."""
        up, down = self.pointer_states()
        beta = self.spin_weight
        return float(abs(up[1]) ** 2 * beta + abs(down[0]) ** 2 * (1.0 - beta))

    def gain(self) -> float:
        """Single-particle information gain ``1 - 2 P_e``."""
        return 1.0 - 2.0 * self.error_probability()


def pointer_model(strength: float, spin_weight: float = 0.5) -> PointerModel:
    lam = _check_strength(strength)
    if not 0.0 <= spin_weight <= 1.0:
        raise ValueError("spin weight must lie in [0, 1]")
    n = math.sqrt(normalization(lam))
    angle = math.atan2(lam, lam + 1.0)
    # sin 2t = 2 Lambda (Lambda + 1) / n^2, kept in rational form
    return PointerModel(angle, 2.0 * lam * (lam + 1.0) / n**2, spin_weight)


def von_neumann_nonselective(rho_s, strength: float) -> ReducedState:
    """Outcome-averaged spin state: ``F rho + (1 - F)(P_up rho P_up + P_down rho P_down)``."""
    m = rho_s.matrix if isinstance(rho_s, ReducedState) else as_matrix(rho_s, dims=(2,))
    f = quality(strength)
    dephased = np.diag(np.diag(m))
    return ReducedState(f * m + (1.0 - f) * dephased)


def nonselective_channel(rho, pair: MeasurementPair) -> np.ndarray:
    """``sum_i m_i rho m_i^dagger`` for a 2x2 or 4x4 (Alice-side) operator."""
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros_like(rho)
    for m in pair:
        k = m if rho.shape == (2, 2) else np.kron(I2, m)
        out += k @ rho @ k.conj().T
    return out


class EquivalenceReport(NamedTuple):
    passed: bool
    deviation: float
    tolerance: float


def pointer_operators(strength: float, theta: float, phase: float) -> MeasurementPair:
    """``M_pm = cos t |k_pm><k_pm| + sin t |k_mp><k_mp|`` built from pointer quantities."""
    model = pointer_model(strength)
    t = model.pointer_angle
    a_z = math.cos(theta) ** 2
    e = complex(math.cos(phase), -math.sin(phase))
    k_plus = np.array([math.sqrt(a_z), math.sqrt(1.0 - a_z) * e])
    k_minus = np.array([-math.sqrt(1.0 - a_z), math.sqrt(a_z) * e])
    p_plus = np.outer(k_plus, k_plus.conj())
    p_minus = np.outer(k_minus, k_minus.conj())
    return MeasurementPair(
        math.cos(t) * p_plus + math.sin(t) * p_minus,
        math.cos(t) * p_minus + math.sin(t) * p_plus,
    )


def pointer_equivalence_check(strength: float, theta: float, phase: float, tol: float = 1e-12) -> EquivalenceReport:
    """Compare pointer-derived ``M_pm`` with :func:`build_povm` entrywise."""
    built = build_povm(PovmParams.from_theta(strength, theta, phase))
    ptr = pointer_operators(strength, theta, phase)
    dev = max(float(np.max(np.abs(ptr.m0 - built.m0))), float(np.max(np.abs(ptr.m1 - built.m1))))
    return EquivalenceReport(dev <= tol, dev, tol)


def hermitize(m) -> np.ndarray:
    """Positive implementation ``U^dagger P U`` of the same POVM element as ``m = P U``."""
    p, u = polar_decompose(m)
    h = u.conj().T @ p @ u
    return 0.5 * (h + h.conj().T)


def hermitize_pair(pair: MeasurementPair) -> MeasurementPair:
    return MeasurementPair(hermitize(pair.m0), hermitize(pair.m1))


def fit_povm_params(pair: MeasurementPair, tol: float = 1e-9) -> tuple[PovmParams, bool]:
    """Recover family parameters from a pair that implements a family POVM.

    Returns ``(params, swapped)``; ``swapped`` is true when the outcome
    labels had to be exchanged to bring the axis angle into ``[0, pi/4]``.
    Raises ``ValueError`` if the POVM is not a member of the family.
    """
    e0, _ = pair.elements()
    # family elements satisfy e0 = (Lambda^2 I + (2 Lambda + 1) P) / n
    eig = eig_hermitian(e0, tol=1e-9)
    lo, hi = np.sqrt(np.clip(eig.eigenvalues, 0.0, None))
    if hi - lo <= 0.0:
        raise ValueError("POVM element is proportional to the identity; no family member matches")
    lam = lo / (hi - lo)
    vec = eig.eigenvectors[:, 1]
    vec = vec * np.exp(-1j * np.angle(vec[0])) if abs(vec[0]) > 0 else vec
    theta = math.atan2(abs(vec[1]), vec[0].real)
    phase = float(-np.angle(vec[1])) % TWO_PI if abs(vec[1]) > 0 else 0.0
    swapped = theta > math.pi / 4
    if swapped:
        theta = math.pi / 2 - theta
        phase = (phase + math.pi) % TWO_PI
    theta = min(max(theta, 0.0), math.pi / 4)
    if phase >= TWO_PI:
        phase = 0.0
    params = PovmParams.from_theta(lam, theta, phase)
    rebuilt = build_povm(params)
    r0, r1 = rebuilt.elements()
    if swapped:
        r0, r1 = r1, r0
    e0, e1 = pair.elements()
    dev = max(float(np.max(np.abs(r0 - e0))), float(np.max(np.abs(r1 - e1))))
    if dev > tol:
        raise ValueError(f"POVM is not a member of the weak-measurement family (deviation {dev:.2e})")
    return params, swapped


def reduce_to_canonical(psi: PureState, pair: MeasurementPair):
    """Map (state, Alice's implementation) to the canonical problem.

    Returns ``(a, params, swapped)`` such that Alice measuring ``pair`` on
    ``psi`` produces the same outcome statistics, the same conditional
    entanglement and the same discrimination problem for Bob (up to a
    fixed unitary on his side) as ``build_povm(params)`` on
    ``sqrt(a)|00> + sqrt(1-a)|11>``, with outcome labels exchanged if
    ``swapped``.
    """
    from .states import schmidt_decompose

    form = schmidt_decompose(psi)
    ua_dag = form.alice_unitary.conj().T
    moved = MeasurementPair(hermitize(pair.m0 @ ua_dag), hermitize(pair.m1 @ ua_dag))
    params, swapped = fit_povm_params(moved)
    return form.schmidt_weight, params, swapped
