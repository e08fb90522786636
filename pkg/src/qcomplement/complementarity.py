"""Entanglement, disturbance and information gain after Alice's measurement.

Two complementarity relations are audited here for the canonical state
``sqrt(a)|00> + sqrt(1-a)|11>`` and every member of the measurement family:

    E_bar + D     <= 1
    E_bar + G_bar <= 1

Every quantity is available along two routes: closed forms in
``(a, b, Lambda)`` and a direct matrix computation (Alice's operator on the
joint state, partial trace, eigenvalues). The audits compare the two and
then check the inequalities on grids and random samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .discrimination import DiscriminationProblem, solve
from .measurement import (
    TWO_PI,
    ZERO_PROB,
    PovmParams,
    apply_measurement,
    build_povm,
    disturbance,
    normalization,
    outcome_weights,
)
from .states import PureState, eof_generalized, entanglement_pure

SLACK = 1e-9
MONOTONE_SLACK = 1e-10
MIXED_SLACK = 1e-8
DEFAULT_LAMBDA_MAX = 50.0


# ----------------------------------------------------------------------------
# closed forms
# ----------------------------------------------------------------------------

def _radicals(a, lam, skew):
    """The two square roots shared by the conditional entanglements.

    ``minus`` belongs to outcome 1, ``plus`` to outcome 0. Each radicand is
    rewritten as a sum of two squares,
    ``(1 + 2 Lambda -+ N^2 x c)^2 + (2 x Lambda (1 + Lambda) s)^2`` with
    ``x = 2a - 1``, ``c = cos 2theta``, ``s = sin 2theta``, which is free of
    cancellation and exactly even in ``x``.
    """
    n2 = normalization(lam)
    x = 2.0 * a - 1.0
    # 1 -+ x c as sums of non-negative terms
    u_minus = 2.0 * ((1.0 - a) * (1.0 - skew) + a * skew)
    u_plus = 2.0 * (a * (1.0 - skew) + (1.0 - a) * skew)
    side = 4.0 * np.abs(x) * lam * (1.0 + lam) * np.sqrt(skew * (1.0 - skew))
    minus = np.hypot(n2 * u_minus - 2.0 * lam**2, side)
    plus = np.hypot(n2 * u_plus - 2.0 * lam**2, side)
    return minus, plus


def conditional_entanglement_closed(a: float, params: PovmParams) -> tuple[float, float]:
    """``(E(rho_B,0), E(rho_B,1))`` in closed form.

    A branch whose outcome has vanishing probability has no conditional
    state; its entry is ``nan``.
    """
    lam = params.strength
    n2 = normalization(lam)
    minus, plus = _radicals(a, lam, params.skew)
    out = []
    for w, root in zip(outcome_weights(a, lam, params.skew), (plus, minus)):
        if w / (2.0 * n2) < ZERO_PROB:
            out.append(math.nan)
        else:
            out.append(float(1.0 - root / w))
    return out[0], out[1]


def average_entanglement_closed(a, params: PovmParams) -> float:
    lam = params.strength
    minus, plus = _radicals(a, lam, params.skew)
    return float(1.0 - (minus + plus) / (2.0 * normalization(lam)))


def average_entanglement(a: float, params: PovmParams) -> float:
    """``sum_i pi_i E(rho_B,i)`` from the measured canonical state.

    Vanishing branches carry zero weight.
    """
    ens = apply_measurement(PureState.canonical(a), build_povm(params))
    total = 0.0
    for p, bob in zip(ens.probs, ens.bob_states):
        if bob is not None:
            total += p * entanglement_pure(bob)
    return total


def h_hat(a, lam, theta):
    """``-2 + R_- + R_+``; vanishes exactly when ``E_bar + D = 1``.

    Accepts arrays. ``a`` outside ``[0, 1/2]`` is allowed so that
    symmetric differences at ``a = 1/2`` are possible.
    """
    minus, plus = _radicals(a, lam, np.sin(np.asarray(theta, dtype=float)) ** 2)
    return -2.0 + minus + plus


def h_function(a, lam, theta):
    """``H = E_bar + D - 1 = -h_hat / (2 + 4 Lambda (1 + Lambda))``."""
    return -h_hat(a, lam, theta) / (2.0 * normalization(lam))


def _radical_slopes(a, lam, theta):
    theta = np.asarray(theta, dtype=float)
    c = np.cos(2.0 * theta)
    minus, plus = _radicals(a, lam, np.sin(theta) ** 2)
    quad = 4.0 * (2.0 * a - 1.0) * lam**2 * (1.0 + lam) ** 2
    lin = (1.0 + 4.0 * lam + 6.0 * lam**2 + 4.0 * lam**3) * c
    sq = (2.0 * a - 1.0) * (1.0 + 2.0 * lam) ** 2 * c**2
    return 2.0 * (quad - lin + sq) / minus, 2.0 * (quad + lin + sq) / plus


def stationarity_bracket(a, lam, theta):
    """Analytic ``d h_hat / da``; zero at ``a = 1/2``."""
    d_minus, d_plus = _radical_slopes(a, lam, theta)
    return d_minus + d_plus


def dh_da_closed(a, lam, theta):
    """Analytic ``dH / da``, the bracket scaled by ``-1 / (2 + 4 Lambda (1 + Lambda))``."""
    return -stationarity_bracket(a, lam, theta) / (2.0 * normalization(lam))


# proof-chain polynomials for E_bar + G_bar - 1, phi = 0 without loss

def _s2(a, b):
    return 1.0 + 4.0 * (1.0 - 2.0 * a) ** 2 * (b - 1.0) * b


def _p2(a, b, lam):
    u = a + b - 2.0 * a * b
    return (
        u**2
        + 4.0 * u**2 * lam
        + 2.0 * (a * (-1.0 + 4.0 * a) + b + 2.0 * (1.0 - 4.0 * a) * a * b + 2.0 * (1.0 - 2.0 * a) ** 2 * b**2) * lam**2
        + 4.0 * (-1.0 + 2.0 * a) * (a - b) * lam**3
        + (1.0 - 2.0 * a) ** 2 * lam**4
    )


def _p3(a, b, lam):
    bb = b + 2.0 * b * lam
    return (
        (bb - (1.0 + lam) ** 2) ** 2
        + a**2 * (-4.0 * b * (1.0 + 2.0 * lam) ** 2 + 4.0 * bb**2 + (1.0 + 2.0 * lam * (1.0 + lam)) ** 2)
        - 2.0 * a * (2.0 * bb**2 + (1.0 + lam) ** 2 * (1.0 + 2.0 * lam * (1.0 + lam)) - b * (1.0 + 2.0 * lam) * (3.0 + 2.0 * lam * (3.0 + lam)))
    )


def _q(a, b, lam):
    """Second factor under the ``h2`` root; the ``Lambda^4`` term has coefficient ``(1-2a)^2``."""
    u = -1.0 + a + b - 2.0 * a * b
    return (
        u**2
        + 4.0 * u**2 * lam
        + 2.0 * (3.0 + a * (-7.0 + 4.0 * a) - 5.0 * b + 2.0 * (7.0 - 4.0 * a) * a * b + 2.0 * (1.0 - 2.0 * a) ** 2 * b**2) * lam**2
        + 4.0 * (-1.0 + 2.0 * a) * (-1.0 + a + b) * lam**3
        + (1.0 - 2.0 * a) ** 2 * lam**4
    )


def f1(a, b, lam):
    return 1.0 + 2.0 * lam + 4.0 * (1.0 - 2.0 * a) ** 2 * (b - 1.0) * b * (1.0 + 2.0 * lam)


def f2(a, b, lam):
    return np.sqrt(np.maximum(_s2(a, b) * _p2(a, b, lam), 0.0))


def f3(a, b, lam):
    return np.sqrt(np.maximum(_s2(a, b) * _p3(a, b, lam), 0.0))


def gain_sum_closed(a, b, lam):
    """``E_bar + G_bar - 1`` as ``(f1 - f2 - f3) / (s (1 + 2 Lambda (1 + Lambda)))``."""
    s = np.sqrt(_s2(a, b))
    return (f1(a, b, lam) - f2(a, b, lam) - f3(a, b, lam)) / (s * normalization(lam))


def h1(a, b, lam):
    bb = b + 2.0 * b * lam
    k2 = (1.0 + 2.0 * lam) ** 2
    n4 = (1.0 + 2.0 * lam * (1.0 + lam)) ** 2
    return (
        lam**2 * (1.0 + lam) ** 2
        + b * k2
        - bb**2
        + a * (-4.0 * b * k2 + 4.0 * bb**2 - n4)
        + a**2 * (4.0 * b * k2 - 4.0 * bb**2 + n4)
    )


def h2(a, b, lam):
    return np.sqrt(np.maximum(_p2(a, b, lam) * _q(a, b, lam), 0.0))


def h_factor_rhs(a, b, lam):
    """Closed-form right-hand side of the ``h1, h2`` factorization."""
    return 4.0 * (1.0 - 2.0 * a) ** 2 * (a - 1.0) * a * (b - 1.0) * b * (1.0 + 2.0 * lam * (2.0 + lam * (3.0 + 2.0 * lam))) ** 2


def outcome_sums_closed(a, b, lam):
    """``(E_0 + G_0, E_1 + G_1)`` as the per-outcome closed forms.

    Scalar or array input; entries for a vanishing outcome are meaningless.
    """
    k = 1.0 + 2.0 * lam
    n2 = normalization(lam)
    s = np.sqrt(_s2(a, b))
    cross = 16.0 * (a - 1.0) * a * lam**2 * (1.0 + lam) ** 2
    tilt = (2.0 * a - 1.0) * (1.0 - 2.0 * b) * k
    num0 = (
        -8.0 * a**2 * (b - 1.0) * b * k
        - (2.0 * b - 1.0) * (b + 2.0 * b * lam + lam**2)
        + a * (-1.0 - 6.0 * b + 4.0 * b * (lam - 3.0) * lam - 2.0 * lam * (1.0 + lam) + 8.0 * b**2 * k)
    )
    den0 = s * (b + 2.0 * b * lam + lam**2 - a * (2.0 * b - 1.0) * k)
    num1 = (
        8.0 * a**2 * (b - 1.0) * b * k
        + (2.0 * b - 1.0) * (b + 2.0 * b * lam - (1.0 + lam) ** 2)
        - a * (1.0 + 2.0 * lam * (1.0 + lam) + 8.0 * b**2 * k - 2.0 * b * (5.0 + 2.0 * lam * (5.0 + lam)))
    )
    den1 = s * ((1.0 + lam) ** 2 - b * k + a * (2.0 * b - 1.0) * k)
    e_den0 = 4.0 * a * (2.0 * b - 1.0) * k - 4.0 * (b + 2.0 * b * lam + lam**2)
    e_den1 = 2.0 * n2 - 2.0 * tilt
    root0 = np.sqrt(np.maximum(cross + (n2 + tilt) ** 2, 0.0))
    root1 = np.sqrt(np.maximum(cross + (n2 - tilt) ** 2, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        s0 = -num0 / den0 + 2.0 * (0.5 + root0 / e_den0)
        s1 = num1 / den1 + 2.0 * (0.5 - root1 / e_den1)
    return s0, s1


# ----------------------------------------------------------------------------
# single points
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ComplementarityPoint:
    a: float
    b: float
    theta: float
    phi: float
    lam: float
    pi0: float
    pi1: float
    e0: float
    e1: float
    e_bar: float
    d: float
    g0: float
    g1: float
    g_bar: float

    @property
    def e_initial(self) -> float:
        return 2.0 * self.a

    @property
    def e_loss(self) -> float:
        return self.e_initial - self.e_bar

    @property
    def margin_ed(self) -> float:
        return 1.0 - (self.e_bar + self.d)

    @property
    def margin_eg(self) -> float:
        return 1.0 - (self.e_bar + self.g_bar)

    def as_row(self) -> dict:
        return {
            "a": self.a, "b": self.b, "lambda": self.lam, "phi": self.phi,
            "pi0": self.pi0, "pi1": self.pi1, "E0": self.e0, "E1": self.e1,
            "Ebar": self.e_bar, "D": self.d, "G0": self.g0, "G1": self.g1,
            "Gbar": self.g_bar, "margin_ED": self.margin_ed,
            "margin_EG": self.margin_eg, "E_loss": self.e_loss,
        }


def _check_a(a: float) -> float:
    a = float(a)
    if not 0.0 <= a <= 0.5:
        raise ValueError(f"Schmidt weight a must lie in [0, 1/2], got {a}")
    return a


def evaluate_point(a: float, params: PovmParams) -> ComplementarityPoint:
    """All complementarity quantities at one point, by direct matrix computation."""
    a = _check_a(a)
    ens = apply_measurement(PureState.canonical(a), build_povm(params))
    sol = solve(DiscriminationProblem.from_ensemble(ens))
    es = [entanglement_pure(s) if s is not None else math.nan for s in ens.bob_states]
    gs = [sol.gain0, sol.gain1]
    gs = [g if s is not None else math.nan for g, s in zip(gs, ens.bob_states)]
    e_bar = sum(p * e for p, e in zip(ens.probs, es) if not math.isnan(e))
    return ComplementarityPoint(
        a, params.skew, params.theta, params.phase, params.strength,
        ens.probs[0], ens.probs[1], es[0], es[1], e_bar,
        disturbance(params.strength), gs[0], gs[1], sol.avg_gain,
    )


def ed_point(a: float, params: PovmParams) -> ComplementarityPoint:
    """Entanglement-disturbance view of :func:`evaluate_point`."""
    return evaluate_point(a, params)


def eg_point(a: float, params: PovmParams) -> ComplementarityPoint:
    """Entanglement-gain view of :func:`evaluate_point`; Bob plays the optimal guess."""
    return evaluate_point(a, params)


# ----------------------------------------------------------------------------
# batched matrix path
# ----------------------------------------------------------------------------

def _eig2_batch(h):
    """Ascending eigenvalues of stacked 2x2 Hermitian matrices and the low eigenvector."""
    p = h[..., 0, 0].real
    r = h[..., 1, 1].real
    q = 0.5 * (h[..., 0, 1] + np.conj(h[..., 1, 0]))
    half_diff = 0.5 * (p - r)
    mean = 0.5 * (p + r)
    aq = np.abs(q)
    radius = np.hypot(half_diff, aq)
    half = 0.5 * np.arctan2(aq, half_diff)
    phase = np.exp(1j * np.angle(q))  # q/|q| overflows for subnormal q
    v_lo = np.stack([-phase * np.sin(half), np.cos(half) + 0j], axis=-1)
    return mean - radius, mean + radius, v_lo


@dataclass(frozen=True)
class BatchEvaluation:
    """Complementarity quantities on flat arrays of points (matrix path)."""

    a: np.ndarray
    b: np.ndarray
    lam: np.ndarray
    phi: np.ndarray
    pi0: np.ndarray
    pi1: np.ndarray
    e0: np.ndarray
    e1: np.ndarray
    e_bar: np.ndarray
    d: np.ndarray
    g0: np.ndarray
    g1: np.ndarray
    g_bar: np.ndarray

    @property
    def e_loss(self):
        return 2.0 * self.a - self.e_bar

    @property
    def margin_ed(self):
        return 1.0 - (self.e_bar + self.d)

    @property
    def margin_eg(self):
        return 1.0 - (self.e_bar + self.g_bar)

    def __len__(self):
        return int(self.a.size)

    def point(self, i: int) -> ComplementarityPoint:
        b = float(self.b[i])
        return ComplementarityPoint(
            float(self.a[i]), b, math.asin(math.sqrt(b)), float(self.phi[i]), float(self.lam[i]),
            float(self.pi0[i]), float(self.pi1[i]), float(self.e0[i]), float(self.e1[i]),
            float(self.e_bar[i]), float(self.d[i]), float(self.g0[i]), float(self.g1[i]),
            float(self.g_bar[i]),
        )


def _family_batch(lam, b, phi):
    n = np.sqrt(normalization(lam))
    off = np.sqrt(b * (1.0 - b)) * np.exp(1j * phi)
    proj = np.empty(lam.shape + (2, 2), dtype=complex)
    proj[..., 0, 0] = 1.0 - b
    proj[..., 0, 1] = off
    proj[..., 1, 0] = np.conj(off)
    proj[..., 1, 1] = b
    eye = np.eye(2)
    m0 = (lam[..., None, None] * eye + proj) / n[..., None, None]
    m1 = (lam[..., None, None] * eye + (eye - proj)) / n[..., None, None]
    return m0, m1


def evaluate_batch(a, b, lam, phi) -> BatchEvaluation:
    """Vectorised matrix path over broadcast ``(a, b, Lambda, phi)``.

    For each point Alice's operator acts on the amplitude matrix of the
    canonical state, Bob's unnormalised conditional state is formed, and
    the optimal guess is read off the eigenvectors of ``T``.
    """
    a, b, lam, phi = (np.ravel(x).astype(float) for x in np.broadcast_arrays(a, b, lam, phi))
    psi = np.zeros(a.shape + (2, 2), dtype=complex)
    psi[..., 0, 0] = np.sqrt(a)
    psi[..., 1, 1] = np.sqrt(1.0 - a)
    raw = []
    for m in _family_batch(lam, b, phi):
        # amplitudes [bob, alice] -> sum_alice m[c, alice] psi[bob, alice]
        post = np.einsum("nca,nba->nbc", m, psi)
        raw.append(post @ np.conj(np.swapaxes(post, -1, -2)))
    u0, u1 = raw
    p0 = np.trace(u0, axis1=-2, axis2=-1).real
    p1 = np.trace(u1, axis1=-2, axis2=-1).real
    lo0, _, _ = _eig2_batch(u0)
    lo1, _, _ = _eig2_batch(u1)
    # weighted entanglement: pi_i * 2 lambda_min(rho_i) = 2 lambda_min(pi_i rho_i)
    w0 = 2.0 * np.maximum(lo0, 0.0)
    w1 = 2.0 * np.maximum(lo1, 0.0)
    live0 = p0 >= ZERO_PROB
    live1 = p1 >= ZERO_PROB
    t = u1 - u0
    t_lo, t_hi, v_lo = _eig2_batch(t)
    neg = t_lo < -1e-12
    pi0_proj = np.where(neg[:, None, None], v_lo[:, :, None] * np.conj(v_lo[:, None, :]), 0.0)
    pi1_proj = np.eye(2) - pi0_proj
    err0 = np.einsum("nij,nji->n", pi1_proj, u0).real
    err1 = np.einsum("nij,nji->n", pi0_proj, u1).real
    safe0 = np.where(live0, p0, 1.0)
    safe1 = np.where(live1, p1, 1.0)
    e_bar = np.where(live0, w0, 0.0) + np.where(live1, w1, 0.0)
    g_bar = np.abs(t_lo) + np.abs(t_hi)
    return BatchEvaluation(
        a=a, b=b, lam=lam, phi=phi,
        pi0=p0, pi1=p1,
        e0=np.where(live0, w0 / safe0, np.nan),
        e1=np.where(live1, w1 / safe1, np.nan),
        e_bar=e_bar,
        d=1.0 / normalization(lam),
        g0=np.where(live0, 1.0 - 2.0 * err0 / safe0, np.nan),
        g1=np.where(live1, 1.0 - 2.0 * err1 / safe1, np.nan),
        g_bar=g_bar,
    )


# ----------------------------------------------------------------------------
# reports
# ----------------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


class WorstCase(NamedTuple):
    value: float
    args: tuple  # ((name, value), ...)

    def render(self) -> str:
        inner = ", ".join(f"{k}={_fmt(v)}" for k, v in self.args)
        return f"{_fmt(self.value)} at ({inner})"


@dataclass
class AuditReport:
    """Outcome of a numeric audit.

    ``checks`` maps a named assertion to its verdict; ``failures`` holds the
    full inputs of every violating point (capped at ``max_failures`` stored,
    ``n_failures`` counts all).
    """

    name: str
    n_points: int = 0
    worst: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    n_failures: int = 0
    notes: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    max_failures = 20

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def add_failure(self, check: str, value: float, args: dict) -> None:
        self.n_failures += 1
        if len(self.failures) < self.max_failures:
            self.failures.append({"check": check, "value": float(value), **{k: float(v) for k, v in args.items()}})

    def render(self) -> str:
        lines = [f"[{self.name}] points={self.n_points} verdict={'PASS' if self.passed else 'FAIL'}"]
        for key in self.worst:
            lines.append(f"  worst {key}: {self.worst[key].render()}")
        for key in self.residuals:
            lines.append(f"  residual {key}: {_fmt(self.residuals[key])}")
        for key in self.checks:
            lines.append(f"  check {key}: {'pass' if self.checks[key] else 'FAIL'}")
        for key in self.info:
            lines.append(f"  info {key}: {self.info[key]}")
        for note in self.notes:
            lines.append(f"  note: {note}")
        if self.n_failures:
            lines.append(f"  failures: {self.n_failures} (showing {len(self.failures)})")
            for f in self.failures:
                lines.append("    " + " ".join(f"{k}={v if isinstance(v, str) else _fmt(v)}" for k, v in f.items()))
        return "\n".join(lines)


_ARG_NAMES = ("a", "b", "lambda", "phi")


def worst_index(values, a, b, lam, phi) -> int:
    """Index of the minimum under the total order ``(value, a, b, Lambda, phi)``."""
    return int(np.lexsort((phi, lam, b, a, values))[0])


def _worst(values, cols) -> WorstCase:
    i = worst_index(values, *cols)
    return WorstCase(float(values[i]), tuple((n, float(c[i])) for n, c in zip(_ARG_NAMES, cols)))


def _record_violations(report: AuditReport, check: str, values, cols, threshold: float) -> bool:
    """Mark points with ``values < threshold`` as failures; return the verdict."""
    bad = np.flatnonzero(values < threshold)
    vals = np.asarray(values)
    order = bad[np.lexsort(tuple(c[bad] for c in reversed(cols)) + (vals[bad],))] if bad.size else bad
    for i in order:
        report.add_failure(check, values[i], {n: c[i] for n, c in zip(_ARG_NAMES, cols)})
    report.checks[check] = bad.size == 0
    return bad.size == 0


# ----------------------------------------------------------------------------
# grids and sampling
# ----------------------------------------------------------------------------

class Grid(NamedTuple):
    a: np.ndarray
    b: np.ndarray
    lam: np.ndarray
    phi: np.ndarray


def default_grid() -> Grid:
    return Grid(
        np.linspace(0.0, 0.5, 51),
        np.linspace(0.0, 0.5, 51),
        np.concatenate([[0.0], np.geomspace(1e-3, DEFAULT_LAMBDA_MAX, 50)]),
        np.array([0.0, math.pi / 3, 1.7]),
    )


def validate_axis(name: str, values, lo: float, hi: Optional[float]) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError(f"grid axis {name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"grid axis {name} has non-finite values")
    if arr.min() < lo or (hi is not None and arr.max() > hi):
        raise ValueError(f"grid axis {name} leaves its domain [{lo}, {hi}]")
    return arr


def validate_grid(grid: Grid) -> Grid:
    return Grid(
        validate_axis("a", grid.a, 0.0, 0.5),
        validate_axis("b", grid.b, 0.0, 0.5),
        validate_axis("lambda", grid.lam, 0.0, None),
        validate_axis("phi", grid.phi, 0.0, np.nextafter(TWO_PI, 0.0)),
    )


def random_points(n: int, rng: np.random.Generator, lam_max: float = DEFAULT_LAMBDA_MAX):
    """Random ``(a, b, Lambda, phi)``: ``a``, ``theta`` and ``phi`` uniform, ``Lambda`` log-uniform from 1e-3."""
    a = rng.uniform(0.0, 0.5, n)
    theta = rng.uniform(0.0, math.pi / 4, n)
    lam = np.exp(rng.uniform(math.log(1e-3), math.log(lam_max), n))
    phi = rng.uniform(0.0, TWO_PI, n)
    return a, np.sin(theta) ** 2, lam, phi


def _bug_e_bar(a, b, lam):
    """Deliberately wrong average entanglement (second root sign flipped) for harness tests."""
    minus, plus = _radicals(a, lam, b)
    return 1.0 - (minus - plus) / (2.0 * normalization(lam))


def theorem_sweep(
    grid: Optional[Grid] = None,
    n_random: int = 0,
    seed: int = 0,
    inject_bug: bool = False,
    lam_max: float = DEFAULT_LAMBDA_MAX,
) -> AuditReport:
    """Check ``E_bar + D <= 1``, ``E_bar + G_bar <= 1`` and the loss bounds.

    The matrix path supplies every quantity; the closed-form average
    entanglement is compared against it point by point.
    """
    grid = validate_grid(default_grid() if grid is None else grid)
    mesh = np.meshgrid(grid.a, grid.b, grid.lam, grid.phi, indexing="ij")
    cols = [m.ravel() for m in mesh]
    if n_random:
        extra = random_points(n_random, np.random.default_rng(seed), lam_max)
        cols = [np.concatenate([c, x]) for c, x in zip(cols, extra)]
    a, b, lam, phi = cols
    ev = evaluate_batch(a, b, lam, phi)
    e_bar = ev.e_bar
    closed = 1.0 - sum(_radicals(a, lam, b)) / (2.0 * normalization(lam))
    if inject_bug:
        e_bar = _bug_e_bar(a, b, lam)
    margin_ed = 1.0 - (e_bar + ev.d)
    margin_eg = 1.0 - (e_bar + ev.g_bar)
    rep = AuditReport("theorem-sweep", n_points=int(a.size))
    rep.worst["margin_ED"] = _worst(margin_ed, cols)
    rep.worst["margin_EG"] = _worst(margin_eg, cols)
    _record_violations(rep, "E_bar+D<=1", margin_ed, cols, -SLACK)
    _record_violations(rep, "E_bar+G_bar<=1", margin_eg, cols, -SLACK)
    _record_violations(rep, "E_bar<=2a", 2.0 * a - e_bar, cols, -MONOTONE_SLACK)
    half = np.isclose(a, 0.5, rtol=0.0, atol=1e-15)
    loss = 2.0 * a - e_bar
    sub = [c[half] for c in cols]
    if half.any():
        _record_violations(rep, "D<=E_loss (a=1/2)", (loss - ev.d)[half], sub, -SLACK)
        _record_violations(rep, "G_bar<=E_loss (a=1/2)", (loss - ev.g_bar)[half], sub, -SLACK)
    dev = np.abs(closed - e_bar)
    rep.residuals["E_bar closed vs matrix"] = float(dev.max())
    rep.checks["E_bar closed vs matrix"] = bool(dev.max() <= 1e-10)
    # phi-invariance on the grid part
    n_grid = mesh[0].size
    shape = mesh[0].shape
    for label, arr in (("E_bar", e_bar), ("D", ev.d), ("G_bar", ev.g_bar)):
        g = arr[:n_grid].reshape(shape)
        spread = float(np.max(g.max(axis=-1) - g.min(axis=-1)))
        rep.residuals[f"{label} phi-spread"] = spread
        rep.checks[f"{label} phi-invariant"] = spread <= 1e-10
    # continuity in Lambda: no jump larger than a generous Lipschitz bound
    if grid.lam.size > 1:
        dl = np.diff(np.sort(grid.lam))
        order = np.argsort(grid.lam)
        worst_ratio = 0.0
        for m in (margin_ed, margin_eg):
            g = m[:n_grid].reshape(shape)[:, :, order, :]
            jump = np.abs(np.diff(g, axis=2)) / dl[None, None, :, None]
            worst_ratio = max(worst_ratio, float(jump.max()))
        rep.residuals["max |d margin / d Lambda|"] = worst_ratio
        rep.checks["margins continuous in Lambda"] = worst_ratio <= 10.0
    if inject_bug:
        rep.notes.append("injected bug active: average entanglement uses a flipped root sign")
    return rep


def h_hat_audit(lam_values=None, theta_values=None, a_values=None, step: float = 1e-5) -> AuditReport:
    """Minimum of ``h_hat`` over ``a`` sits at ``a = 1/2`` with value ``4 Lambda``."""
    lam_values = validate_axis("lambda", np.geomspace(1e-3, DEFAULT_LAMBDA_MAX, 50) if lam_values is None else lam_values, 0.0, None)
    theta_values = validate_axis("theta", np.linspace(0.0, math.pi / 4, 50) if theta_values is None else theta_values, 0.0, math.pi / 4)
    a_values = validate_axis("a", np.linspace(0.0, 0.5, 51) if a_values is None else a_values, 0.0, 0.5)
    lam, th = np.meshgrid(lam_values, theta_values, indexing="ij")
    rep = AuditReport("h-hat", n_points=int(lam.size * a_values.size))

    at_half = h_hat(0.5, lam, th)
    r = float(np.max(np.abs(at_half - 4.0 * lam)))
    rep.residuals["|h_hat(1/2) - 4 Lambda|"] = r
    rep.checks["h_hat(1/2) = 4 Lambda"] = r <= SLACK

    fd = (h_hat(0.5 + step, lam, th) - h_hat(0.5 - step, lam, th)) / (2.0 * step)
    rep.residuals["|finite-difference d h_hat/da at 1/2|"] = float(np.max(np.abs(fd)))
    rep.checks["stationary at a=1/2"] = float(np.max(np.abs(fd))) <= 1e-6
    br = float(np.max(np.abs(stationarity_bracket(0.5, lam, th))))
    rep.residuals["|analytic d h_hat/da at 1/2|"] = br
    rep.checks["analytic slope zero at a=1/2"] = br <= 1e-9

    # analytic derivative against finite differences at interior a
    interior = np.linspace(0.05, 0.45, 9)
    worst_rel = 0.0
    for ai in interior:
        fd_i = (h_hat(ai + step, lam, th) - h_hat(ai - step, lam, th)) / (2.0 * step)
        an = stationarity_bracket(ai, lam, th)
        worst_rel = max(worst_rel, float(np.max(np.abs(fd_i - an) / np.maximum(1.0, np.abs(an)))))
        h_fd = (h_function(ai + step, lam, th) - h_function(ai - step, lam, th)) / (2.0 * step)
        worst_rel = max(worst_rel, float(np.max(np.abs(h_fd - dh_da_closed(ai, lam, th)))))
    rep.residuals["analytic vs finite-difference slope"] = worst_rel
    rep.checks["slope formulas agree"] = worst_rel <= 1e-5

    grid3 = h_hat(a_values[:, None, None], lam[None], th[None])
    gap = grid3 - 4.0 * lam[None]
    i = np.unravel_index(int(np.argmin(gap)), gap.shape)
    rep.worst["h_hat - 4 Lambda"] = WorstCase(
        float(gap[i]), (("a", float(a_values[i[0]])), ("lambda", float(lam[i[1:]])), ("theta", float(th[i[1:]])))
    )
    rep.checks["h_hat(a) >= 4 Lambda"] = float(gap.min()) >= -SLACK

    # H = -h_hat / (2 N^2) must equal E_bar + D - 1 from the closed forms
    ee = 1.0 - sum(_radicals(a_values[:, None, None], lam[None], np.sin(th[None]) ** 2)) / (2.0 * normalization(lam[None]))
    rel = float(np.max(np.abs(h_function(a_values[:, None, None], lam[None], th[None]) - (ee + 1.0 / normalization(lam[None]) - 1.0))))
    rep.residuals["H vs E_bar + D - 1"] = rel
    rep.checks["H relation"] = rel <= 1e-12

    curv = (h_hat(0.5 + 1e-2, lam, th) - 2.0 * at_half + h_hat(0.5 - 1e-2, lam, th)) / 1e-4
    rep.residuals["min curvature at a=1/2 (informational)"] = float(curv.min())
    return rep


def proof_identity_audit(a_values=None, b_values=None, lam_values=None) -> AuditReport:
    """Audit the polynomial chain behind ``E_bar + G_bar <= 1``.

    Checks ``f1 - f2 - f3 <= 0``, that the ``f`` form equals the matrix
    value of ``E_bar + G_bar - 1``, the per-outcome sums, and the identity
    ``(f2 + f3)^2 - f1^2 = 2 s^2 (h1 + h2)``. Three readings of the
    ``h1, h2`` factorization are compared against its closed-form
    right-hand side and the matching one is recorded without gating the verdict.
    """
    a_values = validate_axis("a", np.linspace(0.0, 0.5, 50) if a_values is None else a_values, 0.0, 0.5)
    b_values = validate_axis("b", np.linspace(0.0, 0.5, 50) if b_values is None else b_values, 0.0, 0.5)
    lam_values = validate_axis("lambda", np.linspace(0.0, DEFAULT_LAMBDA_MAX, 50) if lam_values is None else lam_values, 0.0, None)
    a, b, lam = (m.ravel() for m in np.meshgrid(a_values, b_values, lam_values, indexing="ij"))
    phi = np.zeros_like(a)
    cols = (a, b, lam, phi)
    rep = AuditReport("proof-chain", n_points=int(a.size))

    x1, x2, x3 = f1(a, b, lam), f2(a, b, lam), f3(a, b, lam)
    chain = x1 - x2 - x3
    rep.worst["-(f1 - f2 - f3)"] = _worst(-chain, cols)
    _record_violations(rep, "f1-f2-f3<=0", -chain, cols, -SLACK)

    ev = evaluate_batch(a, b, lam, phi)
    # the f form divides by s, which vanishes at a = 0, b = 1/2
    regular = _s2(a, b) > 1e-8
    rep.info["points skipped for the f form (s ~ 0)"] = int((~regular).sum())
    with np.errstate(divide="ignore", invalid="ignore"):
        dev = np.abs(gain_sum_closed(a, b, lam) - (ev.e_bar + ev.g_bar - 1.0))[regular]
    rep.residuals["f-form vs matrix E_bar+G_bar-1"] = float(dev.max(initial=0.0))
    rep.checks["f-form equals E_bar+G_bar-1"] = float(dev.max(initial=0.0)) <= SLACK

    with np.errstate(divide="ignore", invalid="ignore"):
        s0, s1 = outcome_sums_closed(a, b, lam)
    live0 = (ev.pi0 > 1e-9) & regular
    live1 = (ev.pi1 > 1e-9) & regular
    r0 = np.abs(s0 - (ev.e0 + ev.g0))[live0]
    r1 = np.abs(s1 - (ev.e1 + ev.g1))[live1]
    rs = max(float(r0.max(initial=0.0)), float(r1.max(initial=0.0)))
    rep.residuals["per-outcome E_i+G_i closed vs matrix"] = rs
    rep.checks["per-outcome sums"] = rs <= 1e-8

    s2 = _s2(a, b)
    y1, y2 = h1(a, b, lam), h2(a, b, lam)
    lhs = (x2 + x3) ** 2 - x1**2
    scale = np.maximum(1.0, (x2 + x3) ** 2)
    r = float(np.max(np.abs(lhs - 2.0 * s2 * (y1 + y2)) / scale))
    rep.residuals["(f2+f3)^2 - f1^2 vs 2 s^2 (h1+h2)"] = r
    rep.checks["squared chain identity"] = r <= 1e-9
    # h1 + h2 >= 0 is what the squared chain needs
    rep.worst["h1 + h2"] = _worst(y1 + y2, cols)

    rhs = h_factor_rhs(a, b, lam)
    hscale = np.maximum(1.0, np.maximum(y1**2, y2**2))
    readings = {
        "h1^2 + h2^2": y1**2 + y2**2,
        "h1^2 - h2^2": y1**2 - y2**2,
        "h2^2 - h1^2": y2**2 - y1**2,
    }
    matched = []
    for label, val in readings.items():
        res = float(np.max(np.abs(val - rhs) / hscale))
        rep.residuals[f"factorization reading {label}"] = res
        if res <= 1e-9:
            matched.append(label)
    rep.info["factorization reading matching the closed-form right-hand side"] = ", ".join(matched) if matched else "none"
    rep.notes.append("quartic term of the h2 radicand taken as (1-2a)^2 Lambda^4 with no extra factor")
    return rep


# ----------------------------------------------------------------------------
# mixed states
# ----------------------------------------------------------------------------

class MixedSample(NamedTuple):
    rank: int
    params: PovmParams
    e_bar_f: float
    d: float
    g_bar: float


def mixed_point(rho, params: PovmParams) -> MixedSample:
    """Average formation entanglement, disturbance and optimal gain for a mixed state."""
    ens = apply_measurement(rho, build_povm(params))
    e_f = 0.0
    for p, joint in zip(ens.probs, ens.joint_posts):
        if joint is not None:
            e_f += p * eof_generalized(joint)
    sol = solve(DiscriminationProblem.from_ensemble(ens))
    rank = int(np.sum(np.linalg.eigvalsh(np.asarray(rho.matrix if hasattr(rho, "matrix") else rho)) > 1e-12))
    return MixedSample(rank, params, e_f, disturbance(params.strength), sol.avg_gain)


def random_params(rng: np.random.Generator, lam_max: float = DEFAULT_LAMBDA_MAX) -> PovmParams:
    lam = float(np.exp(rng.uniform(math.log(1e-3), math.log(lam_max))))
    if rng.uniform() < 0.1:
        lam = 0.0
    theta = rng.uniform(0.0, math.pi / 4)
    return PovmParams(lam, math.sin(theta) ** 2, float(rng.uniform(0.0, TWO_PI)))


def mixed_audit(
    n_samples: int = 1000,
    seed: int = 0,
    sampler: Optional[Callable[[np.random.Generator], object]] = None,
    lam_max: float = DEFAULT_LAMBDA_MAX,
) -> AuditReport:
    """``E_bar_F + D <= 1`` and ``E_bar_F + G_bar <= 1`` on random mixed states.

    Sample ``k`` draws from ``default_rng([seed, k])`` so any single sample
    can be reproduced on its own.
    """
    from .states import random_density

    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    sampler = sampler or (lambda rng: random_density(rng))
    rep = AuditReport("mixed-states", n_points=n_samples)
    worst_ed = worst_eg = None
    ok_ed = ok_eg = True
    for k in range(n_samples):
        rng = np.random.default_rng([seed, k])
        rho = sampler(rng)
        params = random_params(rng, lam_max)
        s = mixed_point(rho, params)
        m_ed = 1.0 - s.e_bar_f - s.d
        m_eg = 1.0 - s.e_bar_f - s.g_bar
        args = (("sample", k), ("rank", s.rank), ("b", params.skew), ("lambda", params.strength), ("phi", params.phase))
        if worst_ed is None or m_ed < worst_ed.value:
            worst_ed = WorstCase(m_ed, args)
        if worst_eg is None or m_eg < worst_eg.value:
            worst_eg = WorstCase(m_eg, args)
        for name, m in (("E_F+D<=1", m_ed), ("E_F+G_bar<=1", m_eg)):
            if m < -MIXED_SLACK:
                rep.add_failure(name, m, {"seed": seed, "sample": k, "b": params.skew, "lambda": params.strength, "phi": params.phase})
                if name.startswith("E_F+D"):
                    ok_ed = False
                else:
                    ok_eg = False
    rep.worst["margin_ED"] = worst_ed
    rep.worst["margin_EG"] = worst_eg
    rep.checks["E_F+D<=1"] = ok_ed
    rep.checks["E_F+G_bar<=1"] = ok_eg
    return rep
