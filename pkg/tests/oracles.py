"""Reference computations written from the definitions, independent of the package.

Only numpy/scipy primitives are used: explicit Kronecker products,
index-loop partial traces, LAPACK eigensolvers.
"""
import math

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

SY = np.array([[0, -1j], [1j, 0]])
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def family_pair(lam, b, phi):
    """Measurement pair written out entry by entry (Hermitian form)."""
    n = math.sqrt(1 + 2 * lam * (1 + lam))
    s = math.sqrt(b * (1 - b))
    e = np.exp(1j * phi)
    m0 = np.array([[lam + 1 - b, e * s], [np.conj(e) * s, lam + b]]) / n
    m1 = np.array([[lam + b, -e * s], [-np.conj(e) * s, lam + 1 - b]]) / n
    return m0, m1


def canonical_vec(a):
    return np.array([math.sqrt(a), 0, 0, math.sqrt(1 - a)], dtype=complex)


def ptrace_alice(rho):
    out = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            out[i, j] = sum(rho[2 * i + k, 2 * j + k] for k in range(2))
    return out


def ptrace_bob(rho):
    out = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            out[i, j] = sum(rho[2 * k + i, 2 * k + j] for k in range(2))
    return out


def measure(rho, ops):
    """``[(prob, bob_state or None, joint or None), ...]`` for Alice's operators."""
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    out = []
    for m in ops:
        k = np.kron(np.eye(2), m)
        raw = k @ rho @ k.conj().T
        p = np.trace(raw).real
        if p < 1e-14:
            out.append((p, None, None))
        else:
            out.append((p, ptrace_alice(raw) / p, raw / p))
    return out


def ent2(rho2):
    return 2 * np.linalg.eigvalsh(rho2)[0]


def helstrom(p0, r0, p1, r1):
    """Optimal guess from the sign of ``T``; returns per-outcome errors and average gain."""
    r0 = np.zeros((2, 2)) if r0 is None else r0
    r1 = np.zeros((2, 2)) if r1 is None else r1
    t = p1 * r1 - p0 * r0
    w, v = np.linalg.eigh(t)
    neg = v[:, w < -1e-12]
    pi0 = neg @ neg.conj().T
    pi1 = np.eye(2) - pi0
    e0 = np.trace(pi1 @ r0).real
    e1 = np.trace(pi0 @ r1).real
    g = p0 * (1 - 2 * e0) + p1 * (1 - 2 * e1)
    return dict(t=t, eig=w, e0=e0, e1=e1, g=g, tn=np.linalg.svd(t, compute_uv=False).sum())


def canonical_point(a, lam, b, phi):
    """Everything at one canonical point via the oracle path."""
    (p0, r0, _), (p1, r1, _) = measure(canonical_vec(a), family_pair(lam, b, phi))
    h = helstrom(p0, r0, p1, r1)
    e0 = ent2(r0) if r0 is not None else float("nan")
    e1 = ent2(r1) if r1 is not None else float("nan")
    e_bar = sum(p * e for p, e in ((p0, e0), (p1, e1)) if not math.isnan(e))
    return dict(p0=p0, p1=p1, r0=r0, r1=r1, E0=e0, E1=e1, Ebar=e_bar, D=1 / (1 + 2 * lam * (1 + lam)), **h)


def concurrence(rho):
    """Wootters' recipe on the non-Hermitian product ``rho rho~``."""
    tilde = np.kron(SY, SY) @ rho.conj() @ np.kron(SY, SY)
    ev = np.linalg.eigvals(rho @ tilde)
    mu = np.sort(np.sqrt(np.clip(ev.real, 0, None)))[::-1]
    return max(0.0, mu[0] - mu[1] - mu[2] - mu[3])


def pure_decomp_average(vecs):
    """Average ``2 lambda_min`` over unnormalised pure states (rows of ``vecs``)."""
    total = 0.0
    for v in vecs:
        p = np.vdot(v, v).real
        if p < 1e-300:
            continue
        u = v.reshape(2, 2) / math.sqrt(p)
        total += p * ent2(u @ u.conj().T)
    return total


def haar(k, rng):
    z = (rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / abs(np.diag(r)))


def _herm(x, k):
    h = np.zeros((k, k), complex)
    iu = np.triu_indices(k, 1)
    n = len(iu[0])
    h[np.diag_indices(k)] = x[:k]
    h[iu] = x[k:k + n] + 1j * x[k + n:]
    return h + np.triu(h, 1).conj().T


def decomposition_minimum(rho, rng, k=4, n=200, refine=False):
    """Best decomposition average over ``n`` Haar mixings, optionally polished by BFGS."""
    w, v = np.linalg.eigh(rho)
    keep = w > 1e-14
    base = (v[:, keep] * np.sqrt(w[keep])).T
    r = base.shape[0]
    k = max(k, r)
    best, best_u = np.inf, None
    for _ in range(n):
        u = haar(k, rng)
        e = pure_decomp_average(u[:, :r] @ base)
        if e < best:
            best, best_u = e, u
    if refine:
        obj = lambda x: pure_decomp_average((best_u @ expm(1j * _herm(x, k)))[:, :r] @ base)
        res = minimize(obj, np.zeros(k * k), method="BFGS", options=dict(gtol=1e-12))
        best = min(best, res.fun)
    return best


def spin(angle):
    return math.cos(angle) * SZ + math.sin(angle) * SX


def chsh(rho, a=(0.0, math.pi / 2), b=(math.pi / 4, -math.pi / 4)):
    # index order |bob, alice>
    e = lambda x, y: np.trace(rho @ np.kron(spin(y), spin(x))).real
    return e(a[0], b[0]) + e(a[0], b[1]) + e(a[1], b[0]) - e(a[1], b[1])
