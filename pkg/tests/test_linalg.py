import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcomplement.linalg import (
    I2,
    SIGMA_X,
    SIGMA_Z,
    eig_hermitian,
    is_hermitian,
    is_psd,
    is_unitary,
    kron,
    partial_trace_alice,
    partial_trace_bob,
    polar_decompose,
    random_unitary,
    trace_norm,
)

import oracles

reals = st.floats(-10, 10, allow_nan=False)


def hermitian_from(p, r, x, y):
    return np.array([[p, x + 1j * y], [x - 1j * y, r]])


def random_hermitian(rng, dim):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (z + z.conj().T) / 2


def test_eig_examples():
    assert np.allclose(eig_hermitian(I2).eigenvalues, [1, 1])
    assert np.allclose(eig_hermitian(SIGMA_Z).eigenvalues, [-1, 1])
    t = np.diag([-0.3, 0.3])
    assert np.allclose(eig_hermitian(t).eigenvalues, [-0.3, 0.3], atol=1e-15)


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValueError, match="not Hermitian"):
        eig_hermitian(np.array([[0, 1], [0, 0]]))


def test_eig_rejects_bad_shape():
    with pytest.raises(ValueError):
        eig_hermitian(np.eye(3))


@given(reals, reals, reals, reals)
@settings(max_examples=300)
def test_eig2_matches_lapack(p, r, x, y):
    h = hermitian_from(p, r, x, y)
    eig = eig_hermitian(h)
    scale = max(1.0, np.abs(eig.eigenvalues).max())
    assert np.allclose(eig.eigenvalues, np.linalg.eigvalsh(h), atol=1e-12 * scale)
    v = eig.eigenvectors
    assert np.allclose(v.conj().T @ v, I2, atol=1e-12)
    assert np.allclose(h @ v, v * eig.eigenvalues, atol=1e-12 * scale)
    assert np.allclose(eig.reconstruct(), h, atol=1e-12 * scale)


def test_eig4_reconstructs():
    rng = np.random.default_rng(1)
    for _ in range(100):
        h = random_hermitian(rng, 4)
        eig = eig_hermitian(h)
        assert np.all(np.diff(eig.eigenvalues) >= 0)
        assert np.allclose(eig.reconstruct(), h, atol=1e-12)


def test_eig2_near_degenerate_is_stable():
    h = np.array([[1.0, 1e-17], [1e-17, 1.0 + 1e-16]])
    eig = eig_hermitian(h)
    assert np.allclose(eig.reconstruct(), h, atol=1e-15)


def test_predicates():
    assert is_hermitian(SIGMA_X) and is_unitary(SIGMA_X) and not is_psd(SIGMA_X)
    assert is_psd(np.diag([1.0, 0.0]))
    assert not is_hermitian(np.array([[0, 1], [0, 0]]))


def test_kron_ordering():
    assert np.allclose(kron(I2, I2), np.eye(4))
    assert np.allclose(kron(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0]))
    ket00 = np.array([1, 0, 0, 0])
    assert np.allclose(kron(SIGMA_Z, SIGMA_X) @ ket00, [0, 1, 0, 0])
    with pytest.raises(ValueError):
        kron(np.eye(4), I2)


def test_partial_trace_examples():
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    assert np.allclose(partial_trace_alice(np.outer(phi, phi)), I2 / 2)
    # (I x m0)|psi> for a = 1/2, Lambda = 1, theta = 0 is (2|00> + |11>)/sqrt(10)
    v = np.array([2, 0, 0, 1]) / np.sqrt(10)
    assert np.allclose(partial_trace_alice(np.outer(v, v)), np.diag([0.4, 0.1]))
    with pytest.raises(ValueError):
        partial_trace_alice(I2)


def test_partial_trace_of_products():
    rng = np.random.default_rng(2)
    for _ in range(1000):
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        assert np.allclose(partial_trace_alice(kron(b, a)), np.trace(a) * b, atol=1e-12)
        assert np.allclose(partial_trace_bob(kron(b, a)), np.trace(b) * a, atol=1e-12)


def test_partial_trace_matches_loops():
    rng = np.random.default_rng(3)
    for _ in range(50):
        rho = random_hermitian(rng, 4)
        assert np.allclose(partial_trace_alice(rho), oracles.ptrace_alice(rho))
        assert np.allclose(partial_trace_bob(rho), oracles.ptrace_bob(rho))


def test_polar_examples():
    rng = np.random.default_rng(4)
    u = random_unitary(2, rng)
    p, w = polar_decompose(u)
    assert np.allclose(p, I2, atol=1e-12) and np.allclose(w, u, atol=1e-12)
    m = np.array([[2.0, 0.5], [0.5, 1.0]])
    p, w = polar_decompose(m)
    assert np.allclose(p, m, atol=1e-12) and np.allclose(w, I2, atol=1e-12)


def test_polar_random_and_singular():
    rng = np.random.default_rng(5)
    mats = [rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(1000)]
    mats.append(np.array([[1.0, 1.0], [0.0, 0.0]]))
    mats.append(np.zeros((2, 2)))
    for m in mats:
        p, u = polar_decompose(m)
        assert is_psd(p, 1e-12)
        assert is_unitary(u, 1e-12)
        assert np.allclose(p @ u, m, atol=1e-12)


def test_trace_norm():
    assert trace_norm(np.diag([-0.3, 0.3])) == pytest.approx(0.6, abs=1e-15)
    assert trace_norm(np.zeros((2, 2))) == 0.0
    with pytest.raises(ValueError):
        trace_norm(np.array([[0, 1], [0, 0]]))


def test_trace_norm_unitary_invariance():
    rng = np.random.default_rng(6)
    for _ in range(200):
        h = random_hermitian(rng, 2)
        w = random_unitary(2, rng)
        assert trace_norm(w @ h @ w.conj().T) == pytest.approx(trace_norm(h), abs=1e-12)
        assert trace_norm(h) == pytest.approx(np.linalg.svd(h, compute_uv=False).sum(), abs=1e-12)
