import math

import numpy as np
import pytest

from qcomplement.eavesdrop import (
    ProtocolConfig,
    chsh_bound_quality,
    chsh_exact,
    eve_channel,
    god_view,
    outcome_distribution,
    run_protocol,
    strength_for_quality,
)
from qcomplement.measurement import PovmParams, quality
from qcomplement.states import bell_state, classical_mixture, random_density

import oracles

SQRT2 = math.sqrt(2)


def test_chsh_examples():
    assert chsh_exact(bell_state("phi+")) == pytest.approx(2 * SQRT2, abs=1e-12)
    assert chsh_exact(classical_mixture()) == pytest.approx(SQRT2, abs=1e-12)
    prod = np.zeros((4, 4))
    prod[0, 0] = 1
    assert chsh_exact(prod) == pytest.approx(SQRT2, abs=1e-12)


def test_chsh_matches_oracle():
    rng = np.random.default_rng(0)
    for _ in range(50):
        rho = random_density(rng).matrix
        assert chsh_exact(rho) == pytest.approx(oracles.chsh(rho), abs=1e-12)


def test_eve_channel_examples():
    rho = bell_state("phi+").density().matrix
    assert np.allclose(eve_channel(rho, PovmParams(0.7, 0.1, 1.0), 0.0).matrix, rho)
    assert np.allclose(eve_channel(rho, PovmParams(0.0), 1.0).matrix, classical_mixture().matrix, atol=1e-15)
    with pytest.raises(ValueError):
        eve_channel(rho, PovmParams(0.0), 1.5)


def test_exact_chsh_after_intercept():
    rho = bell_state("phi+")
    for lam in np.concatenate([[0.0], np.geomspace(1e-3, 50, 30)]):
        s = chsh_exact(eve_channel(rho, PovmParams(float(lam)), 1.0))
        assert s == pytest.approx(SQRT2 * (1 + quality(lam)), abs=1e-10)


def test_classical_bound_crossing():
    f = chsh_bound_quality()
    lam = strength_for_quality(f)
    assert quality(lam) == pytest.approx(f, abs=1e-14)
    rep = run_protocol(ProtocolConfig(n_pairs=1000, eve_present=True, eve_params=PovmParams(lam)))
    assert rep.s_exact == pytest.approx(2.0, abs=1e-12)
    assert rep.at_classical_bound
    with pytest.raises(ValueError):
        strength_for_quality(1.0)


def test_outcome_distribution_sums_and_correlator():
    rho = bell_state("phi+").density()
    p = outcome_distribution(rho, 0.0, math.pi / 4)
    assert p.sum() == pytest.approx(1.0)
    assert p[0] - p[1] - p[2] + p[3] == pytest.approx(1 / SQRT2)


def test_no_eve_and_full_intercept():
    clean = run_protocol(ProtocolConfig(n_pairs=10_000, rng_seed=1))
    assert abs(clean.s_estimate - 2 * SQRT2) <= 0.1 and not clean.detection_verdict
    assert not clean.inconclusive and sum(map(sum, clean.counts)) == 10_000
    hit = run_protocol(ProtocolConfig(n_pairs=10_000, eve_present=True, eve_params=PovmParams(0.0), rng_seed=1))
    assert abs(hit.s_estimate - SQRT2) <= 0.1 and hit.detection_verdict
    assert hit.god_view_e_bar == pytest.approx(0.0, abs=1e-12) and hit.bound_holds


def test_weak_eve_hides():
    rep = run_protocol(ProtocolConfig(n_pairs=10_000, eve_present=True, eve_params=PovmParams(50.0), rng_seed=4))
    assert not rep.detection_verdict and rep.bound_holds


def test_god_view_bound_across_strengths():
    for lam in np.concatenate([[0.0], np.geomspace(1e-3, 50, 40)]):
        for theta in (0.0, 0.4, math.pi / 4):
            e, bound = god_view(PovmParams.from_theta(float(lam), theta))
            assert e <= bound + 1e-9
    # at theta = 0 the remaining entanglement is 2 Lambda^2 / N^2, tight only for Lambda = 0
    for lam in (0.0, 1.0, 4.0):
        e, bound = god_view(PovmParams(lam))
        n2 = 1 + 2 * lam * (1 + lam)
        assert e == pytest.approx(2 * lam**2 / n2, abs=1e-12)
        assert bound == pytest.approx(2 * lam * (1 + lam) / n2, abs=1e-12)


def test_partial_intercept_mixes_linearly():
    p = PovmParams(0.5)
    rep = run_protocol(ProtocolConfig(n_pairs=100, eve_present=True, eve_params=p, intercept_fraction=0.3))
    e, bound = god_view(p)
    assert rep.god_view_e_bar == pytest.approx(0.3 * e + 0.7)
    assert rep.s_exact == pytest.approx(0.3 * SQRT2 * (1 + quality(0.5)) + 0.7 * 2 * SQRT2, abs=1e-12)
    rho = eve_channel(bell_state("phi+"), p, 0.3)
    assert rep.s_exact == pytest.approx(chsh_exact(rho), abs=1e-15)


def test_reproducible():
    cfg = ProtocolConfig(n_pairs=5000, eve_present=True, eve_params=PovmParams(0.8, 0.1, 2.0), rng_seed=99)
    assert run_protocol(cfg) == run_protocol(cfg)
    assert run_protocol(cfg).render() == run_protocol(cfg).render()
    assert run_protocol(cfg) != run_protocol(ProtocolConfig(n_pairs=5000, eve_present=True,
                                                             eve_params=PovmParams(0.8, 0.1, 2.0), rng_seed=100))


def test_s_exact_monotone_in_strength():
    lams = np.concatenate([[0.0], np.geomspace(1e-3, 50, 60)])
    s = [chsh_exact(eve_channel(bell_state("phi+"), PovmParams(float(l)), 1.0)) for l in lams]
    assert np.all(np.diff(s) >= -1e-12)


def test_concentration_over_seeds():
    n = 10_000
    delta = 1e-3
    tol = 4 * math.sqrt(math.log(2 / delta) / (2 * n / 4))
    excursions = 0
    for seed in range(100):
        rep = run_protocol(ProtocolConfig(n_pairs=n, eve_present=True, eve_params=PovmParams(0.6), rng_seed=seed))
        excursions += abs(rep.s_estimate - rep.s_exact) > tol
    assert excursions <= 1


def test_inconclusive_flag():
    rep = run_protocol(ProtocolConfig(n_pairs=20))
    assert rep.inconclusive
    assert not run_protocol(ProtocolConfig(n_pairs=2000)).inconclusive


def test_config_validation():
    with pytest.raises(ValueError):
        ProtocolConfig(n_pairs=0)
    with pytest.raises(ValueError):
        ProtocolConfig(sacrifice_fraction=0.0)
    with pytest.raises(ValueError):
        ProtocolConfig(intercept_fraction=-0.1)
    with pytest.raises(ValueError):
        ProtocolConfig(rng_seed=-1)
    assert ProtocolConfig(n_pairs=1000, sacrifice_fraction=0.25).n_test == 250
