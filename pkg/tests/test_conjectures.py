"""Open-question scans: log-convexity, pair-fairness witness, dark-port g2."""

import numpy as np
import pytest

from lossylab.conjectures import (bell_like_pair, dark_port_g2_scan,
                                  dark_port_state, ell_log_convexity_check,
                                  ell_log_convexity_corpus, fair_pair,
                                  fock_one_extended_range_report, g2,
                                  g_factorial, indefinite_convex_operator,
                                  lambda_zero_witness, log_convexity_corpus,
                                  log_convexity_scan, separable_01_pair,
                                  twin_photon_pair, unfairness_scan,
                                  unfairness_witness)
from lossylab.fock import (make_coherent, make_fock, make_squeezed_vacuum,
                           random_mixed, random_pure)
from lossylab.purity import dark_port_distribution, pair_dark_populations


def test_log_convexity_single_photon_unit_interval():
    one = make_fock(1, 2).density()
    res = log_convexity_scan(one, np.linspace(0.0, 1.0, 21))
    assert res.disposition == "no-violation-found"
    # log-convexity is saturated at the endpoints for a single photon
    margins = np.array([m for _, _, m in res.rows])
    assert margins.min() >= -1e-12
    assert abs(margins[0]) < 1e-12 and abs(margins[-1]) < 1e-12


def test_log_convexity_corpus_of_random_states():
    states = [(f"mixed:{seed}", random_mixed(seed, 7, rank=3)) for seed in range(6)]
    states += [(f"pure:{seed}", random_pure(seed, 7).density()) for seed in range(3)]
    res = log_convexity_corpus(states, np.linspace(0.0, 1.0, 21))
    assert res.disposition == "no-violation-found"
    assert res.min_margin >= -1e-9


def test_log_convexity_fails_outside_unit_interval():
    one = make_fock(1, 2).density()
    res = log_convexity_scan(one, np.linspace(1.05, 1.5, 10))
    assert res.disposition == "violation"
    assert res.min_margin == pytest.approx(-6.0, abs=1e-9)
    rep = fock_one_extended_range_report(1.2)
    assert not rep.passed
    assert rep.margin == pytest.approx(-1.92, abs=1e-9)


def test_indefinite_operator_satisfies_log_convexity():
    sigma = indefinite_convex_operator()
    assert sigma.physical is False
    eigs = np.linalg.eigvalsh(sigma.matrix)
    assert eigs.min() < -1e-3
    res = log_convexity_scan(sigma, np.linspace(0.01, 0.99, 25))
    assert res.disposition == "no-violation-found"
    assert res.min_margin == pytest.approx(0.7951, abs=1e-3)


def test_ell_log_convexity_proven_case():
    one = make_fock(1, 2).density()
    rep = ell_log_convexity_check(one, 0.25)
    assert rep.passed
    assert rep.lhs == pytest.approx(1.0 / 16.0, abs=1e-12)
    assert rep.rhs == pytest.approx(5.0 / 16.0, abs=1e-12)
    with pytest.raises(ValueError):
        ell_log_convexity_check(one, 0.5)


def test_ell_log_convexity_corpus():
    states = [(f"mixed:{seed}", random_mixed(seed, 6, rank=2)) for seed in (3, 8)]
    states += [("fock:1", make_fock(1, 6).density())]
    res = ell_log_convexity_corpus(states, np.linspace(0.05, 0.45, 9))
    assert res.disposition == "proven-case-verified"
    assert res.min_margin >= -1e-10


def test_witness_counterexample_margins_are_stable():
    bell = bell_like_pair()
    q = dark_port_distribution(bell)
    np.testing.assert_allclose(q[:3], [0.5, 0.5, 0.0], atol=1e-12)
    margins = [unfairness_witness(bell, lam).margin for lam in (-1.0, -0.3, 0.0, 0.7, 1.0)]
    for m in margins:
        assert m == pytest.approx(-0.25, abs=1e-12)
    # exact bit stability under re-evaluation
    again = [unfairness_witness(bell_like_pair(), lam).margin
             for lam in (-1.0, -0.3, 0.0, 0.7, 1.0)]
    assert margins == again

    sep = separable_01_pair()
    q = dark_port_distribution(sep)
    np.testing.assert_allclose(q[:3], [0.0, 1.0, 0.0], atol=1e-12)
    for lam in (-0.8, 0.0, 0.5):
        rep = unfairness_witness(sep, lam)
        assert rep.margin == pytest.approx(-1.0, abs=1e-12)
        assert not rep.passed

    with pytest.raises(ValueError):
        unfairness_witness(bell, 1.2)


def test_twin_photon_pair_margin_profile():
    twin = twin_photon_pair()
    q = dark_port_distribution(twin)
    np.testing.assert_allclose(q[:3], [0.5, 0.0, 0.5], atol=1e-12)
    for lam in (-0.9, -0.4, 0.0, 0.6, 1.0):
        rep = unfairness_witness(twin, lam)
        assert rep.passed
        assert rep.margin == pytest.approx((1.0 - lam ** 2) / 2.0, abs=1e-12)
    zero = lambda_zero_witness(twin)
    assert zero.passed


def test_unfairness_scan_dispositions():
    lam_grid = np.linspace(-1.0, 1.0, 21)
    fair = [(f"fair:{seed}", fair_pair(random_mixed(seed, 6, rank=3)))
            for seed in (1, 5, 9)]
    res = unfairness_scan(fair, lam_grid)
    assert res.disposition == "no-violation-found"
    assert res.min_margin > 0.0

    bad = [("bell-like", bell_like_pair()), ("separable-01", separable_01_pair())]
    res_bad = unfairness_scan(bad, lam_grid, expect_fail=True)
    assert res_bad.disposition == "violation"
    assert res_bad.min_margin == pytest.approx(-1.0, abs=1e-10)


def test_dark_port_of_coherent_pair_is_vacuum():
    rho = make_coherent(0.9, 18).density()
    dp = dark_port_state(rho, 0.0)
    assert dp.matrix[0, 0].real == pytest.approx(1.0, abs=1e-10)
    assert g2(dp) is None
    with pytest.raises(ValueError):
        dark_port_state(rho, 0.6)


def test_dark_port_of_squeezed_pair_g2():
    r = 0.5
    rho = make_squeezed_vacuum(r, 24).density()
    dp = dark_port_state(rho, 0.0)
    expected = 3.0 + 1.0 / np.sinh(r) ** 2
    assert g2(dp) == pytest.approx(expected, abs=2e-5)
    assert g_factorial(dp, 2) == pytest.approx(g2(dp), abs=1e-12)
    assert g_factorial(dp, 1) == pytest.approx(1.0, abs=1e-12)


def test_dark_port_g2_scan_no_violation():
    states = [(f"mixed:{seed}", random_mixed(seed, 8, rank=2)) for seed in (2, 7)]
    states += [(f"pure:{seed}", random_pure(seed, 8).density()) for seed in (4,)]
    res = dark_port_g2_scan(states, np.linspace(0.0, 0.45, 7))
    assert res.disposition == "no-violation-found"
    assert res.min_margin > 0.0


def test_fair_pair_matches_spectral_dark_populations():
    rho = random_mixed(13, 6, rank=2)
    q = dark_port_distribution(fair_pair(rho))
    p = pair_dark_populations(rho, rho)
    np.testing.assert_allclose(q, p, atol=1e-12)
