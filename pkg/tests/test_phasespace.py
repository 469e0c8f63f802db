"""Characteristic functions, quasiprobabilities, and phase-space purity routes."""

import numpy as np
import pytest

from lossylab.fock import make_coherent, make_fock, random_mixed, random_pure
from lossylab.loss import apply_loss
from lossylab.phasespace import (GridSpec, char_fn, convolve_quasi,
                                 laplace_purity, loss_identity_chi,
                                 loss_identity_quasi, lossy_chi_integrand,
                                 overlap_from_quasi, purity_from_chi,
                                 purity_lossy_from_chi, quasi_prob,
                                 quasi_prob_grid, wigner_from_parity,
                                 write_grid_csv)
from lossylab.purity import hs_overlap, purity


def test_char_fn_vacuum_closed_form():
    vac = make_fock(0, 3).density()
    pts = np.array([0.3 + 0.1j, -1.2j, 0.9])
    for s in (-1.0, 0.0, 0.5):
        vals = char_fn(vac, pts, s)
        expected = np.exp((s - 1.0) * np.abs(pts) ** 2 / 2.0)
        np.testing.assert_allclose(vals, expected, atol=1e-12)


def test_husimi_of_coherent_state():
    beta = 0.7 - 0.2j
    rho = make_coherent(beta, 22).density()
    pts = np.array([0.0, 0.5 + 0.5j, beta, -1.0j])
    vals = quasi_prob(rho, pts, -1.0)
    expected = np.exp(-np.abs(pts - beta) ** 2) / np.pi
    np.testing.assert_allclose(vals, expected, atol=1e-10)


def test_wigner_of_lossy_single_photon():
    # closed form: (2/pi) e^{-2|a|^2} ((1-T) + T(4|a|^2 - 1))
    one = make_fock(1, 2).density()
    pts = np.array([0.0, 0.4, 0.3 + 0.6j, -1.1j])
    for t in (0.1, 0.5, 0.75):
        rho = apply_loss(one, t)
        vals = quasi_prob(rho, pts, 0.0)
        a2 = np.abs(pts) ** 2
        expected = (2.0 / np.pi) * np.exp(-2.0 * a2) * (
            (1.0 - t) + t * (4.0 * a2 - 1.0))
        np.testing.assert_allclose(vals, expected, atol=1e-10)
        origin = quasi_prob(rho, np.array([0.0]), 0.0)[0]
        assert origin == pytest.approx((2.0 / np.pi) * (1.0 - 2.0 * t), abs=1e-10)


def test_wigner_parity_route_agrees():
    rho = apply_loss(random_mixed(7, 6, rank=3), 0.6)
    for alpha in (0.0, 0.3 - 0.2j, 1.1j):
        direct = quasi_prob(rho, np.array([alpha]), 0.0)[0]
        parity = wigner_from_parity(rho, alpha, working_cutoff=40)
        assert parity == pytest.approx(direct, abs=1e-9)


def test_positive_order_gaussian_path():
    # s > 0 evaluation takes an alternate algebraic route; the loss identity
    # exercised at s = 0.5 checks it against the ordinary path
    rho1 = random_pure(13, 6).density()
    for alpha in (0.2, 0.4 + 0.3j):
        report = loss_identity_quasi(rho1, 0.6, alpha, 0.5)
        assert report.passed
        assert report.margin > -1e-9


def test_loss_identity_chi():
    rho1 = random_mixed(19, 6, rank=2)
    for s in (-0.5, 0.0):
        for alpha in (0.3, -0.2 + 0.7j):
            report = loss_identity_chi(rho1, 0.4, alpha, s)
            assert report.passed
            assert report.lhs < 1e-10


def test_purity_from_chi_routes():
    rho = apply_loss(random_mixed(23, 6, rank=3), 0.7)
    ref = purity(rho)
    assert purity_from_chi(rho, -0.4) == pytest.approx(ref, abs=1e-6)
    assert purity_from_chi(rho, 0.0) == pytest.approx(ref, abs=1e-6)


def test_purity_lossy_from_chi():
    rho1 = random_mixed(29, 6, rank=2)
    for t in (0.25, 0.6):
        ref = purity(apply_loss(rho1, t))
        assert purity_lossy_from_chi(rho1, t, -0.3) == pytest.approx(ref, abs=1e-6)
    _, _, integrand = lossy_chi_integrand(rho1, 0.3, -0.3)
    assert np.all(integrand >= 0.0)


def test_laplace_purity_single_photon():
    one = make_fock(1, 2).density()
    assert laplace_purity(one, 0.25) == pytest.approx(0.625, abs=1e-8)
    # cross-check against the trace at another transmissivity
    assert laplace_purity(one, 0.4) == pytest.approx(
        purity(apply_loss(one, 0.4)), abs=1e-8)


def test_overlap_from_quasi():
    vac = make_fock(0, 4).density()
    one = make_fock(1, 4).density()
    for s in (-0.5, 0.5):
        assert abs(overlap_from_quasi(vac, one, s)) < 1e-10
    rho = random_mixed(37, 5, rank=2)
    sig = random_mixed(38, 5, rank=3)
    assert overlap_from_quasi(rho, sig, -0.5) == pytest.approx(
        hs_overlap(rho, sig), abs=1e-6)


def test_grid_integral_and_convolution():
    vac = make_fock(0, 2).density()
    grid = GridSpec(6.0, 101)
    wig = quasi_prob_grid(vac, 0.0, grid)
    assert wig.integral() == pytest.approx(1.0, abs=1e-6)
    assert wig.values[50, 50] == pytest.approx(2.0 / np.pi, abs=1e-10)
    hus = convolve_quasi(wig, -1.0)
    assert hus.order == pytest.approx(-1.0)
    assert hus.values[50, 50] == pytest.approx(1.0 / np.pi, abs=1e-3)
    with pytest.raises(ValueError):
        convolve_quasi(wig, 0.5)


def test_write_grid_csv_format(tmp_path):
    one = make_fock(1, 2).density()
    grid = GridSpec(3.0, 5)
    qgrid = quasi_prob_grid(one, 0.0, grid)
    out = tmp_path / "grid.csv"
    write_grid_csv(out, qgrid, "fock:1", transmissivity=0.5)
    lines = out.read_text().splitlines()
    assert lines[0] == f"# s={0.0!r},T={0.5!r},state=fock:1"
    assert lines[1] == "re_alpha,im_alpha,value"
    assert len(lines) == 2 + 25
    first = lines[2].split(",")
    assert float(first[0]) == pytest.approx(-3.0)
    assert float(first[1]) == pytest.approx(-3.0)

    out2 = tmp_path / "grid2.csv"
    write_grid_csv(out2, qgrid, "fock:1", transmissivity=None)
    assert out2.read_text().splitlines()[0] == f"# s={0.0!r},T=none,state=fock:1"
