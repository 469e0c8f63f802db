"""Ladder-space plumbing: states, operators, and the beam splitter."""

import numpy as np
import pytest

from lossylab.fock import (DensityOperator, PureState, beam_splitter_apply,
                           beam_splitter_unitary, displacement_matrix,
                           make_coherent, make_fock, make_squeezed_vacuum,
                           mode_operators, partial_trace, random_mixed,
                           random_pure, tensor, thermal_state)


def test_pure_state_normalizes_and_records_tail():
    psi = PureState(np.array([3.0, 4.0]), 2)
    np.testing.assert_allclose(np.linalg.norm(psi.amplitudes), 1.0, atol=1e-15)
    assert psi.tail_weight == 0.0

    chopped = make_coherent(2.0, 4)
    assert chopped.tail_weight > 1e-6
    assert chopped.truncation_warning
    assert not make_coherent(0.5, 30).truncation_warning


def test_pure_state_shape_and_zero_vector_rejected():
    with pytest.raises(ValueError):
        PureState(np.zeros(3), 3)
    with pytest.raises(ValueError):
        PureState(np.ones(4), 3)


def test_density_validation():
    good = np.diag([0.25, 0.75]).astype(complex)
    DensityOperator(good, 2)
    with pytest.raises(ValueError):
        DensityOperator(good * 2.0, 2)
    bad_herm = good.copy()
    bad_herm[0, 1] = 0.3
    with pytest.raises(ValueError):
        DensityOperator(bad_herm, 2)
    indefinite = np.diag([1.5, -0.5]).astype(complex)
    with pytest.raises(ValueError):
        DensityOperator(indefinite, 2)
    DensityOperator(indefinite, 2, physical=False)


def test_embedding_grows_but_never_shrinks():
    rho = make_fock(1, 3).density()
    big = rho.embedded(6)
    assert big.cutoff == 6
    np.testing.assert_allclose(big.matrix[:3, :3], rho.matrix, atol=0)
    assert np.all(big.matrix[3:, :] == 0)
    with pytest.raises(ValueError):
        rho.embedded(2)
    psi = make_fock(0, 4)
    assert psi.embedded(4).cutoff == 4
    with pytest.raises(ValueError):
        psi.embedded(3)


def test_mode_operator_algebra():
    c = 9
    ops = mode_operators(c)
    comm = ops.annihilate @ ops.create - ops.create @ ops.annihilate
    np.testing.assert_allclose(comm[: c - 1, : c - 1], np.eye(c - 1), atol=1e-14)
    np.testing.assert_allclose(ops.number, ops.create @ ops.annihilate, atol=1e-14)
    x_from_ladder = (ops.create + ops.annihilate) / np.sqrt(2.0)
    p_from_ladder = 1j * (ops.create - ops.annihilate) / np.sqrt(2.0)
    np.testing.assert_allclose(ops.x, x_from_ladder, atol=1e-14)
    np.testing.assert_allclose(ops.p, p_from_ladder, atol=1e-14)


def test_state_factories_match_closed_forms():
    n2 = make_fock(2, 5)
    assert n2.amplitudes[2] == 1.0 and np.count_nonzero(n2.amplitudes) == 1

    alpha = 0.7 - 0.2j
    coh = make_coherent(alpha, 40)
    n = np.arange(40)
    from scipy.special import gammaln
    expected = np.exp(-abs(alpha) ** 2 / 2
                      + n * np.log(complex(alpha)) - gammaln(n + 1) / 2)
    np.testing.assert_allclose(coh.amplitudes, expected, atol=1e-12)
    np.testing.assert_allclose(coh.mean_photon_number(), abs(alpha) ** 2, atol=1e-12)

    sq = make_squeezed_vacuum(0.5, 40)
    assert np.all(np.abs(sq.amplitudes[1::2]) < 1e-15)
    np.testing.assert_allclose(sq.mean_photon_number(), np.sinh(0.5) ** 2,
                               atol=1e-10)

    th = thermal_state(0.8, 60)
    pops = np.diag(th.matrix).real
    ratio = pops[1:6] / pops[:5]
    np.testing.assert_allclose(ratio, 0.8 / 1.8, atol=1e-12)


def test_random_states_are_reproducible_and_valid():
    a = random_pure(5, 7)
    b = random_pure(5, 7)
    np.testing.assert_array_equal(a.amplitudes, b.amplitudes)
    rho = random_mixed(9, 6, rank=3)
    again = random_mixed(9, 6, rank=3)
    np.testing.assert_array_equal(rho.matrix, again.matrix)
    eig = np.linalg.eigvalsh(rho.matrix)
    assert eig.min() >= -1e-12
    assert np.sum(eig > 1e-10) == 3


def test_displacement_is_unitary_on_interior():
    c = 30
    d = displacement_matrix(0.6 + 0.3j, c)
    inner = 12
    product = (d.conj().T @ d)[:inner, :inner]
    np.testing.assert_allclose(product, np.eye(inner), atol=1e-10)


def test_beam_splitter_blocks_and_single_photon_rule():
    c = 6
    t = 0.37
    u = beam_splitter_unitary(c, c, t)
    np.testing.assert_allclose(u.imag, 0.0, atol=1e-15)
    np.testing.assert_allclose(u.T @ u, np.eye(c * c), atol=1e-12)
    # |1,0> -> sqrt(T)|1,0> + sqrt(1-T)|0,1>
    vec = np.zeros(c * c)
    vec[1 * c + 0] = 1.0
    out = u @ vec
    np.testing.assert_allclose(out[1 * c + 0], np.sqrt(t), atol=1e-12)
    np.testing.assert_allclose(out[0 * c + 1], np.sqrt(1 - t), atol=1e-12)
    assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-12)


def test_hong_ou_mandel_cancellation():
    c = 4
    u = beam_splitter_unitary(c, c, 0.5)
    vec = np.zeros(c * c)
    vec[1 * c + 1] = 1.0
    out = u @ vec
    assert abs(out[1 * c + 1]) < 1e-12
    np.testing.assert_allclose(abs(out[0 * c + 2]) ** 2, 0.5, atol=1e-12)
    np.testing.assert_allclose(abs(out[2 * c + 0]) ** 2, 0.5, atol=1e-12)


def test_tensor_and_partial_trace_roundtrip():
    rho = random_mixed(3, 5, rank=2)
    sig = random_mixed(4, 4, rank=3)
    pair = tensor(rho, sig)
    back1 = partial_trace(pair, keep=1)
    back2 = partial_trace(pair, keep=2)
    np.testing.assert_allclose(back1.matrix, rho.matrix, atol=1e-12)
    np.testing.assert_allclose(back2.matrix, sig.matrix, atol=1e-12)


def test_beam_splitter_apply_preserves_trace_and_inverts():
    rho = random_mixed(11, 4, rank=2)
    sig = random_mixed(12, 4, rank=2)
    pair = tensor(rho, sig)
    rotated = beam_splitter_apply(pair, 0.3)
    assert np.trace(rotated.matrix) == pytest.approx(1.0, abs=1e-12)
    undone = beam_splitter_apply(rotated, 0.3, inverse=True)
    np.testing.assert_allclose(undone.matrix, pair.matrix, atol=1e-12)
