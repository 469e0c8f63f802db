"""Purity, Renyi and von Neumann entropies, and the dark-port purity polynomial.

Sending rho through a loss channel of transmissivity T multiplies the m-photon
sector of the dark port of a balanced two-copy interference by (1-2T)^m, so
Tr[rho_T^2] = sum_m p_m (1-2T)^m where p_m are the dark-port number populations
of rho x rho. The polynomial is entire in T, which is what the extended-range
checks evaluate; coefficients are populations, hence nonnegative for states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.special import gammaln

from .fock import (DensityOperator, PureState, TwoModeOperator, beam_splitter_unitary,
                   mode_operators)
from .loss import apply_loss

EIG_FLOOR = 1e-14
NEGATIVE_EIG_LIMIT = -1e-8


def purity(rho: DensityOperator) -> float:
    return float(np.einsum("ij,ji->", rho.matrix, rho.matrix).real)


def _spectrum(rho: DensityOperator) -> np.ndarray:
    eigs = np.linalg.eigvalsh(rho.matrix)
    if eigs[0] < NEGATIVE_EIG_LIMIT:
        raise ValueError(f"operator has eigenvalue {eigs[0]:.3e}; not a state")
    return np.clip(eigs, 0.0, None)


def von_neumann(rho: DensityOperator) -> float:
    """H_1 in nats; eigenvalues below 1e-14 contribute 0 log 0 = 0."""
    eigs = _spectrum(rho)
    eigs = eigs[eigs > EIG_FLOOR]
    return float(-np.sum(eigs * np.log(eigs)))


def renyi_entropy(rho: DensityOperator, order: float) -> float:
    """H_alpha = log(Tr[rho^alpha]) / (1 - alpha) in nats; order 1 dispatches to H_1."""
    if order <= 0:
        raise ValueError("order must be positive")
    if order == 1:
        return von_neumann(rho)
    eigs = _spectrum(rho)
    eigs = eigs[eigs > EIG_FLOOR]
    return float(np.log(np.sum(eigs ** order)) / (1.0 - order))


@dataclass(frozen=True)
class PurityPolynomial:
    """Polynomial sum_m coefficients[m] * lambda^m with lambda = 1 - 2T."""

    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.array(self.coefficients, dtype=float)
        coeffs.flags.writeable = False
        object.__setattr__(self, "coefficients", coeffs)

    def value_at_lambda(self, lam):
        return npoly.polyval(np.asarray(lam, dtype=float), self.coefficients)

    def value(self, transmissivity):
        return self.value_at_lambda(1.0 - 2.0 * np.asarray(transmissivity, dtype=float))

    def derivative(self, transmissivity, order: int = 1):
        """d^order / dT^order via the chain rule (dlambda/dT = -2)."""
        dcoeffs = npoly.polyder(self.coefficients, m=order)
        lam = 1.0 - 2.0 * np.asarray(transmissivity, dtype=float)
        return (-2.0) ** order * npoly.polyval(lam, dcoeffs)

    def as_t_polynomial(self) -> np.polynomial.Polynomial:
        lam = np.polynomial.Polynomial([1.0, -2.0])
        acc = np.polynomial.Polynomial([0.0])
        for m, c in enumerate(self.coefficients):
            acc = acc + c * lam ** m
        return acc

    def degree(self) -> int:
        return len(self.coefficients) - 1


# ---------------------------------------------------------------------------
# dark-port population engine
# ---------------------------------------------------------------------------


def _mode2_populations_of_vector(vec: np.ndarray, dim: int) -> np.ndarray:
    return np.sum(np.abs(vec.reshape(dim, dim)) ** 2, axis=0)


def _signed_eigenpairs(rho: DensityOperator):
    w, v = np.linalg.eigh(rho.matrix)
    keep = np.abs(w) > 1e-15
    return w[keep], v[:, keep]


def pair_dark_populations(rho: DensityOperator, sigma: DensityOperator) -> np.ndarray:
    """Number populations of the difference mode of rho x sigma after balanced mixing.

    Spectral path: each eigenvector pair is sent through B(1/2)^dag as a state
    vector, which is exact because the embedding ladder holds the total photon
    number. Signed eigenvalues are kept so indefinite operators work too.
    """
    d = rho.cutoff + sigma.cutoff - 1
    u_conj = beam_splitter_unitary(d, d, 0.5).conj()
    wr, vr = _signed_eigenpairs(rho)
    ws, vs = _signed_eigenpairs(sigma)
    pops = np.zeros(d)
    for i, wi in enumerate(wr):
        left = np.zeros(d, dtype=complex)
        left[: rho.cutoff] = vr[:, i]
        for j, wj in enumerate(ws):
            right = np.zeros(d, dtype=complex)
            right[: sigma.cutoff] = vs[:, j]
            out = np.kron(left, right) @ u_conj  # row vector times conj(B) = B^dag |left, right>
            pops += (wi * wj) * _mode2_populations_of_vector(out, d)
    return pops


def dark_port_distribution(phi: TwoModeOperator) -> np.ndarray:
    """Difference-mode number populations of an arbitrary two-mode operator.

    The operator is zero-padded so every populated total-photon-number block
    is complete before rotating; on an incomplete block the truncated
    splitter matrix is not unitary and the marginal would be corrupted.
    """
    c1, c2 = phi.cutoffs
    d = c1 + c2 - 1
    idx = (np.arange(c1)[:, None] * d + np.arange(c2)[None, :]).ravel()
    big = np.zeros((d * d, d * d), dtype=complex)
    big[np.ix_(idx, idx)] = phi.matrix
    u = beam_splitter_unitary(d, d, 0.5)
    rotated = u.conj().T @ big @ u
    diag = np.diag(rotated).real.reshape(d, d)
    return diag.sum(axis=0)


def purity_polynomial(rho: DensityOperator) -> PurityPolynomial:
    return PurityPolynomial(pair_dark_populations(rho, rho))


def overlap_polynomial(rho: DensityOperator, sigma: DensityOperator) -> PurityPolynomial:
    return PurityPolynomial(pair_dark_populations(rho, sigma))


def min_purity_pure(psi: PureState) -> float:
    """Closed-form minimum purity of a pure state under loss (attained at T = 1/2)."""
    c = psi.cutoff
    amps = psi.amplitudes
    total = 0.0
    for n in range(2 * c - 1):
        s = 0.0 + 0.0j
        for k in range(max(0, n - c + 1), min(n, c - 1) + 1):
            log_binom = 0.5 * (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))
            s += amps[k] * amps[n - k] * np.exp(log_binom)
        total += abs(s) ** 2 / 2.0 ** n
    return float(total)


# ---------------------------------------------------------------------------
# overlaps, mutual information, closed forms
# ---------------------------------------------------------------------------


def hs_overlap(rho: DensityOperator, sigma: DensityOperator) -> float:
    if rho.cutoff != sigma.cutoff:
        d = max(rho.cutoff, sigma.cutoff)
        rho, sigma = rho.embedded(d), sigma.embedded(d)
    return float(np.einsum("ij,ji->", rho.matrix, sigma.matrix).real)


def lossy_overlap(rho: DensityOperator, sigma: DensityOperator, transmissivity: float) -> float:
    return hs_overlap(apply_loss(rho, transmissivity), apply_loss(sigma, transmissivity))


def mutual_information_bs(rho: DensityOperator, transmissivity: float) -> float:
    """I between the two outputs of B(T) fed with rho and vacuum.

    The marginals are the loss channel at T and 1-T; the joint entropy equals
    H_1(rho) because the dilation is unitary and the ancilla is pure.
    """
    h_a = von_neumann(apply_loss(rho, transmissivity))
    h_b = von_neumann(apply_loss(rho, 1.0 - transmissivity))
    return h_a + h_b - von_neumann(rho)


def fock_purity_closed_form(n: int, transmissivity):
    """Purity of a lossy number state, valid for any real transmissivity."""
    t = np.asarray(transmissivity, dtype=float)
    scalar = t.ndim == 0
    tt = np.atleast_1d(t)
    acc = np.zeros_like(tt)
    for k in range(n + 1):
        binom = np.exp(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))
        acc += (binom * tt ** k * (1.0 - tt) ** (n - k)) ** 2
    return float(acc[0]) if scalar else acc


def fock_basis_lossy_purity(rho: DensityOperator, transmissivity: float) -> float:
    """Purity of E_T[rho] summed directly in the number basis.

    Independent of the Kraus route: purity = sum_{l,l'} T^(l+l') / (l! l'!)
    |Tr[a^dag^l (1-T)^(a^dag a) a^l' rho]|^2.
    """
    t = float(transmissivity)
    c = rho.cutoff
    ops = mode_operators(c)
    decay = np.diag((1.0 - t) ** np.arange(c)).astype(complex)
    total = 0.0
    left = np.eye(c, dtype=complex)
    for l in range(c):
        if l > 0:
            left = ops.create @ left
        right = np.eye(c, dtype=complex)
        for lp in range(c):
            if lp > 0:
                right = ops.annihilate @ right
            tr = np.trace(left @ decay @ right @ rho.matrix)
            weight = t ** (l + lp) * np.exp(-gammaln(l + 1) - gammaln(lp + 1))
            total += weight * abs(tr) ** 2
    return float(total)


def purity_derivative(rho: DensityOperator, transmissivity: float, order: int = 1) -> float:
    """d^order Tr[rho_T^2] / dT^order via the dark-port polynomial."""
    return float(purity_polynomial(rho).derivative(transmissivity, order))


def purity_rate_operator_form(rho: DensityOperator, transmissivity: float) -> float:
    """dP/dT = (2/T)(Tr[N rho_T rho_T] - Tr[a rho_T a^dag rho_T]); T > 0."""
    t = float(transmissivity)
    if t <= 0:
        raise ValueError("operator form of the purity rate needs T > 0")
    rho_t = apply_loss(rho, t).matrix
    ops = mode_operators(rho.cutoff)
    term_n = np.einsum("ij,ji->", ops.number @ rho_t, rho_t).real
    term_a = np.einsum("ij,ji->", ops.annihilate @ rho_t @ ops.create, rho_t).real
    return float(2.0 / t * (term_n - term_a))
