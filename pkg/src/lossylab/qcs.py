"""Quadrature coherence scale C^2 of a state, by four independent routes.

C^2 is the mean-square quadrature commutator normalized by purity. Routes:
commutator (definition), purity-rate (response of Tr[rho_T^2] to loss),
two-copy (swap-observable expectation), and a Lindblad moment form. A fifth,
kernel-based route integrates position/momentum kernels on a grid and is
looser (quadrature accuracy ~1e-4); all others agree to ~1e-8.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import DensityOperator, PureState, mode_operators
from .loss import apply_loss
from .purity import purity, purity_polynomial

ROUTE_COMMUTATOR = "commutator"
ROUTE_PURITY_RATE = "purity_rate"
ROUTE_TWO_COPY = "two_copy"
ROUTE_LINDBLAD = "lindblad"

COMMUTATOR_PAD = 2
STABILITY_TOL = 1e-9


@dataclass(frozen=True)
class QcsResult:
    c_squared: float
    route: str
    purity_used: float
    degenerate: bool = False

    def __post_init__(self):
        if self.c_squared < -1e-9:
            raise ValueError(f"C^2 must be nonnegative, got {self.c_squared}")


def _commutator_value(rho: DensityOperator, pad: int) -> float:
    emb = rho.embedded(max(rho.cutoff, rho.support() + 1 + pad))
    ops = mode_operators(emb.cutoff)
    total = 0.0
    for q in (ops.x, ops.p):
        comm = q @ emb.matrix - emb.matrix @ q
        # Tr([rho,Q][Q,rho]) = Tr[(-[Q,rho])([Q,rho])] = +sum |[Q,rho]|^2 entries
        total += float(np.sum(np.abs(comm) ** 2))
    return total


def qcs_commutator(rho: DensityOperator) -> QcsResult:
    """C^2 = (Tr[rho,X][X,rho] + Tr[rho,P][P,rho]) / (2 Tr[rho^2]).

    The cutoff is padded above the state's support so the truncated
    commutators are exact; the result must be stable under a larger pad.
    """
    val = _commutator_value(rho, COMMUTATOR_PAD)
    check = _commutator_value(rho, 2 * COMMUTATOR_PAD)
    if abs(val - check) > STABILITY_TOL:
        raise ValueError(f"commutator route not cutoff-stable (delta {abs(val - check):.3e})")
    p = purity(rho)
    return QcsResult(val / (2.0 * p), ROUTE_COMMUTATOR, p)


def qcs_purity_rate(rho1: DensityOperator, transmissivity: float) -> QcsResult:
    """C^2 of rho_T from the loss response: C^2 = (T / P(T)) dP/dT + 1."""
    t = float(transmissivity)
    if t == 0.0:
        # all states have been contracted to vacuum; the scale degenerates to 1
        return QcsResult(1.0, ROUTE_PURITY_RATE, 1.0, degenerate=True)
    poly = purity_polynomial(rho1)
    p = float(poly.value(t))
    rate = float(poly.derivative(t, 1))
    return QcsResult(t * rate / p + 1.0, ROUTE_PURITY_RATE, p)


def qcs_two_copy(rho: DensityOperator) -> QcsResult:
    """C^2 from two copies: Tr[(rho x rho) Nhat] / Tr[(rho x rho) Shat].

    Shat is the swap; Nhat = ((X1-X2)^2 + (P1-P2)^2)/2 Shat, and the identity
    (a1^dag - a2^dag)(a1 - a2) Shat = Nhat - Shat holds exactly.
    """
    emb = rho.embedded(max(rho.cutoff, rho.support() + 1 + COMMUTATOR_PAD))
    c = emb.cutoff
    ops = mode_operators(c)
    eye = np.eye(c, dtype=complex)
    x1, x2 = np.kron(ops.x, eye), np.kron(eye, ops.x)
    p1, p2 = np.kron(ops.p, eye), np.kron(eye, ops.p)
    swap = np.zeros((c * c, c * c), dtype=complex)
    for i in range(c):
        for j in range(c):
            swap[i * c + j, j * c + i] = 1.0
    nhat = 0.5 * ((x1 - x2) @ (x1 - x2) + (p1 - p2) @ (p1 - p2)) @ swap
    pair = np.kron(emb.matrix, emb.matrix)
    num = float(np.einsum("ij,ji->", pair, nhat).real)
    den = float(np.einsum("ij,ji->", pair, swap).real)
    return QcsResult(num / den, ROUTE_TWO_COPY, den)


def two_copy_swap_identity_deviation(cutoff: int) -> float:
    """Max deviation of (a1^dag - a2^dag)(a1 - a2) Shat from Nhat - Shat."""
    c = int(cutoff)
    ops = mode_operators(c)
    eye = np.eye(c, dtype=complex)
    x1, x2 = np.kron(ops.x, eye), np.kron(eye, ops.x)
    p1, p2 = np.kron(ops.p, eye), np.kron(eye, ops.p)
    a1, a2 = np.kron(ops.annihilate, eye), np.kron(eye, ops.annihilate)
    swap = np.zeros((c * c, c * c), dtype=complex)
    for i in range(c):
        for j in range(c):
            swap[i * c + j, j * c + i] = 1.0
    nhat = 0.5 * ((x1 - x2) @ (x1 - x2) + (p1 - p2) @ (p1 - p2)) @ swap
    lhs = (a1 - a2).conj().T @ (a1 - a2) @ swap
    # the identity is exact on the subspace that cannot reach the clipped corner
    inner = c - COMMUTATOR_PAD
    mask = np.zeros(c * c, dtype=bool)
    for i in range(inner):
        for j in range(inner):
            mask[i * c + j] = True
    diff = (lhs - (nhat - swap))[np.ix_(mask, mask)]
    return float(np.max(np.abs(diff)))


def qcs_lindblad(rho1: DensityOperator, transmissivity: float) -> QcsResult:
    """C^2 of rho_T from dissipator moments:
    C^2 = (2 / Tr[rho_T^2]) (Tr[N rho_T rho_T] - Tr[a rho_T a^dag rho_T]) + 1.
    """
    t = float(transmissivity)
    if not 0.0 < t <= 1.0:
        raise ValueError("Lindblad route needs T in (0, 1]")
    rho_t = rho1 if t == 1.0 else apply_loss(rho1, t)
    m = rho_t.matrix
    ops = mode_operators(rho_t.cutoff)
    p = purity(rho_t)
    term_n = float(np.einsum("ij,ji->", ops.number @ m, m).real)
    term_a = float(np.einsum("ij,ji->", ops.annihilate @ m @ ops.create, m).real)
    return QcsResult(2.0 / p * (term_n - term_a) + 1.0, ROUTE_LINDBLAD, p)


def qcs_lindblad_pure_variant(psi: PureState, transmissivity: float) -> QcsResult:
    """For a pure input: C^2 = (2T/P)(Tr[N rho_T^2]/T - Tr[N rho_{1-T}^2]/(1-T)) + 1.

    Valid only when the unlossed state is pure; the complementary-output
    moment replaces the sandwiched ladder term of the general route.
    """
    t = float(transmissivity)
    if not 0.0 < t < 1.0:
        raise ValueError("the pure-input variant needs T strictly inside (0, 1)")
    rho1 = psi.density()
    ops = mode_operators(rho1.cutoff)
    m_t = apply_loss(rho1, t).matrix
    m_r = apply_loss(rho1, 1.0 - t).matrix
    p = float(np.einsum("ij,ji->", m_t, m_t).real)
    mom_t = float(np.einsum("ij,ji->", ops.number @ m_t, m_t).real)
    mom_r = float(np.einsum("ij,ji->", ops.number @ m_r, m_r).real)
    val = 2.0 * t / p * (mom_t / t - mom_r / (1.0 - t)) + 1.0
    return QcsResult(val, ROUTE_LINDBLAD, p)


def qcs_kernel_form(rho: DensityOperator, x_max: float | None = None,
                    n_points: int = 401) -> QcsResult:
    """C^2 from position/momentum kernels on a trapezoid grid:
    (1/2P) [ iint (x-x')^2 |rho(x,x')|^2 + iint (p-p')^2 |rho(p,p')|^2 ].
    """
    c = rho.cutoff
    if x_max is None:
        x_max = 6.0 + np.sqrt(rho.support() + 1.0)
    xs = np.linspace(-x_max, x_max, n_points)
    dx = xs[1] - xs[0]
    # Hermite functions phi_n(x) by the stable two-term recurrence
    phi = np.zeros((n_points, c))
    phi[:, 0] = np.pi ** (-0.25) * np.exp(-xs ** 2 / 2.0)
    if c > 1:
        phi[:, 1] = np.sqrt(2.0) * xs * phi[:, 0]
    for n in range(2, c):
        phi[:, n] = (np.sqrt(2.0 / n) * xs * phi[:, n - 1]
                     - np.sqrt((n - 1.0) / n) * phi[:, n - 2])
    w = np.full(n_points, dx)
    w[0] = w[-1] = dx / 2.0
    diff_sq = (xs[:, None] - xs[None, :]) ** 2
    total = 0.0
    for momentum in (False, True):
        m = rho.matrix
        if momentum:
            phase = (-1j) ** np.arange(c)
            m = (phase[:, None] * m) * phase.conj()[None, :]
        kernel = phi @ m @ phi.T
        total += float(np.sum((w[:, None] * w[None, :]) * diff_sq * np.abs(kernel) ** 2))
    p = purity(rho)
    return QcsResult(total / (2.0 * p), "kernel", p)
