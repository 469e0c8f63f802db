"""Pure-loss channel on the truncated ladder: Kraus set, generator, composition.

The channel with transmissivity T is E_T[rho] = sum_n K_n rho K_n^dag with
K_n = sqrt(T)^(a^dag a) (sqrt(1-T) a)^n / sqrt(n!). The Kraus sum is exact at
finite cutoff because a only lowers the photon number.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .fock import DensityOperator, mode_operators
from .reports import CheckReport, equality_report


@dataclass(frozen=True)
class KrausSet:
    operators: tuple
    transmissivity: float
    cutoff: int

    def completeness_deviation(self) -> float:
        acc = np.zeros((self.cutoff, self.cutoff), dtype=complex)
        for k in self.operators:
            acc += k.conj().T @ k
        return float(np.max(np.abs(acc - np.eye(self.cutoff))))


@lru_cache(maxsize=256)
def kraus_set(transmissivity: float, cutoff: int) -> KrausSet:
    if not 0.0 <= transmissivity <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1] for the Kraus path")
    t = transmissivity
    ops = mode_operators(cutoff)
    root_t_pow = np.diag(np.sqrt(t) ** np.arange(cutoff)).astype(complex)
    kraus = []
    a_power = np.eye(cutoff, dtype=complex)
    for n in range(cutoff):
        if n > 0:
            a_power = ops.annihilate @ a_power
        coeff = np.sqrt(1.0 - t) ** n * np.exp(-0.5 * gammaln(n + 1))
        k = root_t_pow @ (coeff * a_power)
        k.flags.writeable = False
        kraus.append(k)
    return KrausSet(tuple(kraus), t, cutoff)


def _diagonal_loss(populations: np.ndarray, t: float) -> np.ndarray:
    """Binomial population transfer, valid for any real t on diagonal input."""
    c = populations.size
    out = np.zeros(c)
    for n in range(c):
        if populations[n] == 0.0:
            continue
        ks = np.arange(n + 1)
        log_binom = gammaln(n + 1) - gammaln(ks + 1) - gammaln(n - ks + 1)
        out[: n + 1] += populations[n] * np.exp(log_binom) * t ** ks * (1.0 - t) ** (n - ks)
    return out


def apply_loss(rho: DensityOperator, transmissivity: float) -> DensityOperator:
    """E_T[rho]. Kraus path on [0, 1]; diagonal-only analytic path elsewhere."""
    t = float(transmissivity)
    if 0.0 <= t <= 1.0:
        ks = kraus_set(t, rho.cutoff)
        out = np.zeros_like(rho.matrix)
        for k in ks.operators:
            out += k @ rho.matrix @ k.conj().T
        out = (out + out.conj().T) / 2.0
        return DensityOperator(out, rho.cutoff, rho.physical)
    offdiag = rho.matrix - np.diag(np.diag(rho.matrix))
    if np.max(np.abs(offdiag)) > 1e-12:
        raise ValueError("transmissivity outside [0, 1] is only defined for diagonal operators")
    pops = _diagonal_loss(np.diag(rho.matrix).real, t)
    return DensityOperator(np.diag(pops).astype(complex), rho.cutoff, physical=False)


def loss_generator(rho_t: DensityOperator, transmissivity: float) -> np.ndarray:
    """d(rho_T)/dT = -(1/2T)(2 a rho a^dag - a^dag a rho - rho a^dag a)."""
    t = float(transmissivity)
    if t <= 0.0:
        raise ValueError("the generator is singular at T = 0")
    ops = mode_operators(rho_t.cutoff)
    m = rho_t.matrix
    lind = 2.0 * (ops.annihilate @ m @ ops.create) - ops.number @ m - m @ ops.number
    return -lind / (2.0 * t)


def multiplicativity_check(rho: DensityOperator, t1: float, t2: float) -> CheckReport:
    """E_{t1} after E_{t2} equals E_{t1 t2}; deviation in max norm."""
    lhs = apply_loss(apply_loss(rho, t2), t1)
    rhs = apply_loss(rho, t1 * t2)
    dev = float(np.max(np.abs(lhs.matrix - rhs.matrix)))
    return equality_report(
        "loss_multiplicativity", "", {"t1": t1, "t2": t2}, dev, 0.0, 1e-10,
        claim="max |E_t1[E_t2[rho]] - E_{t1 t2}[rho]| = 0",
    )


def transmission_from_decay(gamma_t: float) -> float:
    """T = exp(-gamma t) for exponential amplitude decay."""
    if gamma_t < 0:
        raise ValueError("decay exponent must be nonnegative")
    return float(np.exp(-gamma_t))


def transmission_from_angle(theta: float) -> float:
    """T = cos(theta/2)^2 for a beam-splitter mixing angle."""
    return float(np.cos(theta / 2.0) ** 2)


def transmission_from_efficiency(eta: float) -> float:
    """Detector efficiency is already a transmissivity."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError("efficiency must lie in [0, 1]")
    return float(eta)
