"""Phase-space representations: characteristic functions, s-ordered
quasiprobabilities, Gaussian order conversion, and quadrature-based purity.

Conventions. chi_rho(alpha, s) = Tr[rho D(alpha)] exp(s|alpha|^2 / 2). The
s-ordered quasiprobability is P(alpha, s) = (2 / (pi (1-s))) sum_k u^k pop_k
with u = (s+1)/(s-1) and pop_k the number populations of the displaced state
D(-alpha) rho D(-alpha)^dag. Every displaced matrix element is an exact closed
form (associated Laguerre), so the only truncation knob is the number of
displaced levels summed, which is chosen from the support and |alpha|.
s = -1 gives the Husimi function <alpha|rho|alpha>/pi, s = 0 the Wigner
function, and s >= 1 pointwise is rejected (singular order).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.ndimage import convolve1d
from scipy.special import eval_genlaguerre, gammaln, roots_laguerre

from .fock import DensityOperator, displacement_matrix
from .loss import apply_loss
from .reports import CheckReport, equality_report

IMAG_TOL = 1e-9


# ---------------------------------------------------------------------------
# exact displaced matrix elements
# ---------------------------------------------------------------------------


def _disp_elements(row: int, col: int, beta: np.ndarray,
                   log_scale: float = 0.0) -> np.ndarray:
    """<row|D(beta)|col> times exp(log_scale), exact closed form.

    The scale rides inside the log-domain magnitude so callers can attach
    per-level growth factors without overflowing intermediate powers.
    """
    if row >= col:
        k, m, b, conjugate = row, col, beta, False
    else:
        # <r|D(b)|c> = conj(<c|D(-b)|r>)
        k, m, b, conjugate = col, row, -beta, True
    absb = np.abs(b)
    x = absb ** 2
    lag = eval_genlaguerre(m, k - m, x)
    with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
        logmag = (0.5 * (gammaln(m + 1) - gammaln(k + 1)) - x / 2.0
                  + (k - m) * np.log(absb) + np.log(np.abs(lag)) + log_scale)
        mag = np.exp(logmag)
    phase = np.ones_like(b)
    nz = absb > 0
    phase[nz] = (b[nz] / absb[nz]) ** (k - m)
    out = np.sign(lag) * mag * phase
    zero = ~nz
    if np.any(zero):
        out = np.asarray(out, dtype=complex)
        out[zero] = np.exp(log_scale) if k == m else 0.0
    if conjugate:
        out = np.conj(out)
    return out


# ---------------------------------------------------------------------------
# characteristic function
# ---------------------------------------------------------------------------


def char_fn(rho: DensityOperator, alpha, s: float):
    """s-ordered characteristic function; exact for finite-support states."""
    al = np.asarray(alpha, dtype=complex)
    scalar = al.ndim == 0
    al = np.atleast_1d(al)
    tr = np.zeros(al.shape, dtype=complex)
    m_rho = rho.matrix
    for n in range(rho.cutoff):
        for m in range(rho.cutoff):
            if abs(m_rho[n, m]) < 1e-18:
                continue
            tr += m_rho[n, m] * _disp_elements(m, n, al)
    out = tr * np.exp(s * np.abs(al) ** 2 / 2.0)
    return complex(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# quasiprobabilities
# ---------------------------------------------------------------------------


def _displaced_level_budget(rho: DensityOperator, max_abs_alpha: float, u_mag: float) -> int:
    reach = np.sqrt(rho.support() + 1.0) + max_abs_alpha
    base = reach ** 2 + 10.0 * reach + 30.0
    if u_mag > 1.0:
        base = np.e * u_mag * reach ** 2 + 10.0 * reach + 40.0
    return int(np.ceil(base))


def _quasi_gaussian_form(rho: DensityOperator, al: np.ndarray, s: float) -> np.ndarray:
    """Quasiprobability by the finite Gaussian-operator sum.

    Tr[rho D(alpha) u^N D(alpha)^dag] expands into a sum of at most
    cutoff terms per matrix element; unlike the level series it never
    alternates with growing terms, so it stays accurate when u < -1.
    """
    u = (s + 1.0) / (s - 1.0)
    x = np.abs(al) ** 2
    decay = np.exp(-(1.0 - u) * x)
    c = rho.cutoff
    a_base = al * (1.0 - u)
    b_base = np.conj(al) * (1.0 - u)
    a_pow = np.ones((c, al.size), dtype=complex)
    b_pow = np.ones((c, al.size), dtype=complex)
    for p in range(1, c):
        a_pow[p] = a_pow[p - 1] * a_base
        b_pow[p] = b_pow[p - 1] * b_base
    lg = gammaln(np.arange(c + 1) + 1.0)
    m_rho = rho.matrix
    acc = np.zeros(al.size, dtype=complex)
    for m in range(c):
        for n in range(c):
            if abs(m_rho[n, m]) < 1e-18:
                continue
            coeff = np.zeros(al.size, dtype=complex)
            for j in range(min(m, n) + 1):
                weight = np.exp(0.5 * (lg[m] + lg[n]) - lg[j] - lg[m - j] - lg[n - j])
                coeff += weight * u ** j * a_pow[m - j] * b_pow[n - j]
            acc += m_rho[n, m] * coeff
    vals = 2.0 / (np.pi * (1.0 - s)) * decay * acc
    return vals


def quasi_prob(rho: DensityOperator, alpha, s: float, k_levels: int | None = None):
    """P_rho(alpha, s) for s < 1; vectorized over alpha."""
    if s >= 1.0:
        raise ValueError("quasiprobability order must satisfy s < 1")
    al = np.asarray(alpha, dtype=complex)
    scalar = al.ndim == 0
    al = np.atleast_1d(al)
    u = (s + 1.0) / (s - 1.0)
    if u < -1.0:
        # s > 0: the level series alternates with growing terms; use the
        # algebraically identical finite sum instead
        vals = _quasi_gaussian_form(rho, al, s)
        worst = float(np.max(np.abs(vals.imag)))
        if worst > IMAG_TOL:
            raise ValueError(f"quasiprobability has imaginary residue {worst:.3e}")
        out = vals.real
        return float(out[0]) if scalar else out
    if k_levels is None:
        k_levels = _displaced_level_budget(rho, float(np.max(np.abs(al))), abs(u))
    if u == 0.0:
        k_levels = 1
    beta = -al
    c = rho.cutoff
    acc = np.zeros(al.shape, dtype=complex)
    sgn = 1.0 if u >= 0 else -1.0
    log_abs_u = np.log(abs(u)) if u != 0.0 else 0.0
    for k in range(k_levels):
        # rows carry |u|^(k/2) each, so the quadratic form is u^k pop_k
        rows = np.stack([_disp_elements(k, m, beta, log_scale=0.5 * k * log_abs_u)
                         for m in range(c)])
        pop_k = np.einsum("mP,mn,nP->P", rows, rho.matrix, rows.conj())
        acc += sgn ** k * pop_k
    vals = 2.0 / (np.pi * (1.0 - s)) * acc
    worst = float(np.max(np.abs(vals.imag)))
    if worst > IMAG_TOL:
        raise ValueError(f"quasiprobability has imaginary residue {worst:.3e}")
    out = vals.real
    return float(out[0]) if scalar else out


def wigner_from_parity(rho: DensityOperator, alpha: complex, working_cutoff: int) -> float:
    """Wigner value by the displaced-parity formula at an explicit cutoff.

    Independent of the level-sum route: uses the square truncated displacement
    matrix, so the caller must supply a cutoff generous for |alpha|.
    """
    emb = rho.embedded(working_cutoff)
    d = displacement_matrix(alpha, working_cutoff)
    parity = np.diag((-1.0 + 0.0j) ** np.arange(working_cutoff))
    val = np.einsum("ij,ji->", emb.matrix, d @ parity @ d.conj().T)
    return float(2.0 / np.pi * val.real)


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Square grid centered at ``center``: n x n points spanning +-half_width."""

    half_width: float
    n: int
    center: complex = 0.0

    def re_axis(self) -> np.ndarray:
        return self.center.real + np.linspace(-self.half_width, self.half_width, self.n)

    def im_axis(self) -> np.ndarray:
        return self.center.imag + np.linspace(-self.half_width, self.half_width, self.n)

    def alphas(self) -> np.ndarray:
        return np.add.outer(self.re_axis(), 1j * self.im_axis()).ravel()

    @property
    def cell_area(self) -> float:
        step = 2.0 * self.half_width / (self.n - 1)
        return step * step


def default_grid(rho: DensityOperator, n: int = 121) -> GridSpec:
    return GridSpec(6.0 + np.sqrt(rho.support() + 0.0), n)


@dataclass(frozen=True)
class QuasiProbGrid:
    grid: GridSpec
    order: float
    values: np.ndarray  # (n, n), values[i, j] at re_axis[i] + 1j im_axis[j]
    kind: str = "quasiprob"

    def __post_init__(self):
        vals = np.array(self.values)
        if vals.shape != (self.grid.n, self.grid.n):
            raise ValueError("values must be an n x n array matching the grid")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def integral(self) -> float:
        return math.fsum(self.values.real.ravel()) * self.grid.cell_area

    def min_value(self) -> float:
        return float(np.min(self.values.real))


def quasi_prob_grid(rho: DensityOperator, s: float, grid: GridSpec,
                    chunk: int = 8192) -> QuasiProbGrid:
    al = grid.alphas()
    budget = _displaced_level_budget(rho, float(np.max(np.abs(al))),
                                     abs((s + 1.0) / (s - 1.0)))
    out = np.empty(al.size)
    for start in range(0, al.size, chunk):
        stop = min(start + chunk, al.size)
        out[start:stop] = quasi_prob(rho, al[start:stop], s, k_levels=budget)
    return QuasiProbGrid(grid, s, out.reshape(grid.n, grid.n))


def convolve_quasi(src: QuasiProbGrid, delta_s: float) -> QuasiProbGrid:
    """Lower the order by Gaussian convolution; only delta_s < 0 is defined."""
    if delta_s >= 0.0:
        raise ValueError("order can only be lowered (delta_s < 0)")
    n = src.grid.n
    step = 2.0 * src.grid.half_width / (n - 1)
    offsets = step * np.arange(-(n - 1), n)
    kernel = np.exp(2.0 * offsets ** 2 / delta_s)
    smoothed = convolve1d(src.values, kernel, axis=0, mode="constant")
    smoothed = convolve1d(smoothed, kernel, axis=1, mode="constant")
    prefactor = 2.0 / (np.pi * abs(delta_s)) * src.grid.cell_area
    return QuasiProbGrid(src.grid, src.order + delta_s, prefactor * smoothed)


# ---------------------------------------------------------------------------
# loss identities
# ---------------------------------------------------------------------------


def loss_identity_quasi(rho1: DensityOperator, transmissivity: float, alpha: complex,
                        s: float) -> CheckReport:
    """P of the lossy state equals a rescaled P of the input at a shifted order."""
    t = float(transmissivity)
    if not 0.0 < t <= 1.0:
        raise ValueError("transmissivity must lie in (0, 1]")
    s_shift = (s + t - 1.0) / t
    if s >= 1.0 or s_shift >= 1.0:
        raise ValueError("both orders must stay below 1")
    lhs = quasi_prob(apply_loss(rho1, t), alpha, s)
    rhs = quasi_prob(rho1, alpha / np.sqrt(t), s_shift) / t
    return equality_report(
        "loss_identity_quasiprob", "", {"T": t, "s": s, "alpha": str(alpha)},
        lhs, rhs, 1e-9,
        claim="P_lossy(alpha, s) = P_in(alpha/sqrt(T), (s+T-1)/T) / T",
    )


def loss_identity_chi(rho1: DensityOperator, transmissivity: float, alpha: complex,
                      s: float) -> CheckReport:
    t = float(transmissivity)
    if not 0.0 < t <= 1.0:
        raise ValueError("transmissivity must lie in (0, 1]")
    lhs = char_fn(apply_loss(rho1, t), alpha, s)
    rhs = char_fn(rho1, np.sqrt(t) * alpha, (s + t - 1.0) / t)
    dev = abs(lhs - rhs)
    return equality_report(
        "loss_identity_charfn", "", {"T": t, "s": s, "alpha": str(alpha)},
        dev, 0.0, 1e-9,
        claim="chi_lossy(alpha, s) = chi_in(sqrt(T) alpha, (s+T-1)/T); deviation reported",
    )


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _laguerre_rule(n: int):
    t, w = roots_laguerre(n)
    t.flags.writeable = False
    w.flags.writeable = False
    return t, w


@dataclass(frozen=True)
class Quadrature2D:
    """Gauss-Laguerre radial rule (in |alpha|^2) times angular trapezoid.

    nodes_weights(radial_scale) integrates f over the plane as
    sum w_i f(alpha_i); radial_scale stretches the radial nodes so integrands
    decaying like exp(-|alpha|^2 / radial_scale) are captured at full order.
    """

    n_radial: int = 80
    n_angular: int = 128

    def nodes_weights(self, radial_scale: float = 1.0):
        if radial_scale <= 0:
            raise ValueError("radial_scale must be positive")
        t, w = _laguerre_rule(self.n_radial)
        radii = np.sqrt(radial_scale * t)
        with np.errstate(over="ignore"):
            radial_w = 0.5 * radial_scale * w * np.exp(t) * (2.0 * np.pi / self.n_angular)
        thetas = 2.0 * np.pi * np.arange(self.n_angular) / self.n_angular
        alphas = np.outer(radii, np.exp(1j * thetas)).ravel()
        weights = np.repeat(radial_w, self.n_angular)
        return alphas, weights

    def gaussian_normalization_error(self) -> float:
        alphas, weights = self.nodes_weights()
        val = math.fsum(weights * np.exp(-np.abs(alphas) ** 2) / np.pi)
        return abs(val - 1.0)


def _outer_ring_growth(values: np.ndarray, n_angular: int) -> bool:
    outer = np.max(np.abs(values[-n_angular:]))
    inner = np.max(np.abs(values[:-n_angular])) if values.size > n_angular else 0.0
    return outer > max(inner, 1e-300)


def purity_from_chi(rho: DensityOperator, s: float,
                    quad: Quadrature2D = Quadrature2D()) -> float:
    """Tr[rho^2] = int (d^2 alpha / pi) e^{-s|alpha|^2} |chi(alpha, s)|^2."""
    alphas, weights = quad.nodes_weights()
    chi = char_fn(rho, alphas, s)
    integrand = np.exp(-s * np.abs(alphas) ** 2) * np.abs(chi) ** 2
    if _outer_ring_growth(integrand, quad.n_angular):
        raise ValueError("integrand grows at the outermost radial ring; order unsuitable")
    return math.fsum(weights * integrand) / np.pi


def lossy_chi_integrand(rho1: DensityOperator, transmissivity: float, s: float,
                        quad: Quadrature2D = Quadrature2D()):
    """Nodes, weights, and the manifestly nonnegative lossy-purity integrand."""
    t = float(transmissivity)
    if not 0.0 < t <= 1.0:
        raise ValueError("transmissivity must lie in (0, 1]")
    alphas, weights = quad.nodes_weights(radial_scale=t)
    chi = char_fn(rho1, alphas, s)
    mod = np.abs(np.exp((1.0 - s) * np.abs(alphas) ** 2 / 2.0) * chi) ** 2
    integrand = np.exp(-np.abs(alphas) ** 2 / t) / t * mod
    return alphas, weights, integrand


def purity_lossy_from_chi(rho1: DensityOperator, transmissivity: float, s: float,
                          quad: Quadrature2D = Quadrature2D()) -> float:
    """Purity of the lossy state from the input characteristic function alone."""
    _, weights, integrand = lossy_chi_integrand(rho1, transmissivity, s, quad)
    return math.fsum(weights * integrand) / np.pi


def phase_averaged_chi_sq(rho: DensityOperator, tau: float, n_angular: int = 128) -> float:
    """|chi-bar(tau)|^2: angular average of |chi(sqrt(tau) e^{i theta}, 1)|^2."""
    if tau < 0:
        raise ValueError("tau is a squared radius and must be nonnegative")
    thetas = 2.0 * np.pi * np.arange(n_angular) / n_angular
    chi = char_fn(rho, np.sqrt(tau) * np.exp(1j * thetas), 1.0)
    return float(np.mean(np.abs(chi) ** 2))


def laplace_purity(rho1: DensityOperator, transmissivity: float,
                   quad: Quadrature2D = Quadrature2D()) -> float:
    """Purity of the lossy state as (1/T) Laplace{|chi-bar|^2}(1/T)."""
    t = float(transmissivity)
    if not 0.0 < t <= 1.0:
        raise ValueError("transmissivity must lie in (0, 1]")
    nodes, w = _laguerre_rule(quad.n_radial)
    vals = [phase_averaged_chi_sq(rho1, t * ti, quad.n_angular) for ti in nodes]
    return math.fsum(w * np.asarray(vals))


def overlap_from_quasi(rho: DensityOperator, sigma: DensityOperator, s: float,
                       quad: Quadrature2D = Quadrature2D()) -> float:
    """Tr[rho sigma] = pi int P_rho(alpha, s) P_sigma(alpha, -s) d^2 alpha."""
    if abs(s) >= 1.0:
        raise ValueError("overlap pairing needs |s| < 1")
    scale = (1.0 - s * s) / 4.0
    alphas, weights = quad.nodes_weights(radial_scale=scale)
    p_rho = quasi_prob(rho, alphas, s)
    p_sigma = quasi_prob(sigma, alphas, -s)
    return np.pi * math.fsum(weights * p_rho * p_sigma)


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------


def write_grid_csv(path, qgrid: QuasiProbGrid, state_label: str,
                   transmissivity: float | None = None) -> None:
    """Row-major grid dump with a descriptor line ahead of the column header."""
    re_axis = qgrid.grid.re_axis()
    im_axis = qgrid.grid.im_axis()
    t_part = repr(float(transmissivity)) if transmissivity is not None else "none"
    with open(path, "w", newline="") as fh:
        fh.write(f"# s={qgrid.order!r},T={t_part},state={state_label}\n")
        writer = csv.writer(fh)
        writer.writerow(["re_alpha", "im_alpha", "value"])
        for i in range(qgrid.grid.n):
            for j in range(qgrid.grid.n):
                writer.writerow([repr(float(re_axis[i])), repr(float(im_axis[j])),
                                 repr(float(qgrid.values[i, j].real))])
