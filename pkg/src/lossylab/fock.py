"""Truncated Fock-space states and operators for one and two bosonic modes.

Everything lives on a finite photon-number ladder |0>, ..., |cutoff-1>. Two-mode
operators use the row index n1 * cutoff2 + n2 (numpy kron convention). The beam
splitter is built blockwise in the conserved total photon number, so circuits on
finite-support inputs are exact whenever the cutoffs hold the total photon number.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-10
POSITIVITY_TOL = 1e-10
TAIL_WARN = 1e-6


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PureState:
    """Normalized state vector on a truncated number ladder.

    ``tail_weight`` records the probability lost to truncation by the
    constructor that produced the state (0 for exact finite states).
    """

    amplitudes: np.ndarray
    cutoff: int
    tail_weight: float = 0.0

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if self.cutoff < 1:
            raise ValueError("cutoff must be at least 1")
        if amps.shape != (self.cutoff,):
            raise ValueError(f"amplitude vector must have shape ({self.cutoff},)")
        norm = float(np.linalg.norm(amps))
        if norm < 1e-12:
            raise ValueError("cannot normalize a (near-)zero vector")
        object.__setattr__(self, "amplitudes", _readonly(amps / norm))

    @property
    def truncation_warning(self) -> bool:
        return self.tail_weight > TAIL_WARN

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()), self.cutoff)

    def embedded(self, cutoff: int) -> "PureState":
        if cutoff < self.cutoff:
            raise ValueError("embedding cutoff must not shrink the ladder")
        amps = np.zeros(cutoff, dtype=complex)
        amps[: self.cutoff] = self.amplitudes
        return PureState(amps, cutoff, self.tail_weight)

    def mean_photon_number(self) -> float:
        return float(np.sum(np.arange(self.cutoff) * np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian unit-trace operator on the truncated ladder.

    ``physical=False`` skips the positivity check; Hermiticity and unit trace
    are always enforced. That flag exists for deliberately indefinite
    operators used by the convexity counterexample scans.
    """

    matrix: np.ndarray
    cutoff: int
    physical: bool = True

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.cutoff, self.cutoff):
            raise ValueError(f"matrix must have shape ({self.cutoff}, {self.cutoff})")
        herm_dev = float(np.max(np.abs(m - m.conj().T)))
        if herm_dev > HERMITICITY_TOL:
            raise ValueError(f"matrix is not Hermitian (deviation {herm_dev:.3e})")
        trace_dev = abs(np.trace(m).real - 1.0) + abs(np.trace(m).imag)
        if trace_dev > TRACE_TOL:
            raise ValueError(f"trace deviates from 1 by {trace_dev:.3e}")
        if self.physical:
            min_eig = float(np.linalg.eigvalsh(m)[0])
            if min_eig < -POSITIVITY_TOL:
                raise ValueError(f"matrix has negative eigenvalue {min_eig:.3e}")
        object.__setattr__(self, "matrix", _readonly(m))

    def embedded(self, cutoff: int) -> "DensityOperator":
        if cutoff < self.cutoff:
            raise ValueError("embedding cutoff must not shrink the ladder")
        m = np.zeros((cutoff, cutoff), dtype=complex)
        m[: self.cutoff, : self.cutoff] = self.matrix
        return DensityOperator(m, cutoff, self.physical)

    def populations(self) -> np.ndarray:
        return np.abs(np.diag(self.matrix).real)

    def mean_photon_number(self) -> float:
        return float(np.sum(np.arange(self.cutoff) * np.diag(self.matrix).real))

    def support(self) -> int:
        """Highest level with population above 1e-14, as an index."""
        pops = np.abs(np.diag(self.matrix).real)
        nz = np.nonzero(pops > 1e-14)[0]
        return int(nz[-1]) if nz.size else 0


@dataclass(frozen=True)
class TwoModeOperator:
    """Operator on the tensor ladder, row index n1 * cutoffs[1] + n2."""

    matrix: np.ndarray
    cutoffs: tuple[int, int]

    def __post_init__(self):
        c1, c2 = self.cutoffs
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (c1 * c2, c1 * c2):
            raise ValueError(f"matrix must have shape ({c1 * c2}, {c1 * c2})")
        object.__setattr__(self, "matrix", _readonly(m))

    def hermiticity_deviation(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def block_norms(self) -> np.ndarray:
        """Trace weight in each total-photon-number block (diagonal blocks only)."""
        c1, c2 = self.cutoffs
        diag = np.diag(self.matrix).real
        norms = np.zeros(c1 + c2 - 1)
        for n1 in range(c1):
            for n2 in range(c2):
                norms[n1 + n2] += diag[n1 * c2 + n2]
        return norms


@dataclass(frozen=True)
class ModeOperatorSet:
    """Dense ladder operators a, a^dag, N, X, P at a fixed cutoff."""

    annihilate: np.ndarray
    create: np.ndarray
    number: np.ndarray
    x: np.ndarray
    p: np.ndarray
    cutoff: int


@lru_cache(maxsize=64)
def mode_operators(cutoff: int) -> ModeOperatorSet:
    a = np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), 1).astype(complex)
    adag = a.conj().T
    num = adag @ a
    x = (adag + a) / np.sqrt(2.0)
    p = 1j * (adag - a) / np.sqrt(2.0)
    for arr in (a, adag, num, x, p):
        arr.flags.writeable = False
    return ModeOperatorSet(a, adag, num, x, p, cutoff)


# ---------------------------------------------------------------------------
# state constructors
# ---------------------------------------------------------------------------


def make_fock(n: int, cutoff: int) -> PureState:
    if not 0 <= n < cutoff:
        raise ValueError(f"photon number {n} outside ladder of cutoff {cutoff}")
    amps = np.zeros(cutoff, dtype=complex)
    amps[n] = 1.0
    return PureState(amps, cutoff)


def make_coherent(alpha: complex, cutoff: int) -> PureState:
    """Truncated coherent state; tail weight beyond the cutoff is recorded."""
    amps = np.empty(cutoff, dtype=complex)
    amps[0] = np.exp(-abs(alpha) ** 2 / 2.0)
    for n in range(1, cutoff):
        amps[n] = amps[n - 1] * alpha / np.sqrt(n)
    tail = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    return PureState(amps, cutoff, tail_weight=tail)


def make_squeezed_vacuum(r: float, cutoff: int) -> PureState:
    """Truncated squeezed vacuum with even-only support and <N> = sinh(r)^2."""
    amps = np.zeros(cutoff, dtype=complex)
    amps[0] = 1.0 / np.sqrt(np.cosh(r))
    m = 1
    while 2 * m < cutoff:
        ratio = -np.tanh(r) * np.sqrt((2 * m - 1) * (2 * m)) / (2 * m)
        amps[2 * m] = amps[2 * m - 2] * ratio
        m += 1
    tail = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    return PureState(amps, cutoff, tail_weight=tail)


def thermal_state(nbar: float, cutoff: int) -> DensityOperator:
    """Truncated thermal state, renormalized on the ladder."""
    if nbar < 0:
        raise ValueError("mean occupation must be nonnegative")
    if nbar == 0:
        return make_fock(0, cutoff).density()
    n = np.arange(cutoff, dtype=float)
    pops = (nbar / (1.0 + nbar)) ** n / (1.0 + nbar)
    pops = pops / pops.sum()
    return DensityOperator(np.diag(pops).astype(complex), cutoff)


def random_pure(seed: int, cutoff: int) -> PureState:
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(cutoff) + 1j * rng.standard_normal(cutoff)
    return PureState(amps, cutoff)


def random_mixed(seed: int, cutoff: int, rank: int) -> DensityOperator:
    if not 1 <= rank <= cutoff:
        raise ValueError("rank must lie in [1, cutoff]")
    rng = np.random.default_rng(seed)
    weights = rng.random(rank)
    weights = weights / weights.sum()
    m = np.zeros((cutoff, cutoff), dtype=complex)
    for w in weights:
        v = rng.standard_normal(cutoff) + 1j * rng.standard_normal(cutoff)
        v = v / np.linalg.norm(v)
        m += w * np.outer(v, v.conj())
    return DensityOperator(m, cutoff)


# ---------------------------------------------------------------------------
# displacement
# ---------------------------------------------------------------------------


def _displacement_element(m: int, n: int, alpha: complex) -> complex:
    # <m|D(alpha)|n> for m >= n; the m < n case is handled by the caller.
    x = abs(alpha) ** 2
    log_coef = 0.5 * (gammaln(n + 1) - gammaln(m + 1))
    lag = eval_genlaguerre(n, m - n, x)
    return np.exp(log_coef - x / 2.0) * alpha ** (m - n) * lag


def displacement_matrix(alpha: complex, cutoff: int) -> np.ndarray:
    """Matrix of D(alpha) on the truncated ladder.

    Every element is the exact closed form, so inner products against
    finite-support states carry no truncation error; unitarity of the
    truncated matrix itself degrades as |alpha| approaches sqrt(cutoff).
    """
    d = np.empty((cutoff, cutoff), dtype=complex)
    for m in range(cutoff):
        for n in range(cutoff):
            if m >= n:
                d[m, n] = _displacement_element(m, n, alpha)
            else:
                # D(alpha)^dag = D(-alpha)
                d[m, n] = np.conj(_displacement_element(n, m, -alpha))
    return d


# ---------------------------------------------------------------------------
# beam splitter
# ---------------------------------------------------------------------------


def _block_indices(n: int, c1: int, c2: int) -> list[int]:
    return list(range(max(0, n - c2 + 1), min(n, c1 - 1) + 1))


@lru_cache(maxsize=32)
def beam_splitter_unitary(c1: int, c2: int, transmissivity: float) -> np.ndarray:
    """B(T) = exp(arccos(sqrt(T)) (a1 a2^dag - a1^dag a2)), built per total-N block.

    Exact (to eigensolver precision) within every block fully contained in the
    cutoff box; blocks clipped by the corner stay unitary on their subspace.
    """
    if not 0.0 <= transmissivity <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1]")
    theta = np.arccos(np.sqrt(transmissivity))
    dim = c1 * c2
    u = np.zeros((dim, dim), dtype=complex)
    for n in range(c1 + c2 - 1):
        ks = _block_indices(n, c1, c2)
        size = len(ks)
        # H = i K is Hermitian tridiagonal; exp(theta K) = exp(-i theta H)
        h = np.zeros((size, size), dtype=complex)
        for idx, k in enumerate(ks):
            if idx > 0:
                h[idx - 1, idx] = 1j * np.sqrt(k * (n - k + 1))
            if idx < size - 1:
                h[idx + 1, idx] = -1j * np.sqrt((k + 1) * (n - k))
        w, v = np.linalg.eigh(h)
        block = (v * np.exp(-1j * theta * w)) @ v.conj().T
        rows = [k * c2 + (n - k) for k in ks]
        u[np.ix_(rows, rows)] = block
    return _readonly(u)


def beam_splitter_apply(state: TwoModeOperator, transmissivity: float,
                        inverse: bool = False) -> TwoModeOperator:
    """Conjugate a two-mode operator by B(T) (or its inverse)."""
    c1, c2 = state.cutoffs
    u = beam_splitter_unitary(c1, c2, transmissivity)
    if inverse:
        out = u.conj().T @ state.matrix @ u
    else:
        out = u @ state.matrix @ u.conj().T
    return TwoModeOperator(out, state.cutoffs)


# ---------------------------------------------------------------------------
# tensor structure
# ---------------------------------------------------------------------------


def tensor(a: DensityOperator, b: DensityOperator) -> TwoModeOperator:
    return TwoModeOperator(np.kron(a.matrix, b.matrix), (a.cutoff, b.cutoff))


def _partial_trace_matrix(matrix: np.ndarray, cutoffs: tuple[int, int], keep: int) -> np.ndarray:
    c1, c2 = cutoffs
    r = matrix.reshape(c1, c2, c1, c2)
    if keep == 1:
        return np.einsum("ijkj->ik", r)
    if keep == 2:
        return np.einsum("ijil->jl", r)
    raise ValueError("keep must be 1 or 2")


def partial_trace(state: TwoModeOperator, keep: int, physical: bool = True) -> DensityOperator:
    reduced = _partial_trace_matrix(state.matrix, state.cutoffs, keep)
    reduced = (reduced + reduced.conj().T) / 2.0
    return DensityOperator(reduced, state.cutoffs[keep - 1], physical)
