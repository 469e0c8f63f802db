"""Scans for the open conjectures and their known counterexamples.

Log-convexity of purity under loss, the difference-port moment witness,
and sub-Poissonian exclusion of interference dark ports are conjectures:
scans report evidence, never proofs. The exponential-tilt log-convexity
bound is proven, so its checks must always pass. The witness also admits
exact counterexamples for operators that are not fair mixtures of twin
pairs, and those are reproduced here bit-stably.
"""

from __future__ import annotations

import numpy as np

from .fock import (DensityOperator, TwoModeOperator, beam_splitter_unitary,
                   make_fock, mode_operators, partial_trace, tensor)
from .purity import dark_port_distribution, purity_polynomial
from .reports import CheckReport, ScanResult, equality_report, inequality_report

SCAN_TOL = 1e-9
PROVEN_TOL = 1e-10
G2_TOL = 1e-8
MEAN_N_FLOOR = 1e-12
REFINE_FACTOR = 10


# ---------------------------------------------------------------------------
# log-convexity of purity in T
# ---------------------------------------------------------------------------


def _log_convexity_margins(rho1: DensityOperator, t_grid: np.ndarray) -> np.ndarray:
    poly = purity_polynomial(rho1).as_t_polynomial()
    d1 = poly.deriv()
    d2 = d1.deriv()
    return poly(t_grid) * d2(t_grid) - d1(t_grid) ** 2


def log_convexity_scan(rho1: DensityOperator, t_grid, state_id: str = "state",
                       tolerance: float = SCAN_TOL) -> ScanResult:
    """Scan P * P'' - (P')^2 >= 0 over a transmissivity grid.

    Margins come from exact polynomial derivatives, so a negative value is
    a property of the operator, not of quadrature; the refinement step
    exists to satisfy the common violation protocol and to locate the
    minimum more precisely before declaring a violation.
    """
    grid = np.asarray(t_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty transmissivity grid")
    margins = _log_convexity_margins(rho1, grid)
    rows = [(state_id, float(t), float(m)) for t, m in zip(grid, margins)]
    i = int(np.argmin(margins))
    min_margin = float(margins[i])
    result = ScanResult(
        conjecture="log_convexity",
        corpus=state_id,
        grid=f"[{grid[0]:g}, {grid[-1]:g}] x {grid.size}",
        min_margin=min_margin,
        argmin={"state_id": state_id, "T": float(grid[i])},
        rows=rows,
    )
    if min_margin < -tolerance:
        fine = np.linspace(grid[0], grid[-1], REFINE_FACTOR * grid.size)
        fine_margins = _log_convexity_margins(rho1, fine)
        j = int(np.argmin(fine_margins))
        if fine_margins[j] < -tolerance / REFINE_FACTOR:
            result.disposition = "violation"
            result.min_margin = float(fine_margins[j])
            result.argmin = {"state_id": state_id, "T": float(fine[j])}
            result.violations = [(state_id, float(fine[j]), float(fine_margins[j]))]
    return result


def log_convexity_corpus(states, t_grid, tolerance: float = SCAN_TOL) -> ScanResult:
    """Run the log-convexity scan over many (state_id, operator) pairs."""
    grid = np.asarray(t_grid, dtype=float)
    rows = []
    violations = []
    min_margin = np.inf
    argmin = {}
    for state_id, rho1 in states:
        single = log_convexity_scan(rho1, grid, state_id, tolerance)
        rows.extend(single.rows)
        violations.extend(single.violations)
        if single.min_margin < min_margin:
            min_margin = single.min_margin
            argmin = single.argmin
    return ScanResult(
        conjecture="log_convexity",
        corpus=f"{len(rows) // max(grid.size, 1)} states",
        grid=f"[{grid[0]:g}, {grid[-1]:g}] x {grid.size}",
        min_margin=float(min_margin),
        argmin=argmin,
        rows=rows,
        violations=violations,
        disposition="violation" if violations else "no-violation-found",
    )


# ---------------------------------------------------------------------------
# proven exponential-tilt log-convexity
# ---------------------------------------------------------------------------


def ell_log_convexity_check(rho1: DensityOperator, transmissivity: float,
                            state_id: str = "") -> CheckReport:
    """Second-moment bound on the tilted dark-port distribution.

    With q the difference-port number distribution of the twin pair and
    w = 1 - 2T the tilt base, (sum q m w^m)^2 <= (sum q w^m)(sum q m^2 w^m).
    This is a proven Cauchy-Schwarz case and must pass for every state.
    """
    t = float(transmissivity)
    if t >= 0.5:
        raise ValueError("the tilt base needs T < 1/2")
    q = dark_port_distribution(tensor(rho1, rho1))
    m = np.arange(q.size, dtype=float)
    w = (1.0 - 2.0 * t) ** m
    lhs = float(q @ (m * w)) ** 2
    rhs = float(q @ w) * float(q @ (m * m * w))
    return inequality_report(
        "ell_log_convexity", state_id, {"T": t}, lhs, rhs, PROVEN_TOL,
        claim="tilted dark-port first moment squared <= zeroth times second",
    )


def ell_log_convexity_corpus(states, t_grid) -> ScanResult:
    rows = []
    violations = []
    min_margin = np.inf
    argmin = {}
    grid = np.asarray(t_grid, dtype=float)
    for state_id, rho1 in states:
        for t in grid:
            rep = ell_log_convexity_check(rho1, float(t), state_id)
            rows.append((state_id, float(t), rep.margin))
            if rep.margin < min_margin:
                min_margin = rep.margin
                argmin = {"state_id": state_id, "T": float(t)}
            if not rep.passed:
                violations.append((state_id, float(t), rep.margin))
    return ScanResult(
        conjecture="ell_log_convexity",
        corpus=f"{len(states)} states",
        grid=f"[{grid[0]:g}, {grid[-1]:g}] x {grid.size}",
        min_margin=float(min_margin),
        argmin=argmin,
        rows=rows,
        violations=violations,
        disposition="violation" if violations else "proven-case-verified",
    )


# ---------------------------------------------------------------------------
# difference-port moment witness
# ---------------------------------------------------------------------------


def beamsplit_pair(rho: DensityOperator, sigma: DensityOperator) -> TwoModeOperator:
    """Two copies interfered on a balanced splitter, expressed in the
    sum/difference mode basis (mode 2 is the difference port).

    Both modes are enlarged to hold the full total photon number first so
    the splitter acts on complete blocks only; the difference port of a
    pair of cutoff-c states can be populated up to 2(c - 1) photons.
    """
    c1, c2 = rho.cutoff, sigma.cutoff
    d = c1 + c2 - 1
    pair = tensor(rho.embedded(d), sigma.embedded(d))
    u = beam_splitter_unitary(d, d, 0.5)
    return TwoModeOperator(u.conj().T @ pair.matrix @ u, pair.cutoffs)


def unfairness_witness(phi: TwoModeOperator, lam: float,
                       state_id: str = "") -> CheckReport:
    """Moment witness on the difference-port distribution of Phi.

    With q_m the difference-port populations, the claim for fair mixtures
    of twin pairs is
        (sum q_m m lam^(m-1))^2 <= (sum q_m lam^m)(sum q_m m(m-1) lam^(m-2)).
    Powers are kept factored through the m and m(m-1) weights, so m = 0, 1
    terms vanish identically and lam = 0 is safe. Operators that cannot be
    written as such mixtures may fail; a negative margin witnesses that.
    """
    if abs(lam) > 1.0:
        raise ValueError("the tilt parameter must satisfy |lam| <= 1")
    lhs, rhs = _witness_sides(dark_port_distribution(phi), lam)
    return inequality_report(
        "unfairness_witness", state_id, {"lambda": float(lam)}, lhs, rhs,
        PROVEN_TOL,
        claim="difference-port tilted moments satisfy the fair-mixture bound",
    )


def _witness_sides(q: np.ndarray, lam: float) -> tuple:
    m = np.arange(q.size, dtype=float)
    zeroth = float(q @ np.power(lam, m))
    first = float(q[1]) if q.size > 1 else 0.0
    second = 0.0
    if q.size > 2:
        powers = np.power(lam, m[:-2])
        first += float(q[2:] @ (m[2:] * powers * lam))
        second = float(q[2:] @ (m[2:] * (m[2:] - 1.0) * powers))
    return first ** 2, zeroth * second


def lambda_zero_witness(phi: TwoModeOperator, state_id: str = "") -> CheckReport:
    """Three-population specialization of the witness at lam = 0:
    2 q_2 q_0 - q_1^2 >= 0 for fair mixtures."""
    q = dark_port_distribution(phi)
    q0 = float(q[0])
    q1 = float(q[1]) if q.size > 1 else 0.0
    q2 = float(q[2]) if q.size > 2 else 0.0
    return inequality_report(
        "lambda_zero_witness", state_id, {}, q1 ** 2, 2.0 * q2 * q0, PROVEN_TOL,
        claim="2 q2 q0 >= q1^2 on the difference-port populations",
    )


def _label_projector(amplitudes: dict, cutoff: int) -> TwoModeOperator:
    """Rank-one two-mode operator with the given sum/difference-basis
    amplitudes, expressed back in the input basis."""
    vec = np.zeros(cutoff * cutoff, dtype=complex)
    for (n_plus, n_minus), amp in amplitudes.items():
        vec[n_plus * cutoff + n_minus] = amp
    vec /= np.linalg.norm(vec)
    u = beam_splitter_unitary(cutoff, cutoff, 0.5)
    rotated = u @ np.outer(vec, vec.conj()) @ u.conj().T
    return TwoModeOperator(rotated, (cutoff, cutoff))


def bell_like_pair(cutoff: int = 4) -> TwoModeOperator:
    """Superposition of no photons and a photon in each of the sum and
    difference modes; its difference-port populations are (1/2, 1/2)."""
    return _label_projector({(0, 0): 1.0, (1, 1): -1.0}, cutoff)


def separable_01_pair(cutoff: int = 4) -> TwoModeOperator:
    """One photon sitting in the difference mode: populations (0, 1, 0)."""
    return _label_projector({(0, 1): 1.0}, cutoff)


def twin_photon_pair(cutoff: int = 4) -> TwoModeOperator:
    """Literal |1, 1> input pair; interference gives difference-port
    populations (1/2, 0, 1/2) and the witness passes."""
    one = make_fock(1, cutoff).density()
    return fair_pair(one)


def fair_pair(rho: DensityOperator) -> TwoModeOperator:
    """Twin copies of rho as the witness input: the fair case by
    construction. The witness performs the interference itself."""
    return tensor(rho, rho)


def unfairness_scan(pairs, lam_grid, tolerance: float = SCAN_TOL,
                    expect_fail: bool = False) -> ScanResult:
    """Evaluate the witness over (state_id, TwoModeOperator) pairs and a
    lam grid. Raw violations are re-checked on a 10x finer lam grid with a
    10x tighter tolerance before the scan is labeled a violation."""
    grid = np.asarray(lam_grid, dtype=float)
    rows = []
    violations = []
    min_margin = np.inf
    argmin = {}

    def margins_on(q, lams):
        sides = [_witness_sides(q, float(l)) for l in lams]
        return np.array([rhs - lhs for lhs, rhs in sides])

    for state_id, phi in pairs:
        q = dark_port_distribution(phi)
        margins = margins_on(q, grid)
        rows.extend((state_id, float(l), float(mg)) for l, mg in zip(grid, margins))
        i = int(np.argmin(margins))
        if margins[i] < min_margin:
            min_margin = float(margins[i])
            argmin = {"state_id": state_id, "lambda": float(grid[i])}
        if margins[i] < -tolerance:
            fine = np.linspace(grid[0], grid[-1], REFINE_FACTOR * grid.size)
            fine_m = margins_on(q, fine)
            j = int(np.argmin(fine_m))
            if fine_m[j] < -tolerance / REFINE_FACTOR:
                violations.append((state_id, float(fine[j]), float(fine_m[j])))
    return ScanResult(
        conjecture="unfairness_witness",
        corpus=f"{len(pairs)} pairs",
        grid=f"[{grid[0]:g}, {grid[-1]:g}] x {grid.size}",
        min_margin=float(min_margin),
        argmin=argmin,
        rows=rows,
        violations=violations,
        disposition="violation" if violations else "no-violation-found",
    )


# ---------------------------------------------------------------------------
# dark-port statistics
# ---------------------------------------------------------------------------


def dark_port_state(rho1: DensityOperator, transmissivity: float) -> DensityOperator:
    """Difference-port conditional state of two copies of rho1.

    The pair is interfered on a balanced splitter, the difference port is
    reweighted by sqrt(1 - 2T) per photon, and the sum port is traced out.
    """
    t = float(transmissivity)
    if t > 0.5:
        raise ValueError("the reweighting base needs T <= 1/2")
    phi = beamsplit_pair(rho1, rho1)  # sum/difference basis

    c1, c2 = phi.cutoffs
    base = 1.0 - 2.0 * t
    weights = np.sqrt(np.power(base, np.arange(c2, dtype=float)))
    w_full = np.tile(weights, c1)
    weighted = w_full[:, None] * phi.matrix * w_full[None, :]
    norm = np.trace(weighted).real
    if norm <= 1e-300:
        raise ValueError("dark-port weight annihilated the state")
    return partial_trace(TwoModeOperator(weighted / norm, phi.cutoffs), keep=2)


def g2(rho: DensityOperator):
    """Second-order correlation Tr[rho N(N-1)] / Tr[rho N]^2, or None when
    the mean photon number is numerically zero."""
    n_diag = np.arange(rho.cutoff, dtype=float)
    pops = np.diag(rho.matrix).real
    mean_n = float(pops @ n_diag)
    if mean_n <= MEAN_N_FLOOR:
        return None
    return float(pops @ (n_diag * (n_diag - 1.0))) / mean_n ** 2


def g_factorial(rho: DensityOperator, order: int):
    """Normalized factorial moment Tr[rho N(N-1)...(N-order+1)] / <N>^order.

    Scan hook only: high orders vanish identically once the order exceeds
    the populated ladder, so no positivity assertion is attached.
    """
    if order < 1:
        raise ValueError("order must be a positive integer")
    n_diag = np.arange(rho.cutoff, dtype=float)
    pops = np.diag(rho.matrix).real
    mean_n = float(pops @ n_diag)
    if mean_n <= MEAN_N_FLOOR:
        return None
    fact = np.ones_like(n_diag)
    for j in range(order):
        fact *= np.clip(n_diag - j, 0.0, None)
    return float(pops @ fact) / mean_n ** order


def dark_port_g2_scan(states, t_grid, tolerance: float = G2_TOL) -> ScanResult:
    """Scan g2(dark port) >= 1 wherever g2 is defined."""
    grid = np.asarray(t_grid, dtype=float)
    rows = []
    violations = []
    min_margin = np.inf
    argmin = {}
    for state_id, rho1 in states:
        for t in grid:
            value = g2(dark_port_state(rho1, float(t)))
            if value is None:
                continue
            margin = value - 1.0
            rows.append((state_id, float(t), float(margin)))
            if margin < min_margin:
                min_margin = float(margin)
                argmin = {"state_id": state_id, "T": float(t)}
            if margin < -tolerance:
                violations.append((state_id, float(t), float(margin)))
    return ScanResult(
        conjecture="dark_port_g2",
        corpus=f"{len(states)} states",
        grid=f"[{grid[0]:g}, {grid[-1]:g}] x {grid.size}",
        min_margin=float(min_margin),
        argmin=argmin,
        rows=rows,
        violations=violations,
        disposition="violation" if violations else "no-violation-found",
    )


# ---------------------------------------------------------------------------
# reference counterexample operators
# ---------------------------------------------------------------------------


def indefinite_convex_operator(cutoff: int = 4) -> DensityOperator:
    """diag(2/3, -1/3, 2/3, 0, ...): unit trace but not positive, yet it
    passes every convexity and log-convexity scan on (0, 1). It shows the
    scans cannot certify positivity."""
    if cutoff < 3:
        raise ValueError("need at least three levels")
    diag = np.zeros(cutoff)
    diag[:3] = [2.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0]
    return DensityOperator(np.diag(diag).astype(complex), cutoff, physical=False)


def fock_one_extended_range_report(transmissivity: float = 1.2) -> CheckReport:
    """Log-convexity margin of the single photon at a transmissivity outside
    [0, 1], where the inequality is known to fail."""
    rho = make_fock(1, 4).density()
    margin = float(_log_convexity_margins(rho, np.array([transmissivity]))[0])
    return CheckReport(
        check_name="log_convexity_extended",
        state_id="fock:1",
        params={"T": float(transmissivity)},
        lhs=margin,
        rhs=0.0,
        margin=margin,
        tolerance=SCAN_TOL,
        passed=bool(margin >= -SCAN_TOL),
        claim="P P'' - (P')^2 >= 0 fails outside the physical range",
    )
