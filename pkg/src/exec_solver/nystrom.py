"""Grid solver for the optimal trading speed.

The optimal speed solves a linear Volterra equation u = a + B * u whose
ingredients are built from the integrated kernel increments L, U, the
signal forecast matrix N and the shifted initial distortion. On the grid
this becomes a unit lower-triangular system solved by forward substitution:

    1. per-step curvature matrices  D_i = 2*lam*I + (L + U restricted to
       indices >= i), which are block-diagonal with an identity head block,
    2. response rows  w_i = U_i^T D_i^{-1}  (one transposed solve each),
    3. feedback matrix  B[i, j] = (w_i . L_col_j - L[i, j]) / (2*lam) on the
       strict lower triangle, and source vector
       a_i = (N[i, i] - h~_i - w_i . N_col_i + w_i . h~) / (2*lam),
    4. u = (I - B)^{-1} a by forward substitution.

The scheme requires a zero running inventory penalty (phi = 0); scenarios
with phi > 0 are handled by the direct quadratic-program route in
``exec_solver.oracle``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .errors import InputError, NumericError
from .kernels import IntegratedIncrements, PropagatorKernel, integrated_increments
from .model import ScenarioParams, StrategyPath, TimeGrid, evaluate_objective, rollout
from .signals import SignalModel, forecast_matrix, price_path, simulate_signal

__all__ = [
    "CurvatureFactor",
    "build_curvature_factors",
    "dense_curvature",
    "curvature_response",
    "response_rows",
    "build_feedback_matrix",
    "build_source_vector",
    "solve_speed",
    "NystromEngine",
    "ScenarioSolution",
    "solve_scenario",
    "solve_scenario_detail",
]


def _require_phi_zero(params: ScenarioParams):
    if params.phi != 0.0:
        raise InputError(
            "the grid solver is stated for phi = 0; use exec_solver.oracle "
            "(direct quadratic program / Monte Carlo) for phi > 0"
        )


def symmetrized_core(inc: IntegratedIncrements) -> np.ndarray:
    """L + U restricted to the leading n x n block; D_i adds its trailing part."""
    n = inc.L.shape[0] - 1
    return inc.L[:n, :n] + inc.U[:n, :n]


@dataclass(eq=False)
class CurvatureFactor:
    """Factorization of one curvature matrix D_i.

    D_i is 2*lam*I on indices < i and 2*lam*I plus the trailing block of
    L + U on indices >= i, with zero off-diagonal coupling, so the stored
    factor is an LU (partial pivoting) of the trailing block only.
    """

    i: int
    n: int
    two_lam: float
    lu: tuple | None

    def solve(self, f: np.ndarray, transpose: bool = False) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape != (self.n,):
            raise InputError(f"right-hand side has shape {f.shape}, expected ({self.n},)")
        x = f / self.two_lam
        if self.lu is not None:
            x[self.i:] = scipy.linalg.lu_solve(self.lu, f[self.i:], trans=1 if transpose else 0)
        return x

    def response_row(self, u_row: np.ndarray) -> np.ndarray:
        """w = D_i^{-T} u_row for a row supported on indices >= i."""
        w = np.zeros(self.n)
        if self.lu is not None:
            w[self.i:] = scipy.linalg.lu_solve(self.lu, u_row[self.i:], trans=1)
        return w


def _factor_block(core: np.ndarray, two_lam: float, i: int, n: int) -> CurvatureFactor:
    m = n - i
    if m == 0:
        return CurvatureFactor(i=i, n=n, two_lam=two_lam, lu=None)
    block = two_lam * np.eye(m) + core[i:, i:]
    try:
        lu = scipy.linalg.lu_factor(block)
    except scipy.linalg.LinAlgError as exc:
        raise NumericError(f"curvature matrix at step {i} is singular: {exc}") from exc
    return CurvatureFactor(i=i, n=n, two_lam=two_lam, lu=lu)


def build_curvature_factors(inc: IntegratedIncrements, params: ScenarioParams,
                            grid: TimeGrid) -> list[CurvatureFactor]:
    """Factor all n+1 curvature matrices D_0 .. D_n (kept in memory).

    Storage grows like n^3 / 3 doubles; fine at desk scale, while the
    scenario pipeline streams the factors instead of calling this.
    """
    _require_phi_zero(params)
    n = grid.n
    core = symmetrized_core(inc)
    return [_factor_block(core, 2.0 * params.lam, i, n) for i in range(n + 1)]


def dense_curvature(inc: IntegratedIncrements, params: ScenarioParams,
                    grid: TimeGrid, i: int) -> np.ndarray:
    """D_i as an explicit n x n matrix (diagnostics and positivity checks)."""
    _require_phi_zero(params)
    n = grid.n
    core = symmetrized_core(inc)
    D = 2.0 * params.lam * np.eye(n)
    D[i:, i:] += core[i:, i:]
    return D


def curvature_response(i: int, f: np.ndarray, inc: IntegratedIncrements,
                       factors: list[CurvatureFactor]) -> float:
    """The inner product U_i . D_i^{-1} f used by every solver ingredient."""
    n = inc.L.shape[0] - 1
    f = np.asarray(f, dtype=float)
    if f.shape != (n,):
        raise InputError(f"f has shape {f.shape}, expected ({n},)")
    x = factors[i].solve(f)
    return float(inc.U[i, :n] @ x)


def response_rows(inc: IntegratedIncrements, params: ScenarioParams, grid: TimeGrid,
                  factors: list[CurvatureFactor] | None = None) -> np.ndarray:
    """All rows w_i = U_i^T D_i^{-1}, shape (n+1, n).

    With ``factors`` given the stored factorizations are reused; otherwise
    each block is factored, used and dropped, keeping memory at one block.
    """
    n = grid.n
    W = np.zeros((n + 1, n))
    if factors is not None:
        for i in range(n + 1):
            W[i] = factors[i].response_row(inc.U[i, :n])
        return W
    _require_phi_zero(params)
    core = symmetrized_core(inc)
    two_lam = 2.0 * params.lam
    for i in range(n):
        fac = _factor_block(core, two_lam, i, n)
        W[i] = fac.response_row(inc.U[i, :n])
    return W


def _feedback_from_rows(W: np.ndarray, inc: IntegratedIncrements, lam: float) -> np.ndarray:
    n = W.shape[1]
    full = (W @ inc.L[:n, :] - inc.L) / (2.0 * lam)
    return np.tril(full, k=-1)


def _source_from_rows(W: np.ndarray, inc: IntegratedIncrements, lam: float,
                      h_tilde: np.ndarray, forecasts: np.ndarray) -> np.ndarray:
    n = W.shape[1]
    cross = np.einsum("ik,ki->i", W, forecasts[:n, :])
    return (np.diag(forecasts) - h_tilde - cross + W @ h_tilde[:n]) / (2.0 * lam)


def build_feedback_matrix(inc: IntegratedIncrements, params: ScenarioParams,
                          grid: TimeGrid, factors: list[CurvatureFactor]) -> np.ndarray:
    """Strictly lower-triangular feedback matrix B."""
    _require_phi_zero(params)
    W = response_rows(inc, params, grid, factors)
    return _feedback_from_rows(W, inc, params.lam)


def build_source_vector(inc: IntegratedIncrements, params: ScenarioParams,
                        grid: TimeGrid, forecasts: np.ndarray,
                        factors: list[CurvatureFactor]) -> np.ndarray:
    """Source vector a, affine in the forecasts and the shifted distortion."""
    _require_phi_zero(params)
    if forecasts.shape != (grid.n + 1, grid.n + 1):
        raise InputError(
            f"forecast matrix has shape {forecasts.shape}, "
            f"expected ({grid.n + 1}, {grid.n + 1})"
        )
    h_tilde = params.h0_values(grid) - 2.0 * params.varrho * params.q
    W = response_rows(inc, params, grid, factors)
    return _source_from_rows(W, inc, params.lam, h_tilde, forecasts)


def solve_speed(a: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve (I - B) u = a by forward substitution (B strictly lower triangular)."""
    a = np.asarray(a, dtype=float)
    B = np.asarray(B, dtype=float)
    if np.any(np.triu(B) != 0.0):
        raise InputError("feedback matrix must be strictly lower triangular")
    system = np.eye(B.shape[0]) - B
    return scipy.linalg.solve_triangular(system, a, lower=True, unit_diagonal=True)


class NystromEngine:
    """Signal-independent precomputation for repeated solves on one scenario.

    Factors the curvature blocks once (streaming), keeps the response rows
    and the feedback matrix, and turns each realized signal path into an
    optimal speed vector with O(n^2) work. Used by the Monte Carlo engine,
    where only the source vector changes from path to path.
    """

    def __init__(self, params: ScenarioParams, kernel: PropagatorKernel,
                 grid: TimeGrid, signal: SignalModel):
        _require_phi_zero(params)
        self.params = params
        self.kernel = kernel
        self.grid = grid
        self.signal = signal
        self.inc = integrated_increments(kernel, params, grid)
        self.h_tilde = params.h0_values(grid) - 2.0 * params.varrho * params.q
        self.W = response_rows(self.inc, params, grid)
        self.B = _feedback_from_rows(self.W, self.inc, params.lam)
        self._system = np.eye(grid.n + 1) - self.B

    def source_vector(self, forecasts: np.ndarray) -> np.ndarray:
        return _source_from_rows(self.W, self.inc, self.params.lam,
                                 self.h_tilde, forecasts)

    def speed_for_path(self, signal_path: np.ndarray, with_source: bool = False):
        forecasts = forecast_matrix(self.signal, signal_path, self.grid)
        a = self.source_vector(forecasts)
        u = scipy.linalg.solve_triangular(self._system, a, lower=True, unit_diagonal=True)
        if with_source:
            return u, a, np.diag(forecasts).copy()
        return u

    def speeds_for_paths(self, signal_paths: np.ndarray) -> np.ndarray:
        """Optimal speeds for a batch of realized paths, shape (n_paths, n+1)."""
        sources = np.stack([
            self.source_vector(forecast_matrix(self.signal, p, self.grid))
            for p in signal_paths
        ])
        return scipy.linalg.solve_triangular(
            self._system, sources.T, lower=True, unit_diagonal=True
        ).T


@dataclass(eq=False)
class ScenarioSolution:
    """Full pipeline output plus the solver internals the CLI reports."""

    path: StrategyPath
    source: np.ndarray
    forecast_diag: np.ndarray


def solve_scenario_detail(params: ScenarioParams, kernel: PropagatorKernel,
                          signal: SignalModel, grid: TimeGrid, seed: int = 0,
                          signal_path: np.ndarray | None = None) -> ScenarioSolution:
    """Run the whole pipeline for one realized signal path.

    ``signal_path`` overrides simulation (the forecasts still come from the
    signal model); otherwise the path is simulated from ``seed``. The
    returned strategy has inventory, distortion and the objective evaluated
    against the realized price path.
    """
    engine = NystromEngine(params, kernel, grid, signal)
    if signal_path is None:
        signal_path = simulate_signal(signal, grid, seed)
    u, a, nu_diag = engine.speed_for_path(signal_path, with_source=True)
    strat = rollout(u, params, grid, kernel, signal_values=signal_path)
    breakdown = evaluate_objective(strat, params, grid, price_path(signal_path, grid))
    return ScenarioSolution(path=replace(strat, objective=breakdown),
                            source=a, forecast_diag=nu_diag)


def solve_scenario(params: ScenarioParams, kernel: PropagatorKernel,
                   signal: SignalModel, grid: TimeGrid, seed: int = 0,
                   signal_path: np.ndarray | None = None) -> StrategyPath:
    """Optimal strategy for one scenario; see ``solve_scenario_detail``."""
    return solve_scenario_detail(params, kernel, signal, grid, seed, signal_path).path
