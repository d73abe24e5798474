"""Price-predicting signals: models, exact simulation, forecast matrix.

The unaffected price is P_t = integral of the signal I plus a martingale
that is fixed to zero throughout (the optimal speed depends on P only
through the forecasts below, and objective comparisons in expectation are
unchanged when the signal is independent of the martingale). On the grid,

    P_k = dt * sum_{j<k} I_j.

The solver consumes the signal exclusively through the forecast matrix
N[k, j] = E[P_{t_k} - P_T | info at t_j], which is closed-form for an
Ornstein-Uhlenbeck signal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, UnsupportedSignalError
from .model import TimeGrid

__all__ = [
    "SignalModel",
    "ZeroSignal",
    "OUSignal",
    "TabulatedSignal",
    "simulate_signal",
    "forecast_matrix",
    "price_path",
]

# below this, mean-reversion formulas switch to their gamma -> 0 limits
_GAMMA_EPS = 1e-12


class SignalModel:
    pass


@dataclass(frozen=True)
class ZeroSignal(SignalModel):
    """No signal: I identically zero, price identically zero."""


@dataclass(frozen=True)
class OUSignal(SignalModel):
    """Mean-reverting signal dI = -gamma * I dt + sigma dW.

    gamma = 0 is accepted and handled through the analytic limits of the
    transition and forecast formulas.
    """

    I0: float
    gamma: float
    sigma: float

    def __post_init__(self):
        if self.gamma < 0:
            raise InputError(f"OU signal needs gamma >= 0, got {self.gamma}")
        if self.sigma < 0:
            raise InputError(f"OU signal needs sigma >= 0, got {self.sigma}")


@dataclass(frozen=True, eq=False)
class TabulatedSignal(SignalModel):
    """A realized signal path on the grid, with an optional user forecast matrix.

    Without a forecast matrix the path can be simulated (replayed) and
    priced, but not fed to the solver: no conditional-expectation model is
    available for an arbitrary tabulated path.
    """

    values: np.ndarray
    forecast: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise InputError("tabulated signal values must be a 1-d vector")
        object.__setattr__(self, "values", values)
        if self.forecast is not None:
            fc = np.asarray(self.forecast, dtype=float)
            m = values.shape[0]
            if fc.shape != (m, m):
                raise InputError(
                    f"forecast matrix has shape {fc.shape}, expected ({m}, {m})"
                )
            object.__setattr__(self, "forecast", fc)


def _step_normals(seed: int, step: int, n_paths: int) -> np.ndarray:
    """Counter-based draws keyed by (seed, step); path index = stream position."""
    bits = np.random.Philox(key=np.array([seed, step], dtype=np.uint64))
    return np.random.Generator(bits).standard_normal(n_paths)


def _ou_step_coeffs(model: OUSignal, dt: float) -> tuple[float, float]:
    g = model.gamma
    if g < _GAMMA_EPS:
        return 1.0, model.sigma * np.sqrt(dt)
    phase = np.exp(-g * dt)
    var = -np.expm1(-2.0 * g * dt) / (2.0 * g)
    return phase, model.sigma * np.sqrt(var)


def simulate_signal(model: SignalModel, grid: TimeGrid, seed: int = 0,
                    n_paths: int | None = None) -> np.ndarray:
    """Realized signal values on the grid.

    Returns shape (n+1,) by default, or (n_paths, n+1) when ``n_paths`` is
    given. OU paths use the exact one-step transition

        I_{i+1} = I_i * exp(-gamma dt) + sigma * sqrt((1 - exp(-2 gamma dt)) / (2 gamma)) * xi_i

    with normals drawn from a counter-based generator keyed by (seed, step),
    so paths are reproducible bit for bit given the seed and independent of
    how a batch is split up.
    """
    if not (isinstance(seed, (int, np.integer)) and 0 <= int(seed) < 2**64):
        raise InputError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    squeeze = n_paths is None
    count = 1 if squeeze else int(n_paths)
    npts = grid.n + 1

    if isinstance(model, ZeroSignal):
        out = np.zeros((count, npts))
    elif isinstance(model, TabulatedSignal):
        if model.values.shape != (npts,):
            raise InputError(
                f"tabulated signal has {model.values.shape[0]} values, grid needs {npts}"
            )
        out = np.tile(model.values, (count, 1))
    elif isinstance(model, OUSignal):
        phase, scale = _ou_step_coeffs(model, grid.dt)
        out = np.empty((count, npts))
        out[:, 0] = model.I0
        for step in range(grid.n):
            xi = _step_normals(int(seed), step, count)
            out[:, step + 1] = out[:, step] * phase + scale * xi
    else:
        raise InputError(f"unknown signal model {type(model).__name__}")
    return out[0] if squeeze else out


def forecast_matrix(model: SignalModel, path: np.ndarray, grid: TimeGrid) -> np.ndarray:
    """Forecasts N[k, j] = E[P_{t_k} - P_T | info at t_j], zero for k < j.

    For the OU signal the conditional expectation is available in closed
    form and depends on the path only through I_{t_j}:

        N[k, j] = I_{t_j} * (exp(-gamma (n-j) dt) - exp(-gamma (k-j) dt)) / gamma.

    The gamma -> 0 limit is I_{t_j} * (k - n) * dt. Tabulated signals must
    carry a user-supplied forecast matrix.
    """
    n, dt = grid.n, grid.dt
    path = np.asarray(path, dtype=float)
    if path.shape != (n + 1,):
        raise InputError(f"signal path has shape {path.shape}, expected ({n + 1},)")

    if isinstance(model, ZeroSignal):
        return np.zeros((n + 1, n + 1))
    if isinstance(model, TabulatedSignal):
        if model.forecast is None:
            raise UnsupportedSignalError(
                "tabulated signal has no closed-form forecast; supply one explicitly"
            )
        if model.forecast.shape != (n + 1, n + 1):
            raise InputError(
                f"forecast matrix has shape {model.forecast.shape}, "
                f"expected ({n + 1}, {n + 1})"
            )
        return model.forecast
    if not isinstance(model, OUSignal):
        raise InputError(f"unknown signal model {type(model).__name__}")

    idx = np.arange(n + 1)
    ahead = idx[:, None] - idx[None, :]  # k - j
    if model.gamma < _GAMMA_EPS:
        core = (idx[:, None] - n) * dt * np.ones(n + 1)[None, :]
    else:
        g = model.gamma
        tail = np.exp(-g * dt * (n - idx))[None, :]
        core = (tail - np.exp(-g * dt * ahead)) / g
    return np.where(ahead >= 0, path[None, :] * core, 0.0)


def price_path(signal_values: np.ndarray, grid: TimeGrid) -> np.ndarray:
    """Left-endpoint integrated price P_k = dt * sum_{j<k} I_j (martingale part zero).

    Accepts a single path (n+1,) or a batch (n_paths, n+1); the integration
    runs along the last axis.
    """
    values = np.asarray(signal_values, dtype=float)
    if values.shape[-1] != grid.n + 1:
        raise InputError(
            f"signal path has {values.shape[-1]} points, grid needs {grid.n + 1}"
        )
    acc = np.cumsum(values[..., :-1], axis=-1) * grid.dt
    zero = np.zeros(values.shape[:-1] + (1,))
    return np.concatenate([zero, acc], axis=-1)
