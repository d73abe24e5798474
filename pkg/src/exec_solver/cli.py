"""Batch front door: parse a run config, solve scenarios, emit CSV artifacts.

Config files are flat ``key = value`` text with section prefixes::

    mode = solve            # solve | sweep | compare | mc
    output_dir = out
    seed = 7
    grid.n = 200
    scenario.q = 10
    scenario.lambda = 0.5
    kernel.type = exponential
    kernel.rho = 0.5
    signal.type = ou

Unknown keys are rejected. Scenario defaults are q=10, T=10, lambda=0.5,
varrho=4, phi=0, h0=0 with a zero kernel and no signal. Floats are written
with full round-trip precision so re-ingesting an emitted path.csv
reproduces the reported objective exactly.

Exit codes: 0 success, 2 configuration error, 3 numeric error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, ExecSolverError, InputError, NumericError
from .kernels import (
    BoundedPowerLawKernel,
    ExponentialKernel,
    FractionalKernel,
    PropagatorKernel,
    TabulatedKernel,
    ZeroKernel,
)
from .model import ScenarioParams, TimeGrid
from .nystrom import solve_scenario_detail
from .oracle import mc_objective, nystrom_rule, twap_rule
from .signals import OUSignal, SignalModel, TabulatedSignal, ZeroSignal

__all__ = ["RunConfig", "parse_config", "load_config", "run", "main"]

log = logging.getLogger("exec_solver")

_SCENARIO_DEFAULTS = {
    "scenario.q": "10",
    "scenario.T": "10",
    "scenario.lambda": "0.5",
    "scenario.varrho": "4",
    "scenario.phi": "0",
    "scenario.h0": "0",
}

_DEFAULTS = {
    **_SCENARIO_DEFAULTS,
    "seed": "0",
    "grid.n": "200",
    "kernel.type": "zero",
    "kernel.c": "1",
    "kernel.rho": "0.5",
    "kernel.alpha": "0.55",
    "kernel.ell0": "1",
    "kernel.beta": "1",
    "signal.type": "zero",
    "signal.I0": "2",
    "signal.gamma": "0.3",
    "signal.sigma": "0.5",
    "mc.strategies": "nystrom, twap",
}

_REQUIRED = ("mode", "output_dir")

_KNOWN_KEYS = set(_DEFAULTS) | set(_REQUIRED) | {
    "scenario.h0_csv",
    "kernel.csv",
    "signal.csv",
    "signal.forecast_csv",
    "sweep.param",
    "sweep.values",
    "compare.kernels",
    "mc.n_paths",
}

_SWEEPABLE = {
    "scenario.q", "scenario.varrho", "scenario.lambda", "scenario.phi",
    "kernel.c", "kernel.rho", "kernel.alpha", "kernel.ell0", "kernel.beta",
    "signal.I0", "signal.gamma", "signal.sigma",
}

_MODES = ("solve", "sweep", "compare", "mc")


@dataclass(eq=False)
class RunConfig:
    """Fully validated run description built from a config file."""

    mode: str
    output_dir: Path
    seed: int
    n: int
    scenario: ScenarioParams
    kernel: PropagatorKernel
    signal: SignalModel
    sweep_param: str | None = None
    sweep_values: tuple[float, ...] = ()
    compare_kernels: tuple[str, ...] = ()
    mc_n_paths: int = 0
    mc_strategies: tuple[str, ...] = ()
    raw: dict = field(default_factory=dict, repr=False)
    base_dir: Path = Path(".")

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid.uniform(self.scenario.T, self.n)


def _parse_pairs(text: str) -> dict[str, tuple[str, int]]:
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value in {raw!r}")
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = (value, lineno)
    return pairs


def _get_float(kv, key):
    value, lineno = kv[key]
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"line {lineno}: key {key!r} needs a number, got {value!r}") from None


def _get_int(kv, key):
    value, lineno = kv[key]
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"line {lineno}: key {key!r} needs an integer, got {value!r}") from None


def _read_vector_csv(path: Path) -> np.ndarray:
    try:
        raw = path.read_text().strip().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    rows = [line.split(",")[0].strip() for line in raw if line.strip()]
    try:
        float(rows[0])
    except (ValueError, IndexError):
        rows = rows[1:]  # header row
    try:
        return np.array([float(v) for v in rows])
    except ValueError as exc:
        raise ConfigError(f"non-numeric entry in {path}: {exc}") from exc


def _read_matrix_csv(path: Path) -> np.ndarray:
    try:
        return np.loadtxt(path, delimiter=",")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"cannot parse matrix from {path}: {exc}") from exc


def _resolve(base_dir: Path, value: str) -> Path:
    p = Path(value)
    return p if p.is_absolute() else base_dir / p


def _build_scenario(kv, base_dir: Path, grid_n: int) -> ScenarioParams:
    if "scenario.h0_csv" in kv:
        h0 = _read_vector_csv(_resolve(base_dir, kv["scenario.h0_csv"][0]))
    else:
        h0 = _get_float(kv, "scenario.h0")
    try:
        return ScenarioParams(
            q=_get_float(kv, "scenario.q"),
            T=_get_float(kv, "scenario.T"),
            lam=_get_float(kv, "scenario.lambda"),
            varrho=_get_float(kv, "scenario.varrho"),
            phi=_get_float(kv, "scenario.phi"),
            h0=h0,
        )
    except InputError as exc:
        raise ConfigError(f"infeasible scenario parameters: {exc}") from exc


def _build_kernel(kv, base_dir: Path, grid: TimeGrid, kind: str | None = None) -> PropagatorKernel:
    kind = kind if kind is not None else kv["kernel.type"][0]
    try:
        if kind == "zero":
            return ZeroKernel()
        if kind == "exponential":
            return ExponentialKernel(c=_get_float(kv, "kernel.c"), rho=_get_float(kv, "kernel.rho"))
        if kind == "fractional":
            return FractionalKernel(c=_get_float(kv, "kernel.c"), alpha=_get_float(kv, "kernel.alpha"))
        if kind == "bounded_power_law":
            return BoundedPowerLawKernel(ell0=_get_float(kv, "kernel.ell0"), beta=_get_float(kv, "kernel.beta"))
        if kind == "tabulated":
            if "kernel.csv" not in kv:
                raise ConfigError("kernel.type = tabulated requires kernel.csv")
            values = _read_vector_csv(_resolve(base_dir, kv["kernel.csv"][0]))
            if values.shape != (grid.n + 1,):
                raise ConfigError(
                    f"kernel.csv has {values.shape[0]} values, grid needs {grid.n + 1}"
                )
            return TabulatedKernel.from_grid_values(grid, values)
    except InputError as exc:
        raise ConfigError(f"infeasible kernel parameters: {exc}") from exc
    raise ConfigError(f"unknown kernel.type {kind!r}")


def _build_signal(kv, base_dir: Path, grid: TimeGrid) -> SignalModel:
    kind = kv["signal.type"][0]
    try:
        if kind == "zero":
            return ZeroSignal()
        if kind == "ou":
            return OUSignal(I0=_get_float(kv, "signal.I0"),
                            gamma=_get_float(kv, "signal.gamma"),
                            sigma=_get_float(kv, "signal.sigma"))
        if kind == "tabulated":
            if "signal.csv" not in kv:
                raise ConfigError("signal.type = tabulated requires signal.csv")
            values = _read_vector_csv(_resolve(base_dir, kv["signal.csv"][0]))
            forecast = None
            if "signal.forecast_csv" in kv:
                forecast = _read_matrix_csv(_resolve(base_dir, kv["signal.forecast_csv"][0]))
            return TabulatedSignal(values=values, forecast=forecast)
    except InputError as exc:
        raise ConfigError(f"infeasible signal parameters: {exc}") from exc
    raise ConfigError(f"unknown signal.type {kind!r}")


def parse_config(text: str, base_dir: Path | str = ".") -> RunConfig:
    """Parse and fully validate config text; raises ConfigError on any issue."""
    base_dir = Path(base_dir)
    kv = _parse_pairs(text)

    missing = [key for key in _REQUIRED if key not in kv]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(sorted(missing))}")

    for key, value in _DEFAULTS.items():
        kv.setdefault(key, (value, 0))

    mode = kv["mode"][0]
    if mode not in _MODES:
        raise ConfigError(f"unknown mode {mode!r}; expected one of {', '.join(_MODES)}")

    n = _get_int(kv, "grid.n")
    if n < 2:
        raise ConfigError(f"grid.n must be >= 2, got {n}")
    seed = _get_int(kv, "seed")
    if seed < 0:
        raise ConfigError(f"seed must be >= 0, got {seed}")

    scenario = _build_scenario(kv, base_dir, n)
    grid = TimeGrid.uniform(scenario.T, n)
    kernel = _build_kernel(kv, base_dir, grid)
    signal = _build_signal(kv, base_dir, grid)

    if mode in ("solve", "sweep", "compare", "mc") and scenario.phi != 0.0:
        raise ConfigError(
            "scenario.phi > 0 is outside the grid solver's domain; use the "
            "quadratic-program oracle API (exec_solver.oracle) for phi > 0"
        )

    cfg = RunConfig(mode=mode, output_dir=Path(kv["output_dir"][0]), seed=seed, n=n,
                    scenario=scenario, kernel=kernel, signal=signal,
                    raw={k: v for k, (v, _) in kv.items()}, base_dir=base_dir)

    if mode == "sweep":
        if "sweep.param" not in kv or "sweep.values" not in kv:
            raise ConfigError("mode = sweep requires sweep.param and sweep.values")
        param = kv["sweep.param"][0]
        if param not in _SWEEPABLE:
            raise ConfigError(
                f"sweep.param {param!r} is not sweepable; choose one of "
                f"{', '.join(sorted(_SWEEPABLE))}"
            )
        try:
            values = tuple(float(v) for v in kv["sweep.values"][0].split(","))
        except ValueError as exc:
            raise ConfigError(f"sweep.values must be a comma list of numbers: {exc}") from exc
        if not values:
            raise ConfigError("sweep.values is empty")
        cfg.sweep_param = param
        cfg.sweep_values = values
    elif mode == "compare":
        if "compare.kernels" not in kv:
            raise ConfigError("mode = compare requires compare.kernels")
        kinds = tuple(k.strip() for k in kv["compare.kernels"][0].split(","))
        for kind in kinds:
            _build_kernel(kv, base_dir, grid, kind=kind)  # validate early
        cfg.compare_kernels = kinds
    elif mode == "mc":
        if "mc.n_paths" not in kv:
            raise ConfigError("mode = mc requires mc.n_paths")
        n_paths = _get_int(kv, "mc.n_paths")
        if n_paths < 2:
            raise ConfigError(f"mc.n_paths must be >= 2, got {n_paths}")
        strategies = tuple(s.strip() for s in kv["mc.strategies"][0].split(","))
        for s in strategies:
            if s not in ("nystrom", "twap"):
                raise ConfigError(f"unknown mc strategy {s!r}; expected nystrom or twap")
        cfg.mc_n_paths = n_paths
        cfg.mc_strategies = strategies
    return cfg


def load_config(path: Path | str) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base_dir=path.parent)


# ---------------------------------------------------------------------------
# CSV emission

def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell if isinstance(cell, str) else _fmt(cell) for cell in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    log.info("wrote %s", path)
    return path


def _write_path_csv(out: Path, name: str, solution, grid: TimeGrid) -> Path:
    sp = solution.path
    rows = [
        (str(i), grid.t[i], sp.I[i], solution.forecast_diag[i], solution.source[i],
         sp.u[i], sp.Q[i], sp.Z[i])
        for i in range(grid.n + 1)
    ]
    return _write_csv(out / name, ["i", "t", "I", "nu_tt", "a", "u", "Q", "Z"], rows)


def _write_breakdown_csv(out: Path, name: str, breakdown) -> Path:
    rows = [
        ("revenue", breakdown.revenue),
        ("temporary_cost", breakdown.temporary_cost),
        ("transient_cost", breakdown.transient_cost),
        ("running_penalty", breakdown.running_penalty),
        ("terminal_penalty", breakdown.terminal_penalty),
        ("total", breakdown.total),
    ]
    return _write_csv(out / name, ["component", "value"], rows)


def _fname_token(value) -> str:
    # decimal points in numbers become 'p' so values stay one filename token
    return str(value).replace(".", "p").replace("-", "m").replace("/", "_")


def _param_token(name: str) -> str:
    return name.replace(".", "_")


def _run_solve(cfg: RunConfig, out: Path) -> list[Path]:
    sol = solve_scenario_detail(cfg.scenario, cfg.kernel, cfg.signal, cfg.grid, cfg.seed)
    return [
        _write_path_csv(out, "path.csv", sol, cfg.grid),
        _write_breakdown_csv(out, "breakdown.csv", sol.path.objective),
    ]


def _run_sweep(cfg: RunConfig, out: Path) -> list[Path]:
    files = []
    summary = []
    grid = cfg.grid
    for value in cfg.sweep_values:
        kv = {k: (v, 0) for k, v in cfg.raw.items()}
        kv[cfg.sweep_param] = (_fmt(value), 0)
        scenario = _build_scenario(kv, cfg.base_dir, cfg.n)
        kernel = _build_kernel(kv, cfg.base_dir, grid)
        signal = _build_signal(kv, cfg.base_dir, grid)
        sol = solve_scenario_detail(scenario, kernel, signal, grid, cfg.seed)
        name = f"path_{_param_token(cfg.sweep_param)}_{_fname_token(value)}.csv"
        files.append(_write_path_csv(out, name, sol, grid))
        sp = sol.path
        summary.append((value, sp.u[0], sp.Q[-1], sp.objective.total))
    files.append(_write_csv(out / "summary.csv", ["param", "u0", "Q_T", "total"], summary))
    return files


def _run_compare(cfg: RunConfig, out: Path) -> list[Path]:
    from .signals import simulate_signal

    files = []
    summary = []
    kv = {k: (v, 0) for k, v in cfg.raw.items()}
    path = simulate_signal(cfg.signal, cfg.grid, cfg.seed)
    for kind in cfg.compare_kernels:
        kernel = _build_kernel(kv, cfg.base_dir, cfg.grid, kind=kind)
        sol = solve_scenario_detail(cfg.scenario, kernel, cfg.signal, cfg.grid,
                                    cfg.seed, signal_path=path)
        files.append(_write_path_csv(out, f"path_{_fname_token(kind)}.csv", sol, cfg.grid))
        sp = sol.path
        summary.append((kind, sp.u[0], sp.Q[-1], sp.Z[-1], sp.objective.total))
    files.append(_write_csv(out / "summary.csv",
                            ["kernel", "u0", "Q_T", "Z_T", "total"], summary))
    return files


def _run_mc(cfg: RunConfig, out: Path) -> list[Path]:
    rules = {
        "nystrom": lambda: nystrom_rule(cfg.scenario, cfg.kernel, cfg.signal, cfg.grid),
        "twap": lambda: twap_rule(cfg.scenario, cfg.grid),
    }
    rows = []
    for name in cfg.mc_strategies:
        est = mc_objective(cfg.scenario, cfg.kernel, cfg.signal, cfg.grid,
                           rules[name](), cfg.mc_n_paths, cfg.seed)
        rows.append((name, est.mean, est.stderr, str(est.n_paths), str(est.seed)))
    return [_write_csv(out / "mc_summary.csv",
                       ["strategy", "mean", "stderr", "n_paths", "seed"], rows)]


def run(cfg: RunConfig) -> list[Path]:
    """Execute a validated config; returns the list of files written."""
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    runner = {"solve": _run_solve, "sweep": _run_sweep,
              "compare": _run_compare, "mc": _run_mc}[cfg.mode]
    return runner(cfg, out)


# ---------------------------------------------------------------------------
# entry point

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exec-solver",
        description="Optimal liquidation under transient propagator impact",
    )
    parser.add_argument("--config", required=True, help="run configuration file")
    parser.add_argument("--mode", choices=_MODES, help="override the config mode")
    parser.add_argument("--out", help="override the output directory")
    parser.add_argument("--seed", type=int, help="override the simulation seed")
    parser.add_argument("--grid-n", type=int, help="override the number of grid steps")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("EXEC_SOLVER_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        cfg_path = Path(args.config)
        text = cfg_path.read_text(encoding="utf-8")
        overrides = []
        if args.mode:
            overrides.append(("mode", args.mode))
        if args.out:
            overrides.append(("output_dir", args.out))
        if args.seed is not None:
            overrides.append(("seed", str(args.seed)))
        if args.grid_n is not None:
            overrides.append(("grid.n", str(args.grid_n)))
        for key, value in overrides:
            # flags win over config keys: append after stripping the original
            text = "\n".join(line for line in text.splitlines()
                             if line.split("#", 1)[0].split("=", 1)[0].strip() != key)
            text += f"\n{key} = {value}\n"
        cfg = parse_config(text, base_dir=cfg_path.parent)
        files = run(cfg)
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, InputError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except ExecSolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    for f in files:
        print(f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
