"""Monte Carlo experiment runner.

Each sweep point runs `trials` independent trials; within a trial every
listed estimator sees the identical (theta, observations, fading, noise)
realization, so estimator comparisons are paired.  Per-trial randomness
comes from a counter-keyed Philox stream derived from (seed, point
index, trial index), which makes results byte-identical no matter how
trials are chunked across worker processes.
"""

from __future__ import annotations

import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import sample_channel, sigma_c_from_gamma_c, sigma_s_from_gamma_s
from .crlb import crlb_unknown_csi
from .likelihood import default_grid, log_pmf
from .model import Quantizer, SystemParams
from .registry import IncompatibleEstimator, resolve_estimator, run_estimator
from .scenarios import Scenario, scenario_from_dict, scenario_to_dict

CSV_HEADER = "sweep_value,estimator,mse,std_err,trials,mean_iters"

_POINT_TAG = (1 << 48) - 1   # trial-index slot reserved for point-level draws


@dataclass(frozen=True)
class MseRow:
    sweep_value: float
    estimator: str
    mse: float
    std_err: float
    trials: int
    mean_iters: float


@dataclass(frozen=True)
class MseTable:
    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))

    def lookup(self, sweep_value: float, estimator: str) -> MseRow:
        for r in self.rows:
            if r.estimator == estimator and math.isclose(r.sweep_value, sweep_value):
                return r
        raise KeyError(f"no row for ({sweep_value}, {estimator})")


@dataclass
class SimulationResult:
    """Aggregate table plus the per-trial squared errors behind it,
    keyed by (point index, estimator id)."""

    table: MseTable
    squared_errors: dict
    sweep_values: tuple


def trial_rng(seed: int, point_index: int, trial: int) -> np.random.Generator:
    """Independent, splittable stream per (seed, point, trial)."""
    key = ((seed & ((1 << 64) - 1)) << 64) | ((point_index & 0xFFFF) << 48) | (trial & ((1 << 48) - 1))
    return np.random.Generator(np.random.Philox(key=key))


def resolve_point(sc: Scenario, index: int) -> tuple[float, SystemParams]:
    """Materialize the SystemParams for one sweep point.

    The noise floor N0 is pinned by the scenario's base energy and
    gamma_c; bit-rate arms then scale the per-observation energy, so
    their effective communication SNR shifts with the multiplier.
    """
    value = sc.sweep.values[index]
    n, levels, energy = sc.n_sensors, sc.levels, sc.energy_per_observation
    gamma_c = sc.gamma_c_db
    if sc.sweep.kind == "gamma-c":
        gamma_c = value
        sweep_value = value
    elif sc.sweep.kind == "n-sensors":
        n = int(value)
        sweep_value = value
    else:
        bits, n, mult = value
        levels = 2**bits
        energy = sc.energy_per_observation * mult
        sweep_value = float(bits)
    sigma_c = sigma_c_from_gamma_c(gamma_c, sc.energy_per_observation)
    q = Quantizer(levels=levels, granular_half_width=sc.granular_half_width)
    params = SystemParams(
        n_sensors=n,
        theta_range=sc.theta_range,
        sigma_s=sigma_s_from_gamma_s(sc.gamma_s_db, sc.granular_half_width),
        sigma_c=sigma_c,
        energy_per_observation=energy,
        quantizer=q,
        codebook=sc.codebook,
    )
    return float(sweep_value), params


def _point_assets(sc: Scenario, p_idx: int):
    sweep_value, params = resolve_point(sc, p_idx)
    insts, failures = [], []
    for est_id in sc.estimators:
        try:
            insts.append(resolve_estimator(est_id, params))
        except IncompatibleEstimator as exc:
            failures.append((est_id, str(exc)))
    trial_insts = [i for i in insts if not i.pointwise]
    point_insts = [i for i in insts if i.pointwise]
    l_max = max((i.word_len for i in trial_insts), default=0)
    needs_grid = any(i.base.startswith("mle-") for i in trial_insts)
    grid = logpmf = None
    if needs_grid:
        grid = default_grid(params)
        logpmf = log_pmf(grid.points(), params.quantizer, params.sigma_s)
    return sweep_value, params, trial_insts, point_insts, failures, l_max, grid, logpmf


def _draw_theta(sc: Scenario, params: SystemParams, rng: np.random.Generator) -> float:
    src = sc.theta_source
    if src.kind == "fixed":
        return src.value
    if src.kind == "levels":
        vals = params.quantizer.values
        eligible = vals[np.abs(vals) <= params.theta_range * (1 + 1e-12)]
        return float(eligible[rng.integers(eligible.size)])
    return float(rng.uniform(-params.theta_range, params.theta_range))


def _run_trials(sc: Scenario, p_idx: int, t0: int, t1: int):
    """Squared errors and iteration counts for trials [t0, t1)."""
    _, params, insts, _, _, l_max, grid, logpmf = _point_assets(sc, p_idx)
    n_est = len(insts)
    errs = np.empty((t1 - t0, n_est))
    iters = np.zeros((t1 - t0, n_est))
    for t in range(t0, t1):
        rng = trial_rng(sc.seed, p_idx, t)
        theta = _draw_theta(sc, params, rng)
        x = theta + params.sigma_s * rng.standard_normal(params.n_sensors)
        h = sample_channel(params.n_sensors, rng)
        z = rng.standard_normal((2, params.n_sensors, l_max))
        noise_unit = (z[0] + 1j * z[1]) / np.sqrt(2.0)
        for j, inst in enumerate(insts):
            rep = run_estimator(inst, params, theta, x, h, noise_unit, grid, logpmf)
            errs[t - t0, j] = (rep.theta_hat - theta) ** 2
            iters[t - t0, j] = rep.iterations
    return errs, iters


def _chunk_worker(payload):
    sc_dict, p_idx, t0, t1 = payload
    return _run_trials(scenario_from_dict(sc_dict), p_idx, t0, t1)


def simulate_scenario(sc: Scenario, workers: int = 1, log=None) -> SimulationResult:
    """Run every sweep point and estimator; returns aggregates plus the
    per-trial squared errors for paired analyses.

    Results are independent of `workers` (trials are rejoined in index
    order before any reduction).
    """
    log = log if log is not None else (lambda msg: print(msg, file=sys.stderr))
    rows = []
    per_trial = {}
    sweep_values = []
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for p_idx in range(len(sc.sweep.values)):
            sweep_value, params, insts, point_insts, failures, *_ = _point_assets(sc, p_idx)
            sweep_values.append(sweep_value)
            for est_id, why in failures:
                log(f"[{sc.name}] point {sweep_value:g}: skipping {est_id}: {why}")
                rows.append(MseRow(sweep_value, est_id, math.nan, math.nan, 0, 0.0))

            if insts:
                errs = np.empty((sc.trials, len(insts)))
                iters = np.empty((sc.trials, len(insts)))
                if pool is None:
                    errs[:], iters[:] = _run_trials(sc, p_idx, 0, sc.trials)
                else:
                    chunk = max(64, math.ceil(sc.trials / (workers * 4)))
                    spans = [(t0, min(t0 + chunk, sc.trials)) for t0 in range(0, sc.trials, chunk)]
                    payloads = [(scenario_to_dict(sc), p_idx, t0, t1) for t0, t1 in spans]
                    for (t0, t1), (e, i) in zip(spans, pool.map(_chunk_worker, payloads)):
                        errs[t0:t1], iters[t0:t1] = e, i
                for j, inst in enumerate(insts):
                    col = errs[:, j]
                    std_err = float(np.std(col, ddof=1) / np.sqrt(sc.trials)) if sc.trials > 1 else 0.0
                    rows.append(MseRow(sweep_value, inst.est_id, float(np.mean(col)), std_err,
                                       sc.trials, float(np.mean(iters[:, j]))))
                    per_trial[(p_idx, inst.est_id)] = col

            for inst in point_insts:
                rows.append(_pointwise_row(sc, p_idx, sweep_value, params, inst))
    finally:
        if pool is not None:
            pool.shutdown()
    return SimulationResult(table=MseTable(tuple(rows)), squared_errors=per_trial,
                            sweep_values=tuple(sweep_values))


def _pointwise_row(sc: Scenario, p_idx: int, sweep_value: float, params, inst) -> MseRow:
    theta = sc.theta_source.value if sc.theta_source.kind == "fixed" else 0.0
    res = crlb_unknown_csi(theta, params, inst.codebook, sc.trials, trial_rng(sc.seed, p_idx, _POINT_TAG))
    return MseRow(sweep_value, inst.est_id, res.bound, res.std_error, res.mc_samples, 0.0)


def run_scenario(sc: Scenario, workers: int = 1, log=None) -> MseTable:
    return simulate_scenario(sc, workers=workers, log=log).table


def emit_csv(table: MseTable, path) -> None:
    """Write the table; 17 significant digits so values re-parse exactly.

    path may be "-" or an open file object for standard output.
    """
    own = False
    if path == "-":
        fh = sys.stdout
    elif hasattr(path, "write"):
        fh = path
    else:
        try:
            fh = open(path, "w")
        except OSError as exc:
            raise OSError(f"cannot write MSE table to {path}: {exc}") from exc
        own = True
    try:
        fh.write(CSV_HEADER + "\n")
        for r in table.rows:
            fh.write(f"{r.sweep_value:.17g},{r.estimator},{r.mse:.17g},{r.std_err:.17g},"
                     f"{r.trials},{r.mean_iters:.17g}\n")
    finally:
        if own:
            fh.close()


def parse_csv(path) -> MseTable:
    rows = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"unexpected header in {path}: {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            sv, est, mse, se, trials, mi = line.split(",")
            rows.append(MseRow(float(sv), est, float(mse), float(se), int(trials), float(mi)))
    return MseTable(tuple(rows))
