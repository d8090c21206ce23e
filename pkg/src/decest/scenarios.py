"""Named Monte Carlo experiment descriptions and their JSON form.

A Scenario fixes everything about an experiment except the sweep axis:
the sensor population, SNRs, quantizer, messaging scheme, estimator
list, trial count and seed.  Scenario files are plain JSON mirroring
the dataclass fields (see scenario_to_dict for the schema).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .model import CodebookSpec

SWEEP_KINDS = ("gamma-c", "n-sensors", "bit-rate")
THETA_KINDS = ("uniform", "levels", "fixed")


@dataclass(frozen=True)
class Sweep:
    """The x-axis of an experiment.

    gamma-c:   values are communication SNRs in dB
    n-sensors: values are sensor counts
    bit-rate:  values are (bits, sensors, energy multiplier) triples,
               holding total bandwidth and total energy fixed
    """

    kind: str
    values: tuple

    def __post_init__(self):
        if self.kind not in SWEEP_KINDS:
            raise ValueError(f"unknown sweep kind {self.kind!r}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        if self.kind == "bit-rate":
            vals = tuple((int(k), int(n), float(mult)) for k, n, mult in self.values)
        else:
            vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class ThetaSource:
    """How the true parameter is drawn each trial.

    uniform: continuous Uniform[-V, V] (the default)
    levels:  uniform over the quantizer levels inside [-V, V]
    fixed:   always `value`
    """

    kind: str = "uniform"
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in THETA_KINDS:
            raise ValueError(f"unknown theta source {self.kind!r}")


@dataclass(frozen=True)
class Scenario:
    name: str
    sweep: Sweep
    estimators: tuple
    n_sensors: int = 10
    theta_range: float = 1.0
    granular_half_width: float = 1.0
    levels: int = 16
    energy_per_observation: float = 1.0
    gamma_s_db: float = 20.0
    gamma_c_db: float = 6.0
    codebook: CodebookSpec = CodebookSpec()
    trials: int = 10000
    seed: int = 20260810
    theta_source: ThetaSource = ThetaSource()
    description: str = ""

    def __post_init__(self):
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.estimators:
            raise ValueError("scenario needs at least one estimator")
        from .registry import validate_estimator_id

        for est in self.estimators:
            validate_estimator_id(est)


def scenario_to_dict(sc: Scenario) -> dict:
    return {
        "name": sc.name,
        "sweep": {"kind": sc.sweep.kind, "values": [list(v) if isinstance(v, tuple) else v for v in sc.sweep.values]},
        "estimators": list(sc.estimators),
        "n_sensors": sc.n_sensors,
        "theta_range": sc.theta_range,
        "granular_half_width": sc.granular_half_width,
        "levels": sc.levels,
        "energy_per_observation": sc.energy_per_observation,
        "gamma_s_db": sc.gamma_s_db,
        "gamma_c_db": sc.gamma_c_db,
        "codebook": {"kind": sc.codebook.kind, "training_len": sc.codebook.training_len},
        "trials": sc.trials,
        "seed": sc.seed,
        "theta_source": {"kind": sc.theta_source.kind, "value": sc.theta_source.value},
        "description": sc.description,
    }


def scenario_from_dict(d: dict) -> Scenario:
    cb = d.get("codebook", {})
    ts = d.get("theta_source", {})
    return Scenario(
        name=d["name"],
        sweep=Sweep(kind=d["sweep"]["kind"], values=tuple(tuple(v) if isinstance(v, list) else v for v in d["sweep"]["values"])),
        estimators=tuple(d["estimators"]),
        n_sensors=int(d.get("n_sensors", 10)),
        theta_range=float(d.get("theta_range", 1.0)),
        granular_half_width=float(d.get("granular_half_width", 1.0)),
        levels=int(d.get("levels", 16)),
        energy_per_observation=float(d.get("energy_per_observation", 1.0)),
        gamma_s_db=float(d.get("gamma_s_db", 20.0)),
        gamma_c_db=float(d.get("gamma_c_db", 6.0)),
        codebook=CodebookSpec(kind=cb.get("kind", "natural-binary"), training_len=int(cb.get("training_len", 0))),
        trials=int(d.get("trials", 10000)),
        seed=int(d.get("seed", 20260810)),
        theta_source=ThetaSource(kind=ts.get("kind", "uniform"), value=float(ts.get("value", 0.0))),
        description=d.get("description", ""),
    )


def save_scenario(sc: Scenario, path) -> None:
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(sc), fh, indent=2)
        fh.write("\n")


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        return scenario_from_dict(json.load(fh))


_GAMMA_C_AXIS = (0.0, 3.0, 6.0, 9.0, 12.0, 15.0)
_N_AXIS = (5.0, 10.0, 20.0, 40.0)


def builtin_scenarios() -> list[Scenario]:
    """Desk-scale presets covering the standard experiment set."""
    subopt_trace = tuple(f"subopt-csi@it{k}" for k in range(1, 6)) + tuple(
        f"subopt-nocsi@it{k}" for k in range(1, 6)
    )
    return [
        Scenario(
            name="fig2",
            description="quantizer bit-rate tradeoff under fixed total energy and bandwidth, "
            "high observation SNR (rerun with gamma_s_db=5 for the low-SNR crossover)",
            sweep=Sweep("bit-rate", ((1, 40, 1.0), (2, 20, 2.0), (4, 10, 4.0))),
            estimators=("mle-csi", "quasi-blue"),
            gamma_s_db=30.0,
            gamma_c_db=0.0,
            n_sensors=40,
        ),
        Scenario(
            name="fig3",
            description="iteration-by-iteration convergence of the soft-fusion estimator",
            sweep=Sweep("gamma-c", (3.0, 6.0, 9.0)),
            estimators=subopt_trace,
        ),
        Scenario(
            name="fig4",
            description="known-CSI estimators vs communication SNR",
            sweep=Sweep("gamma-c", _GAMMA_C_AXIS),
            estimators=("mle-csi", "subopt-csi", "mrc", "fusion", "fusion-crc", "af", "quasi-blue", "blue"),
        ),
        Scenario(
            name="fig5",
            description="non-coherent MLEs with and without pilot symbols vs communication SNR",
            sweep=Sweep("gamma-c", _GAMMA_C_AXIS),
            estimators=("mle-nocsi", "mle-nocsi-ts2", "mle-nocsi-ts5", "mle-est-csi", "mle-csi"),
        ),
        Scenario(
            name="fig6",
            description="optimal vs soft-fusion estimators, known CSI and pilot-estimated channels",
            sweep=Sweep("gamma-c", _GAMMA_C_AXIS),
            estimators=("mle-csi", "subopt-csi", "mle-nocsi-ts2", "subopt-nocsi"),
        ),
        Scenario(
            name="fig7",
            description="known-CSI estimators vs number of sensors",
            sweep=Sweep("n-sensors", _N_AXIS),
            estimators=("mle-csi", "subopt-csi", "mrc", "fusion", "fusion-crc", "af", "quasi-blue", "blue"),
        ),
        Scenario(
            name="fig8",
            description="pilot-assisted estimators vs number of sensors",
            sweep=Sweep("n-sensors", _N_AXIS),
            estimators=("mle-nocsi-ts2", "mle-est-csi", "subopt-nocsi"),
        ),
        Scenario(
            name="crlb-scaling",
            description="non-coherent estimation variance bound vs number of sensors (1/N scaling)",
            sweep=Sweep("n-sensors", (10.0, 20.0, 40.0, 80.0)),
            estimators=("crlb-nocsi",),
            codebook=CodebookSpec("training", 2),
            theta_source=ThetaSource("fixed", 0.0),
            trials=20000,
        ),
    ]


def get_scenario(name: str) -> Scenario:
    for sc in builtin_scenarios():
        if sc.name == name:
            return sc
    raise KeyError(f"no builtin scenario named {name!r}")


def with_overrides(sc: Scenario, trials: int | None = None, seed: int | None = None) -> Scenario:
    if trials is not None:
        sc = replace(sc, trials=trials)
    if seed is not None:
        sc = replace(sc, seed=seed)
    return sc
