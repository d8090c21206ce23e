"""Estimator catalogue for the Monte Carlo harness.

Each estimator id names an algorithm plus, where the algorithm demands
it, a messaging scheme that overrides the scenario's codebook (e.g.
fusion-crc always transmits CRC-protected words, the pilot-based
estimators fall back to a 2-symbol pilot prefix when the scenario
codebook has none).  Iterative estimators accept an "@itK" suffix to
pin the iteration count, e.g. "subopt-csi@it3".
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import baselines, mlest
from .channel import apply_channel
from .codebook import (
    AfMessage,
    Codebook,
    af_gain,
    build_crc,
    build_natural_binary,
    build_training,
    detect_phase_ambiguity,
)
from .model import CodebookSpec, SystemParams, quantize_indices, quantize_vector

DEFAULT_PILOT_LEN = 2
_ID_RE = re.compile(r"^(?P<base>[a-z0-9-]+?)(@it(?P<iters>\d+))?$")


class IncompatibleEstimator(ValueError):
    """Estimator cannot run with the resolved codebook/params."""


# codebook policy: "scenario" uses the scenario codebook as-is,
# "pilot" uses it only if it already carries training symbols,
# otherwise a CodebookSpec pins the scheme; None means channel-free.
_BASES: dict[str, dict] = {
    "blue": {"codebook": None},
    "quasi-blue": {"codebook": None},
    "mle-csi": {"codebook": "scenario"},
    "mle-nocsi": {"codebook": "scenario"},
    "mle-nocsi-ts2": {"codebook": CodebookSpec("training", 2)},
    "mle-nocsi-ts5": {"codebook": CodebookSpec("training", 5)},
    "mle-est-csi": {"codebook": "pilot"},
    "subopt-csi": {"codebook": "scenario", "iterative": True},
    "subopt-nocsi": {"codebook": "pilot", "iterative": True},
    "mrc": {"codebook": "scenario"},
    "subspace": {"codebook": "scenario", "unambiguous": True},
    "fusion": {"codebook": "scenario"},
    "fusion-crc": {"codebook": CodebookSpec("crc")},
    "af": {"codebook": "analog"},
    "crlb-nocsi": {"codebook": "pilot", "pointwise": True},
}


def known_estimator_ids() -> list[str]:
    return sorted(_BASES)


def parse_estimator_id(est_id: str) -> tuple[str, int | None]:
    m = _ID_RE.match(est_id)
    if not m or m.group("base") not in _BASES:
        raise ValueError(f"unknown estimator id {est_id!r}; known: {', '.join(known_estimator_ids())}")
    iters = m.group("iters")
    if iters is not None and not _BASES[m.group("base")].get("iterative"):
        raise ValueError(f"estimator {m.group('base')!r} does not take an @it suffix")
    return m.group("base"), int(iters) if iters is not None else None


def validate_estimator_id(est_id: str) -> None:
    parse_estimator_id(est_id)


def build_codebook(spec: CodebookSpec, levels: int) -> Codebook:
    if spec.kind == "natural-binary":
        return build_natural_binary(levels)
    if spec.kind == "crc":
        return build_crc(levels)
    if spec.kind == "training":
        return build_training(levels, spec.training_len)
    raise IncompatibleEstimator(f"no digital codebook for kind {spec.kind!r}")


@dataclass(frozen=True)
class EstimatorInstance:
    est_id: str
    base: str
    codebook: Codebook | None
    af: AfMessage | None
    max_iters: int | None
    pointwise: bool

    @property
    def word_len(self) -> int:
        if self.af is not None:
            return 1
        return self.codebook.n_symbols if self.codebook is not None else 0


def resolve_estimator(est_id: str, params: SystemParams) -> EstimatorInstance:
    """Bind an estimator id to concrete assets for one operating point.

    Raises IncompatibleEstimator when the algorithm cannot run with the
    resolved codebook (the harness turns that into an error row).
    """
    base, iters = parse_estimator_id(est_id)
    info = _BASES[base]
    policy = info["codebook"]
    cb = af = None
    if policy == "analog":
        af = af_gain(params.theta_range, params.sigma_s)
    elif policy is not None:
        spec = params.codebook
        if policy == "pilot" and spec.kind != "training":
            spec = CodebookSpec("training", DEFAULT_PILOT_LEN)
        elif isinstance(policy, CodebookSpec):
            spec = policy
        if spec.kind == "analog-af":
            raise IncompatibleEstimator(f"{base} needs a digital codebook, scenario uses analog messaging")
        cb = build_codebook(spec, params.quantizer.levels)
        if info.get("unambiguous") and detect_phase_ambiguity(cb):
            raise IncompatibleEstimator(f"{base} cannot separate phase-ambiguous codewords of {spec.kind!r}")
    return EstimatorInstance(
        est_id=est_id,
        base=base,
        codebook=cb,
        af=af,
        max_iters=iters if iters is not None else (2 if info.get("iterative") else None),
        pointwise=bool(info.get("pointwise")),
    )


def run_estimator(
    inst: EstimatorInstance,
    params: SystemParams,
    theta: float,
    x: np.ndarray,
    h: np.ndarray,
    noise_unit: np.ndarray,
    grid=None,
    logpmf_points=None,
) -> mlest.EstimateReport:
    """Evaluate one estimator on one shared trial realization.

    noise_unit is the trial's unit-variance complex noise block; each
    estimator takes as many leading columns as its word length, scaled
    by sigma_c, so all estimators see the same underlying randomness.
    """
    q = params.quantizer
    if inst.base == "blue":
        return mlest.EstimateReport(theta_hat=baselines.blue_estimate(x))
    if inst.base == "quasi-blue":
        return mlest.EstimateReport(theta_hat=baselines.quasi_blue_estimate(quantize_vector(x, q)))

    if inst.af is not None:
        messages = (inst.af.gain * x)[:, None].astype(complex)
    else:
        messages = inst.codebook.symbols[:, quantize_indices(x, q)].T
    length = messages.shape[1]
    batch = apply_channel(messages, h, params.energy_per_observation, params.sigma_c * noise_unit[:, :length])

    if inst.base == "af":
        return mlest.mle_af(batch.Y[:, 0], h, inst.af.gain, params.energy_per_observation,
                            params.sigma_s, params.sigma_c)
    if inst.base == "mle-csi":
        return mlest.mle_known_csi(batch, inst.codebook, params, grid, logpmf_points=logpmf_points)
    if inst.base in ("mle-nocsi", "mle-nocsi-ts2", "mle-nocsi-ts5"):
        return mlest.mle_unknown_csi(batch, inst.codebook, params, grid, logpmf_points=logpmf_points)
    if inst.base == "mle-est-csi":
        return mlest.mle_est_csi(batch, inst.codebook, params, grid, logpmf_points=logpmf_points)
    if inst.base == "subopt-csi":
        return baselines.subopt_estimate(batch, inst.codebook, params, max_iters=inst.max_iters, known_csi=True)
    if inst.base == "subopt-nocsi":
        return baselines.subopt_estimate(batch, inst.codebook, params, max_iters=inst.max_iters, known_csi=False)
    if inst.base == "mrc":
        return baselines.mrc_estimate(batch, inst.codebook, q)
    if inst.base == "subspace":
        return baselines.subspace_estimate(batch.Y, inst.codebook, q)
    if inst.base == "fusion":
        return baselines.fusion_estimate(batch, inst.codebook, q, use_crc=False)
    if inst.base == "fusion-crc":
        return baselines.fusion_estimate(batch, inst.codebook, q, use_crc=True)
    raise ValueError(f"estimator {inst.base!r} is not trial-based")
