"""Decentralized estimation of a scalar parameter over Rayleigh-fading links.

Sensors quantize noisy readings of a bounded scalar, map them to short
complex codewords (or forward them in analog), and transmit over
independent fading channels.  This package provides the fusion-center
estimators (grid-searched MLEs for known/unknown/pilot-estimated channel
state, a fast iterative soft-fusion scheme, and classical combining /
fusion baselines), a numerical estimation-variance lower bound, and a
Monte Carlo harness with CSV and figure output.
"""

from .baselines import (
    blue_estimate,
    fusion_estimate,
    mrc_estimate,
    quasi_blue_estimate,
    quasi_blue_mse_bound,
    subopt_estimate,
    subspace_estimate,
)
from .channel import (
    ChannelBatch,
    SnrSpec,
    sample_channel,
    sigma_c_from_gamma_c,
    sigma_s_from_gamma_s,
    transmit,
)
from .codebook import (
    AfMessage,
    Codebook,
    af_gain,
    af_message,
    build_crc,
    build_natural_binary,
    build_training,
    detect_phase_ambiguity,
    load_codebook,
    message,
    save_codebook,
)
from .crlb import CrlbResult, crlb_unknown_csi, pmf_derivatives
from .likelihood import (
    GridSpec,
    LikelihoodTable,
    default_grid,
    grid_maximize,
    loglik,
    logw_est_csi,
    logw_known_csi,
    logw_training,
    logw_unknown_csi,
)
from .mlest import (
    ChannelEstimate,
    EstimateReport,
    mle_af,
    mle_est_csi,
    mle_known_csi,
    mle_unknown_csi,
    mmse_channel_estimate,
)
from .model import (
    CodebookSpec,
    QuantizedVector,
    Quantizer,
    SystemParams,
    pmf_approx,
    pmf_quantized,
    quantize,
    quantize_vector,
    sample_observations,
)
from .runner import MseRow, MseTable, emit_csv, parse_csv, run_scenario, simulate_scenario
from .scenarios import Scenario, Sweep, ThetaSource, builtin_scenarios, get_scenario, load_scenario, save_scenario

__version__ = "0.1.0"
