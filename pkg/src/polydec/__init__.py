"""polydec: LP-style decoding of binary linear codes via penalty dual
decomposition, with iterative and neural-warm-started check-polytope
projection, BP and penalized-ADMM baselines, and a Monte-Carlo harness."""

from ._backend import BACKEND_NAME, USE_NUMBA
from .baselines import AdmmL2Config, BpConfig, decode_admm_l2, decode_bp
from .channel import ChannelParams, frame_rng, llr, sigma2_from_ebn0, transmit
from .code_model import (
    AlistError,
    CodeModel,
    load_alist,
    parse_alist,
    serialize_alist,
    syndrome_ok,
)
from .cppnet import (
    CppNetWeights,
    ProjectionSample,
    Subnet,
    forward,
    load_weights,
    load_weights_file,
    read_samples,
    save_weights,
    save_weights_file,
    sin_act,
    write_samples,
)
from .errors import ConfigError, NumericError, PolydecError, ProjectionError
from .pdd import DecodeOutcome, PddConfig, PddState, decode
from .projection import (
    CutHyperplane,
    ProjectionResult,
    box_project,
    build_cut,
    project_icpp,
    project_ncpp,
    project_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "AdmmL2Config",
    "AlistError",
    "BACKEND_NAME",
    "BpConfig",
    "ChannelParams",
    "CodeModel",
    "ConfigError",
    "CppNetWeights",
    "CutHyperplane",
    "DecodeOutcome",
    "NumericError",
    "PddConfig",
    "PddState",
    "PolydecError",
    "ProjectionError",
    "ProjectionResult",
    "ProjectionSample",
    "Subnet",
    "USE_NUMBA",
    "box_project",
    "build_cut",
    "decode",
    "decode_admm_l2",
    "decode_bp",
    "forward",
    "frame_rng",
    "llr",
    "load_alist",
    "load_weights",
    "load_weights_file",
    "parse_alist",
    "project_icpp",
    "project_ncpp",
    "project_oracle",
    "read_samples",
    "save_weights",
    "save_weights_file",
    "serialize_alist",
    "sigma2_from_ebn0",
    "sin_act",
    "syndrome_ok",
    "transmit",
    "write_samples",
]
