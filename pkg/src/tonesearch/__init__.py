"""Search for tonal transcriptions that explain measured F0 contours."""

__version__ = "0.1.0"

from .estimation import (
    DegenerateInputError,
    InconsistentEstimateError,
    PairSample,
    RegressionLine,
    derive_dschang_params,
    fit_pair_regression,
    refine_params,
)
from .ga import GaConfig, Gene, ga_search
from .model import (
    PARAM_RANGES,
    LengthMismatchError,
    ModelError,
    RTable,
    ScalingParams,
    Solution,
    UndefinedTransitionError,
    evaluate,
    generate_contour,
    predict_next,
    predict_seq,
)
from .multisolution import ExclusionZone, MultiConfig, excluded, k_best, k_best_run
from .sa import SaConfig, sa_search
from .schemes import SCHEMES, InterpretationScheme, convert_scheme, distance, interpret, normalize_initial_step
from .tones import Tone, ToneSyntaxError, format_tones, parse_tones

__all__ = [
    "DegenerateInputError",
    "ExclusionZone",
    "GaConfig",
    "Gene",
    "InconsistentEstimateError",
    "InterpretationScheme",
    "LengthMismatchError",
    "ModelError",
    "MultiConfig",
    "PARAM_RANGES",
    "PairSample",
    "RTable",
    "RegressionLine",
    "SCHEMES",
    "SaConfig",
    "ScalingParams",
    "Solution",
    "Tone",
    "ToneSyntaxError",
    "UndefinedTransitionError",
    "convert_scheme",
    "derive_dschang_params",
    "distance",
    "evaluate",
    "excluded",
    "fit_pair_regression",
    "format_tones",
    "ga_search",
    "generate_contour",
    "interpret",
    "k_best",
    "k_best_run",
    "normalize_initial_step",
    "parse_tones",
    "predict_next",
    "predict_seq",
    "refine_params",
    "sa_search",
]
