"""Parameter estimation from measured F0 pairs and local refinement of h, l, d."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize, stats

from .model import (
    D_RANGE,
    H_RANGE,
    L_RANGE,
    LengthMismatchError,
    ModelError,
    RTable,
    ScalingParams,
    evaluate,
)
from .tones import Tone, as_transcription


class DegenerateInputError(ModelError):
    pass


class InconsistentEstimateError(ModelError):
    pass


@dataclass(frozen=True)
class PairSample:
    prev_tone: Tone
    next_tone: Tone
    x_prev: float
    x_next: float

    def __post_init__(self):
        if not (self.x_prev > 0 and self.x_next > 0):
            raise ModelError("F0 values must be positive")


@dataclass(frozen=True)
class RegressionLine:
    gradient: float
    intercept: float
    se_gradient: float = 0.0
    se_intercept: float = 0.0
    count: int = 2

    def __call__(self, x):
        return self.gradient * x + self.intercept


def fit_pair_regression(samples: Sequence[PairSample]) -> RegressionLine:
    """Ordinary least squares of ``x_next`` on ``x_prev``."""
    if len(samples) < 2:
        raise DegenerateInputError(f"need at least 2 samples, got {len(samples)}")
    x = np.array([s.x_prev for s in samples], dtype=float)
    y = np.array([s.x_next for s in samples], dtype=float)
    if np.ptp(x) == 0:
        raise DegenerateInputError("all x_prev values are equal")
    fit = stats.linregress(x, y)
    se_grad, se_int = float(fit.stderr), float(fit.intercept_stderr)
    if len(samples) == 2 or not math.isfinite(se_grad):
        se_grad = se_int = 0.0
    return RegressionLine(float(fit.slope), float(fit.intercept), se_grad, se_int, len(samples))


def derive_dschang_params(hl: RegressionLine, ldh: RegressionLine) -> ScalingParams:
    """Recover ``h``, ``l``, ``d`` from the HL and L!H regression lines.

    With ``R(L,!H) = 1`` the L!H gradient is ``h/l``; the HL gradient is
    ``(l/h) * d`` and its intercept ``l * (1 - d)``.
    """
    if ldh.gradient <= 0 or hl.gradient <= 0:
        raise InconsistentEstimateError("regression gradients must be positive")
    h_over_l = ldh.gradient
    d = hl.gradient * h_over_l
    if not 0 < d < 1:
        raise InconsistentEstimateError(f"derived d = {d:.4g} is outside (0, 1)")
    l = hl.intercept / (1.0 - d)
    h = l * h_over_l
    if l <= 0 or h <= 0:
        raise InconsistentEstimateError(f"derived baselines are not positive (h={h:.4g}, l={l:.4g})")
    return ScalingParams(h, l, d)


def refine_params(
    tones,
    X: Sequence[float],
    table: RTable,
    start: ScalingParams,
    max_iter: int = 1000,
    tol: float = 1e-12,
) -> ScalingParams:
    """Deterministic local refinement of h, l, d for a fixed transcription.

    Powell's direction-set search inside the gene ranges: cyclic coordinate
    line searches plus the accumulated displacement direction, which keeps it
    from zig-zagging along the strongly correlated h/l/d valley. The start
    point is returned unchanged if the search cannot improve on it.
    """
    tones = as_transcription(tones)
    if len(tones) != len(X):
        raise LengthMismatchError(f"{len(tones)} tones but {len(X)} F0 values")
    X = [float(x) for x in X]
    best = evaluate(tones, X, start, table)

    def score(values) -> float:
        return evaluate(tones, X, ScalingParams(*values), table)

    result = optimize.minimize(
        score,
        np.array(start.as_tuple()),
        method="Powell",
        bounds=[H_RANGE, L_RANGE, D_RANGE],
        options={"xtol": 1e-10, "ftol": tol, "maxiter": max_iter},
    )
    if result.fun < best:
        return ScalingParams(*(float(v) for v in result.x))
    return start
