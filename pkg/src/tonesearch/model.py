"""F0 prediction model: baselines, transition-ratio tables and the evaluation score.

Each tone transition scales the previous F0 value towards the baseline of
the new tone::

    x_i = (tb_i / tb_{i-1}) * R * x_{i-1} + tb_i * (1 - R)

where ``tb`` is ``h`` for H-based tones and ``l`` for L-based tones, and
``R`` is looked up in a transition-ratio table keyed on the tone pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .tones import ALL_TONES, NO_UPSTEP, Base, Tone, as_transcription

#: Gene ranges used by every search procedure.
H_RANGE = (90.0, 110.0)
L_RANGE = (70.0, 100.0)
D_RANGE = (0.6, 0.9)
PARAM_RANGES = {"h": H_RANGE, "l": L_RANGE, "d": D_RANGE}


class ModelError(ValueError):
    """Base class for data errors raised by the model."""


class UndefinedTransitionError(ModelError):
    pass


class LengthMismatchError(ModelError):
    pass


@dataclass(frozen=True)
class ScalingParams:
    """Baselines ``h``, ``l`` (Hz) and the ratio ``d``."""

    h: float
    l: float
    d: float

    def __post_init__(self):
        if not (self.h > 0 and self.l > 0):
            raise ModelError(f"baselines must be positive, got h={self.h}, l={self.l}")
        if not 0 < self.d < 1:
            raise ModelError(f"d must lie in (0, 1), got {self.d}")

    def in_gene_ranges(self) -> bool:
        return all(lo <= v <= hi for v, (lo, hi) in zip(self.as_tuple(), PARAM_RANGES.values()))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.h, self.l, self.d)


# Exponent of d for each (previous base, next tone) pair, columns in Tone order
# H, !H, ^H, L, !L, ^L.
_DSCHANG1_EXP = {
    Base.H: (0, 1, -1, 1, 2, 0),
    Base.L: (-1, 0, -2, 0, 1, -1),
}
_DSCHANG2_EXP = {
    Base.H: (0, 1, -1, 0, 1, -1),
    Base.L: (0, 1, -1, 0, 1, -1),
}

VARIANTS = ("dschang1", "dschang2", "igbo")


@dataclass(frozen=True)
class RTable:
    """A transition-ratio table.

    The two Dschang variants are powers of ``d``. The Igbo table has two
    constants of its own, ``F`` and ``D``, no upstep, and no entry for
    ``L -> !H``.
    """

    variant: str = "dschang1"
    F: float | None = None
    D: float | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ModelError(f"unknown table variant {self.variant!r}")
        if self.variant == "igbo":
            for name in ("F", "D"):
                v = getattr(self, name)
                if v is None or not 0 < v < 1:
                    raise ModelError(f"Igbo table needs {name} in (0, 1), got {v}")

    @classmethod
    def dschang1(cls) -> "RTable":
        return cls("dschang1")

    @classmethod
    def dschang2(cls) -> "RTable":
        return cls("dschang2")

    @classmethod
    def igbo(cls, F: float, D: float) -> "RTable":
        return cls("igbo", F, D)

    def alphabet(self, allow_upstep: bool = True) -> tuple[Tone, ...]:
        if self.variant == "igbo":
            return (Tone.H, Tone.L, Tone.DH)
        return ALL_TONES if allow_upstep else NO_UPSTEP

    def exponents(self) -> np.ndarray:
        """6x6 integer matrix of d-exponents indexed ``[prev, next]`` (Dschang only)."""
        rows = _DSCHANG1_EXP if self.variant == "dschang1" else _DSCHANG2_EXP
        return np.array([rows[Tone(p).base] for p in range(6)], dtype=float)

    def constant_matrix(self) -> np.ndarray:
        """6x6 Igbo ratio matrix indexed ``[prev, next]``; NaN marks undefined pairs."""
        nan = math.nan
        m = np.full((6, 6), nan)
        for prev in (Tone.H, Tone.DH):
            m[prev, Tone.H], m[prev, Tone.L], m[prev, Tone.DH] = 1.0, self.F, self.D
        m[Tone.L, Tone.H], m[Tone.L, Tone.L] = 1.0, self.F
        return m

    def matrix(self, d: float) -> list[list[float]]:
        """Nested-list 6x6 ratio lookup for a scalar ``d`` (NaN where undefined)."""
        if self.variant == "igbo":
            return self.constant_matrix().tolist()
        return (float(d) ** self.exponents()).tolist()

    def ratios(self, prev: np.ndarray, nxt: np.ndarray, d: np.ndarray | float) -> np.ndarray:
        """Vectorised lookup; ``d`` broadcasts against the leading axes of ``prev``."""
        if self.variant == "igbo":
            return self.constant_matrix()[prev, nxt]
        d = np.asarray(d, dtype=float)
        if d.ndim:
            d = d.reshape(d.shape + (1,) * (prev.ndim - d.ndim))
        return d ** self.exponents()[prev, nxt]


def baseline(tone: Tone, params: ScalingParams) -> float:
    return params.h if Tone(tone).base is Base.H else params.l


def r_value(table: RTable, prev: Tone, nxt: Tone, d: float) -> float:
    r = table.matrix(d)[int(prev)][int(nxt)]
    if math.isnan(r):
        raise UndefinedTransitionError(
            f"transition {Tone(prev)} -> {Tone(nxt)} is undefined in the {table.variant} table"
        )
    return r


def predict_next(prev: Tone, nxt: Tone, x_prev: float, params: ScalingParams, table: RTable) -> float:
    r = r_value(table, prev, nxt, params.d)
    tb_prev = baseline(prev, params)
    tb_next = baseline(nxt, params)
    return tb_next / tb_prev * r * x_prev + tb_next * (1.0 - r)


def r_product(tones, table: RTable, d: float) -> float:
    tones = as_transcription(tones)
    result = 1.0
    for prev, nxt in zip(tones, tones[1:]):
        result *= r_value(table, prev, nxt, d)
    return result


def predict_seq(tones, x0: float, params: ScalingParams, table: RTable) -> float:
    """F0 of the last tone given ``x0`` for the first, in closed form."""
    tones = as_transcription(tones)
    r = r_product(tones, table, params.d)
    tb_first = baseline(tones[0], params)
    tb_last = baseline(tones[-1], params)
    return tb_last / tb_first * r * x0 + tb_last * (1.0 - r)


def generate_contour(tones, x1: float, params: ScalingParams, table: RTable) -> list[float]:
    """F0 values for every tone, starting from the given first value."""
    tones = as_transcription(tones)
    if not x1 > 0:
        raise ModelError(f"initial F0 must be positive, got {x1}")
    out = [float(x1)]
    for prev, nxt in zip(tones, tones[1:]):
        out.append(predict_next(prev, nxt, out[-1], params, table))
    return out


def squared_errors(tones, X: Sequence[float], params: ScalingParams, table: RTable) -> list[float]:
    """Per-transition squared prediction errors; entry ``i-1`` is for position ``i``."""
    tones = as_transcription(tones)
    if len(tones) != len(X):
        raise LengthMismatchError(f"{len(tones)} tones but {len(X)} F0 values")
    return [
        (predict_next(tones[i - 1], tones[i], X[i - 1], params, table) - X[i]) ** 2
        for i in range(1, len(X))
    ]


def evaluate(tones, X: Sequence[float], params: ScalingParams, table: RTable) -> float:
    """Mean squared prediction error, divided by the full sequence length."""
    if len(X) < 2:
        raise LengthMismatchError("evaluation needs at least two F0 values")
    return sum(squared_errors(tones, X, params, table)) / len(X)


def batch_squared_errors(tones: np.ndarray, X: np.ndarray, h, l, d, table: RTable) -> np.ndarray:
    """Squared errors for many candidates at once.

    ``tones`` has shape ``(m, n)`` of tone codes and ``h``, ``l``, ``d`` are
    scalars or length-``m`` arrays. Undefined transitions give ``inf``.
    Returns shape ``(m, n - 1)``.
    """
    tones = np.asarray(tones)
    X = np.asarray(X, dtype=float)
    h = np.asarray(h, dtype=float).reshape(-1, 1)
    l = np.asarray(l, dtype=float).reshape(-1, 1)
    tb = np.where(tones >= 3, l, h)
    prev, nxt = tones[:, :-1], tones[:, 1:]
    r = table.ratios(prev, nxt, np.asarray(d, dtype=float).reshape(-1))
    pred = tb[:, 1:] / tb[:, :-1] * r * X[:-1] + tb[:, 1:] * (1.0 - r)
    err = (pred - X[1:]) ** 2
    return np.where(np.isnan(err), np.inf, err)


def batch_evaluate(tones: np.ndarray, X: np.ndarray, h, l, d, table: RTable) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return batch_squared_errors(tones, X, h, l, d, table).sum(axis=1) / len(X)


@dataclass(frozen=True)
class Solution:
    tones: tuple[Tone, ...]
    params: ScalingParams
    evaluation: float
