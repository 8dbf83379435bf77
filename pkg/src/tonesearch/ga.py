"""Genetic transcription search.

A gene is a tone string plus three 16-bit fixed-point codes for h, l and d.
Breeding uses best-of-three selection and a greedy multi-point crossover on
the tone string that picks, position by position, whichever parent's tone
predicts the observed F0 better. The best gene is carried over unmutated.

The per-gene operations below are thin wrappers over batched numpy kernels
that the search loop applies to a whole generation at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import (
    PARAM_RANGES,
    LengthMismatchError,
    RTable,
    ScalingParams,
    Solution,
    batch_evaluate,
)
from .tones import Tone

CODE_BITS = 16
CODE_MAX = (1 << CODE_BITS) - 1
_LO = np.array([lo for lo, _ in PARAM_RANGES.values()])
_SPAN = np.array([hi - lo for lo, hi in PARAM_RANGES.values()])


def decode(codes) -> np.ndarray:
    """Map 16-bit codes (last axis h, l, d) to parameter values."""
    return _LO + np.asarray(codes, dtype=float) / CODE_MAX * _SPAN


@dataclass(frozen=True)
class Gene:
    tones: tuple[Tone, ...]
    codes: tuple[int, int, int]

    def params(self, frozen: ScalingParams | None = None) -> ScalingParams:
        if frozen is not None:
            return frozen
        return ScalingParams(*(float(v) for v in decode(self.codes)))


@dataclass(frozen=True)
class GaConfig:
    population: int = 100
    generations: int = 300
    base_mutation_rate: float = 0.005
    spike_mutation_rate: float = 0.5
    stagnation_window: int = 10
    seed: int = 0
    table: RTable = field(default_factory=RTable.dschang1)
    allow_upstep: bool = True
    frozen_params: ScalingParams | None = None

    def __post_init__(self):
        if self.population < 3:
            raise ValueError("population must be at least 3 for best-of-three selection")
        if self.generations < 0:
            raise ValueError("generations must be non-negative")
        for rate in (self.base_mutation_rate, self.spike_mutation_rate):
            if not 0 <= rate <= 1:
                raise ValueError(f"mutation rate {rate} outside [0, 1]")
        if self.stagnation_window < 1:
            raise ValueError("stagnation_window must be at least 1")


# -- batched kernels ---------------------------------------------------------


def _params_arrays(codes: np.ndarray, frozen: ScalingParams | None):
    if frozen is not None:
        m = len(codes)
        return np.full(m, frozen.h), np.full(m, frozen.l), np.full(m, frozen.d)
    values = decode(codes)
    return values[:, 0], values[:, 1], values[:, 2]


def _local_errors(prev, cur, x_prev, x_cur, h, l, d, table: RTable) -> np.ndarray:
    tb_prev = np.where(prev >= 3, l, h)
    tb = np.where(cur >= 3, l, h)
    r = table.ratios(prev, cur, d)
    err = (tb / tb_prev * r * x_prev + tb * (1.0 - r) - x_cur) ** 2
    return np.where(np.isnan(err), np.inf, err)


def greedy_tones(a: np.ndarray, b: np.ndarray, X, h, l, d, table: RTable) -> np.ndarray:
    """Tone strings built left to right from parents ``a`` and ``b`` (shape ``(m, n)``).

    Position 0 comes from ``a``; later positions take whichever parent tone
    has the smaller local squared error given the tone already chosen before
    it, preferring ``a`` on ties.
    """
    X = np.asarray(X, dtype=float)
    child = np.empty_like(a)
    child[:, 0] = a[:, 0]
    for i in range(1, a.shape[1]):
        prev = child[:, i - 1]
        ea = _local_errors(prev, a[:, i], X[i - 1], X[i], h, l, d, table)
        eb = _local_errors(prev, b[:, i], X[i - 1], X[i], h, l, d, table)
        child[:, i] = np.where(eb < ea, b[:, i], a[:, i])
    return child


def splice_codes(first: np.ndarray, second: np.ndarray, cut: np.ndarray) -> np.ndarray:
    """Top ``cut`` bits from ``first``, the remaining low bits from ``second``."""
    cut = np.asarray(cut, dtype=np.int64)
    high = ((np.int64(1) << cut) - 1) << (CODE_BITS - cut)
    return (np.asarray(first, dtype=np.int64) & high) | (np.asarray(second, dtype=np.int64) & ~high & CODE_MAX)


def cross_codes(a: np.ndarray, b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Single-point crossover on each code with an independent cut and parent order."""
    cut = rng.integers(0, CODE_BITS + 1, size=a.shape)
    a_first = rng.random(a.shape) < 0.5
    return splice_codes(np.where(a_first, a, b), np.where(a_first, b, a), cut)


def mutate_arrays(tones, codes, rate, alphabet, rng, mutate_codes=True):
    alphabet = np.asarray(alphabet, dtype=tones.dtype)
    hit = rng.random(tones.shape) < rate
    fresh = alphabet[rng.integers(0, len(alphabet), size=tones.shape)]
    tones = np.where(hit, fresh, tones)
    if mutate_codes:
        flips = rng.random(codes.shape + (CODE_BITS,)) < rate
        codes = codes ^ (flips.astype(np.int64) << np.arange(CODE_BITS)).sum(axis=-1)
    return tones, codes


def best_of_three_indices(scores: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` tournament winners, each the best of three distinct random members."""
    p = len(scores)
    i0 = rng.integers(0, p, size=count)
    i1 = rng.integers(0, p - 1, size=count)
    i1 += i1 >= i0
    i2 = rng.integers(0, p - 2, size=count)
    lo, hi = np.minimum(i0, i1), np.maximum(i0, i1)
    i2 += i2 >= lo
    i2 += i2 >= hi
    draws = np.stack([i0, i1, i2], axis=1)
    return draws[np.arange(count), np.argmin(scores[draws], axis=1)]


# -- per-gene operations -----------------------------------------------------


def crossover(
    a: Gene,
    b: Gene,
    X: Sequence[float],
    rng: np.random.Generator,
    table: RTable | None = None,
    frozen_params: ScalingParams | None = None,
) -> Gene:
    """Breed one child; its tones are chosen greedily under the child's own parameters."""
    if not len(a.tones) == len(b.tones) == len(X):
        raise LengthMismatchError("parents and F0 sequence must have equal lengths")
    table = table or RTable.dschang1()
    ca, cb = np.array([a.codes]), np.array([b.codes])
    codes = ca if frozen_params is not None else cross_codes(ca, cb, rng)
    h, l, d = _params_arrays(codes, frozen_params)
    tones = greedy_tones(np.array([a.tones]), np.array([b.tones]), X, h, l, d, table)
    return Gene(tuple(Tone(t) for t in tones[0]), tuple(int(c) for c in codes[0]))


def mutate(
    g: Gene,
    rate: float,
    rng: np.random.Generator,
    alphabet: Sequence[Tone] = tuple(Tone),
    mutate_codes: bool = True,
) -> Gene:
    tones, codes = mutate_arrays(np.array([g.tones]), np.array([g.codes], dtype=np.int64), rate, alphabet, rng, mutate_codes)
    return Gene(tuple(Tone(t) for t in tones[0]), tuple(int(c) for c in codes[0]))


def best_of_three(pool: Sequence[Gene], scores: Sequence[float], rng: np.random.Generator) -> Gene:
    if len(pool) < 3:
        raise ValueError("best-of-three needs a pool of at least 3 genes")
    return pool[int(best_of_three_indices(np.asarray(scores, dtype=float), 1, rng)[0])]


# -- search ------------------------------------------------------------------


class GeneticSearch:
    def __init__(self, X: Sequence[float], cfg: GaConfig, zone=None):
        self.X = np.asarray(X, dtype=float)
        self.n = len(self.X)
        self.cfg = cfg
        self.alphabet = np.array(cfg.table.alphabet(cfg.allow_upstep), dtype=np.int64)
        self.zone = zone
        #: best score of the pool after each generation, index 0 is the initial pool
        self.best_history: list[float] = []

    def score(self, tones: np.ndarray, codes: np.ndarray) -> np.ndarray:
        h, l, d = _params_arrays(codes, self.cfg.frozen_params)
        e = batch_evaluate(tones, self.X, h, l, d, self.cfg.table)
        if self.zone is not None:
            e[self.zone.mask(tones)] = np.inf
        return e

    def good_performance(self) -> bool:
        w = self.cfg.stagnation_window
        hist = self.best_history
        if len(hist) <= w:
            return True
        return hist[-1] < hist[-1 - w]

    def run(self, seed: int) -> Solution | None:
        cfg = self.cfg
        rng = np.random.default_rng(seed)
        p, n = cfg.population, self.n
        frozen = cfg.frozen_params
        tones = self.alphabet[rng.integers(0, len(self.alphabet), size=(p, n))]
        codes = rng.integers(0, CODE_MAX + 1, size=(p, 3), dtype=np.int64)
        scores = self.score(tones, codes)
        self.best_history = [float(scores.min())]

        for _ in range(cfg.generations):
            rate = cfg.base_mutation_rate if self.good_performance() else cfg.spike_mutation_rate
            elite = int(np.argmin(scores))
            pa = best_of_three_indices(scores, p - 1, rng)
            pb = best_of_three_indices(scores, p - 1, rng)
            child_codes = codes[pa] if frozen is not None else cross_codes(codes[pa], codes[pb], rng)
            h, l, d = _params_arrays(child_codes, frozen)
            child_tones = greedy_tones(tones[pa], tones[pb], self.X, h, l, d, cfg.table)
            child_tones, child_codes = mutate_arrays(
                child_tones, child_codes, rate, self.alphabet, rng, mutate_codes=frozen is None
            )
            tones = np.concatenate([tones[elite : elite + 1], child_tones])
            codes = np.concatenate([codes[elite : elite + 1], child_codes])
            scores = self.score(tones, codes)
            self.best_history.append(float(scores.min()))

        best = int(np.argmin(scores))
        if math.isinf(scores[best]):
            return None
        gene = Gene(tuple(Tone(t) for t in tones[best]), tuple(int(c) for c in codes[best]))
        return Solution(gene.tones, gene.params(frozen), float(scores[best]))


def ga_search(X: Sequence[float], cfg: GaConfig | None = None, zone=None) -> Solution | None:
    """Run the genetic search; ``zone`` may supply ``mask(tones_array)`` exclusions."""
    cfg = cfg or GaConfig()
    if len(X) < 2:
        raise LengthMismatchError("search needs at least two F0 values")
    return GeneticSearch(X, cfg, zone).run(cfg.seed)
