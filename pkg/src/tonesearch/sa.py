"""Simulated-annealing transcription search.

The search loop is compiled with numba; the Python-level ``perturb``,
``accept`` and ``equilibrium_reached`` call the same compiled helpers, so
they behave exactly like the steps inside :func:`sa_search`.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import njit

from .model import (
    PARAM_RANGES,
    LengthMismatchError,
    RTable,
    ScalingParams,
    Solution,
)
from .tones import Tone


@dataclass(frozen=True)
class SaConfig:
    cooling_divisor: float = 1.005
    t_start: float = 1.0
    t_floor: float = 1e-6
    equilibrium_window: int = 8
    equilibrium_max_accepts: int = 1
    energy_scale: float = 1000.0
    seed: int = 0
    table: RTable = field(default_factory=RTable.dschang1)
    allow_upstep: bool = True
    frozen_params: ScalingParams | None = None
    # safety valve; the equilibrium test normally ends a level long before this
    max_steps_per_level: int = 100_000

    def __post_init__(self):
        if not self.cooling_divisor > 1:
            raise ValueError("cooling_divisor must exceed 1")
        if not 0 < self.t_floor < self.t_start:
            raise ValueError("need 0 < t_floor < t_start")
        if self.equilibrium_window < 1 or self.equilibrium_max_accepts < 0:
            raise ValueError("bad equilibrium window settings")


@dataclass(frozen=True)
class SaState:
    tones: tuple[Tone, ...]
    params: ScalingParams
    evaluation: float


def temperatures(cfg: SaConfig) -> list[float]:
    """The cooling schedule ``t_start / divisor**m``, stopping below the floor."""
    out = []
    t = cfg.t_start
    while t >= cfg.t_floor:
        out.append(t)
        t /= cfg.cooling_divisor
    return out


# -- compiled kernels ----------------------------------------------------------

_LO = np.array([lo for lo, _ in PARAM_RANGES.values()])
_HI = np.array([hi for _, hi in PARAM_RANGES.values()])


@njit(cache=True)
def _seed(seed):
    np.random.seed(seed)


@njit(cache=True)
def _metropolis(delta, t, scale, p):
    if delta < 0:
        return True
    return math.exp(-delta / (scale * t)) > p


@njit(cache=True)
def _accept(delta, t, scale):
    if delta < 0:
        return True
    return _metropolis(delta, t, scale, 1.0 - np.random.random())


@njit(cache=True)
def _equilibrium(flags, count, window, max_accepts):
    # flags is a ring buffer; count is the number of steps taken at this level
    if count < window:
        return False
    return flags.sum() <= max_accepts


@njit(cache=True)
def _sq_errors(tones, params, X, exps, consts, use_consts, out):
    h, l, d = params[0], params[1], params[2]
    for i in range(1, X.shape[0]):
        p, q = tones[i - 1], tones[i]
        tb_prev = h if p < 3 else l
        tb = h if q < 3 else l
        r = consts[p, q] if use_consts else d ** exps[p, q]
        if math.isnan(r):
            out[i - 1] = math.inf
        else:
            e = tb / tb_prev * r * X[i - 1] + tb * (1.0 - r) - X[i]
            out[i - 1] = e * e
    return out


@njit(cache=True)
def _in_zone(tones, centres):
    n = tones.shape[0]
    first = 0 if tones[0] < 3 else 3
    for c in range(centres.shape[0]):
        dist = 0
        if first != centres[c, 0]:
            dist += 1
        for j in range(1, n):
            if tones[j] != centres[c, j]:
                dist += 1
        if 3 * dist <= n:
            return True
    return False


@njit(cache=True)
def _evaluation(tones, params, X, exps, consts, use_consts, centres, buf):
    if centres.shape[0] > 0 and _in_zone(tones, centres):
        return math.inf
    _sq_errors(tones, params, X, exps, consts, use_consts, buf)
    return buf.sum() / X.shape[0]


@njit(cache=True)
def _perturb(tones, params, t, X, alphabet, exps, consts, use_consts, frozen, lo, hi, buf):
    n = tones.shape[0]
    k = max(1, int(math.floor(n * t + 0.5)))
    new_tones = tones.copy()
    if k >= n:
        for j in range(n):
            new_tones[j] = alphabet[np.random.randint(0, alphabet.shape[0])]
    else:
        _sq_errors(tones, params, X, exps, consts, use_consts, buf)
        scores = np.zeros(n)
        for j in range(n):
            if j >= 1:
                scores[j] += buf[j - 1]
            if j + 1 < n:
                scores[j] += buf[j]
        # stable sort of a shuffled order breaks ties at random
        perm = np.random.permutation(n)
        order = perm[np.argsort(-scores[perm], kind="mergesort")]
        for m in range(k):
            new_tones[order[m]] = alphabet[np.random.randint(0, alphabet.shape[0])]
    new_params = params.copy()
    if not frozen:
        for p in range(3):
            rho = t * (hi[p] - lo[p])
            new_params[p] = np.random.uniform(max(lo[p], params[p] - rho), min(hi[p], params[p] + rho))
    return new_tones, new_params


@njit(cache=True)
def _anneal(
    X, alphabet, exps, consts, use_consts, frozen, frozen_params, lo, hi, centres,
    t_start, t_floor, cooling, window, max_accepts, scale, max_steps, seed, level_best,
):
    np.random.seed(seed)
    n = X.shape[0]
    buf = np.empty(n - 1)
    cur = np.empty(n, dtype=np.int64)
    for j in range(n):
        cur[j] = alphabet[np.random.randint(0, alphabet.shape[0])]
    cur_p = frozen_params.copy()
    if not frozen:
        for p in range(3):
            cur_p[p] = np.random.uniform(lo[p], hi[p])
    cur_e = _evaluation(cur, cur_p, X, exps, consts, use_consts, centres, buf)
    best, best_p, best_e = cur.copy(), cur_p.copy(), cur_e
    flags = np.zeros(window, dtype=np.int64)
    t = t_start
    steps = 0
    level = 0
    while t >= t_floor:
        flags[:] = 0
        for step in range(max_steps):
            new, new_p = _perturb(cur, cur_p, t, X, alphabet, exps, consts, use_consts, frozen, lo, hi, buf)
            new_e = _evaluation(new, new_p, X, exps, consts, use_consts, centres, buf)
            if math.isinf(new_e):
                delta = 0.0 if math.isinf(cur_e) else math.inf
            else:
                delta = new_e - cur_e
            accepted = _accept(delta, t, scale)
            # drifting between excluded states is allowed but is not progress,
            # so it does not hold off equilibrium
            counted = accepted and not math.isinf(new_e)
            if accepted:
                cur, cur_p, cur_e = new, new_p, new_e
            if cur_e < best_e:
                best, best_p, best_e = cur.copy(), cur_p.copy(), cur_e
            flags[step % window] = 1 if counted else 0
            steps += 1
            if _equilibrium(flags, step + 1, window, max_accepts):
                break
        cur, cur_p, cur_e = best.copy(), best_p.copy(), best_e
        if level < level_best.shape[0]:
            level_best[level] = best_e
        level += 1
        t /= cooling
    return best, best_p, best_e, steps


# -- Python surface ------------------------------------------------------------


def _seed32(seed: int) -> int:
    return int(np.random.SeedSequence(int(seed) & ((1 << 128) - 1)).generate_state(1)[0])


class _Tables:
    def __init__(self, table: RTable):
        self.use_consts = table.variant == "igbo"
        self.exps = np.zeros((6, 6)) if self.use_consts else table.exponents()
        self.consts = table.constant_matrix() if self.use_consts else np.zeros((6, 6))


def _centres(zone, n: int) -> np.ndarray:
    if zone is None or not len(zone):
        return np.zeros((0, n), dtype=np.int64)
    return np.array([[int(t) for t in c] for c in zone.centres], dtype=np.int64)


def accept(delta: float, t: float, rng: random.Random, energy_scale: float = 1000.0) -> bool:
    """Metropolis test: the free energy ``-scale * t * log(p)``, ``p`` uniform on (0, 1]."""
    if delta < 0:
        return True
    return bool(_metropolis(float(delta), float(t), float(energy_scale), 1.0 - rng.random()))


def equilibrium_reached(history: Sequence[bool], window: int = 8, max_accepts: int = 1) -> bool:
    """At most ``max_accepts`` acceptances among the last ``window`` perturbations."""
    recent = np.array(list(history)[-window:], dtype=np.int64)
    return bool(_equilibrium(recent, len(history), window, max_accepts))


def evaluate_state(tones, params: ScalingParams, X: Sequence[float], table: RTable, zone=None) -> float:
    X = np.asarray(X, dtype=float)
    tabs = _Tables(table)
    return float(
        _evaluation(
            np.array([int(t) for t in tones], dtype=np.int64),
            np.array(params.as_tuple()),
            X, tabs.exps, tabs.consts, tabs.use_consts, _centres(zone, len(X)), np.empty(len(X) - 1),
        )
    )


def perturb(
    s: SaState, t: float, X: Sequence[float], rng: random.Random, cfg: SaConfig | None = None
) -> SaState:
    """One annealing move at temperature ``t``.

    Resets the ``max(1, round(n*t))`` worst-scoring tones and jitters each
    parameter by up to ``t`` times its range, drawn uniformly from the part
    of that interval that lies inside the gene range.
    """
    cfg = cfg or SaConfig()
    X = np.asarray(X, dtype=float)
    tabs = _Tables(cfg.table)
    _seed(rng.getrandbits(32))
    frozen = cfg.frozen_params is not None
    tones, params = _perturb(
        np.array([int(x) for x in s.tones], dtype=np.int64),
        np.array((cfg.frozen_params or s.params).as_tuple()),
        float(t), X,
        np.array(cfg.table.alphabet(cfg.allow_upstep), dtype=np.int64),
        tabs.exps, tabs.consts, tabs.use_consts, frozen, _LO, _HI, np.empty(len(X) - 1),
    )
    new_params = cfg.frozen_params or ScalingParams(*(float(v) for v in params))
    new_tones = tuple(Tone(int(x)) for x in tones)
    return SaState(new_tones, new_params, evaluate_state(new_tones, new_params, X, cfg.table))


def sa_search(X: Sequence[float], cfg: SaConfig | None = None, zone=None, trace: list | None = None) -> Solution | None:
    """Anneal towards the lowest-scoring transcription of ``X``.

    ``zone`` may be an exclusion zone (anything with ``centres`` holding
    initial-step-normalised transcriptions); states inside it score ``inf``
    and are never kept. Returns ``None`` only if every visited state was
    excluded. If ``trace`` is given it receives the best score at the end of
    each temperature level.
    """
    cfg = cfg or SaConfig()
    if len(X) < 2:
        raise LengthMismatchError("search needs at least two F0 values")
    Xa = np.asarray(X, dtype=float)
    tabs = _Tables(cfg.table)
    frozen = cfg.frozen_params is not None
    level_best = np.full(len(temperatures(cfg)), np.nan)
    best, best_p, best_e, _ = _anneal(
        Xa,
        np.array(cfg.table.alphabet(cfg.allow_upstep), dtype=np.int64),
        tabs.exps, tabs.consts, tabs.use_consts,
        frozen,
        np.array(cfg.frozen_params.as_tuple() if frozen else (0.0, 0.0, 0.0)),
        _LO, _HI, _centres(zone, len(Xa)),
        cfg.t_start, cfg.t_floor, cfg.cooling_divisor,
        cfg.equilibrium_window, cfg.equilibrium_max_accepts, cfg.energy_scale,
        cfg.max_steps_per_level, _seed32(cfg.seed), level_best,
    )
    if trace is not None:
        trace.extend(float(v) for v in level_best)
    if math.isinf(best_e):
        return None
    params = cfg.frozen_params if frozen else ScalingParams(*(float(v) for v in best_p))
    return Solution(tuple(Tone(int(x)) for x in best), params, float(best_e))
