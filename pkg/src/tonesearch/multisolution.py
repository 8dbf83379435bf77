"""k best diverse transcriptions via repeated searches with exclusion zones.

Every reported transcription claims a zone of radius ``n/3`` (Hamming
distance, compared after dropping any initial step). Later searches treat
states inside a zone as infeasible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .ga import GaConfig, ga_search
from .model import LengthMismatchError, Solution
from .sa import SaConfig, sa_search
from .schemes import distance, normalize_initial_step
from .tones import Tone


def excluded(tones, found: Sequence, n: int | None = None) -> bool:
    """True iff ``tones`` lies within ``n/3`` of some transcription in ``found``."""
    tones = normalize_initial_step(tones)
    n = len(tones) if n is None else n
    for other in found:
        other = normalize_initial_step(other)
        if len(other) != len(tones) or len(tones) != n:
            raise LengthMismatchError("all transcriptions must have length n")
        if 3 * distance(tones, other) <= n:
            return True
    return False


class ExclusionZone:
    """Union of the ``n/3`` balls around previously found transcriptions."""

    def __init__(self, found: Sequence = ()):
        self.centres: list[tuple[Tone, ...]] = []
        self._array = None
        for tones in found:
            self.add(tones)

    def add(self, tones) -> None:
        self.centres.append(normalize_initial_step(tones))
        self._array = np.array(self.centres, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.centres)

    def contains(self, tones) -> bool:
        return bool(self.centres) and excluded(tones, self.centres)

    def mask(self, tones: np.ndarray) -> np.ndarray:
        """Vectorised :meth:`contains` over the rows of a ``(m, n)`` code array."""
        tones = np.asarray(tones, dtype=np.int64)
        if not self.centres:
            return np.zeros(len(tones), dtype=bool)
        norm = tones.copy()
        norm[:, 0] = np.where(norm[:, 0] >= 3, 3, 0)
        dist = (norm[:, None, :] != self._array[None, :, :]).sum(axis=2)
        return (3 * dist <= tones.shape[1]).any(axis=1)


@dataclass(frozen=True)
class MultiConfig:
    k: int = 10
    solver: str = "sa"
    inner: SaConfig | GaConfig = field(default_factory=SaConfig)
    giveup_probes: int = 5

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.giveup_probes < 1:
            raise ValueError("giveup_probes must be at least 1")
        if self.solver not in ("sa", "ga"):
            raise ValueError(f"unknown solver {self.solver!r}")
        expected = SaConfig if self.solver == "sa" else GaConfig
        if not isinstance(self.inner, expected):
            raise ValueError(f"solver {self.solver!r} needs a {expected.__name__}")


@dataclass
class MultiResult:
    solutions: list[Solution]
    gave_up: bool


def restart_seed(master: int, restart: int) -> int:
    """Seed for restart number ``restart``; restart 0 reuses the master seed."""
    if restart == 0:
        return master
    return random.Random(f"{master}:{restart}").getrandbits(63)


def k_best_run(X: Sequence[float], cfg: MultiConfig) -> MultiResult:
    if len(X) < 2:
        raise LengthMismatchError("search needs at least two F0 values")
    inner = cfg.inner
    alphabet = inner.table.alphabet(inner.allow_upstep)
    probe_rng = random.Random(f"probe:{inner.seed}")
    zone = ExclusionZone()
    found: list[Solution] = []
    gave_up = False
    for restart in range(cfg.k):
        if found:
            probes = [[probe_rng.choice(alphabet) for _ in X] for _ in range(cfg.giveup_probes)]
            if all(zone.contains(p) for p in probes):
                gave_up = True
                break
        run_cfg = replace(inner, seed=restart_seed(inner.seed, restart))
        search = sa_search if cfg.solver == "sa" else ga_search
        sol = search(X, run_cfg, zone=zone if found else None)
        if sol is None or zone.contains(sol.tones):
            gave_up = True
            break
        found.append(sol)
        zone.add(sol.tones)
    found.sort(key=lambda s: s.evaluation)
    return MultiResult(found, gave_up)


def k_best(X: Sequence[float], cfg: MultiConfig) -> list[Solution]:
    """Up to ``k`` pairwise-distant solutions, best first."""
    return k_best_run(X, cfg).solutions


def pairwise_distinct(solutions: Sequence[Solution]) -> bool:
    """Check that no two solutions fall within each other's exclusion zone."""
    for i, a in enumerate(solutions):
        for b in solutions[i + 1 :]:
            ta, tb = normalize_initial_step(a.tones), normalize_initial_step(b.tones)
            if 3 * distance(ta, tb) <= len(ta):
                return False
    return True


__all__ = [
    "ExclusionZone",
    "MultiConfig",
    "MultiResult",
    "excluded",
    "k_best",
    "k_best_run",
    "pairwise_distinct",
    "restart_seed",
]
