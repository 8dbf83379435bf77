"""Transcription comparison, downstep-convention conversion and level interpretation."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import LengthMismatchError, ModelError
from .tones import Base, Step, Tone, as_transcription


class UnmappedPairError(ModelError):
    pass


def distance(a, b) -> int:
    """Number of positions at which two transcriptions carry different tones."""
    a, b = as_transcription(a), as_transcription(b)
    if len(a) != len(b):
        raise LengthMismatchError(f"lengths differ: {len(a)} vs {len(b)}")
    return sum(x is not y for x, y in zip(a, b))


def normalize_initial_step(tones) -> tuple[Tone, ...]:
    """Drop any step on the first tone; it has no phonetic effect."""
    tones = as_transcription(tones)
    return (tones[0].without_step(),) + tones[1:]


# (previous base, tone under partial downstep) -> same tone under total downstep
_PARTIAL_TO_TOTAL = {
    (Base.H, Tone.H): Tone.H,
    (Base.H, Tone.L): Tone.DL,
    (Base.L, Tone.H): Tone.UH,
    (Base.L, Tone.L): Tone.L,
    (Base.H, Tone.DH): Tone.DH,
    (Base.L, Tone.DH): Tone.H,
    (Base.L, Tone.DL): Tone.DL,
    (Base.H, Tone.UH): Tone.UH,
    (Base.H, Tone.UL): Tone.L,
    (Base.L, Tone.UL): Tone.UL,
}
_TOTAL_TO_PARTIAL = {(b, total): partial for (b, partial), total in _PARTIAL_TO_TOTAL.items()}


def convert_scheme(tones, to: str) -> tuple[Tone, ...]:
    """Rewrite a transcription between partial- and total-downstep conventions.

    ``to`` is ``"total"`` (input is partial) or ``"partial"`` (input is total).
    Only steps change; the H/L bases are kept.
    """
    if to == "total":
        table = _PARTIAL_TO_TOTAL
    elif to == "partial":
        table = _TOTAL_TO_PARTIAL
    else:
        raise ValueError(f"direction must be 'partial' or 'total', got {to!r}")
    tones = normalize_initial_step(tones)
    out = [tones[0]]
    for prev, tone in zip(tones, tones[1:]):
        try:
            out.append(table[prev.base, tone])
        except KeyError:
            raise UnmappedPairError(f"pair {prev} {tone} has no {to}-downstep counterpart") from None
    return tuple(out)


@dataclass(frozen=True)
class InterpretationScheme:
    level_h: Fraction
    level_l: Fraction
    initial_register: Fraction = Fraction(0)
    down_increment: Fraction = Fraction(1)
    up_decrement: Fraction = Fraction(1)

    def __post_init__(self):
        for name in ("level_h", "level_l", "initial_register", "down_increment", "up_decrement"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.down_increment < 0 or self.up_decrement < 0:
            raise ValueError("register increments must be non-negative")


SCHEMES = {
    "hyman": InterpretationScheme(1, 3, 0, 1, 1),
    "stewart": InterpretationScheme(1, 2, 0, 1, 1),
    "novel": InterpretationScheme(1, Fraction(5, 2), 0, Fraction(1, 2), Fraction(1, 2)),
}


def interpret(tones, scheme: InterpretationScheme) -> list[Fraction]:
    """Abstract pitch levels (larger is lower): tone level plus running register."""
    register = scheme.initial_register
    levels = []
    for tone in as_transcription(tones):
        if tone.step is Step.DOWN:
            register += scheme.down_increment
        elif tone.step is Step.UP:
            register -= scheme.up_decrement
        levels.append((scheme.level_h if tone.base is Base.H else scheme.level_l) + register)
    return levels
