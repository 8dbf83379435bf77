"""Tone inventory and transcription syntax.

A tone is a base level (H or L) plus an optional register step
(downstep or upstep). Transcriptions are plain tuples of :class:`Tone`.

ASCII syntax is ``H L !H !L ^H ^L``; the arrows ``↓`` and ``↑`` are
accepted on input as synonyms for ``!`` and ``^``.
"""

from __future__ import annotations

import enum
import re
from typing import Iterable, Sequence


class Base(enum.IntEnum):
    H = 0
    L = 1


class Step(enum.IntEnum):
    NONE = 0
    DOWN = 1
    UP = 2


_STEP_ASCII = {Step.NONE: "", Step.DOWN: "!", Step.UP: "^"}
_STEP_UNICODE = {Step.NONE: "", Step.DOWN: "↓", Step.UP: "↑"}


class Tone(enum.IntEnum):
    """One of the six tones. The integer value doubles as an array code."""

    H = 0
    DH = 1
    UH = 2
    L = 3
    DL = 4
    UL = 5

    @property
    def base(self) -> Base:
        return Base(self.value // 3)

    @property
    def step(self) -> Step:
        return Step(self.value % 3)

    @classmethod
    def make(cls, base: Base, step: Step = Step.NONE) -> "Tone":
        return cls(int(base) * 3 + int(step))

    def without_step(self) -> "Tone":
        return Tone.make(self.base, Step.NONE)

    def __str__(self) -> str:
        return _STEP_ASCII[self.step] + self.base.name

    def unicode(self) -> str:
        return _STEP_UNICODE[self.step] + self.base.name


Transcription = tuple  # tuple[Tone, ...]; alias kept for readable signatures

ALL_TONES: tuple[Tone, ...] = tuple(Tone)
NO_UPSTEP: tuple[Tone, ...] = (Tone.H, Tone.L, Tone.DH, Tone.DL)

_TOKEN = re.compile(r"([!\^↓↑]?)([HL])")
_STEP_MARK = {"": Step.NONE, "!": Step.DOWN, "↓": Step.DOWN, "^": Step.UP, "↑": Step.UP}


class ToneSyntaxError(ValueError):
    pass


def parse_tones(text: str) -> tuple[Tone, ...]:
    """Parse a transcription such as ``"H L !H L"`` or ``"HL↓HL"``.

    Whitespace between tones is optional.
    """
    compact = "".join(text.split())
    tones = []
    pos = 0
    while pos < len(compact):
        m = _TOKEN.match(compact, pos)
        if m is None:
            raise ToneSyntaxError(f"bad tone syntax at offset {pos} in {text!r}")
        tones.append(Tone.make(Base[m.group(2)], _STEP_MARK[m.group(1)]))
        pos = m.end()
    if not tones:
        raise ToneSyntaxError("empty transcription")
    return tuple(tones)


def format_tones(tones: Iterable[Tone], unicode: bool = False) -> str:
    if unicode:
        return " ".join(t.unicode() for t in tones)
    return " ".join(str(t) for t in tones)


def as_transcription(tones: str | Sequence[Tone] | Sequence[int]) -> tuple[Tone, ...]:
    """Coerce strings, Tone sequences or integer codes to a transcription tuple."""
    if isinstance(tones, str):
        return parse_tones(tones)
    result = tuple(Tone(int(t)) for t in tones)
    if not result:
        raise ValueError("transcription must contain at least one tone")
    return result
