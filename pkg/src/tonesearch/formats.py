"""F0 file parsing and solution records (human text and key:value machine blocks)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__
from .estimation import PairSample
from .model import ModelError, RTable, ScalingParams, Solution, generate_contour
from .tones import ToneSyntaxError, format_tones, parse_tones


class F0ParseError(ModelError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


_SPLIT = re.compile(r"[,\s]+")


def parse_f0_text(text: str) -> list[float]:
    """Comma- and/or newline-separated Hz values; blank lines and ``#`` comments are skipped."""
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for token in _SPLIT.split(line):
            if not token:
                continue
            try:
                v = float(token)
            except ValueError:
                raise F0ParseError(f"not a number: {token!r}", lineno) from None
            if not v > 0 or v == float("inf"):
                raise F0ParseError(f"F0 values must be positive and finite, got {token}", lineno)
            values.append(v)
    if not values:
        raise F0ParseError("no F0 values found")
    return values


def parse_f0_file(path: str | Path) -> list[float]:
    return parse_f0_text(Path(path).read_text(encoding="utf-8"))


def parse_pairs_text(text: str) -> list[PairSample]:
    """One measured transition per line: ``prev next x_prev x_next``, e.g. ``L !H 150 168``."""
    samples = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        fields = raw.split("#", 1)[0].split()
        if not fields:
            continue
        if len(fields) != 4:
            raise F0ParseError(f"expected 'prev next x_prev x_next', got {raw.strip()!r}", lineno)
        try:
            pair = parse_tones(fields[0]) + parse_tones(fields[1])
            if len(pair) != 2:
                raise ValueError(f"each of prev and next must be a single tone: {raw.strip()!r}")
            prev, nxt = pair
            samples.append(PairSample(prev, nxt, float(fields[2]), float(fields[3])))
        except (ValueError, ToneSyntaxError) as exc:
            raise F0ParseError(str(exc), lineno) from None
    if not samples:
        raise F0ParseError("no pair samples found")
    return samples


@dataclass(frozen=True)
class RunManifest:
    command: str
    input: str = "-"
    table: str = "1"
    solver: str = "-"
    seed: int | None = None
    overrides: tuple[tuple[str, str], ...] = ()
    version: str = __version__

    def lines(self) -> list[str]:
        overrides = ",".join(f"{k}={v}" for k, v in self.overrides) or "-"
        return [
            f"manifest.command: {self.command}",
            f"manifest.input: {self.input}",
            f"manifest.table: {self.table}",
            f"manifest.solver: {self.solver}",
            f"manifest.seed: {'-' if self.seed is None else self.seed}",
            f"manifest.overrides: {overrides}",
            f"manifest.version: {self.version}",
        ]

    @classmethod
    def from_fields(cls, fields: dict[str, str]) -> "RunManifest":
        overrides = ()
        if fields.get("manifest.overrides", "-") != "-":
            overrides = tuple(
                tuple(item.split("=", 1)) for item in fields["manifest.overrides"].split(",")
            )
        seed = fields.get("manifest.seed", "-")
        return cls(
            command=fields["manifest.command"],
            input=fields.get("manifest.input", "-"),
            table=fields.get("manifest.table", "1"),
            solver=fields.get("manifest.solver", "-"),
            seed=None if seed == "-" else int(seed),
            overrides=overrides,  # type: ignore[arg-type]
            version=fields.get("manifest.version", __version__),
        )


def format_hz(values: Iterable[float], round_int: bool = False) -> str:
    if round_int:
        return " ".join(str(int(round(v))) for v in values)
    return " ".join(f"{v:.1f}" for v in values)


def predicted_contour(sol: Solution, X: Sequence[float], table: RTable) -> list[float]:
    return generate_contour(sol.tones, X[0], sol.params, table)


def format_solution_text(
    sol: Solution, X: Sequence[float] | None = None, table: RTable | None = None, round_int: bool = False
) -> str:
    p = sol.params
    head = f"{format_tones(sol.tones)}   h:{p.h:.0f} l:{p.l:.0f} d:{p.d:.2f} E:{sol.evaluation:.2f}"
    if X is None:
        return head + "\n"
    pred = predicted_contour(sol, X, table or RTable.dschang1())
    return f"{head}\n{format_hz(pred, round_int)}\n"


def format_solution_machine(
    sol: Solution,
    index: int = 1,
    manifest: RunManifest | None = None,
    X: Sequence[float] | None = None,
    table: RTable | None = None,
) -> str:
    lines = [
        f"solution: {index}",
        f"tones: {format_tones(sol.tones)}",
        f"h: {sol.params.h!r}",
        f"l: {sol.params.l!r}",
        f"d: {sol.params.d!r}",
        f"evaluation: {sol.evaluation!r}",
    ]
    if X is not None:
        pred = predicted_contour(sol, X, table or RTable.dschang1())
        lines.append("predicted: " + " ".join(repr(v) for v in pred))
    if manifest is not None:
        lines.extend(manifest.lines())
    return "\n".join(lines) + "\n\n"


def format_solution(sol: Solution, mode: str = "text", **kwargs) -> str:
    if mode == "text":
        return format_solution_text(sol, kwargs.get("X"), kwargs.get("table"), kwargs.get("round_int", False))
    if mode == "machine":
        return format_solution_machine(
            sol, kwargs.get("index", 1), kwargs.get("manifest"), kwargs.get("X"), kwargs.get("table")
        )
    raise ValueError(f"unknown output mode {mode!r}")


def parse_blocks(text: str) -> list[dict[str, str]]:
    """Split machine output into blocks of ``key: value`` fields."""
    blocks = []
    for chunk in text.strip().split("\n\n"):
        fields = {}
        for line in chunk.strip().splitlines():
            key, _, value = line.partition(": ")
            fields[key.strip()] = value.strip()
        if fields:
            blocks.append(fields)
    return blocks


def solution_from_fields(fields: dict[str, str]) -> Solution:
    params = ScalingParams(float(fields["h"]), float(fields["l"]), float(fields["d"]))
    return Solution(parse_tones(fields["tones"]), params, float(fields["evaluation"]))


def parse_machine(text: str) -> list[Solution]:
    return [solution_from_fields(b) for b in parse_blocks(text) if "tones" in b]


__all__ = [
    "F0ParseError",
    "RunManifest",
    "format_hz",
    "format_solution",
    "format_solution_machine",
    "format_solution_text",
    "parse_blocks",
    "parse_f0_file",
    "parse_f0_text",
    "parse_machine",
    "parse_pairs_text",
    "solution_from_fields",
]
