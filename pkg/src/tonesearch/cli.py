"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 data error, 4 the multi-solution
search gave up before finding ``k`` solutions.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

from . import __version__
from .estimation import derive_dschang_params, fit_pair_regression, refine_params
from .formats import (
    F0ParseError,
    RunManifest,
    format_hz,
    format_solution_machine,
    format_solution_text,
    parse_f0_file,
    parse_pairs_text,
)
from .ga import GaConfig, ga_search
from .model import ModelError, RTable, ScalingParams, Solution, evaluate, generate_contour
from .multisolution import MultiConfig, k_best_run
from .sa import SaConfig, sa_search
from .schemes import SCHEMES, convert_scheme, normalize_initial_step
from .schemes import interpret as interpret_levels
from .tones import Tone, ToneSyntaxError, format_tones, parse_tones
from .trials import TRIALS

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_GAVE_UP = 0, 2, 3, 4
SEED_ENV = "TONESEARCH_SEED"


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


def _table(args) -> RTable:
    if args.table == "igbo":
        if args.igbo_f is None or args.igbo_d is None:
            raise UsageError("--table igbo needs --igbo-f and --igbo-d")
        return RTable.igbo(args.igbo_f, args.igbo_d)
    return RTable.dschang1() if args.table == "1" else RTable.dschang2()


def _table_label(args) -> str:
    if args.table == "igbo":
        return f"igbo(F={args.igbo_f!r},D={args.igbo_d!r})"
    return args.table


def _params(args) -> ScalingParams:
    return ScalingParams(args.h, args.l, args.d)


def _frozen(text: str | None) -> ScalingParams | None:
    if text is None:
        return None
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError("--freeze-params takes h,l,d")
    try:
        return ScalingParams(*(float(p) for p in parts))
    except ValueError as exc:
        raise UsageError(f"--freeze-params: {exc}") from None


def _solver_config(args, table: RTable, seed: int):
    common = dict(
        seed=seed,
        table=table,
        allow_upstep=not args.no_upstep,
        frozen_params=_frozen(args.freeze_params),
    )
    try:
        if args.solver == "sa":
            extra = {} if args.cooling is None else {"cooling_divisor": args.cooling}
            return SaConfig(**common, **extra)
        extra = {}
        if args.population is not None:
            extra["population"] = args.population
        if args.generations is not None:
            extra["generations"] = args.generations
        return GaConfig(**common, **extra)
    except ModelError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _overrides(args, names: Sequence[str]) -> tuple[tuple[str, str], ...]:
    out = []
    for name in names:
        value = getattr(args, name, None)
        if value not in (None, False):
            out.append((name.replace("_", "-"), str(value)))
    return tuple(out)


def argv_from_manifest(m: RunManifest) -> list[str]:
    """Command line that re-runs the command recorded in a manifest."""
    argv = [m.command]
    if m.command == "bench":
        argv += ["--trial", m.input.removeprefix("trial")]
    else:
        argv += ["--f0", m.input]
    if m.table.startswith("igbo("):
        consts = dict(item.split("=") for item in m.table[5:-1].split(","))
        argv += ["--table", "igbo", "--igbo-f", consts["F"], "--igbo-d", consts["D"]]
    else:
        argv += ["--table", m.table]
    argv += ["--solver", m.solver, "--seed", str(m.seed), "--format", "machine"]
    for key, value in m.overrides:
        argv += [f"--{key}"] if value == "True" else [f"--{key}", value]
    return argv


# -- subcommands ---------------------------------------------------------------


def cmd_generate(args, out) -> int:
    contour = generate_contour(parse_tones(args.tones), args.x1, _params(args), _table(args))
    out.write(format_hz(contour, args.round) + "\n")
    return EXIT_OK


def cmd_evaluate(args, out) -> int:
    X = parse_f0_file(args.f0)
    out.write(f"{evaluate(parse_tones(args.tones), X, _params(args), _table(args))!r}\n")
    return EXIT_OK


def _search(X, args, table, seed) -> tuple[list[Solution], bool]:
    cfg = _solver_config(args, table, seed)
    if args.k == 1:
        sol = (sa_search if args.solver == "sa" else ga_search)(X, cfg)
        return ([] if sol is None else [sol]), sol is None
    result = k_best_run(X, MultiConfig(k=args.k, solver=args.solver, inner=cfg))
    return result.solutions, result.gave_up and len(result.solutions) < args.k


def cmd_transcribe(args, out) -> int:
    X = parse_f0_file(args.f0)
    table = _table(args)
    seed = _default_seed() if args.seed is None else args.seed
    solutions, gave_up = _search(X, args, table, seed)
    if args.refine and args.freeze_params is None:
        refined = []
        for s in solutions:
            p = refine_params(s.tones, X, table, s.params)
            refined.append(Solution(s.tones, p, evaluate(s.tones, X, p, table)))
        solutions = refined
    manifest = RunManifest(
        command="transcribe",
        input=str(args.f0),
        table=_table_label(args),
        solver=args.solver,
        seed=seed,
        overrides=_overrides(
            args, ["k", "no_upstep", "freeze_params", "refine", "cooling", "population", "generations"]
        ),
        version=__version__,
    )
    for i, s in enumerate(solutions, start=1):
        if args.format == "machine":
            out.write(format_solution_machine(s, i, manifest, X, table))
        else:
            out.write(format_solution_text(s, X, table, args.round))
    if gave_up:
        print(f"search gave up after {len(solutions)} of {args.k} solutions", file=sys.stderr)
        return EXIT_GAVE_UP
    return EXIT_OK


def cmd_estimate(args, out) -> int:
    samples = parse_pairs_text(Path(args.pairs).read_text(encoding="utf-8"))
    groups: dict[tuple[Tone, Tone], list] = {}
    for s in samples:
        groups.setdefault((s.prev_tone, s.next_tone), []).append(s)
    lines = {}
    for (prev, nxt), group in sorted(groups.items()):
        if len(group) < 2:
            out.write(f"{prev}{nxt}: skipped, only 1 sample\n")
            continue
        line = fit_pair_regression(group)
        lines[(prev, nxt)] = line
        out.write(
            f"{prev}{nxt}: x_next = {line.gradient:.4f} * x_prev + {line.intercept:.2f}"
            f"  (se {line.se_gradient:.4f}, {line.se_intercept:.2f}; n={line.count})\n"
        )
    hl, ldh = lines.get((Tone.H, Tone.L)), lines.get((Tone.L, Tone.DH))
    if hl is None or ldh is None:
        out.write("derived: unavailable (needs both H L and L !H samples)\n")
        return EXIT_OK
    p = derive_dschang_params(hl, ldh)
    out.write(f"derived: h:{p.h:.1f} l:{p.l:.1f} d:{p.d:.3f}\n")
    return EXIT_OK


def cmd_interpret(args, out) -> int:
    levels = interpret_levels(parse_tones(args.tones), SCHEMES[args.scheme])
    out.write(" ".join(str(v) for v in levels) + "\n")
    return EXIT_OK


def cmd_convert(args, out) -> int:
    out.write(format_tones(convert_scheme(parse_tones(args.tones), args.to)) + "\n")
    return EXIT_OK


def _bench_run(X, args, table, seed) -> Solution | None:
    cfg = _solver_config(args, table, seed)
    return (sa_search if args.solver == "sa" else ga_search)(X, cfg)


def cmd_bench(args, out) -> int:
    X = TRIALS[args.trial]
    table = _table(args)
    master = _default_seed() if args.seed is None else args.seed
    seeds = [master + r for r in range(args.runs)]
    if args.jobs > 1:
        with ThreadPoolExecutor(args.jobs) as pool:
            results = list(pool.map(lambda s: _bench_run(X, args, table, s), seeds))
    else:
        results = [_bench_run(X, args, table, s) for s in seeds]

    counts: Counter = Counter()
    best: dict[tuple[Tone, ...], float] = {}
    for sol in results:
        if sol is None:
            continue
        check = evaluate(sol.tones, X, sol.params, table)
        if not math.isclose(check, sol.evaluation, rel_tol=1e-9, abs_tol=1e-9):
            raise ModelError(f"self-check failed: {format_tones(sol.tones)} reported {sol.evaluation}, re-evaluates to {check}")
        if sol.evaluation >= args.max_eval:
            continue
        key = normalize_initial_step(sol.tones)
        counts[key] += 1
        best[key] = min(best.get(key, math.inf), sol.evaluation)

    rows = sorted(counts, key=lambda k: (-counts[k], best[k], format_tones(k)))
    manifest = RunManifest(
        command="bench",
        input=f"trial{args.trial}",
        table=_table_label(args),
        solver=args.solver,
        seed=master,
        overrides=_overrides(args, ["runs", "max_eval", "no_upstep", "freeze_params", "cooling", "population", "generations"]),
        version=__version__,
    )
    if args.format == "machine":
        for i, key in enumerate(rows, start=1):
            out.write(f"entry: {i}\ntones: {format_tones(key)}\ncount: {counts[key]}\nbest_evaluation: {best[key]!r}\n\n")
        out.write("\n".join([f"runs: {args.runs}", f"kept: {sum(counts.values())}"] + manifest.lines()) + "\n")
    else:
        width = max([len(format_tones(k)) for k in rows] + [14])
        out.write(f"{'count':>5}  {'transcription':<{width}}  best E\n")
        for key in rows:
            out.write(f"{counts[key]:>5}  {format_tones(key):<{width}}  {best[key]:.2f}\n")
        out.write(f"{sum(counts.values())} of {args.runs} runs below E {args.max_eval:g}\n")
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def _add_table(p: argparse.ArgumentParser) -> None:
    p.add_argument("--table", choices=("1", "2", "igbo"), default="1", help="transition-ratio table")
    p.add_argument("--igbo-f", type=float, help="F constant for --table igbo")
    p.add_argument("--igbo-d", type=float, help="D constant for --table igbo")


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--l", type=float, required=True)
    p.add_argument("--d", type=float, required=True)


def _add_search(p: argparse.ArgumentParser) -> None:
    p.add_argument("--solver", choices=("ga", "sa"), default="sa")
    p.add_argument("--seed", type=int, help=f"master seed (default ${SEED_ENV} or 0)")
    p.add_argument("--no-upstep", action="store_true", help="search without upstepped tones")
    p.add_argument("--freeze-params", metavar="H,L,D", help="fix h, l, d instead of searching them")
    p.add_argument("--cooling", type=float, help="SA cooling divisor")
    p.add_argument("--population", type=int, help="GA population size")
    p.add_argument("--generations", type=int, help="GA generation count")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    _add_table(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tonesearch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="predict an F0 contour for a transcription")
    p.add_argument("--tones", required=True)
    p.add_argument("--x1", type=float, required=True, help="first F0 value (Hz)")
    _add_params(p)
    _add_table(p)
    p.add_argument("--round", action="store_true", help="print whole Hz")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evaluate", help="score a transcription against an F0 file")
    p.add_argument("--tones", required=True)
    p.add_argument("--f0", required=True)
    _add_params(p)
    _add_table(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("transcribe", help="search for transcriptions of an F0 file")
    p.add_argument("--f0", required=True)
    p.add_argument("--k", type=int, default=1, help="number of distinct solutions")
    p.add_argument("--refine", action="store_true", help="polish h, l, d of each solution")
    p.add_argument("--round", action="store_true", help="print predicted F0 in whole Hz")
    _add_search(p)
    p.set_defaults(func=cmd_transcribe)

    p = sub.add_parser("estimate", help="fit pair regressions and derive h, l, d")
    p.add_argument("--pairs", required=True, help="lines of 'prev next x_prev x_next'")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("interpret", help="abstract pitch levels under a numbering scheme")
    p.add_argument("--tones", required=True)
    p.add_argument("--scheme", choices=sorted(SCHEMES), required=True)
    p.set_defaults(func=cmd_interpret)

    p = sub.add_parser("convert", help="convert between partial and total downstep")
    p.add_argument("--tones", required=True)
    p.add_argument("--to", choices=("partial", "total"), required=True)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("bench", help="histogram of transcriptions over repeated runs on a built-in trial")
    p.add_argument("--trial", type=int, choices=sorted(TRIALS), required=True)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--max-eval", type=float, default=7.0, help="only count results scoring below this")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    _add_search(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "k", 1) < 1 or getattr(args, "runs", 1) < 1 or getattr(args, "jobs", 1) < 1:
            raise UsageError("--k, --runs and --jobs must be positive")
        return args.func(args, out)
    except UsageError as exc:
        print(f"tonesearch {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelError, ToneSyntaxError, F0ParseError, OSError) as exc:
        print(f"tonesearch {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
