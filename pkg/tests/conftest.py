import random

from tonesearch.model import PARAM_RANGES, ScalingParams
from tonesearch.trials import MULTI_EXAMPLE, TRIALS

# Measured Trial sequences and the 7-tone contour used by the multi-solution checks.
TRIAL1 = TRIALS[1]
TRIAL2 = TRIALS[2]
MULTI = MULTI_EXAMPLE


def random_params(rng: random.Random) -> ScalingParams:
    return ScalingParams(*(rng.uniform(lo, hi) for lo, hi in PARAM_RANGES.values()))


# One line per acceptance criterion, printed at the end of the run.
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
