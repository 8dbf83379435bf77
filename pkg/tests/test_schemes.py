from fractions import Fraction

import pytest

from tonesearch.model import LengthMismatchError
from tonesearch.schemes import (
    SCHEMES,
    InterpretationScheme,
    UnmappedPairError,
    convert_scheme,
    distance,
    interpret,
    normalize_initial_step,
)
from tonesearch.tones import parse_tones

LEVELS = [1, 3, 2, 4, 3, 5, 4, 6, 5, 7]
PARTIAL = "H L !H L !H L !H L !H L"
TOTAL = "H !L H !L H !L H !L H !L"
NOVEL = "H !L !H !L !H !L !H !L !H !L"

# (partial, total) pairs from the published mapping table
MAPPING = [
    ("H H", "H H"), ("H L", "H !L"), ("L H", "L ^H"), ("L L", "L L"), ("H !H", "H !H"),
    ("L !H", "L H"), ("L !L", "L !L"), ("H ^H", "H ^H"), ("H ^L", "H L"), ("L ^L", "L ^L"),
]


def test_distance_examples():
    t = parse_tones("H L !H ^L")
    assert distance(t, t) == 0
    assert distance("H L H", "H L L") == 1
    assert distance("H L H", "!H ^L H") == 2
    with pytest.raises(LengthMismatchError):
        distance("H L", "H L H")


def test_normalize_initial_step():
    assert normalize_initial_step("!H L") == parse_tones("H L")
    assert normalize_initial_step("H L") == parse_tones("H L")
    assert normalize_initial_step("^L !H") == parse_tones("L !H")


@pytest.mark.parametrize("partial,total", MAPPING)
def test_mapping_rows(partial, total):
    assert convert_scheme(partial, "total") == parse_tones(total)
    assert convert_scheme(total, "partial") == parse_tones(partial)


def test_convert_equivalent_rows():
    assert convert_scheme(PARTIAL, "total") == parse_tones(TOTAL)
    assert convert_scheme(TOTAL, "partial") == parse_tones(PARTIAL)


def test_convert_keeps_bases():
    out = convert_scheme("H ^H L !H ^L !L", "total")
    assert [t.base for t in out] == [t.base for t in parse_tones("H ^H L !H ^L !L")]


def test_convert_unmapped_pair():
    # H !L has no partial-downstep counterpart in the mapping table
    with pytest.raises(UnmappedPairError):
        convert_scheme("H !L", "total")
    with pytest.raises(ValueError):
        convert_scheme("H L", "sideways")


@pytest.mark.parametrize(
    "scheme,tones", [("hyman", PARTIAL), ("stewart", TOTAL), ("novel", NOVEL)]
)
def test_equivalent_interpretations(scheme, tones):
    levels = interpret(tones, SCHEMES[scheme])
    assert levels == [Fraction(v) for v in LEVELS]
    assert all(isinstance(v, Fraction) for v in levels)


def test_novel_scheme_uses_halves():
    assert interpret("H L", SCHEMES["novel"]) == [Fraction(1), Fraction(5, 2)]


def test_initial_register_is_a_field():
    shifted = InterpretationScheme(1, 2, initial_register=1)
    assert interpret(TOTAL, shifted) == [Fraction(v + 1) for v in LEVELS]


def test_conversion_preserves_interpretation():
    assert interpret(PARTIAL, SCHEMES["hyman"]) == interpret(convert_scheme(PARTIAL, "total"), SCHEMES["stewart"])


def test_negative_increment_rejected():
    with pytest.raises(ValueError):
        InterpretationScheme(1, 2, down_increment=-1)
