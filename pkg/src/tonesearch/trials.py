"""The four measured F0 sequences used for benchmarking (Bamileke Dschang)."""

TRIALS: dict[int, tuple[float, ...]] = {
    1: (219, 168, 183, 150, 160, 136, 144, 123, 131, 115),
    2: (205, 224, 167, 200, 156, 175, 136, 156, 127, 140),
    3: (219, 168, 183, 150, 160, 136, 144, 123, 131, 115, 122, 107, 113, 105, 118, 100, 113, 95),
    4: (205, 224, 167, 200, 156, 175, 136, 156, 127, 140, 118, 129, 109, 119, 103, 120, 102, 111, 95),
}

# Contour generated from ^H ^H !H L !L ^H L with h=107, l=98, d=0.87, x1=201,
# used to exercise the k-best search.
MULTI_EXAMPLE: tuple[float, ...] = (201, 215, 201, 173, 163, 201, 173)
