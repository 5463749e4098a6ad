"""Seeded random corpus of central 3-arrangements shared by the test suite."""
from __future__ import annotations

import random
from typing import List

from arrfree.arr import Arrangement, normalize_form
from arrfree.exact import rank

SEED = 20240601


def random_arrangement(rng: random.Random, n: int, dim: int = 3, lo: int = -3, hi: int = 3) -> Arrangement:
    while True:
        seen = {}
        while len(seen) < n:
            v = [rng.randint(lo, hi) for _ in range(dim)]
            if any(v):
                seen.setdefault(normalize_form(v), v)
        rows = list(seen.values())
        if rank(rows) == dim:
            return Arrangement.from_rows(rows)


def random_corpus(count: int = 50, seed: int = SEED) -> List[Arrangement]:
    """``count`` arrangements with 5-9 hyperplanes and coefficients in -3..3.

    Uniform draws are almost never free, so two fifths of the corpus draws
    coefficients from -1..1, where free arrangements are common.
    """
    rng = random.Random(seed)
    out = []
    for i in range(count):
        small = i % 5 >= 3
        out.append(random_arrangement(rng, rng.randint(5, 9), lo=-1 if small else -3, hi=1 if small else 3))
    return out
