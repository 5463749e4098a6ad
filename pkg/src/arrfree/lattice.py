"""Intersection lattice, Moebius function and characteristic polynomials."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .arr import Arrangement, Flat
from .exact import UPoly, format_fraction, primitive_integer_vector


def _primitive(v: List[int]) -> Tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, x)
    if g > 1:
        v = [x // g for x in v]
    return tuple(v)


@dataclass
class IntersectionLattice:
    arrangement: Arrangement
    flats: List[Flat]
    mobius: List[int]

    def __len__(self):
        return len(self.flats)

    def by_dimension(self) -> Dict[int, List[int]]:
        out: Dict[int, List[int]] = {}
        for i, f in enumerate(self.flats):
            out.setdefault(f.dim, []).append(i)
        return out

    def index_of(self, indices) -> int:
        key = frozenset(indices)
        for i, f in enumerate(self.flats):
            if f.indices == key:
                return i
        raise KeyError("no flat with these hyperplanes")

    def char_poly(self) -> UPoly:
        coeffs = [0] * (self.arrangement.dim + 1)
        for f, mu in zip(self.flats, self.mobius):
            coeffs[f.dim] += mu
        return UPoly(coeffs)

    def to_json(self) -> dict:
        return {
            "dim": self.arrangement.dim,
            "flats": [
                {
                    "dim": f.dim,
                    "hyperplanes": sorted(f.indices),
                    "basis": [[format_fraction(x) for x in row] for row in f.canonical_basis()],
                    "mobius": mu,
                }
                for f, mu in zip(self.flats, self.mobius)
            ],
            "chi": list(self.char_poly().coeffs),
        }


def build_lattice(a: Arrangement) -> IntersectionLattice:
    """All intersections of hyperplanes, with Moebius values.

    Flats are generated level by level: each flat is intersected with every
    hyperplane not containing it, and deduplicated by the set of hyperplanes
    containing the result (which determines the subspace).
    """
    return _build_lattice(a.forms, a.dim, a.infinity)


@lru_cache(maxsize=64)
def _build_lattice(forms, dim, infinity) -> IntersectionLattice:
    a = Arrangement(dim, forms, infinity)
    ints = [primitive_integer_vector(f) for f in forms]
    n = len(ints)
    full = tuple(tuple(int(i == j) for i in range(dim)) for j in range(dim))
    top = Flat(dim, frozenset(), full, dim)
    masks: Dict[int, Flat] = {0: top}
    level = [(0, full)]
    while level:
        nxt = []
        for mask, basis in level:
            done = mask
            for i in range(n):
                if done >> i & 1:
                    continue
                vals = [sum(x * y for x, y in zip(ints[i], v)) for v in basis]
                t = next(j for j, c in enumerate(vals) if c)
                ct, vt = vals[t], basis[t]
                new = []
                for j, v in enumerate(basis):
                    if j == t:
                        continue
                    cj = vals[j]
                    new.append(_primitive([ct * x - cj * y for x, y in zip(v, vt)]))
                new_mask = 0
                for k in range(n):
                    if all(sum(x * y for x, y in zip(ints[k], v)) == 0 for v in new):
                        new_mask |= 1 << k
                done |= new_mask
                if new_mask not in masks:
                    idx = frozenset(k for k in range(n) if new_mask >> k & 1)
                    masks[new_mask] = Flat(len(new), idx, tuple(new), dim)
                    nxt.append((new_mask, tuple(new)))
        level = nxt
    order = sorted(masks, key=lambda m: (-masks[m].dim, sorted(masks[m].indices)))
    flats = [masks[m] for m in order]
    mobius = _mobius(order, [f.dim for f in flats])
    return IntersectionLattice(a, flats, mobius)


def _mobius(masks: Sequence[int], dims: Sequence[int]) -> List[int]:
    mu: List[int] = []
    for i, mx in enumerate(masks):
        if i == 0:
            mu.append(1)
            continue
        s = 0
        dx = dims[i]
        for j in range(i):
            if dims[j] > dx and masks[j] & ~mx == 0:
                s += mu[j]
        mu.append(-s)
    return mu


def char_poly(a: Arrangement) -> UPoly:
    """``chi(A, t) = sum_X mu(X) t^dim(X)``."""
    return build_lattice(a).char_poly()


def reduced_char_poly(a: Arrangement) -> UPoly:
    """``chi(A, t) / (t - 1)`` for a nonempty central arrangement."""
    if not a.forms:
        raise ValueError("reduced characteristic polynomial needs a nonempty arrangement")
    q, rem = char_poly(a).divmod_monic_linear(1)
    assert rem == 0, "chi(A, 1) != 0 for a central arrangement"
    return q


# ---------------------------------------------------------------------------
# Finite field oracle
# ---------------------------------------------------------------------------

class BadPrimeError(ValueError):
    pass


def _rank_mod_p(rows: List[List[int]], p: int) -> int:
    rows = [[x % p for x in r] for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def check_good_prime(a: Arrangement, p: int) -> None:
    """Raise ``BadPrimeError`` unless reduction mod p preserves the lattice.

    For every flat, a basis of its defining normals must stay independent mod
    p, and adjoining any hyperplane not containing the flat must raise the
    rank mod p.
    """
    ints = [primitive_integer_vector(f) for f in a.forms]
    lat = build_lattice(a)
    for flat in lat.flats:
        idx = sorted(flat.indices)
        basis: List[int] = []
        for i in idx:
            if _rank_q([ints[j] for j in basis + [i]]) == len(basis) + 1:
                basis.append(i)
        rows = [ints[j] for j in basis]
        if rows and _rank_mod_p(rows, p) != len(rows):
            raise BadPrimeError(f"bad prime {p}: flat {idx} degenerates")
        for k in range(len(ints)):
            if k in flat.indices:
                continue
            if _rank_mod_p(rows + [ints[k]], p) != len(rows) + 1:
                raise BadPrimeError(f"bad prime {p}: hyperplane {k} falls into flat {idx}")


def _rank_q(rows):
    from .exact import rank

    return rank(rows)


def count_points_mod_p(a: Arrangement, p: int, check: bool = True) -> int:
    """Number of points of ``F_p^l`` off every hyperplane."""
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"{p} is not prime")
    if check:
        check_good_prime(a, p)
    n = a.dim
    if not a.forms:
        return p ** n
    F = np.array([[x % p for x in primitive_integer_vector(f)] for f in a.forms], dtype=np.int64)
    total = 0
    # complement is stable under scaling: count points with leading coordinate 1
    for lead in range(n):
        free = n - lead - 1
        size = p ** free
        chunk = max(1, 1 << 20)
        for start in range(0, size, chunk):
            idx = np.arange(start, min(size, start + chunk), dtype=np.int64)
            pts = np.zeros((n, len(idx)), dtype=np.int64)
            pts[lead] = 1
            rem = idx.copy()
            for j in range(n - 1, lead, -1):
                pts[j] = rem % p
                rem //= p
            vals = (F @ pts) % p
            total += int(np.count_nonzero(np.all(vals != 0, axis=0)))
    return total * (p - 1)
