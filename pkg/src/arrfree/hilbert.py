"""Hilbert series of free (multi)arrangements and the restriction identity.

Degree convention: a free module with exponents ``(d_1, ..., d_l)`` has
``Omega^1`` generated in degrees ``-d_1, ..., -d_l``, so

    P(Omega^p, x) = e_p(x^-d_1, ..., x^-d_l) / (1 - x)^l.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Sequence, Tuple

from .arr import Arrangement
from .exact import RatFuncX, UPoly, limit_x_to_1
from .logmod import omega_dim, restriction_image_dim


@dataclass(frozen=True)
class FreeHilbertData:
    rank: int
    exponents: Tuple[int, ...]

    def __post_init__(self):
        if len(self.exponents) != self.rank:
            raise ValueError("need one exponent per dimension")


def hilbert_series_free(h: FreeHilbertData, p: int) -> RatFuncX:
    if not 0 <= p <= h.rank:
        raise ValueError("form degree out of range")
    num: Dict[int, UPoly] = {}
    for combo in combinations(h.exponents, p):
        e = -sum(combo)
        num[e] = num.get(e, UPoly()) + 1
    return RatFuncX(num, RatFuncX.one_minus_x_power(h.rank))


def solomon_terao_chi(h: FreeHilbertData) -> UPoly:
    """``lim_{x->1} sum_p P(Omega^p, x) (t(1-x) - 1)^p``."""
    y = RatFuncX({0: UPoly([-1, 1]), 1: UPoly([0, -1])}, {0: UPoly([1])})
    total = RatFuncX({}, {0: UPoly([1])})
    ypow = RatFuncX({0: UPoly([1])}, {0: UPoly([1])})
    for p in range(h.rank + 1):
        total = total + hilbert_series_free(h, p) * ypow
        ypow = ypow * y
    chi = limit_x_to_1(total)
    assert chi == UPoly.from_roots(h.exponents), "Solomon-Terao limit disagrees with the exponents"
    return chi


@dataclass
class HilbFormulaReport:
    degree_bound: int
    lhs: Dict[int, Dict[int, int]]
    rhs: Dict[int, Dict[int, int]]
    mismatches: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def agrees(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "degree_bound": self.degree_bound,
            "agrees": self.agrees,
            "mismatches": [list(m) for m in self.mismatches],
            "lhs": {str(p): {str(n): v for n, v in sorted(c.items())} for p, c in self.lhs.items()},
            "rhs": {str(p): {str(n): v for n, v in sorted(c.items())} for p, c in self.rhs.items()},
        }


def omega_dims(a: Arrangement, lo: int, hi: int) -> Dict[int, Dict[int, int]]:
    """``dim Omega^p(A)_n`` for all p and ``lo <= n <= hi``."""
    multi = a.as_multi()
    return {p: {n: omega_dim(multi, p, n) for n in range(lo, hi + 1)} for p in range(a.dim + 1)}


def hilbformula_check(a: Arrangement, h: int, D: int) -> HilbFormulaReport:
    """Compare both sides of the restriction Hilbert identity up to ``x^D``.

    The left side ``sum_{p<l} P(M^p, x) y^p`` uses image dimensions of the
    restriction maps; the right side ``x(1-x)/(x+y) Phi(A; x, y)`` is
    expanded as ``(1-x) sum_j (-1)^j x^-j y^j Phi``, which needs
    ``dim Omega^q(A)_n`` for ``n <= D + l``.  Coefficients of ``y^p`` are
    compared for ``p = 0..l`` (the left side has no ``y^l`` term).
    """
    l = a.dim
    if D < len(a.forms):
        raise ValueError("degree bound must be at least #A")
    lo = -len(a.forms) - l - 1
    om = omega_dims(a, lo, D + l)

    def dim_omega(q: int, n: int) -> int:
        return om[q].get(n, 0) if n >= lo else 0

    lhs: Dict[int, Dict[int, int]] = {p: {} for p in range(l + 1)}
    rhs: Dict[int, Dict[int, int]] = {p: {} for p in range(l + 1)}
    mismatches = []
    for p in range(l + 1):
        for n in range(lo + l, D + 1):
            left = restriction_image_dim(a, h, p, n) if p < l else 0
            right = 0
            for j in range(p + 1):
                right += (-1) ** j * (dim_omega(p - j, n + j) - dim_omega(p - j, n + j - 1))
            lhs[p][n] = left
            rhs[p][n] = right
            if left != right:
                mismatches.append((p, n))
    return HilbFormulaReport(D, lhs, rhs, mismatches)


def free_hilbert_data(exponents: Sequence[int]) -> FreeHilbertData:
    return FreeHilbertData(len(exponents), tuple(exponents))
