"""Root systems and their deformation families (Shi, Catalan, interpolating).

Realizations (standard orthonormal coordinates):

* A_l: e_i - e_j (i < j) in R^(l+1); one non-essential direction.
* B_l: e_i - e_j, e_i + e_j, e_i.
* C_l: e_i - e_j, e_i + e_j, 2 e_i.
* D_l: e_i - e_j, e_i + e_j.
* G_2: in the plane x_1 + x_2 + x_3 = 0, simple roots (1,-1,0) and (-2,1,1).

Positive roots are listed by height, simple roots first; ideal indices on the
command line refer to this order.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .arr import AffineArrangement, Arrangement, cone, essentialize, restrict
from .exact import UPoly, integer_roots, kernel_basis
from .freeness import FREE, FreenessReport, recursive_free
from .lattice import char_poly
from .logmod import rank2_multi_exponents

Vec = Tuple[int, ...]


class UnsupportedRootSystem(ValueError):
    pass


def _unit(n: int, i: int, c: int = 1) -> List[int]:
    v = [0] * n
    v[i] = c
    return v


def _add(*vs) -> Vec:
    return tuple(sum(x) for x in zip(*vs))


@dataclass(frozen=True)
class RootSystemDesc:
    letter: str
    rank: int

    def __post_init__(self):
        letter = self.letter.upper()
        object.__setattr__(self, "letter", letter)
        if letter not in "ABCDG" or len(letter) != 1:
            raise UnsupportedRootSystem(f"unsupported root system type {self.letter!r}")
        if letter == "G" and self.rank != 2:
            raise UnsupportedRootSystem("G only in rank 2")
        least = {"A": 1, "B": 2, "C": 2, "D": 3, "G": 2}[letter]
        if self.rank < least:
            raise UnsupportedRootSystem(f"{letter}_{self.rank} is not a valid root system")

    @classmethod
    def parse(cls, text: str) -> "RootSystemDesc":
        m = re.fullmatch(r"\s*([A-Za-z])_?(\d+)\s*", text)
        if not m:
            raise UnsupportedRootSystem(f"cannot parse root system {text!r}")
        return cls(m.group(1), int(m.group(2)))

    @property
    def name(self) -> str:
        return f"{self.letter}{self.rank}"

    @property
    def ambient(self) -> int:
        return {"A": self.rank + 1, "G": 3}.get(self.letter, self.rank)

    def simple_roots(self) -> List[Vec]:
        l, n = self.rank, self.ambient
        if self.letter == "G":
            return [(1, -1, 0), (-2, 1, 1)]
        out = [tuple(_add(_unit(n, i), _unit(n, i + 1, -1))) for i in range(l - 1)]
        if self.letter == "A":
            out.append(tuple(_add(_unit(n, l - 1), _unit(n, l, -1))))
        elif self.letter == "B":
            out.append(tuple(_unit(n, l - 1)))
        elif self.letter == "C":
            out.append(tuple(_unit(n, l - 1, 2)))
        else:
            out.append(tuple(_add(_unit(n, l - 2), _unit(n, l - 1))))
        return out

    def _raw_positive_roots(self) -> List[Vec]:
        l, n = self.rank, self.ambient
        if self.letter == "G":
            a, b = self.simple_roots()
            combos = [(1, 0), (0, 1), (1, 1), (2, 1), (3, 1), (3, 2)]
            return [tuple(i * x + j * y for x, y in zip(a, b)) for i, j in combos]
        if self.letter == "A":
            return [tuple(_add(_unit(n, i), _unit(n, j, -1))) for i, j in combinations(range(n), 2)]
        roots = []
        for i, j in combinations(range(l), 2):
            roots.append(tuple(_add(_unit(n, i), _unit(n, j, -1))))
            roots.append(tuple(_add(_unit(n, i), _unit(n, j))))
        if self.letter == "B":
            roots += [tuple(_unit(n, i)) for i in range(l)]
        elif self.letter == "C":
            roots += [tuple(_unit(n, i, 2)) for i in range(l)]
        return roots

    def simple_coordinates(self, v: Sequence[int]) -> Tuple[int, ...]:
        """Coefficients of ``v`` in the simple roots (must be integral)."""
        simple = self.simple_roots()
        cols = [[s[c] for s in simple] + [-v[c]] for c in range(self.ambient)]
        kb = kernel_basis(cols, len(simple) + 1)
        if len(kb) != 1 or kb[0][-1] == 0:
            raise ValueError(f"{v} is not in the root lattice span")
        w = kb[0]
        coeffs = [Fraction(x) / w[-1] for x in w[:-1]]
        if any(c.denominator != 1 for c in coeffs):
            raise ValueError(f"{v} is not an integral combination of simple roots")
        return tuple(int(c) for c in coeffs)


def positive_roots(d: RootSystemDesc) -> List[Vec]:
    roots = d._raw_positive_roots()
    coords = {r: d.simple_coordinates(r) for r in roots}
    for r, c in coords.items():
        assert all(x >= 0 for x in c), f"{r} is not positive"
    expected = {"A": d.rank * (d.rank + 1) // 2, "B": d.rank ** 2, "C": d.rank ** 2,
                "D": d.rank * (d.rank - 1), "G": 6}[d.letter]
    assert len(roots) == expected
    return sorted(roots, key=lambda r: (sum(coords[r]), tuple(-x for x in coords[r])))


def weyl_arrangement(d: RootSystemDesc) -> Arrangement:
    return Arrangement(d.ambient, tuple(tuple(Fraction(x) for x in r) for r in positive_roots(d)))


@dataclass(frozen=True)
class ExponentData:
    exponents: Tuple[int, ...]
    coxeter: int


def exponent_data(d: RootSystemDesc) -> ExponentData:
    """Exponents from the characteristic polynomial of the Weyl arrangement."""
    ess, r = essentialize(weyl_arrangement(d))
    assert r == d.rank
    chi = char_poly(ess)
    exps = integer_roots(chi)
    assert len(exps) == d.rank, "characteristic polynomial of a Weyl arrangement does not split"
    npos = len(ess.forms)
    assert 2 * npos % d.rank == 0
    h = 2 * npos // d.rank
    l = d.rank
    assert exps[0] == 1
    assert all(exps[i] + exps[l - 1 - i] == h for i in range(l)), "exponent duality fails"
    return ExponentData(tuple(exps), h)


def root_order_leq(d: RootSystemDesc, beta: Sequence[int], alpha: Sequence[int]) -> bool:
    """``beta <= alpha``: ``alpha - beta`` is a nonnegative simple-root combination."""
    diff = d.simple_coordinates([a - b for a, b in zip(alpha, beta)])
    return all(x >= 0 for x in diff)


def order_ideal_check(d: RootSystemDesc, psi) -> bool:
    roots = positive_roots(d)
    psi = set(psi)
    for i in psi:
        if not 0 <= i < len(roots):
            raise IndexError(f"root index {i} out of range")
    for i in psi:
        for j, beta in enumerate(roots):
            if j not in psi and root_order_leq(d, beta, roots[i]):
                return False
    return True


def order_ideals(d: RootSystemDesc) -> List[FrozenSet[int]]:
    """All order ideals, by brute force over subsets (rank-2 sized inputs)."""
    n = len(positive_roots(d))
    if n > 16:
        raise ValueError("too many positive roots to enumerate ideals")
    out = []
    for size in range(n + 1):
        for sub in combinations(range(n), size):
            if order_ideal_check(d, sub):
                out.append(frozenset(sub))
    return out


@dataclass(frozen=True)
class FamilySpec:
    desc: RootSystemDesc
    kind: str  # "weyl", "interval" or "interpolating"
    p: int = 0
    q: int = 0
    psi: FrozenSet[int] = field(default_factory=frozenset)
    m: int = 0

    def __post_init__(self):
        if self.kind not in ("weyl", "interval", "interpolating"):
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.kind == "interval" and self.p > self.q:
            raise ValueError("interval needs p <= q")
        if self.m < 0:
            raise ValueError("m must be nonnegative")
        object.__setattr__(self, "psi", frozenset(self.psi))
        if self.kind == "interpolating" and not order_ideal_check(self.desc, self.psi):
            raise ValueError("not an order ideal")

    @classmethod
    def shi(cls, desc, m: int) -> "FamilySpec":
        return cls(desc, "interval", 1 - m, m, m=m)

    @classmethod
    def catalan(cls, desc, m: int) -> "FamilySpec":
        return cls(desc, "interval", -m, m, m=m)

    @classmethod
    def interpolating(cls, desc, psi, m: int) -> "FamilySpec":
        return cls(desc, "interpolating", psi=frozenset(psi), m=m)

    def interval(self) -> Tuple[int, int]:
        if self.kind == "weyl":
            return 0, 0
        if self.kind == "interpolating":
            return 1 - self.m, self.m
        return self.p, self.q

    def label(self) -> str:
        if self.kind == "weyl":
            return f"{self.desc.name} weyl"
        if self.kind == "interpolating":
            return f"{self.desc.name} interp psi={sorted(self.psi)} m={self.m}"
        p, q = self.p, self.q
        if p == -q:
            return f"{self.desc.name} catalan m={q}"
        if p == 1 - q:
            return f"{self.desc.name} shi m={q}"
        return f"{self.desc.name} [{p},{q}]"


def build_family(f: FamilySpec) -> AffineArrangement:
    d = f.desc
    roots = positive_roots(d)
    p, q = f.interval()
    pairs = []
    for k in range(p, q + 1):
        for r in roots:
            pairs.append((tuple(Fraction(x) for x in r), Fraction(k)))
    if f.kind == "interpolating":
        for i in sorted(f.psi):
            pairs.append((tuple(Fraction(x) for x in roots[i]), Fraction(-f.m)))
    return AffineArrangement(d.ambient, tuple(pairs))


def psi_arrangement(d: RootSystemDesc, psi) -> Arrangement:
    """A(Psi) as a central arrangement in the essential rank-l space."""
    ess, _ = essentialize(weyl_arrangement(d))
    return ess.subarrangement(sorted(psi))


def expected_exponents(f: FamilySpec) -> Tuple[int, ...]:
    """Predicted exponents of the cone of the family, leading 1 included."""
    ed = exponent_data(f.desc)
    h = ed.coxeter
    if f.kind == "interpolating":
        rep = recursive_free(psi_arrangement(f.desc, f.psi))
        if rep.verdict != FREE:
            raise ValueError("A(Psi) not certified free")
        base = rep.exponents
        return (1,) + tuple(sorted(e + f.m * h for e in base))
    p, q = f.interval()
    if p == -q:
        return (1,) + tuple(e + q * h for e in ed.exponents)
    if p == 1 - q:
        return (1,) + (q * h,) * f.desc.rank
    raise ValueError("no exponent prediction for this interval")


def shift_poly(poly: UPoly, c: int) -> UPoly:
    """``poly(t - c)``."""
    out = [0] * (poly.degree() + 1 if not poly.is_zero() else 1)
    for i, a in enumerate(poly.coeffs):
        for j in range(i + 1):
            out[j] += a * comb(i, j) * (-c) ** (i - j)
    return UPoly(out)


@dataclass
class ERReport:
    family: str
    expected: Tuple[int, ...]
    chi: List[int]
    chi_expected: List[int]
    restriction_degrees: Optional[List[int]]
    freeness: FreenessReport
    checks: Dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "status": "PASS" if self.passed else "FAIL",
            "expected_exponents": list(self.expected),
            "exponents": list(_strip_zeros(self.freeness.exponents)) if self.freeness.exponents else None,
            "chi": self.chi,
            "chi_expected": self.chi_expected,
            "restriction_degrees": self.restriction_degrees,
            "checks": self.checks,
            "freeness": self.freeness.to_json(),
        }


def _strip_zeros(exps: Sequence[int]) -> Tuple[int, ...]:
    return tuple(e for e in exps if e != 0)


def verify_er(f: FamilySpec) -> ERReport:
    """Check freeness, exponents, chi and restriction multiexponents of the
    cone of a family against the predicted values."""
    expected = expected_exponents(f)
    c = cone(build_family(f))
    ess, r = essentialize(c)
    hinf = ess.infinity
    chi = char_poly(ess)
    chi_expected = UPoly.from_roots(expected)
    rep = recursive_free(c, hint=expected)
    if r == 3:
        d2, d3, _ = rank2_multi_exponents(restrict(ess, hinf))
        rdeg: Optional[List[int]] = [d2, d3]
    elif rep.certificate is not None:
        rdeg = sorted(rep.certificate.degrees)
    else:
        rdeg = None
    checks = {
        "chi": chi == chi_expected,
        "restriction_multiexponents": rdeg == sorted(expected[1:]),
        "verdict": rep.verdict == FREE and _strip_zeros(rep.exponents) == tuple(sorted(expected)),
    }
    if f.kind == "interpolating":
        chi_psi = char_poly(psi_arrangement(f.desc, f.psi))
        h = exponent_data(f.desc).coxeter
        affine_chi, rem = chi.divmod_monic_linear(1)
        checks["chi_shift"] = rem == 0 and affine_chi == shift_poly(chi_psi, f.m * h)
    return ERReport(f.label(), expected, list(chi.coeffs), list(chi_expected.coeffs), rdeg, rep, checks)
