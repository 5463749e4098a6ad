"""Exact arithmetic substrate.

Scalars are :class:`fractions.Fraction`.  This module provides sparse
multivariate polynomials over Q, integer polynomials in ``t``, rational
functions in ``x`` with coefficients in Z[t] (for Hilbert series limits), and
fraction-free linear algebra (rank, kernel) over Q.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import gcd, lcm
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

try:
    import flint
except ImportError:  # pragma: no cover - exercised only without python-flint
    flint = None

Scalar = Fraction
Exponent = Tuple[int, ...]


def to_fraction(value) -> Fraction:
    """Parse ints, Fractions and strings like ``'3'`` or ``'-2/5'``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not an exact scalar: {value!r}")


def format_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def primitive_integer_vector(vec: Sequence[Fraction]) -> List[int]:
    """Scale ``vec`` to a primitive integer vector (same sign)."""
    den = lcm(*(Fraction(v).denominator for v in vec)) if vec else 1
    ints = [int(Fraction(v) * den) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g > 1:
        ints = [v // g for v in ints]
    return ints


# ---------------------------------------------------------------------------
# Linear algebra over Q
# ---------------------------------------------------------------------------

def _integer_rows(M: Sequence[Sequence]) -> List[List[int]]:
    rows = []
    for row in M:
        row = [to_fraction(v) for v in row]
        den = lcm(*(v.denominator for v in row)) if row else 1
        rows.append([int(v * den) for v in row])
    return rows


def _bareiss_echelon(rows: List[List[int]], ncols: int) -> Tuple[List[List[int]], List[int]]:
    """Fraction-free row echelon form.  Returns (nonzero rows, pivot columns)."""
    rows = [list(r) for r in rows]
    pivots: List[int] = []
    r = 0
    prev = 1
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        p = pr[c]
        for i in range(r + 1, nrows):
            ri = rows[i]
            f = ri[c]
            if f == 0:
                if p != prev:
                    rows[i] = [(p * x) // prev for x in ri]
                continue
            rows[i] = [(p * x - f * y) // prev for x, y in zip(ri, pr)]
        prev = p
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rank(M: Sequence[Sequence]) -> int:
    """Rank over Q."""
    if not M:
        return 0
    ncols = len(M[0])
    _, pivots = _bareiss_echelon(_integer_rows(M), ncols)
    return len(pivots)


def kernel_basis(M: Sequence[Sequence], ncols: int | None = None) -> List[List[Fraction]]:
    """Basis of the right null space ``{v : M v = 0}``.

    The basis is the canonical one attached to the reduced echelon form: one
    vector per free column, with a 1 in that column and 0 in the other free
    columns.
    """
    if ncols is None:
        if not M:
            raise ValueError("ncols required for a matrix with no rows")
        ncols = len(M[0])
    if not M:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    ech, pivots = _bareiss_echelon(_integer_rows(M), ncols)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r in range(len(pivots) - 1, -1, -1):
            c = pivots[r]
            row = ech[r]
            s = sum((row[j] * x[j] for j in range(c + 1, ncols) if row[j] and x[j]), Fraction(0))
            x[c] = -s / row[c]
        basis.append(x)
    return basis


def rref(M: Sequence[Sequence]) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form of the row space (nonzero rows only)."""
    if not M:
        return [], []
    ncols = len(M[0])
    ech, pivots = _bareiss_echelon(_integer_rows(M), ncols)
    rows = [[Fraction(v) for v in row] for row in ech]
    for r in range(len(pivots) - 1, -1, -1):
        c = pivots[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(r):
            f = rows[i][c]
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
    return rows, pivots


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> List[List]:
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def det(M: Sequence[Sequence]) -> Fraction:
    n = len(M)
    if n == 0:
        return Fraction(1)
    rows = [[to_fraction(v) for v in r] for r in M]
    sign = 1
    out = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            rows[c], rows[piv] = rows[piv], rows[c]
            sign = -sign
        p = rows[c][c]
        out *= p
        for i in range(c + 1, n):
            f = rows[i][c] / p
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return sign * out


# Large graded systems go through FLINT's fraction-free integer routines.
# Both back ends agree on rank; the kernel is only needed up to span.

def int_matrix_rank(rows: List[List[int]], ncols: int) -> int:
    if not rows or ncols == 0:
        return 0
    if flint is not None:
        M = flint.fmpz_mat(rows)
        # FLINT is markedly faster on tall matrices
        return (M.transpose() if len(rows) < ncols else M).rank()
    return len(_bareiss_echelon(rows, ncols)[1])


def int_nullspace(rows: List[List[int]], ncols: int) -> List[List[int]]:
    """Integer basis (as columns turned into lists) of the null space."""
    if not rows:
        return [[int(i == j) for i in range(ncols)] for j in range(ncols)]
    if flint is not None:
        X, n = flint.fmpz_mat(rows).nullspace()
        cols = [[int(X[i, j]) for i in range(ncols)] for j in range(n)]
        return cols
    out = []
    for v in kernel_basis(rows, ncols):
        den = lcm(*(q.denominator for q in v))
        out.append([int(q * den) for q in v])
    return out


# ---------------------------------------------------------------------------
# Monomials
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def monomials(nvars: int, degree: int) -> Tuple[Exponent, ...]:
    """Exponent vectors of total degree ``degree``, graded-lex descending."""
    if degree < 0:
        return ()
    if nvars == 0:
        return ((),) if degree == 0 else ()
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(nvars: int, degree: int) -> Dict[Exponent, int]:
    return {e: i for i, e in enumerate(monomials(nvars, degree))}


# ---------------------------------------------------------------------------
# Sparse multivariate polynomials
# ---------------------------------------------------------------------------

class MPoly:
    """Sparse polynomial over Q in a fixed number of variables."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None):
        self.nvars = nvars
        clean: Dict[Exponent, Fraction] = {}
        if terms:
            for e, c in terms.items():
                c = to_fraction(c)
                if c:
                    if len(e) != nvars:
                        raise ValueError("exponent length does not match nvars")
                    clean[tuple(e)] = clean.get(tuple(e), Fraction(0)) + c
            clean = {e: c for e, c in clean.items() if c}
        self.terms = clean

    @classmethod
    def constant(cls, nvars: int, c) -> "MPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "MPoly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def linear_form(cls, coeffs: Sequence) -> "MPoly":
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = c
        return cls(n, terms)

    @classmethod
    def from_vector(cls, nvars: int, degree: int, vec: Sequence) -> "MPoly":
        return cls(nvars, dict(zip(monomials(nvars, degree), vec)))

    def to_vector(self, degree: int) -> List[Fraction]:
        idx = monomial_index(self.nvars, degree)
        out = [Fraction(0)] * len(idx)
        for e, c in self.terms.items():
            if sum(e) != degree:
                raise ValueError("polynomial is not homogeneous of the requested degree")
            out[idx[e]] = c
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def _check(self, other: "MPoly"):
        if self.nvars != other.nvars:
            raise ValueError("polynomials live in different rings")

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            self._check(other)
            return other
        return MPoly.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return MPoly(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            c = to_fraction(other)
            return MPoly(self.nvars, {e: c * v for e, v in self.terms.items()})
        self._check(other)
        terms: Dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return MPoly(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = MPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, MPoly):
            try:
                other = MPoly.constant(self.nvars, other)
            except TypeError:
                return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def diff(self, i: int) -> "MPoly":
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                terms[tuple(f)] = c * e[i]
        return MPoly(self.nvars, terms)

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        pt = [to_fraction(v) for v in point]
        for e, c in self.terms.items():
            term = c
            for v, k in zip(pt, e):
                if k:
                    term *= v ** k
            total += term
        return total

    def substitute_linear(self, images: Sequence["MPoly"]) -> "MPoly":
        """Substitute variable ``i`` by the polynomial ``images[i]``."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        n = images[0].nvars if images else 0
        out = MPoly(n)
        cache: Dict[Tuple[int, int], MPoly] = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = images[i] ** k
            return cache[key]

        for e, c in self.terms.items():
            term = MPoly.constant(n, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            out = out + term
        return out

    def leading(self) -> Tuple[Exponent, Fraction]:
        e = max(self.terms, key=lambda x: (sum(x), x))
        return e, self.terms[e]

    def scalar_ratio(self, other: "MPoly") -> Fraction | None:
        """Return ``c`` with ``self == c * other`` or None."""
        self._check(other)
        if other.is_zero():
            return Fraction(0) if self.is_zero() else None
        e, c0 = other.leading()
        c = self.terms.get(e, Fraction(0)) / c0
        return c if self == other * c else None

    def __repr__(self):
        return f"MPoly({self.nvars}, {self.format()!r})"

    def format(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        if names is None:
            names = [f"z{i + 1}" for i in range(self.nvars)]
        parts = []
        for e in sorted(self.terms, key=lambda x: (sum(x), x), reverse=True):
            c = self.terms[e]
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            if not mono:
                parts.append(format_fraction(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{format_fraction(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def poly_det(M: Sequence[Sequence[MPoly]]) -> MPoly:
    """Determinant of a square matrix of polynomials (Laplace over minors)."""
    n = len(M)
    if n == 0:
        raise ValueError("empty matrix")
    nv = M[0][0].nvars
    # minors[cols] = det of rows[n-len(cols):] restricted to cols
    minors: Dict[Tuple[int, ...], MPoly] = {(c,): M[n - 1][c] for c in range(n)}
    for size in range(2, n + 1):
        row = M[n - size]
        nxt: Dict[Tuple[int, ...], MPoly] = {}
        for cols in _subsets(n, size):
            acc = MPoly(nv)
            for pos, c in enumerate(cols):
                if row[c].is_zero():
                    continue
                rest = cols[:pos] + cols[pos + 1:]
                sub = minors[rest]
                if sub.is_zero():
                    continue
                term = row[c] * sub
                acc = acc - term if pos % 2 else acc + term
            nxt[cols] = acc
        minors = nxt
    return minors[tuple(range(n))]


def _subsets(n: int, k: int):
    from itertools import combinations

    return combinations(range(n), k)


# ---------------------------------------------------------------------------
# Integer polynomials in t
# ---------------------------------------------------------------------------

class UPoly:
    """Univariate polynomial in ``t`` with integer coefficients, low to high."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def from_roots(cls, roots: Iterable[int]) -> "UPoly":
        out = cls([1])
        for r in roots:
            out = out * cls([-r, 1])
        return out

    @classmethod
    def t(cls) -> "UPoly":
        return cls([0, 1])

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def _coerce(self, other):
        return other if isinstance(other, UPoly) else UPoly([other])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UPoly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return UPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return UPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return UPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = UPoly([1])
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = UPoly([other])
        if not isinstance(other, UPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, t):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def divmod_monic_linear(self, r: int) -> Tuple["UPoly", int]:
        """Synthetic division by ``t - r``."""
        if self.is_zero():
            return UPoly(), 0
        out = []
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * r + c
            out.append(acc)
        rem = out.pop()
        return UPoly(reversed(out)), rem

    def exact_div(self, other: "UPoly") -> "UPoly":
        """Exact division; raises ``ArithmeticError`` when inexact."""
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        num = list(self.coeffs)
        dl = other.coeffs[-1]
        q = [0] * max(len(num) - len(other.coeffs) + 1, 0)
        for i in range(len(q) - 1, -1, -1):
            c = num[i + len(other.coeffs) - 1]
            if c % dl:
                raise ArithmeticError("inexact polynomial division")
            c //= dl
            q[i] = c
            for j, b in enumerate(other.coeffs):
                num[i + j] -= c * b
        if any(num):
            raise ArithmeticError("inexact polynomial division")
        return UPoly(q)

    def __repr__(self):
        return f"UPoly({list(self.coeffs)})"

    def format(self, var: str = "t") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if mono and abs(c) == 1:
                parts.append(("-" if c < 0 else "+") + mono)
            else:
                parts.append(f"{'-' if c < 0 else '+'}{abs(c)}{'*' + mono if mono else ''}")
        s = " ".join(parts)
        return s[1:] if s.startswith("+") else s


def integer_roots(p: UPoly) -> List[int]:
    """All integer roots of a monic integer polynomial, with multiplicity."""
    if p.is_zero() or p.coeffs[-1] != 1:
        raise ValueError("integer_roots requires a monic polynomial over Z")
    roots: List[int] = []
    cur = p
    while cur.degree() > 0:
        if cur[0] == 0:
            roots.append(0)
            cur = UPoly(cur.coeffs[1:])
            continue
        found = None
        for d in _divisors(abs(cur[0])):
            for r in (d, -d):
                if cur(r) == 0:
                    found = r
                    break
            if found is not None:
                break
        if found is None:
            break
        cur, rem = cur.divmod_monic_linear(found)
        assert rem == 0
        roots.append(found)
    return sorted(roots)


def _divisors(n: int) -> List[int]:
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


# ---------------------------------------------------------------------------
# Rational functions in x over Z[t]
# ---------------------------------------------------------------------------

LaurentX = Dict[int, UPoly]


def _lx_clean(p: Mapping[int, UPoly]) -> LaurentX:
    return {k: v for k, v in p.items() if not v.is_zero()}


def _lx_at_one(p: LaurentX) -> UPoly:
    acc = UPoly()
    for v in p.values():
        acc = acc + v
    return acc


def _lx_div_one_minus_x(p: LaurentX) -> LaurentX:
    """Divide a Laurent polynomial in x vanishing at x=1 by (1 - x)."""
    if not p:
        return {}
    lo, hi = min(p), max(p)
    # p = (1 - x) q  =>  q_k = q_{k-1} + p_k, accumulated from the low end
    q: Dict[int, UPoly] = {}
    acc = UPoly()
    for k in range(lo, hi):
        acc = acc + p.get(k, UPoly())
        q[k] = acc
    if not (acc + p.get(hi, UPoly())).is_zero():
        raise ArithmeticError("not divisible by (1 - x)")
    return _lx_clean(q)


def _lx_mul(a: LaurentX, b: LaurentX) -> LaurentX:
    out: Dict[int, UPoly] = {}
    for i, u in a.items():
        for j, v in b.items():
            out[i + j] = out.get(i + j, UPoly()) + u * v
    return _lx_clean(out)


def _lx_add(a: LaurentX, b: LaurentX) -> LaurentX:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, UPoly()) + v
    return _lx_clean(out)


class RatFuncX:
    """Quotient of Laurent polynomials in ``x`` with coefficients in Z[t]."""

    __slots__ = ("num", "den")

    def __init__(self, num: Mapping[int, UPoly], den: Mapping[int, UPoly]):
        num = _lx_clean({k: v if isinstance(v, UPoly) else UPoly([v]) for k, v in num.items()})
        den = _lx_clean({k: v if isinstance(v, UPoly) else UPoly([v]) for k, v in den.items()})
        if not den:
            raise ZeroDivisionError("zero denominator")
        while num and not _lx_at_one(num).coeffs and not _lx_at_one(den).coeffs:
            num = _lx_div_one_minus_x(num)
            den = _lx_div_one_minus_x(den)
        self.num = num
        self.den = den

    @staticmethod
    def one_minus_x_power(k: int) -> LaurentX:
        out: LaurentX = {0: UPoly([1])}
        for _ in range(k):
            out = _lx_mul(out, {0: UPoly([1]), 1: UPoly([-1])})
        return out

    def __add__(self, other: "RatFuncX") -> "RatFuncX":
        if self.den == other.den:
            return RatFuncX(_lx_add(self.num, other.num), self.den)
        return RatFuncX(
            _lx_add(_lx_mul(self.num, other.den), _lx_mul(other.num, self.den)),
            _lx_mul(self.den, other.den),
        )

    def __mul__(self, other: "RatFuncX") -> "RatFuncX":
        return RatFuncX(_lx_mul(self.num, other.num), _lx_mul(self.den, other.den))

    def series(self, upto: int) -> Dict[int, UPoly]:
        """Laurent expansion at x=0 up to and including ``x**upto``.

        Requires the lowest-order denominator coefficient to be +-1.
        """
        lo_d = min(self.den)
        d0 = self.den[lo_d]
        if d0.coeffs not in ((1,), (-1,)):
            raise ArithmeticError("series expansion needs a unit leading denominator term")
        sign = d0.coeffs[0]
        lo_n = min(self.num) if self.num else 0
        shift = lo_n - lo_d
        out: Dict[int, UPoly] = {}
        rem = dict(self.num)
        for k in range(shift, upto + 1):
            c = rem.get(k + lo_d, UPoly()) * sign
            if not c.is_zero():
                out[k] = c
                for j, v in self.den.items():
                    idx = k + j
                    rem[idx] = rem.get(idx, UPoly()) - c * v
        return out

    def __repr__(self):
        return f"RatFuncX(num={self.num!r}, den={self.den!r})"


def limit_x_to_1(f: RatFuncX) -> UPoly:
    """Value at x = 1 as a polynomial in t, after cancelling (1 - x) factors."""
    den1 = _lx_at_one(f.den)
    if den1.is_zero():
        raise ZeroDivisionError("pole at x=1")
    num1 = _lx_at_one(f.num)
    return num1.exact_div(den1)
