"""Arrangements, multiarrangements and their basic constructions."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .exact import format_fraction, primitive_integer_vector, rank, rref, to_fraction

Form = Tuple[Fraction, ...]


class ArrangementError(ValueError):
    pass


def normalize_form(vec: Sequence) -> Form:
    """Scale so that the first nonzero coordinate is 1."""
    vec = tuple(to_fraction(v) for v in vec)
    lead = next((v for v in vec if v != 0), None)
    if lead is None:
        raise ArrangementError("the zero vector does not define a hyperplane")
    return tuple(v / lead for v in vec)


@dataclass(frozen=True)
class Arrangement:
    """Central arrangement: hyperplanes ``ker(alpha)`` in K^dim.

    ``infinity`` optionally records the index of the hyperplane at infinity of
    a cone.
    """

    dim: int
    forms: Tuple[Form, ...]
    infinity: Optional[int] = None

    def __post_init__(self):
        forms = tuple(normalize_form(f) for f in self.forms)
        for f in forms:
            if len(f) != self.dim:
                raise ArrangementError(f"form {f} has length {len(f)}, expected {self.dim}")
        if len(set(forms)) != len(forms):
            raise ArrangementError("duplicate hyperplanes")
        object.__setattr__(self, "forms", forms)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], dim: Optional[int] = None, infinity=None):
        rows = [list(r) for r in rows]
        if dim is None:
            if not rows:
                raise ArrangementError("dimension required for an empty arrangement")
            dim = len(rows[0])
        return cls(dim, tuple(tuple(r) for r in rows), infinity)

    def __len__(self):
        return len(self.forms)

    def rank(self) -> int:
        return rank(self.forms) if self.forms else 0

    def is_essential(self) -> bool:
        return self.rank() == self.dim

    def integer_forms(self) -> List[List[int]]:
        return [primitive_integer_vector(f) for f in self.forms]

    def as_multi(self) -> "Multiarrangement":
        return Multiarrangement(self, tuple(1 for _ in self.forms))

    def subarrangement(self, indices: Sequence[int]) -> "Arrangement":
        indices = list(indices)
        inf = indices.index(self.infinity) if self.infinity in indices else None
        return Arrangement(self.dim, tuple(self.forms[i] for i in indices), inf)

    def defining_polynomial(self):
        from .exact import MPoly

        q = MPoly.constant(self.dim, 1)
        for f in self.forms:
            q = q * MPoly.linear_form(f)
        return q


@dataclass(frozen=True)
class Multiarrangement:
    base: Arrangement
    mult: Tuple[int, ...]

    def __post_init__(self):
        mult = tuple(int(k) for k in self.mult)
        if len(mult) != len(self.base.forms):
            raise ArrangementError("multiplicity list does not match the hyperplanes")
        if any(k < 0 for k in mult):
            raise ArrangementError("multiplicities must be nonnegative")
        object.__setattr__(self, "mult", mult)

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def forms(self) -> Tuple[Form, ...]:
        return self.base.forms

    def total(self) -> int:
        return sum(self.mult)

    def rank(self) -> int:
        return self.base.rank()

    def __len__(self):
        return len(self.base.forms)

    def defining_polynomial(self):
        from .exact import MPoly

        q = MPoly.constant(self.dim, 1)
        for f, k in zip(self.forms, self.mult):
            q = q * MPoly.linear_form(f) ** k
        return q


@dataclass(frozen=True)
class AffineArrangement:
    """Affine hyperplanes ``{v : alpha(v) = offset}``."""

    dim: int
    pairs: Tuple[Tuple[Form, Fraction], ...]

    def __post_init__(self):
        pairs = []
        for form, off in self.pairs:
            form = tuple(to_fraction(v) for v in form)
            off = to_fraction(off)
            if len(form) != self.dim:
                raise ArrangementError("form length does not match dimension")
            lead = next((v for v in form if v != 0), None)
            if lead is None:
                raise ArrangementError("zero form")
            pairs.append((tuple(v / lead for v in form), off / lead))
        if len(set(pairs)) != len(pairs):
            raise ArrangementError("duplicate affine hyperplanes")
        object.__setattr__(self, "pairs", tuple(pairs))

    def __len__(self):
        return len(self.pairs)


@dataclass(frozen=True)
class Flat:
    """An element of the intersection lattice.

    ``indices`` is the set of hyperplanes containing the subspace and
    ``basis`` spans the subspace (integer vectors).
    """

    dim: int
    indices: FrozenSet[int]
    basis: Tuple[Tuple[int, ...], ...] = field(compare=False)
    ambient: int = field(compare=False, default=0)

    @property
    def codim(self) -> int:
        return self.ambient - self.dim

    def canonical_basis(self) -> List[List[Fraction]]:
        """Reduced row echelon basis of the subspace (canonical)."""
        rows, _ = rref(self.basis) if self.basis else ([], [])
        return rows

    def contains_vector(self, v: Sequence) -> bool:
        if not self.basis:
            return all(x == 0 for x in v)
        return rank(list(self.basis) + [list(v)]) == len(self.basis)


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def cone(a: AffineArrangement) -> Arrangement:
    """Homogenize ``alpha = c`` to ``alpha - c*x0``; x0 is coordinate 0.

    The hyperplane ``x0 = 0`` comes first (index 0) and is recorded as
    ``infinity``, so the default restriction hyperplane of a cone is H_inf.
    """
    forms = [(Fraction(1),) + (Fraction(0),) * a.dim]
    forms += [(-off,) + tuple(form) for form, off in a.pairs]
    normalized = [normalize_form(f) for f in forms]
    assert len(set(normalized)) == len(normalized), "coning produced duplicate hyperplanes"
    return Arrangement(a.dim + 1, tuple(forms), infinity=0)


def flat_of(a: Arrangement, indices: Sequence[int]) -> Flat:
    """The flat cut out by the given hyperplanes (closure included)."""
    from .exact import kernel_basis

    indices = list(indices)
    if indices:
        kb = kernel_basis([a.forms[i] for i in indices], a.dim)
    else:
        kb = [[Fraction(int(i == j)) for i in range(a.dim)] for j in range(a.dim)]
    basis = tuple(tuple(primitive_integer_vector(v)) for v in kb)
    contained = frozenset(
        i for i, f in enumerate(a.forms) if all(sum(x * y for x, y in zip(f, v)) == 0 for v in basis)
    )
    return Flat(len(basis), contained, basis, a.dim)


def localize(a, X: Flat):
    """Hyperplanes (with multiplicities) containing the flat ``X``."""
    base = a.base if isinstance(a, Multiarrangement) else a
    for i in X.indices:
        if i >= len(base.forms):
            raise ArrangementError("flat does not belong to this arrangement")
    if X.basis:
        ok = frozenset(
            i for i, f in enumerate(base.forms)
            if all(sum(x * y for x, y in zip(f, v)) == 0 for v in X.basis)
        )
    else:
        ok = frozenset(range(len(base.forms)))
    if ok != X.indices:
        raise ArrangementError("X is not an intersection of hyperplanes of the arrangement")
    idx = sorted(X.indices)
    sub = base.subarrangement(idx)
    if isinstance(a, Multiarrangement):
        return Multiarrangement(sub, tuple(a.mult[i] for i in idx))
    return sub


def restriction_pivot(form: Form) -> int:
    return next(i for i, v in enumerate(form) if v != 0)


def restrict_form(form: Sequence[Fraction], alpha: Form) -> Tuple[Fraction, ...]:
    """Restrict a linear form to ``ker(alpha)``.

    Coordinates on the hyperplane are the original ones with the pivot
    coordinate of ``alpha`` dropped; the pivot coordinate is eliminated via
    ``z_p = -sum_{j != p} alpha_j z_j`` (alpha is normalized, alpha_p = 1).
    """
    p = restriction_pivot(alpha)
    bp = form[p]
    return tuple(form[j] - bp * alpha[j] for j in range(len(form)) if j != p)


def restrict(a: Arrangement, h: int) -> Multiarrangement:
    """Ziegler restriction of ``a`` to hyperplane ``h``."""
    if not 0 <= h < len(a.forms):
        raise IndexError(f"hyperplane index {h} out of range")
    alpha = a.forms[h]
    order: List[Form] = []
    counts: Dict[Form, int] = {}
    for i, f in enumerate(a.forms):
        if i == h:
            continue
        g = normalize_form(restrict_form(f, alpha))
        if g not in counts:
            order.append(g)
            counts[g] = 0
        counts[g] += 1
    base = Arrangement(a.dim - 1, tuple(order))
    return Multiarrangement(base, tuple(counts[g] for g in order))


def restriction_sources(a: Arrangement, h: int) -> List[List[int]]:
    """For each hyperplane of ``restrict(a, h)``, the indices mapping onto it."""
    alpha = a.forms[h]
    order: List[Form] = []
    groups: Dict[Form, List[int]] = {}
    for i, f in enumerate(a.forms):
        if i == h:
            continue
        g = normalize_form(restrict_form(f, alpha))
        if g not in groups:
            order.append(g)
            groups[g] = []
        groups[g].append(i)
    return [groups[g] for g in order]


def essentialize(a):
    """Quotient by the common intersection; returns ``(essential, rank)``.

    The new coordinates are the reduced-echelon basis of the span of the
    forms, so each form is replaced by its pivot-column entries.
    """
    base = a.base if isinstance(a, Multiarrangement) else a
    if not base.forms:
        ess = Arrangement(0, ())
        return (Multiarrangement(ess, ()) if isinstance(a, Multiarrangement) else ess), 0
    _, pivots = rref(base.forms)
    r = len(pivots)
    if r == base.dim:
        return a, r
    forms = tuple(tuple(f[p] for p in pivots) for f in base.forms)
    ess = Arrangement(r, forms, base.infinity)
    if isinstance(a, Multiarrangement):
        return Multiarrangement(ess, a.mult), r
    return ess, r


def decompose_indices(forms: Sequence[Sequence]) -> List[List[int]]:
    """Connected components of the linear matroid on ``forms``.

    Uses fundamental circuits with respect to a greedy basis: a non-basis
    element is joined to every basis element appearing in its expansion.
    """
    n = len(forms)
    if n == 0:
        return []
    basis: List[int] = []
    for i in range(n):
        if rank([forms[j] for j in basis + [i]]) == len(basis) + 1:
            basis.append(i)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    from .exact import kernel_basis

    bmat = [forms[j] for j in basis]
    for i in range(n):
        if i in basis:
            continue
        # coefficients c with sum c_j b_j = forms[i]: kernel of [B; f]^T
        cols = [[bmat[r][c] for r in range(len(basis))] + [forms[i][c]] for c in range(len(forms[i]))]
        kb = kernel_basis(cols, len(basis) + 1)
        assert len(kb) == 1
        v = kb[0]
        for r, j in enumerate(basis):
            if v[r] != 0:
                parent[find(j)] = find(i)
    comps: Dict[int, List[int]] = {}
    for i in range(n):
        comps.setdefault(find(i), []).append(i)
    return sorted(comps.values())


def decompose(a) -> list:
    """Irreducible direct summands, each essentialized in its own span."""
    base = a.base if isinstance(a, Multiarrangement) else a
    pieces = []
    for group in decompose_indices(base.forms):
        sub = base.subarrangement(group)
        if isinstance(a, Multiarrangement):
            sub = Multiarrangement(sub, tuple(a.mult[i] for i in group))
        pieces.append(essentialize(sub)[0])
    return pieces


def direct_sum(*parts: Arrangement) -> Arrangement:
    dim = sum(p.dim for p in parts)
    forms = []
    off = 0
    for p in parts:
        for f in p.forms:
            forms.append((Fraction(0),) * off + tuple(f) + (Fraction(0),) * (dim - off - p.dim))
        off += p.dim
    return Arrangement(dim, tuple(forms))


def change_coordinates(a, matrix: Sequence[Sequence]):
    """Pull back forms along ``z = matrix * w`` (forms become ``alpha * matrix``)."""
    base = a.base if isinstance(a, Multiarrangement) else a
    M = [[to_fraction(v) for v in row] for row in matrix]
    forms = tuple(
        tuple(sum(f[i] * M[i][j] for i in range(base.dim)) for j in range(base.dim)) for f in base.forms
    )
    new = Arrangement(base.dim, forms, base.infinity)
    if isinstance(a, Multiarrangement):
        return Multiarrangement(new, a.mult)
    return new


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

def parse_arrangement(text: str):
    """Parse the line-oriented arrangement format.

    First line ``dim <l>``; then one hyperplane per line, ``c_1 ... c_l``,
    optionally followed by ``| <mult>`` (multiarrangement) or ``= <offset>``
    (affine).  ``#`` starts a comment.
    """
    dim = None
    rows, mults, offsets = [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if dim is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "dim":
                raise ArrangementError(f"line {lineno}: expected 'dim <l>'")
            try:
                dim = int(parts[1])
            except ValueError:
                raise ArrangementError(f"line {lineno}: bad dimension {parts[1]!r}") from None
            if dim < 0:
                raise ArrangementError(f"line {lineno}: negative dimension")
            continue
        mult = offset = None
        if "|" in line:
            line, rest = line.split("|", 1)
            try:
                mult = int(rest.strip())
            except ValueError:
                raise ArrangementError(f"line {lineno}: bad multiplicity {rest.strip()!r}") from None
            if mult < 0:
                raise ArrangementError(f"line {lineno}: negative multiplicity")
        if "=" in line:
            line, rest = line.split("=", 1)
            try:
                offset = Fraction(rest.strip())
            except ValueError:
                raise ArrangementError(f"line {lineno}: bad offset {rest.strip()!r}") from None
        try:
            coeffs = [Fraction(tok) for tok in line.split()]
        except (ValueError, ZeroDivisionError):
            raise ArrangementError(f"line {lineno}: bad coefficient in {raw.strip()!r}") from None
        if len(coeffs) != dim:
            raise ArrangementError(f"line {lineno}: expected {dim} coefficients, got {len(coeffs)}")
        if all(c == 0 for c in coeffs):
            raise ArrangementError(f"line {lineno}: zero form")
        rows.append((lineno, coeffs))
        mults.append(mult)
        offsets.append(offset)
    if dim is None:
        raise ArrangementError("empty input: missing 'dim' line")
    is_affine = any(o is not None for o in offsets)
    is_multi = any(m is not None for m in mults)
    if is_affine and is_multi:
        raise ArrangementError("affine arrangements cannot carry multiplicities")
    seen: Dict[object, int] = {}
    for (lineno, coeffs), off in zip(rows, offsets):
        lead = next(c for c in coeffs if c != 0)
        key = tuple(c / lead for c in coeffs)
        if is_affine:
            key = (key, (off or Fraction(0)) / lead)
        if key in seen:
            raise ArrangementError(f"line {lineno}: duplicate of hyperplane on line {seen[key]}")
        seen[key] = lineno
    if is_affine:
        return AffineArrangement(dim, tuple((tuple(c), o or Fraction(0)) for (_, c), o in zip(rows, offsets)))
    base = Arrangement(dim, tuple(tuple(c) for _, c in rows))
    if is_multi:
        return Multiarrangement(base, tuple(1 if m is None else m for m in mults))
    return base


def format_arrangement(a) -> str:
    lines = []
    if isinstance(a, AffineArrangement):
        lines.append(f"dim {a.dim}")
        for form, off in a.pairs:
            lines.append(" ".join(format_fraction(c) for c in form) + f" = {format_fraction(off)}")
    elif isinstance(a, Multiarrangement):
        lines.append(f"dim {a.dim}")
        for form, k in zip(a.forms, a.mult):
            lines.append(" ".join(format_fraction(c) for c in form) + f" | {k}")
    else:
        lines.append(f"dim {a.dim}")
        for i, form in enumerate(a.forms):
            line = " ".join(format_fraction(c) for c in form)
            if a.infinity == i:
                line += "  # H_inf"
            lines.append(line)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Small standard examples
# ---------------------------------------------------------------------------

def boolean(n: int) -> Arrangement:
    return Arrangement(n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def stanley_affine() -> AffineArrangement:
    """Five concurrent lines through the origin plus the generic line y = 1."""
    lines = [((-1, 1), 0), ((1, 1), 0), ((-2, 1), 0), ((2, 1), 0), ((1, 0), 0), ((0, 1), 1)]
    return AffineArrangement(2, tuple((tuple(Fraction(c) for c in f), Fraction(o)) for f, o in lines))


def stanley_cone() -> Arrangement:
    return cone(stanley_affine())
