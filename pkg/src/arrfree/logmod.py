"""Graded pieces of logarithmic derivation and form modules.

Everything is reduced to exact linear algebra on coefficient vectors.  A
divisibility condition ``alpha^k | P`` is linearized by expanding ``P`` in the
coordinate ``w1 = alpha`` (the pivot coordinate ``z_p`` of the normalized form
is traded for ``w1``; the other coordinates are kept): the coefficient of
``w1^j`` is ``(d/dz_p)^j P / j!`` restricted to ``alpha = 0``, and the first
``k`` of them must vanish.

Forms are stored by their polynomial numerators ``eta`` with
``omega = eta / Q(A, k)``; ``deg omega = deg eta - |k|``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from . import exact
from .arr import Arrangement, Multiarrangement, normalize_form, restrict, restrict_form, restriction_pivot
from .exact import MPoly, monomial_index, monomials

SEED = 20240601
RETRIES = 5


class CertificateError(ValueError):
    pass


def _as_multi(m) -> Multiarrangement:
    return m.as_multi() if isinstance(m, Arrangement) else m


# ---------------------------------------------------------------------------
# Linear maps on homogeneous pieces
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4096)
def _linear_power(coeffs: Tuple[int, ...], k: int) -> Dict[Tuple[int, ...], int]:
    """Coefficients of ``(sum c_i y_i)^k`` as a dict over exponents."""
    n = len(coeffs)
    out = {(0,) * n: 1}
    for _ in range(k):
        nxt: Dict[Tuple[int, ...], int] = {}
        for e, c in out.items():
            for i, a in enumerate(coeffs):
                if a:
                    f = e[:i] + (e[i] + 1,) + e[i + 1:]
                    nxt[f] = nxt.get(f, 0) + c * a
        out = nxt
    return out


def _int_form(alpha: Sequence[Fraction]) -> Tuple[int, ...]:
    return tuple(exact.primitive_integer_vector(alpha))


@lru_cache(maxsize=4096)
def restriction_operator(alpha: Tuple[int, ...], degree: int, order: int) -> Tuple[Tuple[int, ...], ...]:
    """Integer matrix of ``P -> a_p^(degree-order) (d/dz_p)^order P |_{alpha=0}``.

    ``alpha`` is a primitive integer form with pivot ``p`` (first nonzero
    coordinate); on the hyperplane ``z_p = -sum_{j != p} a_j z_j / a_p``.
    Rows are indexed by monomials of degree ``degree - order`` in the other
    ``n - 1`` coordinates, columns by monomials of degree ``degree``.  The
    scalar factors (``a_p`` powers, ``1/order!``) do not affect kernels.
    """
    n = len(alpha)
    p = restriction_pivot(alpha)
    ap = alpha[p]
    sub = tuple(-alpha[j] for j in range(n) if j != p)
    out_deg = degree - order
    if out_deg < 0:
        return ()
    rows_idx = monomial_index(n - 1, out_deg)
    cols = monomials(n, degree)
    mat = [[0] * len(cols) for _ in range(len(rows_idx))]
    for c, e in enumerate(cols):
        ep = e[p]
        if ep < order:
            continue
        factor = 1
        for t in range(order):
            factor *= ep - t
        rest = tuple(e[j] for j in range(n) if j != p)
        factor *= ap ** sum(rest)
        for f, coef in _linear_power(sub, ep - order).items():
            g = tuple(a + b for a, b in zip(rest, f))
            mat[rows_idx[g]][c] += factor * coef
    return tuple(tuple(r) for r in mat)


def _complement_basis_minor(alpha: Tuple[int, ...], J: Tuple[int, ...], I: Tuple[int, ...]) -> int:
    """``det B[J, I]`` where column ``i`` of B is ``a_p e_i - a_i e_p``."""
    p = restriction_pivot(alpha)
    sub = []
    for j in J:
        row = []
        for i in I:
            v = alpha[p] * int(i == j)
            if j == p:
                v -= alpha[i]
            row.append(v)
        sub.append(row)
    return int(exact.det(sub)) if sub else 1


def _block_rows(coeffs: Sequence[int], R: Sequence[Sequence[int]], N: int) -> List[List[int]]:
    zero = [0] * N
    rows = []
    for r in R:
        row: List[int] = []
        for c in coeffs:
            row.extend([c * v for v in r] if c else zero)
        if any(row):
            rows.append(row)
    return rows


def subsets(n: int, p: int) -> List[Tuple[int, ...]]:
    return list(combinations(range(n), p))


# ---------------------------------------------------------------------------
# Constraint systems
# ---------------------------------------------------------------------------

def derivation_constraints(m, d: int) -> Tuple[List[List[int]], int]:
    """Integer constraint matrix for ``D(A,k)_d`` and its column count.

    Unknowns: coefficients of ``p_1, ..., p_n`` (each in ``S_d``), stacked.
    """
    m = _as_multi(m)
    n = m.dim
    N = len(monomials(n, d))
    rows: List[List[int]] = []
    for form, k in zip(m.forms, m.mult):
        alpha = _int_form(form)
        for j in range(min(k, d + 1)):
            rows.extend(_block_rows(alpha, restriction_operator(alpha, d, j), N))
    return rows, n * N


def form_constraints(m, p: int, d: int) -> Tuple[List[List[int]], int]:
    """Integer constraint matrix for numerators of ``Omega^p(A,k)_d``.

    Unknowns: coefficients of ``f_J`` (``J`` a p-subset, lexicographic),
    each of degree ``d + |k|``.
    """
    m = _as_multi(m)
    n = m.dim
    deg = d + m.total()
    if deg < 0:
        return [], 0
    Js = subsets(n, p)
    N = len(monomials(n, deg))
    rows: List[List[int]] = []
    for form, k in zip(m.forms, m.mult):
        alpha = _int_form(form)
        piv = restriction_pivot(alpha)
        others = [i for i in range(n) if i != piv]
        for I in combinations(others, p):
            coeffs = [_complement_basis_minor(alpha, J, I) for J in Js]
            for j in range(min(k, deg + 1)):
                rows.extend(_block_rows(coeffs, restriction_operator(alpha, deg, j), N))
    return rows, len(Js) * N


def _null_dim(rows, ncols) -> int:
    return ncols - exact.int_matrix_rank(rows, ncols)


# ---------------------------------------------------------------------------
# Graded bases
# ---------------------------------------------------------------------------

@dataclass
class GradedBasis:
    """Basis of a homogeneous piece.

    ``kind`` is ``'derivation'`` (components ``p_i`` of ``sum p_i d/dz_i``) or
    ``'form'`` (components ``f_J`` of the numerator, ``J`` over p-subsets).
    """

    kind: str
    degree: int
    nvars: int
    p: Optional[int]
    elements: List[Tuple[MPoly, ...]]
    vectors: List[List[int]] = field(repr=False, default_factory=list)

    def __len__(self):
        return len(self.elements)

    @property
    def dimension(self) -> int:
        return len(self.elements)


def _split_vector(vec: Sequence[int], nvars: int, pieces: int, degree: int) -> Tuple[MPoly, ...]:
    N = len(monomials(nvars, degree))
    return tuple(MPoly.from_vector(nvars, degree, vec[i * N:(i + 1) * N]) for i in range(pieces))


def derivation_space(m, d: int) -> GradedBasis:
    """Basis of ``D(A,k)_d``: derivations whose coefficients have degree d."""
    m = _as_multi(m)
    n = m.dim
    if d < 0:
        return GradedBasis("derivation", d, n, None, [], [])
    rows, ncols = derivation_constraints(m, d)
    vecs = exact.int_nullspace(rows, ncols)
    elems = [_split_vector(v, n, n, d) for v in vecs]
    return GradedBasis("derivation", d, n, None, elems, vecs)


def derivation_dim(m, d: int) -> int:
    if d < 0:
        return 0
    rows, ncols = derivation_constraints(_as_multi(m), d)
    return _null_dim(rows, ncols)


def omega_space(m, p: int, d: int) -> GradedBasis:
    """Basis of numerators of ``Omega^p(A,k)_d``."""
    m = _as_multi(m)
    n = m.dim
    if not 0 <= p <= n:
        raise ValueError("form degree out of range")
    deg = d + m.total()
    if deg < 0:
        return GradedBasis("form", d, n, p, [], [])
    rows, ncols = form_constraints(m, p, deg - m.total())
    vecs = exact.int_nullspace(rows, ncols)
    elems = [_split_vector(v, n, len(subsets(n, p)), deg) for v in vecs]
    return GradedBasis("form", d, n, p, elems, vecs)


def omega_dim(m, p: int, d: int) -> int:
    m = _as_multi(m)
    if d + m.total() < 0:
        return 0
    ncols = comb(m.dim, p) * len(monomials(m.dim, d + m.total()))
    return ncols - _form_constraint_rank(m.dim, m.forms, m.mult, p, d)


# ---------------------------------------------------------------------------
# Restriction of forms to a hyperplane
# ---------------------------------------------------------------------------

def _restriction_scalar(a: Arrangement, h: int) -> Fraction:
    """``c`` with ``prod_{H != h} alpha_H|_h = Q(A^h, k) / c``."""
    alpha = a.forms[h]
    prod = Fraction(1)
    for i, f in enumerate(a.forms):
        if i == h:
            continue
        g = restrict_form(f, alpha)
        prod *= next(v for v in g if v != 0)
    return 1 / prod


def restriction_map_matrix(a: Arrangement, h: int, p: int, d: int) -> List[List[int]]:
    """Integer matrix of ``res^p`` on numerators of degree-``d`` forms.

    Valid on ``Omega^p(A)_d`` (where the divisions by ``alpha_h`` are exact);
    the formula is polynomial so it is defined on the whole numerator space.
    Output coordinates: components ``f'_I`` (``I`` a p-subset of the
    hyperplane's coordinates) of degree ``d + #A - 1``, each row scaled by a
    nonzero constant, which leaves the image dimension unchanged.
    """
    n = a.dim
    alpha = _int_form(a.forms[h])
    piv = restriction_pivot(alpha)
    others = [i for i in range(n) if i != piv]
    deg = d + len(a.forms)
    Js = subsets(n, p)
    N = len(monomials(n, deg))
    R = restriction_operator(alpha, deg, 1)
    rows: List[List[int]] = []
    for I in combinations(others, p):
        coeffs = [_complement_basis_minor(alpha, J, I) for J in Js]
        rows.extend(_block_rows(coeffs, R, N))
    return rows


def ziegler_restrict_form(a: Arrangement, h: int, omega: Sequence[MPoly], p: int = 1) -> Tuple[MPoly, ...]:
    """Restrict a logarithmic p-form of ``a`` to hyperplane ``h``.

    ``omega`` is given by numerator components ``f_J`` over ``Q(A)``; the
    result is numerator components over ``Q(A^h, k)``.  Raises
    ``AssertionError`` when the tangential components are not divisible by
    ``alpha_h`` (i.e. the input was not logarithmic along ``h``).
    """
    n = a.dim
    alpha = a.forms[h]
    piv = restriction_pivot(alpha)
    others = [i for i in range(n) if i != piv]
    Js = subsets(n, p)
    if len(omega) != len(Js):
        raise ValueError("wrong number of components")
    alpha_int = _int_form(alpha)
    c = _restriction_scalar(a, h)
    sub = [MPoly.variable(n - 1, others.index(j)) if j != piv else None for j in range(n)]
    lin = MPoly(n - 1, {tuple(int(t == s) for t in range(n - 1)): -alpha[j] for s, j in enumerate(others)})
    sub[piv] = lin
    out = []
    for I in combinations(others, p):
        g = MPoly(n)
        for J, f in zip(Js, omega):
            cf = Fraction(_complement_basis_minor(alpha_int, J, I), alpha_int[piv] ** p)
            if cf:
                g = g + f * cf
        assert g.substitute_linear(sub).is_zero(), "form is not logarithmic along the hyperplane"
        out.append(g.diff(piv).substitute_linear(sub) * c)
    return tuple(out)


def _kernel_cache_key(a: Arrangement, p: int, d: int):
    return (a.forms, p, d)


_KERNELS: Dict[tuple, List[List[int]]] = {}


def _omega_kernel(a: Arrangement, p: int, d: int) -> List[List[int]]:
    key = _kernel_cache_key(a, p, d)
    if key not in _KERNELS:
        rows, ncols = form_constraints(a.as_multi(), p, d)
        _KERNELS[key] = exact.int_nullspace(rows, ncols) if ncols else []
        if len(_KERNELS) > 256:
            _KERNELS.pop(next(iter(_KERNELS)))
    return _KERNELS[key]


@lru_cache(maxsize=1024)
def _form_constraint_rank(dim: int, forms, mult, p: int, d: int) -> int:
    m = Multiarrangement(Arrangement(dim, forms), mult)
    rows, ncols = form_constraints(m, p, d)
    return exact.int_matrix_rank(rows, ncols) if ncols else 0


def restriction_image_dim(a: Arrangement, h: int, p: int, d: int) -> int:
    """``dim M^p_d``: the image of ``res^p`` in degree d.

    The image of R on ker C has dimension ``rank [C; R] - rank C``.
    """
    if d + len(a.forms) < 0:
        return 0
    rows, ncols = form_constraints(a.as_multi(), p, d)
    if not ncols:
        return 0
    Rint = restriction_map_matrix(a, h, p, d)
    if not Rint:
        return 0
    base = _form_constraint_rank(a.dim, a.forms, (1,) * len(a.forms), p, d)
    return exact.int_matrix_rank(rows + Rint, ncols) - base


def restriction_image_dim_via_kernel(a: Arrangement, h: int, p: int, d: int) -> int:
    """Same as :func:`restriction_image_dim`, through an explicit kernel basis."""
    if d + len(a.forms) < 0:
        return 0
    K = _omega_kernel(a, p, d)
    if not K:
        return 0
    Rint = restriction_map_matrix(a, h, p, d)
    if not Rint:
        return 0
    img = [[sum(r * k for r, k in zip(row, kv)) for kv in K] for row in Rint]
    return exact.int_matrix_rank(img, len(K))


def codim_restriction_profile(a: Arrangement, h: int, exps: Optional[Tuple[int, int]] = None) -> Dict[int, int]:
    """Per-degree deficit ``dim Omega^1(A^h,k)_d - dim M^1_d`` (nonzero only).

    The sweep starts at ``-(#A - 1)`` and stops once ``d3' + 2`` consecutive
    degrees at or above ``-d3'`` show no deficit.
    """
    if a.dim != 3:
        raise ValueError("codim_restriction_image needs a 3-arrangement")
    target = restrict(a, h)
    if exps is None:
        exps = rank2_multi_exponents(target)[:2]
    d2, d3 = exps
    window = d3 + 2
    profile: Dict[int, int] = {}
    streak = 0
    d = -(len(a.forms) - 1)
    while True:
        tdim = omega_dim(target, 1, d)
        idim = restriction_image_dim(a, h, 1, d)
        deficit = tdim - idim
        assert deficit >= 0, "restriction image larger than target"
        if deficit:
            profile[d] = deficit
            streak = 0
        elif d >= -d3:
            streak += 1
            if streak >= window:
                break
        d += 1
    return profile


def codim_restriction_image(a: Arrangement, h: int) -> int:
    """Codimension of the image of ``res^1`` by a graded sweep."""
    return sum(codim_restriction_profile(a, h).values())


# ---------------------------------------------------------------------------
# Saito certificates
# ---------------------------------------------------------------------------

@dataclass
class FreenessCertificate:
    """Derivations whose coefficient determinant is ``c * Q(A,k)``, ``c != 0``."""

    derivations: List[Tuple[MPoly, ...]]
    degrees: List[int]
    scalar: Fraction

    def matrix(self) -> List[List[MPoly]]:
        return [list(theta) for theta in self.derivations]

    def verify(self, m) -> bool:
        """Independent recheck: membership by polynomial substitution and the
        determinant identity."""
        m = _as_multi(m)
        if sum(self.degrees) != m.total():
            return False
        for theta, dg in zip(self.derivations, self.degrees):
            if any(not c.is_zero() and (c.degree() != dg or not c.is_homogeneous()) for c in theta):
                return False
            for alpha, k in zip(m.forms, m.mult):
                val = MPoly(m.dim)
                for c, a in zip(theta, alpha):
                    val = val + c * a
                if not divisible_by_power(val, alpha, k):
                    return False
        D = exact.poly_det(self.matrix())
        ratio = D.scalar_ratio(m.defining_polynomial())
        return ratio is not None and ratio != 0 and ratio == self.scalar

    def to_json(self, names: Optional[Sequence[str]] = None) -> dict:
        return {
            "degrees": list(self.degrees),
            "scalar": exact.format_fraction(self.scalar),
            "derivations": [[c.format(names) for c in theta] for theta in self.derivations],
        }


def divisible_by_power(P: MPoly, alpha: Sequence[Fraction], k: int) -> bool:
    """Whether ``alpha^k`` divides ``P`` (expansion in ``w1 = alpha``)."""
    if k == 0 or P.is_zero():
        return True
    n = P.nvars
    alpha = normalize_form(alpha)
    piv = restriction_pivot(alpha)
    # z_p = w1 - sum_{j != p} alpha_j z_j, other coordinates unchanged;
    # variable p of the image ring plays the role of w1.
    images = []
    for j in range(n):
        if j == piv:
            terms = {tuple(int(t == piv) for t in range(n)): Fraction(1)}
            for i in range(n):
                if i != piv and alpha[i]:
                    terms[tuple(int(t == i) for t in range(n))] = -alpha[i]
            images.append(MPoly(n, terms))
        else:
            images.append(MPoly.variable(n, j))
    Q = P.substitute_linear(images)
    return all(e[piv] >= k for e in Q.terms)


def _random_combination(basis: GradedBasis, rng: random.Random) -> Tuple[MPoly, ...]:
    n = basis.nvars
    out = [MPoly(n) for _ in range(n)]
    for elem in basis.elements:
        c = rng.randint(-9, 9) or 1
        out = [o + e * c for o, e in zip(out, elem)]
    return tuple(out)


def _try_determinant(m: Multiarrangement, thetas: List[Tuple[MPoly, ...]]) -> Optional[Fraction]:
    D = exact.poly_det([list(t) for t in thetas])
    if D.is_zero():
        return None
    c = D.scalar_ratio(m.defining_polynomial())
    return c if c else None


def saito_certificate(m, degrees: Sequence[int], seed: int = SEED) -> Optional[FreenessCertificate]:
    """Search for a Saito basis of ``D(A,k)`` with the given degrees.

    Returns a certificate (a proof of freeness) or None when no certificate
    was found at these degrees (not a proof of non-freeness).
    """
    m = _as_multi(m)
    degrees = sorted(int(x) for x in degrees)
    if sum(degrees) != m.total():
        raise CertificateError("degree sum mismatch")
    n = m.dim
    if len(degrees) != n:
        return None
    if n == 0:
        return FreenessCertificate([], [], Fraction(1))
    spaces = {d: derivation_space(m, d) for d in set(degrees)}
    if any(len(spaces[d]) == 0 for d in degrees):
        return None
    rng = random.Random(seed)
    for _ in range(RETRIES):
        thetas = [_random_combination(spaces[d], rng) for d in degrees]
        c = _try_determinant(m, thetas)
        if c is not None:
            return FreenessCertificate(thetas, degrees, c)
    return None


def independent_derivations(m, max_total: Optional[int] = None, seed: int = SEED):
    """Greedy lowest-degree derivations independent over the polynomial ring.

    Scans degrees upward, keeping random elements whose coefficient vectors
    raise the generic rank (tested at random rational points).  Returns the
    chosen derivations and degrees, stopping at ``rank`` elements or when the
    degree sum would exceed ``max_total``.
    """
    m = _as_multi(m)
    n = m.dim
    rng = random.Random(seed)
    points = [[Fraction(rng.randint(-50, 50), rng.randint(1, 7)) for _ in range(n)] for _ in range(3)]
    chosen: List[Tuple[MPoly, ...]] = []
    degs: List[int] = []
    limit = m.total() if max_total is None else max_total
    d = 0
    while len(chosen) < n and d <= limit:
        space = derivation_space(m, d)
        if len(space):
            tries = 0
            while len(chosen) < n and tries < 2 * len(space) + 2:
                tries += 1
                cand = _random_combination(space, rng)
                if _generic_rank(chosen + [cand], points) == len(chosen) + 1:
                    chosen.append(cand)
                    degs.append(d)
                else:
                    # generic rank is stable once this degree is exhausted
                    if _generic_rank(chosen + list(space.elements), points) == len(chosen):
                        break
        d += 1
    return chosen, degs


def _generic_rank(thetas: List[Tuple[MPoly, ...]], points) -> int:
    best = 0
    for pt in points:
        rows = [[c.evaluate(pt) for c in theta] for theta in thetas]
        best = max(best, exact.rank(rows) if rows else 0)
    return best


def rank2_multi_exponents(m) -> Tuple[int, int, FreenessCertificate]:
    """Multiexponents ``(d1 <= d2)`` of an essential rank-2 multiarrangement."""
    m = _as_multi(m)
    if m.dim != 2 or m.rank() != 2:
        raise ValueError("rank2_multi_exponents needs an essential multiarrangement in dimension 2")
    total = m.total()
    d1 = 0
    while derivation_dim(m, d1) == 0:
        d1 += 1
        assert d1 <= total, "no derivation found up to degree |k|"
    d2 = total - d1
    assert d1 <= d2, "smallest exponent exceeds |k|/2"
    cert = saito_certificate(m, (d1, d2))
    assert cert is not None, "rank-2 multiarrangement without a Saito basis"
    return d1, d2, cert


def derivation_restriction_image_dim(a: Arrangement, h: int, d: int) -> int:
    """``dim`` of the image of ``D_0(A)_d -> D(A^h, k)_d``.

    ``D_0(A)`` holds the logarithmic derivations killing ``alpha_h``; these are
    tangent to the hyperplane and restrict to derivations of ``A^h`` in the
    coordinates ``z_j`` (``j`` not the pivot of ``alpha_h``).
    """
    if d < 0:
        return 0
    n = a.dim
    rows, ncols = derivation_constraints(a.as_multi(), d)
    alpha = _int_form(a.forms[h])
    N = len(monomials(n, d))
    for r in range(N):
        row = [0] * ncols
        for i, c in enumerate(alpha):
            row[i * N + r] = c
        rows.append(row)
    piv = restriction_pivot(alpha)
    R0 = restriction_operator(alpha, d, 0)
    img_rows = []
    for j in (i for i in range(n) if i != piv):
        for r in R0:
            row = [0] * ncols
            row[j * N:(j + 1) * N] = r
            img_rows.append(row)
    # image of the restriction on the kernel of the constraints
    return exact.int_matrix_rank(rows + img_rows, ncols) - exact.int_matrix_rank(rows, ncols)
