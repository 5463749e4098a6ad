from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from arrfree import exact
from arrfree.exact import MPoly, RatFuncX, UPoly, integer_roots, limit_x_to_1

small_ints = st.integers(min_value=-5, max_value=5)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small_ints, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_rank_matches_sympy(M):
    want = sympy.Matrix(M).rank()
    assert exact.rank(M) == want
    assert exact.int_matrix_rank(M, len(M[0])) == want
    assert len(exact._bareiss_echelon([list(r) for r in M], len(M[0]))[1]) == want


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_kernel_is_a_kernel_of_right_size(M):
    ncols = len(M[0])
    kb = exact.kernel_basis(M, ncols)
    assert len(kb) == ncols - sympy.Matrix(M).rank()
    for v in kb:
        assert all(sum(Fraction(a) * b for a, b in zip(row, v)) == 0 for row in M)
    ints = exact.int_nullspace(M, ncols)
    assert len(ints) == len(kb)
    for v in ints:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in M)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_det_matches_sympy(M):
    assert exact.det(M) == sympy.Matrix(M).det()


def test_kernel_basis_canonical():
    kb = exact.kernel_basis([[1, 2, 3], [2, 4, 6]])
    assert {tuple(v) for v in kb} == {(-2, 1, 0), (-3, 0, 1)}


def test_rref_pivots():
    R, piv = exact.rref([[0, 2, 4], [1, 1, 1]])
    assert piv == [0, 1]
    assert R == [[1, 0, -1], [0, 1, 2]]


def test_monomials_count_and_order():
    mons = exact.monomials(3, 4)
    assert len(mons) == 15
    assert mons[0] == (4, 0, 0) and mons[-1] == (0, 0, 4)
    assert exact.monomials(2, -1) == ()


def _to_sympy(p: MPoly, syms):
    return sum(sympy.Rational(c.numerator, c.denominator) * sympy.prod([s ** e for s, e in zip(syms, exps)])
               for exps, c in p.terms.items())


polys = st.dictionaries(
    st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-4, 4), max_size=5
).map(lambda d: MPoly(2, {k: v for k, v in d.items()}))


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_mpoly_arithmetic_matches_sympy(p, q):
    x, y = sympy.symbols("x y")
    assert sympy.expand(_to_sympy(p * q, (x, y)) - _to_sympy(p, (x, y)) * _to_sympy(q, (x, y))) == 0
    assert sympy.expand(_to_sympy(p - q, (x, y)) - (_to_sympy(p, (x, y)) - _to_sympy(q, (x, y)))) == 0
    assert sympy.expand(_to_sympy(p.diff(0), (x, y)) - sympy.diff(_to_sympy(p, (x, y)), x)) == 0


def test_mpoly_substitution_and_vectors():
    x = MPoly.variable(2, 0)
    y = MPoly.variable(2, 1)
    p = (x + y * 2) ** 3
    q = p.substitute_linear([y, x])
    assert q == (y + x * 2) ** 3
    vec = p.to_vector(3)
    assert MPoly.from_vector(2, 3, vec) == p
    assert p.evaluate([1, 1]) == 27
    assert (p * 5).scalar_ratio(p) == 5
    assert (p + x ** 3).scalar_ratio(p) is None


def test_poly_det_against_sympy():
    x, y, z = (MPoly.variable(3, i) for i in range(3))
    M = [[x, y, z], [x * x, y * y, z * z], [x ** 3, y ** 3, z ** 3]]
    d = exact.poly_det(M)
    X, Y, Z = sympy.symbols("x y z")
    want = sympy.Matrix([[X, Y, Z], [X ** 2, Y ** 2, Z ** 2], [X ** 3, Y ** 3, Z ** 3]]).det()
    assert sympy.expand(_to_sympy(d, (X, Y, Z)) - want) == 0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-6, 6), max_size=5), st.lists(st.integers(-3, 3), max_size=3))
def test_integer_roots_recovers_roots(roots, extra):
    p = UPoly.from_roots(roots)
    # multiply by t^2 + 1 style factors with no integer roots
    q = p * UPoly([1, 0, 1])
    assert integer_roots(p) == sorted(roots)
    assert integer_roots(q) == sorted(roots)


def test_integer_roots_needs_monic():
    with pytest.raises(ValueError):
        integer_roots(UPoly([1, 2]))


def test_upoly_division():
    p = UPoly.from_roots([1, 3, 3])
    q, r = p.divmod_monic_linear(1)
    assert r == 0 and q == UPoly.from_roots([3, 3])
    assert p.exact_div(UPoly.from_roots([3])) == UPoly.from_roots([1, 3])
    with pytest.raises(ArithmeticError):
        p.exact_div(UPoly.from_roots([2]))
    assert p(3) == 0 and p(0) == -9


def test_ratfunc_series_against_sympy():
    # (1 + 2x) / (1 - x)^3
    f = RatFuncX({0: UPoly([1]), 1: UPoly([2])}, RatFuncX.one_minus_x_power(3))
    ser = f.series(6)
    x = sympy.symbols("x")
    want = sympy.series((1 + 2 * x) / (1 - x) ** 3, x, 0, 7).removeO()
    for k in range(7):
        assert ser.get(k, UPoly()) == UPoly([int(want.coeff(x, k))])


def test_limit_cancels_factors_and_detects_poles():
    # (1 - x)^2 (3 + t) / (1 - x)^2 -> 3 + t
    num = {0: UPoly([3, 1]), 1: UPoly([-6, -2]), 2: UPoly([3, 1])}
    f = RatFuncX(num, RatFuncX.one_minus_x_power(2))
    assert limit_x_to_1(f) == UPoly([3, 1])
    with pytest.raises(ZeroDivisionError):
        limit_x_to_1(RatFuncX({0: UPoly([1])}, RatFuncX.one_minus_x_power(1)))


def test_fraction_parsing():
    assert exact.to_fraction("-2/6") == Fraction(-1, 3)
    assert exact.format_fraction(Fraction(4, 2)) == "2"
    assert exact.primitive_integer_vector([Fraction(1, 2), Fraction(-3, 4)]) == [2, -3]
