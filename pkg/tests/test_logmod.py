import random
from itertools import combinations
from math import comb

import pytest
import sympy

from arrfree.arr import Arrangement, Multiarrangement, boolean, essentialize, restrict, stanley_cone
from arrfree.exact import MPoly, int_matrix_rank, rank
from arrfree.lattice import reduced_char_poly
from arrfree.logmod import (
    CertificateError,
    codim_restriction_image,
    codim_restriction_profile,
    derivation_dim,
    derivation_restriction_image_dim,
    derivation_space,
    divisible_by_power,
    form_constraints,
    independent_derivations,
    omega_dim,
    omega_space,
    rank2_multi_exponents,
    restriction_image_dim,
    restriction_image_dim_via_kernel,
    saito_certificate,
    ziegler_restrict_form,
)
from corpus import random_arrangement

A2 = Arrangement.from_rows([[1, 0], [0, 1], [1, 1]])
BRAID3 = Arrangement.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, -1, 0], [0, 1, -1], [1, 0, -1]])


def free_derivation_dim(exps, d):
    n = len(exps)
    return sum(comb(d - e + n - 1, n - 1) for e in exps if d >= e)


def free_omega_dim(exps, p, d):
    n = len(exps)
    return sum(comb(d + sum(S) + n - 1, n - 1) for S in combinations(exps, p) if d + sum(S) >= 0)


@pytest.mark.parametrize("a, exps", [(boolean(3), (1, 1, 1)), (BRAID3, (1, 2, 3)), (A2, (1, 2))])
def test_graded_dims_of_free_arrangements(a, exps):
    for d in range(0, 6):
        assert derivation_dim(a, d) == free_derivation_dim(exps, d)
    for p in range(a.dim + 1):
        for d in range(-sum(exps) - 1, 3):
            assert omega_dim(a, p, d) == free_omega_dim(exps, p, d), (p, d)


def test_a2_multiplicities():
    m2 = Multiarrangement(A2, (2, 2, 2))
    assert derivation_dim(m2, 2) == 0 and derivation_dim(m2, 3) == 2
    d1, d2, cert = rank2_multi_exponents(Multiarrangement(A2, (3, 3, 3)))
    assert (d1, d2) == (4, 5)
    assert cert.verify(Multiarrangement(A2, (3, 3, 3)))


def test_omega_small_degrees():
    assert [omega_dim(A2, 1, d) for d in (-1, -2, -3)] == [3, 1, 0]


def test_derivation_space_elements_are_logarithmic():
    m = Multiarrangement(A2, (1, 2, 3))
    for d in range(2, 5):
        for theta in derivation_space(m, d).elements:
            for alpha, k in zip(m.forms, m.mult):
                val = theta[0] * alpha[0] + theta[1] * alpha[1]
                assert divisible_by_power(val, alpha, k)


def _sym(P: MPoly, syms):
    return sympy.expand(sum(sympy.Rational(c.numerator, c.denominator) * sympy.prod([s ** e for s, e in zip(syms, ex)])
                            for ex, c in P.terms.items()))


def test_divisible_by_power_against_sympy():
    # a single polynomial is a Groebner basis of its ideal, so the division
    # remainder vanishes exactly when it divides
    rng = random.Random(3)
    syms = sympy.symbols("x y z")
    X = [MPoly.variable(3, i) for i in range(3)]
    checked = 0
    while checked < 20:
        alpha = [rng.randint(-2, 2) for _ in range(3)]
        if not any(alpha):
            continue
        checked += 1
        q = sum((X[i] * rng.randint(-3, 3) for i in range(3)), MPoly(3)) + X[0] * X[1] * rng.randint(1, 3)
        lin = MPoly.linear_form(alpha)
        k = rng.randint(1, 3)
        for P in (lin ** k * q, lin ** (k - 1) * (q + MPoly.constant(3, 1))):
            _, rem = sympy.div(_sym(P, syms), _sym(lin ** k, syms), *syms)
            assert divisible_by_power(P, alpha, k) == (rem == 0)


def test_saito_certificates():
    cert = saito_certificate(BRAID3, (1, 2, 3))
    assert cert is not None and cert.verify(BRAID3)
    assert cert.to_json()["degrees"] == [1, 2, 3]
    with pytest.raises(CertificateError):
        saito_certificate(BRAID3, (1, 1, 1))
    generic = Arrangement.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]])
    assert saito_certificate(generic, (1, 1, 2)) is None
    chosen, degs = independent_derivations(boolean(3))
    assert degs == [1, 1, 1]


def test_certificate_verify_rejects_tampering():
    cert = saito_certificate(boolean(2), (1, 1))
    assert cert.verify(boolean(2))
    assert not cert.verify(A2)


def test_restriction_image_two_routes_and_explicit_forms():
    c = stanley_cone()
    for h in (0, 1):
        target = restrict(c, h)
        for d in range(-5, 1):
            fast = restriction_image_dim(c, h, 1, d)
            assert fast == restriction_image_dim_via_kernel(c, h, 1, d)
            basis = omega_space(c, 1, d).elements
            rows, ncols = form_constraints(target, 1, d)
            deg = d + target.total()
            vecs = []
            for omega in basis:
                res = ziegler_restrict_form(c, h, omega)
                vec = [x for f in res for x in f.to_vector(deg)]
                if rows:
                    assert all(sum(r * v for r, v in zip(row, vec)) == 0 for row in rows)
                vecs.append(vec)
            if vecs:
                assert rank(vecs) == fast
            else:
                assert fast == 0


def test_stanley_codim_profile():
    c = stanley_cone()
    prof = codim_restriction_profile(c, 0)
    assert prof == {-5: 1, -4: 1, -3: 1, -2: 1}
    assert codim_restriction_image(c, 0) == reduced_char_poly(c)(0) - 1 * 5
    assert codim_restriction_image(boolean(3), 0) == 0


@pytest.mark.parametrize("seed", range(4))
def test_codim_formula_random(seed):
    rng = random.Random(500 + seed)
    a = random_arrangement(rng, rng.randint(5, 7))
    for h in range(len(a.forms)):
        d2, d3, _ = rank2_multi_exponents(restrict(a, h))
        assert codim_restriction_image(a, h) == reduced_char_poly(a)(0) - d2 * d3


def test_derivation_side_restriction():
    b = boolean(3)
    for d in range(4):
        assert derivation_restriction_image_dim(b, 0, d) == derivation_dim(restrict(b, 0), d)
    c = stanley_cone()
    deficits = [derivation_dim(restrict(c, 0), d) - derivation_restriction_image_dim(c, 0, d) for d in range(8)]
    assert all(x >= 0 for x in deficits)
    assert sum(deficits) == 4


def test_int_rank_orientation():
    rows = [[1, 2, 3, 4], [2, 4, 6, 8]]
    assert int_matrix_rank(rows, 4) == 1
    assert int_matrix_rank([list(r) for r in zip(*rows)], 2) == 1
