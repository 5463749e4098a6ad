from itertools import combinations
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arrfree.arr import Arrangement, boolean, stanley_cone
from arrfree.exact import UPoly
from arrfree.hilbert import (
    FreeHilbertData,
    free_hilbert_data,
    hilbert_series_free,
    hilbformula_check,
    omega_dims,
    solomon_terao_chi,
)
from arrfree.lattice import char_poly


def test_series_coefficients_match_binomials():
    h = free_hilbert_data((1, 2, 3))
    for p in range(4):
        ser = hilbert_series_free(h, p)
        coeffs = ser.series(4)
        for n in range(-6, 5):
            want = sum(comb(n + sum(S) + 2, 2) for S in combinations((1, 2, 3), p) if n + sum(S) >= 0)
            assert coeffs.get(n, UPoly()) == UPoly([want]), (p, n)


def test_series_matches_computed_omega_dims():
    a = Arrangement.from_rows([[1, 0], [0, 1], [1, 1]])
    dims = omega_dims(a, -4, 3)
    h = free_hilbert_data((1, 2))
    for p in range(3):
        ser = hilbert_series_free(h, p).series(3)
        for n in range(-4, 4):
            assert dims[p][n] == (ser.get(n, UPoly()).coeffs or (0,))[0]


@pytest.mark.parametrize("exps", [(1, 2), (1, 5), (1, 3, 3), (0, 1, 2), (1, 1, 1, 1), (1, 4, 4, 4)])
def test_solomon_terao_examples(exps):
    assert solomon_terao_chi(free_hilbert_data(exps)) == UPoly.from_roots(exps)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=4))
def test_solomon_terao_random_exponents(exps):
    assert solomon_terao_chi(free_hilbert_data(exps)) == UPoly.from_roots(exps)


def test_solomon_terao_specific_values():
    assert solomon_terao_chi(free_hilbert_data((1, 2))).coeffs == (2, -3, 1)
    assert solomon_terao_chi(free_hilbert_data((1, 3, 3))).coeffs == (-9, 15, -7, 1)


def test_solomon_terao_on_computed_arrangement():
    a = boolean(3)
    assert solomon_terao_chi(free_hilbert_data((1, 1, 1))) == char_poly(a)


def test_bad_inputs():
    with pytest.raises(ValueError):
        FreeHilbertData(2, (1,))
    with pytest.raises(ValueError):
        hilbert_series_free(free_hilbert_data((1, 1)), 3)
    with pytest.raises(ValueError):
        hilbformula_check(boolean(3), 0, 2)


def test_hilbformula_boolean_and_stanley():
    rep = hilbformula_check(boolean(3), 0, 3 + 5)
    assert rep.agrees
    assert rep.to_json()["agrees"] is True
    st_rep = hilbformula_check(stanley_cone(), 1, 7)
    assert st_rep.agrees
    # top degree on the left is empty, so the y^l coefficient must vanish on the right
    assert all(v == 0 for v in st_rep.rhs[3].values())
