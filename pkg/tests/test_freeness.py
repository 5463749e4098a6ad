import json
import random

import pytest

from arrfree.arr import Arrangement, boolean, cone, decompose, direct_sum, essentialize, restrict, stanley_cone
from arrfree.exact import UPoly
from arrfree.freeness import (
    FREE,
    NOT_FREE,
    UNDETERMINED,
    free3_test,
    free_test,
    locally_free_along,
    recursive_free,
)
from arrfree.lattice import build_lattice, char_poly
from arrfree.logmod import saito_certificate
from arrfree.weyl import FamilySpec, RootSystemDesc, build_family, positive_roots
from corpus import random_corpus

A2 = RootSystemDesc("A", 2)
A3 = RootSystemDesc("A", 3)
B2 = RootSystemDesc("B", 2)


def family_cone(spec):
    return cone(build_family(spec))


def stanley_inside_rank4(extra):
    rows = [list(f) + [0] for f in stanley_cone().forms] + [[0, 0, 0, 1], extra]
    return Arrangement.from_rows(rows)


def test_stanley_not_free_with_codim():
    rep = free3_test(stanley_cone())
    assert rep.verdict == NOT_FREE and rep.evidence == "char-poly-mismatch"
    assert rep.details["codim"] == 4
    assert rep.details["multiexponents"] == [1, 5]
    assert recursive_free(stanley_cone()).verdict == NOT_FREE


def test_shi_a2_free():
    rep = free3_test(family_cone(FamilySpec.shi(A2, 1)))
    assert rep.verdict == FREE
    assert tuple(e for e in rep.exponents if e) == (1, 3, 3)


def test_boolean_cases():
    rep = free3_test(boolean(3))
    assert rep.verdict == FREE and rep.exponents == (1, 1, 1)
    b4 = boolean(4)
    for h in range(4):
        r = free_test(b4, h)
        assert r.verdict == FREE and r.exponents == (1, 1, 1, 1)
    assert locally_free_along(b4, 0).passed


def test_a3_shi_along_infinity():
    c = family_cone(FamilySpec.shi(A3, 1))
    ess, _ = essentialize(c)
    local = locally_free_along(ess, ess.infinity)
    assert local.passed and local.witness is None
    assert all(rep.verdict == FREE for _, rep in local.checks)
    rep = free_test(c, c.infinity, hint=(4, 4, 4))
    assert rep.verdict == FREE
    assert tuple(e for e in rep.exponents if e) == (1, 4, 4, 4)
    assert rep.certificate.verify(restrict(ess, ess.infinity))


def test_a3_catalan_with_hint():
    c = family_cone(FamilySpec.catalan(A3, 1))
    rep = free_test(c, c.infinity, hint=(5, 6, 7))
    assert rep.verdict == FREE
    assert tuple(e for e in rep.exponents if e) == (1, 5, 6, 7)


def test_wrong_hint_is_undetermined_not_false():
    # (3, 4, 5) has the right degree sum but the restriction has no such basis
    c = family_cone(FamilySpec.shi(A3, 1))
    rep = free_test(c, c.infinity, hint=(3, 4, 5))
    assert rep.verdict == UNDETERMINED and rep.exponents is None


def test_localization_witness():
    a = stanley_inside_rank4([1, 1, 1, 1])
    local = locally_free_along(a, 0)
    assert not local.passed
    assert local.witness == [0, 1, 2, 3, 4, 5, 6]
    assert recursive_free(a).verdict == NOT_FREE


def test_split_chi_but_restriction_rules_out_freeness():
    a = stanley_inside_rank4([1, 0, 0, 1])
    assert char_poly(a) == UPoly.from_roots([1, 2, 3, 3])
    rep = free_test(a, 0)
    assert rep.verdict == NOT_FREE and rep.evidence == "restriction-hilbert-mismatch"
    assert locally_free_along(a, 0).witness == [0, 1, 2, 3, 4, 5, 6]


def test_generic_rank4_not_free():
    a = Arrangement.from_rows([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [1, 1, 1, 1]])
    rep = recursive_free(a)
    assert rep.verdict == NOT_FREE and rep.evidence == "char-poly-nonsplit"


def test_b2_shi_recursive():
    rep = recursive_free(family_cone(FamilySpec.shi(B2, 1)))
    assert rep.verdict == FREE and tuple(e for e in rep.exponents if e) == (1, 4, 4)


def test_direct_sum_merges_exponents():
    a = direct_sum(boolean(2), essentialize(family_cone(FamilySpec.shi(A2, 1)))[0])
    rep = recursive_free(a)
    assert rep.verdict == FREE and rep.evidence == "direct-sum"
    assert rep.exponents == (1, 1, 1, 3, 3)
    bad = direct_sum(boolean(1), stanley_cone())
    assert recursive_free(bad).verdict == NOT_FREE


def test_rank_two_and_empty():
    a = Arrangement.from_rows([[1, 0], [0, 1], [1, 1], [1, 2], [1, 3]])
    rep = recursive_free(a)
    assert rep.verdict == FREE and rep.exponents == (1, 4)
    assert recursive_free(Arrangement(3, ())).exponents == (0, 0, 0)


def _corpus():
    return random_corpus()[:20]


def test_hyperplane_independence_rank3():
    for a in _corpus() + [stanley_cone(), family_cone(FamilySpec.catalan(A2, 1))]:
        ess, _ = essentialize(a)
        verdicts = {free3_test(ess, h).verdict for h in range(len(ess.forms))}
        assert len(verdicts) == 1


def test_free_implies_factorization_and_local_freeness():
    cases = [family_cone(FamilySpec.shi(B2, 2)), family_cone(FamilySpec.catalan(A3, 1)), boolean(4)]
    cases += [a for a in random_corpus() if recursive_free(a).verdict == FREE]
    for a in cases:
        rep = recursive_free(a)
        assert rep.verdict == FREE
        assert char_poly(a) == UPoly.from_roots(rep.exponents)
        ess, _ = essentialize(a)
        for flat in build_lattice(ess).flats:
            if flat.dim >= 1 and flat.indices:
                sub = ess.subarrangement(sorted(flat.indices))
                assert recursive_free(sub).verdict == FREE


def test_rank4_free_verdicts_have_global_saito_basis():
    # an independent certificate for the arrangement itself
    rng = random.Random(11)
    roots = positive_roots(RootSystemDesc("B", 4))
    seen = 0
    while seen < 6:
        a = Arrangement.from_rows(rng.sample(roots, rng.randint(7, 12)))
        ess, r = essentialize(a)
        rep = recursive_free(ess)
        if r != 4 or rep.verdict != FREE or len(decompose(ess)) != 1:
            continue
        seen += 1
        cert = saito_certificate(ess, rep.exponents)
        assert cert is not None and cert.verify(ess)


def test_parallel_evaluation_is_deterministic(monkeypatch):
    c = family_cone(FamilySpec.shi(A3, 1))
    serial = json.dumps(recursive_free(c, hint=(1, 4, 4, 4)).to_json(), sort_keys=True)
    from arrfree import freeness

    freeness._irreducible_free.cache_clear()
    monkeypatch.setenv("ARRFREE_THREADS", "4")
    parallel = json.dumps(recursive_free(c, hint=(1, 4, 4, 4)).to_json(), sort_keys=True)
    assert serial == parallel


def test_report_json_tree():
    rep = recursive_free(stanley_inside_rank4([1, 0, 0, 1]))
    js = rep.to_json()
    assert js["verdict"] == "not-free"
    assert js["exponents"] is None
    assert "kind" in js["evidence"]
    free = recursive_free(family_cone(FamilySpec.shi(A3, 1)), hint=(4, 4, 4)).to_json()
    assert free["evidence"]["kind"] == "thm-FREE"
    assert free["evidence"]["restriction_certificate"]["degrees"] == [4, 4, 4]
    assert free["evidence"]["local"]["passed"] is True
