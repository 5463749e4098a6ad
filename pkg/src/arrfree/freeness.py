"""Freeness decisions for central arrangements.

Rank 3 uses the characteristic polynomial against the multiexponents of one
Ziegler restriction.  Rank >= 4 combines a Saito certificate for the
restriction with local freeness along the restricting hyperplane.  Non-free
verdicts always carry a proof: a non-split characteristic polynomial, a
restriction whose graded dimensions rule out the forced exponents, or a
non-free localization.  Anything else without a certificate is undetermined.
"""
from __future__ import annotations

import os
from math import comb
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

from .arr import Arrangement, decompose, essentialize, localize, restrict
from .exact import UPoly, integer_roots
from .lattice import build_lattice, char_poly
from .logmod import (
    CertificateError,
    FreenessCertificate,
    _try_determinant,
    derivation_dim,
    independent_derivations,
    rank2_multi_exponents,
    saito_certificate,
)

FREE = "free"
NOT_FREE = "not-free"
UNDETERMINED = "undetermined"


@dataclass
class FreenessReport:
    verdict: str
    exponents: Optional[Tuple[int, ...]]
    evidence: str
    details: dict = field(default_factory=dict)
    subreports: List[Tuple[str, "FreenessReport"]] = field(default_factory=list)
    certificate: Optional[FreenessCertificate] = field(default=None, repr=False)

    @property
    def is_free(self) -> bool:
        return self.verdict == FREE

    def to_json(self) -> dict:
        ev = {"kind": self.evidence}
        ev.update(self.details)
        if self.certificate is not None:
            ev["restriction_certificate"] = self.certificate.to_json()
        if self.subreports:
            ev["subreports"] = [{"label": label, "report": rep.to_json()} for label, rep in self.subreports]
        return {
            "verdict": self.verdict,
            "exponents": list(self.exponents) if self.exponents is not None else None,
            "evidence": ev,
        }


@dataclass
class LocalFreenessReport:
    hyperplane: int
    passed: bool
    witness: Optional[List[int]]
    checks: List[Tuple[List[int], FreenessReport]]

    def to_json(self) -> dict:
        return {
            "hyperplane": self.hyperplane,
            "passed": self.passed,
            "witness": self.witness,
            "flats_checked": len(self.checks),
            "undetermined": [idx for idx, rep in self.checks if rep.verdict == UNDETERMINED],
        }


def _pad(exps: Sequence[int], dim: int) -> Tuple[int, ...]:
    return tuple(sorted([0] * (dim - len(exps)) + list(exps)))


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ARRFREE_THREADS", "1")))
    except ValueError:
        return 1


def free3_test(a: Arrangement, h: int = 0) -> FreenessReport:
    """Free iff ``chi = (t - 1)(t - d2')(t - d3')`` for the restriction to h."""
    ess, r = essentialize(a)
    if r != 3:
        raise ValueError("free3_test needs essential rank 3")
    m = restrict(ess, h)
    d2, d3, cert = rank2_multi_exponents(m)
    chi = char_poly(ess)
    chi0, rem = chi.divmod_monic_linear(1)
    assert rem == 0
    codim = chi0(0) - d2 * d3
    details = {
        "hyperplane": h,
        "chi": list(chi.coeffs),
        "multiexponents": [d2, d3],
        "codim": codim,
    }
    if chi == UPoly.from_roots([1, d2, d3]):
        return FreenessReport(FREE, _pad([1, d2, d3], a.dim), "char-poly-match", details, certificate=cert)
    return FreenessReport(NOT_FREE, None, "char-poly-mismatch", details, certificate=cert)


def locally_free_along(a: Arrangement, h: int) -> LocalFreenessReport:
    """Check that every localization at a flat inside hyperplane h, other
    than the center, is free."""
    ess, _ = essentialize(a)
    lat = build_lattice(ess)
    flats = [f for f in lat.flats if h in f.indices and f.dim >= 1]

    def check(flat):
        return recursive_free(localize(ess, flat))

    threads = _threads()
    if threads > 1 and len(flats) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(check, flats))
    else:
        reports = [check(f) for f in flats]
    checks = [(sorted(f.indices), rep) for f, rep in zip(flats, reports)]
    witness = next((idx for idx, rep in checks if rep.verdict == NOT_FREE), None)
    passed = all(rep.verdict == FREE for _, rep in checks)
    return LocalFreenessReport(h, passed, witness, checks)


def _restriction_degrees(hint: Sequence[int], r: int) -> List[int]:
    hint = sorted(int(x) for x in hint)
    if len(hint) == r and 1 in hint:
        hint.remove(1)
    return hint


def _free_dim(degrees: Sequence[int], d: int) -> int:
    n = len(degrees)
    return sum(comb(d - e + n - 1, n - 1) for e in degrees if d >= e)


def _hilbert_mismatch(m, degrees: Sequence[int]) -> Optional[dict]:
    for d in range(max(degrees) + 1):
        got = derivation_dim(m, d)
        want = _free_dim(degrees, d)
        if got != want:
            return {"degree": d, "dim": got, "free_dim": want}
    return None


def free_test(a: Arrangement, h: int, hint: Optional[Sequence[int]] = None) -> FreenessReport:
    """Freeness at essential rank >= 4 via a certified free restriction and
    local freeness along h.

    ``hint`` lists expected multiexponents of the restriction (or the
    expected exponents of ``a`` including the leading 1).
    """
    ess, r = essentialize(a)
    if r < 4:
        raise ValueError("free_test needs essential rank >= 4")
    m = restrict(ess, h)
    chi = char_poly(ess)
    details: dict = {"hyperplane": h, "chi": list(chi.coeffs)}
    roots = integer_roots(chi)
    if len(roots) != r or any(x < 0 for x in roots):
        # a free arrangement has chi = prod (t - d_i) over its exponents
        return FreenessReport(NOT_FREE, None, "char-poly-nonsplit", details)
    predicted = list(roots)
    predicted.remove(1)
    details["predicted_restriction_degrees"] = predicted
    cert: Optional[FreenessCertificate] = None
    degs = _restriction_degrees(hint, r) if hint is not None else predicted
    try:
        cert = saito_certificate(m, degs)
    except CertificateError:
        cert = None
    if cert is None and hint is None:
        bad = _hilbert_mismatch(m, predicted)
        if bad is not None:
            # the restriction of a free arrangement is free with the
            # predicted degrees, so its graded dimensions are forced
            details["restriction_dim_mismatch"] = bad
            return FreenessReport(NOT_FREE, None, "restriction-hilbert-mismatch", details)
        chosen, gdegs = independent_derivations(m)
        if len(chosen) == r - 1 and sum(gdegs) == m.total():
            c = _try_determinant(m, chosen)
            if c is not None:
                cert = FreenessCertificate(chosen, gdegs, c)
    if cert is not None:
        details["restriction_degrees"] = list(cert.degrees)
        if chi != UPoly.from_roots([1] + list(cert.degrees)):
            return FreenessReport(NOT_FREE, None, "char-poly-mismatch", details, certificate=cert)
    local = locally_free_along(ess, h)
    details["local"] = local.to_json()
    subs = [(",".join(map(str, idx)), rep) for idx, rep in local.checks if rep.verdict != FREE]
    if local.witness is not None:
        details["witness_flat"] = local.witness
        return FreenessReport(NOT_FREE, None, "localization-witness", details, subs, certificate=cert)
    if cert is not None and local.passed:
        return FreenessReport(FREE, _pad([1] + list(cert.degrees), a.dim), "thm-FREE", details, certificate=cert)
    return FreenessReport(UNDETERMINED, None, "thm-FREE", details, subs, certificate=cert)


@lru_cache(maxsize=2048)
def _irreducible_free(dim: int, forms, infinity, hint) -> FreenessReport:
    b = Arrangement(dim, forms, infinity)
    r = dim
    if r <= 2:
        exps = [1] if r == 1 else [1, len(forms) - 1]
        return FreenessReport(FREE, tuple(exps), "rank<=2", {"hyperplanes": len(forms)})
    if r == 3:
        return free3_test(b, 0 if infinity is None else infinity)
    order = list(range(len(forms)))
    if infinity is not None:
        order.remove(infinity)
        order.insert(0, infinity)
    last = None
    for h in order:
        rep = free_test(b, h, hint)
        if rep.verdict != UNDETERMINED:
            return rep
        last = last or rep
        if hint is not None:
            break
    return last


def recursive_free(a: Arrangement, hint: Optional[Sequence[int]] = None) -> FreenessReport:
    """Decide freeness by essential rank, after splitting into irreducibles."""
    ess, r = essentialize(a)
    if r == 0:
        return FreenessReport(FREE, (0,) * a.dim, "rank<=2", {"hyperplanes": 0})
    pieces = decompose(ess)
    key_hint = tuple(hint) if hint is not None else None
    if len(pieces) == 1:
        rep = _irreducible_free(ess.dim, ess.forms, ess.infinity, key_hint)
        if rep.exponents is None:
            return rep
        return FreenessReport(rep.verdict, _pad(rep.exponents, a.dim), rep.evidence, rep.details,
                              rep.subreports, rep.certificate)
    subs = []
    for i, piece in enumerate(pieces):
        subs.append((f"summand {i}", _irreducible_free(piece.dim, piece.forms, piece.infinity, None)))
    verdicts = {rep.verdict for _, rep in subs}
    if NOT_FREE in verdicts:
        return FreenessReport(NOT_FREE, None, "direct-sum", {"summands": len(pieces)}, subs)
    if UNDETERMINED in verdicts:
        return FreenessReport(UNDETERMINED, None, "direct-sum", {"summands": len(pieces)}, subs)
    exps: List[int] = []
    for _, rep in subs:
        exps.extend(rep.exponents)
    return FreenessReport(FREE, _pad(exps, a.dim), "direct-sum", {"summands": len(pieces)}, subs)
