"""Command line driver.

Machine output is a single JSON document on stdout (sorted keys); a short
human summary goes to stderr.  Exit status: 0 ok/PASS, 1 usage or parse
error, 2 not-free/FAIL, 3 undetermined.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, Sequence

from .arr import (
    AffineArrangement,
    Arrangement,
    ArrangementError,
    Multiarrangement,
    cone,
    essentialize,
    format_arrangement,
    parse_arrangement,
    restrict,
    restriction_sources,
)
from .exact import format_fraction
from .freeness import FREE, NOT_FREE, UNDETERMINED, recursive_free
from .hilbert import free_hilbert_data, hilbformula_check, solomon_terao_chi
from .lattice import BadPrimeError, build_lattice, char_poly, count_points_mod_p
from .logmod import codim_restriction_profile, rank2_multi_exponents
from .weyl import (
    FamilySpec,
    RootSystemDesc,
    UnsupportedRootSystem,
    build_family,
    exponent_data,
    expected_exponents,
    positive_roots,
    verify_er,
)

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_UNDETERMINED = 0, 1, 2, 3
VERDICT_EXIT = {FREE: EXIT_OK, NOT_FREE: EXIT_FAIL, UNDETERMINED: EXIT_UNDETERMINED}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _forms_json(forms) -> List[List[str]]:
    return [[format_fraction(c) for c in f] for f in forms]


def _read_input(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_arrangement(text)


def _central(path: str) -> Arrangement:
    a = _read_input(path)
    if isinstance(a, AffineArrangement):
        return cone(a)
    if isinstance(a, Multiarrangement):
        raise UsageError("this command needs a simple arrangement, not a multiarrangement")
    return a


def _hyperplane(a, h: int) -> int:
    if not 0 <= h < len(a.forms):
        raise UsageError(f"hyperplane index {h} out of range (arrangement has {len(a.forms)})")
    return h


def _int_list(text: Optional[str]) -> Optional[List[int]]:
    if text is None:
        return None
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _family(args) -> FamilySpec:
    try:
        desc = RootSystemDesc.parse(args.type)
    except UnsupportedRootSystem as exc:
        raise UsageError(str(exc)) from None
    kind = args.family
    m = args.m
    if kind == "shi":
        return FamilySpec.shi(desc, m)
    if kind == "catalan":
        return FamilySpec.catalan(desc, m)
    if kind == "weyl":
        return FamilySpec(desc, "weyl")
    if kind == "interp":
        ideal = _int_list(args.ideal) or []
        return FamilySpec.interpolating(desc, ideal, m)
    if kind == "interval":
        if args.p is None or args.q is None:
            raise UsageError("--family interval needs --p and --q")
        return FamilySpec(desc, "interval", args.p, args.q, m=m)
    raise UsageError(f"unknown family {kind!r}")


# ---------------------------------------------------------------------------
# verbs: each returns (exit status, payload, summary line)
# ---------------------------------------------------------------------------

def cmd_charpoly(args):
    a = _central(args.input)
    chi = char_poly(a)
    out = {"chi": list(chi.coeffs)}
    summary = f"chi = {chi.format()}"
    if args.prime is not None:
        count = count_points_mod_p(a, args.prime)
        value = chi(args.prime)
        out["oracle"] = {"prime": args.prime, "count": count, "chi_at_p": value, "agrees": count == value}
        summary += f"; mod {args.prime}: count {count}, chi(p) {value}"
        if count != value:
            return EXIT_FAIL, out, summary
    return EXIT_OK, out, summary


def cmd_lattice(args):
    a = _central(args.input)
    lat = build_lattice(a)
    return EXIT_OK, lat.to_json(), f"{len(lat)} flats"


def cmd_restrict(args):
    a = _central(args.input)
    h = _hyperplane(a, args.hyperplane)
    m = restrict(a, h)
    out = {
        "hyperplane": h,
        "dim": m.dim,
        "forms": _forms_json(m.forms),
        "multiplicities": list(m.mult),
        "sources": restriction_sources(a, h),
        "text": format_arrangement(m),
    }
    return EXIT_OK, out, f"{len(m.forms)} hyperplanes, |k| = {m.total()}"


def cmd_exp2(args):
    a = _read_input(args.input)
    if isinstance(a, AffineArrangement):
        a = cone(a)
    if isinstance(a, Arrangement):
        ess, r = essentialize(a)
        if r == 3:
            a = restrict(ess, _hyperplane(ess, args.hyperplane))
        elif r == 2:
            a = ess.as_multi()
        else:
            raise UsageError("exp2 needs a rank-2 multiarrangement or a rank-3 arrangement")
    else:
        a, r = essentialize(a)
        if r != 2:
            raise UsageError("exp2 needs a rank-2 multiarrangement")
    d1, d2, cert = rank2_multi_exponents(a)
    out = {"exponents": [d1, d2], "certificate": cert.to_json()}
    return EXIT_OK, out, f"multiexponents ({d1}, {d2})"


def cmd_free(args):
    a = _central(args.input)
    rep = recursive_free(a, hint=_int_list(args.hint))
    out = rep.to_json()
    summary = f"verdict {rep.verdict}"
    if rep.exponents is not None:
        summary += f", exponents {tuple(rep.exponents)}"
    if "codim" in rep.details:
        summary += f", codim {rep.details['codim']}"
    return VERDICT_EXIT[rep.verdict], out, summary


def cmd_codim(args):
    a = _central(args.input)
    ess, r = essentialize(a)
    if r != 3:
        raise UsageError("codim needs an arrangement of essential rank 3")
    h = _hyperplane(ess, args.hyperplane)
    d2, d3, _ = rank2_multi_exponents(restrict(ess, h))
    chi0, _ = char_poly(ess).divmod_monic_linear(1)
    formula = chi0(0) - d2 * d3
    profile = codim_restriction_profile(ess, h, (d2, d3))
    sweep = sum(profile.values())
    out = {
        "hyperplane": h,
        "multiexponents": [d2, d3],
        "codim_formula": formula,
        "codim_sweep": sweep,
        "profile": {str(k): v for k, v in sorted(profile.items())},
        "agrees": formula == sweep,
    }
    status = EXIT_OK if formula == sweep else EXIT_FAIL
    return status, out, f"codim {sweep} (formula {formula})"


def cmd_st_check(args):
    a = _central(args.input)
    rep = recursive_free(a, hint=_int_list(args.hint))
    out = {"verdict": rep.verdict}
    if rep.verdict != FREE:
        return VERDICT_EXIT[rep.verdict], out, f"not certified free ({rep.verdict})"
    chi = char_poly(a)
    st = solomon_terao_chi(free_hilbert_data(rep.exponents))
    ok = st == chi
    out.update({"exponents": list(rep.exponents), "chi": list(chi.coeffs), "chi_st": list(st.coeffs),
                "status": "PASS" if ok else "FAIL"})
    return (EXIT_OK if ok else EXIT_FAIL), out, "PASS" if ok else "FAIL"


def cmd_hilb_check(args):
    a = _central(args.input)
    h = _hyperplane(a, args.hyperplane)
    D = args.degree if args.degree is not None else len(a.forms) + 5
    try:
        rep = hilbformula_check(a, h, D)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    status = EXIT_OK if rep.agrees else EXIT_FAIL
    return status, rep.to_json(), f"{'agrees' if rep.agrees else 'MISMATCH'} up to degree {D}"


def cmd_roots(args):
    try:
        desc = RootSystemDesc.parse(args.type)
    except UnsupportedRootSystem as exc:
        raise UsageError(str(exc)) from None
    roots = positive_roots(desc)
    ed = exponent_data(desc)
    out = {
        "type": desc.name,
        "roots": [
            {"index": i, "vector": list(r), "simple": list(desc.simple_coordinates(r))}
            for i, r in enumerate(roots)
        ],
        "exponents": list(ed.exponents),
        "coxeter": ed.coxeter,
    }
    return EXIT_OK, out, f"{desc.name}: {len(roots)} positive roots, exponents {ed.exponents}, h = {ed.coxeter}"


def cmd_family(args):
    f = _family(args)
    aff = build_family(f)
    text = format_arrangement(aff)
    if args.write:
        with open(args.write, "w") as fh:
            fh.write(text)
    out = {
        "family": f.label(),
        "dim": aff.dim,
        "hyperplanes": [
            {"form": [format_fraction(c) for c in form], "offset": format_fraction(off)} for form, off in aff.pairs
        ],
        "count": len(aff),
        "text": text,
    }
    return EXIT_OK, out, f"{f.label()}: {len(aff)} hyperplanes"


def cmd_verify_er(args):
    f = _family(args)
    rep = verify_er(f)
    out = rep.to_json()
    return (EXIT_OK if rep.passed else EXIT_FAIL), out, f"{rep.family}: {'PASS' if rep.passed else 'FAIL'}"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="arrfree", description="Exact freeness tools for hyperplane arrangements.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def with_input(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("input", help="arrangement file")
        sp.set_defaults(func=func)
        return sp

    sp = with_input("charpoly", cmd_charpoly, "characteristic polynomial")
    sp.add_argument("--prime", type=int, help="compare with a point count over F_p")
    with_input("lattice", cmd_lattice, "intersection lattice with Moebius values")
    for name, func, help_text in [
        ("restrict", cmd_restrict, "Ziegler restriction"),
        ("exp2", cmd_exp2, "multiexponents of a rank-2 multiarrangement"),
        ("codim", cmd_codim, "codimension of the restriction image (rank 3)"),
    ]:
        sp = with_input(name, func, help_text)
        sp.add_argument("--hyperplane", type=int, default=0)
    for name, func, help_text in [
        ("free", cmd_free, "decide freeness"),
        ("st-check", cmd_st_check, "Solomon-Terao check for a free arrangement"),
    ]:
        sp = with_input(name, func, help_text)
        sp.add_argument("--hint", help="expected exponents, comma separated")
    sp = with_input("hilb-check", cmd_hilb_check, "graded restriction Hilbert identity")
    sp.add_argument("--hyperplane", type=int, default=0)
    sp.add_argument("--degree", type=int, help="degree bound (default #A + 5)")

    sp = sub.add_parser("roots", help="positive roots, exponents and Coxeter number")
    sp.add_argument("--type", required=True)
    sp.set_defaults(func=cmd_roots)
    for name, func in [("family", cmd_family), ("verify-er", cmd_verify_er)]:
        sp = sub.add_parser(name)
        sp.add_argument("--type", required=True, help="root system, e.g. A2")
        sp.add_argument("--family", required=True, choices=["shi", "catalan", "weyl", "interp", "interval"])
        sp.add_argument("--m", type=int, default=1)
        sp.add_argument("--ideal", help="order ideal as root indices, comma separated")
        sp.add_argument("--p", type=int)
        sp.add_argument("--q", type=int)
        if name == "family":
            sp.add_argument("--write", metavar="PATH", help="also write the arrangement file")
        sp.set_defaults(func=func)
    return p


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        status, payload, summary = args.func(args)
    except (UsageError, ArrangementError, BadPrimeError, UnsupportedRootSystem, IndexError) as exc:
        print(f"arrfree: error: {exc}", file=stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"arrfree: error: {exc}", file=stderr)
        return EXIT_USAGE
    stdout.write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")
    print(summary, file=stderr)
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
