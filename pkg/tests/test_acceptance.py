"""Acceptance suite: one test per criterion, each printing its verdict line.

Everything is exact at the stated cutoffs (N = h-order, W = filtration cutoff,
D = tensor comparison degree); series-truncated checks carry stability audits
at bumped cutoffs.  Expected negative results (the published alpha = 1 scaling,
the closed-form universal element, triangularity, mixed-coordinate cocycle)
are asserted as findings with their exact residuals, never silently skipped.
"""

import time

import pytest

from hopfforge.bialgebra import (check_cocycle, check_cojacobi, check_jacobi,
                                 compare_bialgebras, from_family)
from hopfforge.double import (derive_double_presentation, verify_route_equivalence,
                              verify_universal_identity)
from hopfforge.families import structural_compare, verify_family_relations
from hopfforge.hopf import verify_hopf
from hopfforge.pairing import verify_duality
from hopfforge.pbw import Cutoffs
from hopfforge.presentation import (emit_presentation, load_presentation,
                                    parse_presentation, ParityMismatchError,
                                    UnknownGeneratorError, NonCentralSeriesError)
from hopfforge.lang import ParseError
from hopfforge.rmatrix import (build_context, build_R, check_triangularity,
                               verify_auxiliary, verify_coproduct_laws,
                               verify_intertwining)

CUT = Cutoffs(6, 10)

HOPF_TARGETS = ["ptsa_q", "brst_q", "sd_reference", "sd_line", "d0_variety",
                "d1_variety", "variety_3d", "newquant", "h0_point", "h1_point"]


def _verdict(name, ok, extra=""):
    line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}"
    if extra:
        line += f"  ({extra})"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def derivation():
    return derive_double_presentation(CUT, audit=True)


@pytest.fixture(scope="module")
def rctx():
    return build_context(4, 4)


# -------------------------------------------------------------- criterion 1

def test_criterion_1_hopf_certification():
    worst = 0.0
    for name in HOPF_TARGETS:
        t0 = time.perf_counter()
        rep = verify_hopf(load_presentation(name), CUT, audit=True)
        dt = time.perf_counter() - t0
        worst = max(worst, dt)
        assert rep.status == "pass", f"{name}: {rep.residual}"
        assert rep.audit == "pass", name
        assert dt < 60.0, f"{name} took {dt:.1f}s"
    _verdict("1 hopf certification (N=6, W=10, audits on)", True,
             f"10 presentations, slowest {worst:.2f}s")


# -------------------------------------------------------------- criterion 2

def test_criterion_2_double_reconstruction(derivation):
    derived, report, dbl = derivation
    ok = report.status == "pass" and report.audit == "pass"
    for frag in ("derived [S,tau] matches", "derived {S,xi} matches",
                 "derived [T,tau] matches", "derived [T,xi] matches",
                 "routes agree", "coproducts and antipodes match"):
        ok = ok and any(frag in d for d in report.details)
    routes = verify_route_equivalence(dbl, count=20, max_degree=3, seed=0)
    ok = ok and routes.status == "pass"
    _verdict("2 double reconstruction + route equivalence", ok,
             "4 generator pairs + 20 random degree<=3 pairs")


# -------------------------------------------------------------- criterion 3

def test_criterion_3_duality():
    rep = verify_duality(CUT, max_degree=6, alpha2=True, audit=True)
    ok = rep.status == "pass" and rep.audit == "pass"
    ok = ok and any("n! * delta_nm" in d for d in rep.details)
    lit = verify_duality(Cutoffs(4, 8), max_degree=3, alpha2=False, audit=False)
    ok = ok and lit.status == "fail" and "inconsistent extension" in lit.residual
    _verdict("3 duality on all basis pairs to degree 6 + normalization finding",
             ok, "literal (h/2) scaling refused with witness, alpha=2 exact")


# -------------------------------------------------------------- criterion 4

def test_criterion_4_rmatrix(rctx):
    R = build_R(rctx, "canonical")
    inter = verify_intertwining(rctx, R, "canonical", audit=True)
    laws = verify_coproduct_laws(rctx, R, "canonical", audit=True)
    uni = verify_universal_identity(rctx.dbl, rctx.derived, R, max_degree=3,
                                    cutoffs=Cutoffs(4, rctx.d_int),
                                    compare_degree=4)
    ok = all(r.status == "pass" for r in (inter, laws, uni))
    ok = ok and inter.audit == "pass" and laws.audit == "pass"
    # the published closed form is pinpointed as inconsistent
    paper = verify_intertwining(rctx, build_R(rctx, "closed-form"), "closed-form", audit=False)
    ok = ok and paper.status == "fail" and "T^2 (x) xi" in paper.residual
    _verdict("4 R-matrix: intertwining + coproduct laws + universal identity "
             "at (D,N)=(4,4)", ok,
             "canonical element passes; published form fails at (h^2 T^2/2)(x)xi")


# -------------------------------------------------------------- criterion 5

def test_criterion_5_auxiliary_relation(rctx):
    rep = verify_auxiliary(rctx, audit=True)
    ok = rep.status in ("pass", "finding") and rep.audit == "pass"
    confirmed = rep.status == "pass" and any("confirmed exactly" in d for d in rep.details)
    corrected = rep.status == "finding" and any("corrected prefactor" in d for d in rep.details)
    ok = ok and (confirmed or corrected)
    _verdict("5 auxiliary 3-leg identity confirmed (or corrected prefactor emitted)",
             ok, "confirmed exactly under alpha=2" if confirmed else "corrected emitted")


def test_criterion_5b_triangularity_finding(rctx):
    rep = check_triangularity(rctx, build_R(rctx, "canonical"), "canonical")
    ok = rep.status == "finding" and any("quasitriangular" in d for d in rep.details)
    _verdict("5b triangularity recorded as finding (quasi holds, strict fails)", ok)


# -------------------------------------------------------------- criterion 6

def test_criterion_6_family_relations():
    reports = verify_family_relations(CUT)
    bad = [r for r in reports if r.status == "fail"]
    ok = not bad
    names = {r.check for r in reports}
    ok = ok and {"family-instantiation", "limit-h0", "limit-h1",
                 "deforming-field", "newquant-consistency",
                 "alpha-arbitrariness"} <= names
    _verdict("6 family relations: instantiations, h->0, h->1, flow field, "
             "new quantization", ok,
             "; ".join(f"{r.check}:{r.status}" for r in reports))


# -------------------------------------------------------------- criterion 7

def test_criterion_7_bialgebra_level():
    b = from_family("variety_3d", "mu", "theta", h_mode="abstract", cutoffs=CUT)
    r1, r2, r3 = check_jacobi(b), check_cojacobi(b), check_cocycle(b)
    ok = all(r.status == "pass" for r in (r1, r2, r3))
    m1 = from_family("variety_3d", "mu", "theta", "abstract", CUT, ("a1", "b1"))
    m2 = from_family("variety_3d", "mu", "theta", "abstract", CUT, ("a2", "b2"))
    mixed = check_cocycle(m1, cobracket_from=m2)
    ok = ok and mixed.status == "fail" and "a1*b2" in mixed.residual
    nq = from_family("newquant", "mu", "h", h_mode="zero", cutoffs=CUT)
    d0 = from_family("d0_variety", "mu", "theta", h_mode="zero", cutoffs=CUT)
    ok = ok and compare_bialgebras(nq, d0).status == "pass"
    _verdict("7 bialgebra: jacobi/co-jacobi/cocycle exact; mixed-point residual "
             "nonzero; newquant == trivial quantization", ok,
             f"mixed residual: {mixed.residual}")


# -------------------------------------------------------------- criterion 8

MUTATIONS = [
    ("[S,tau] = h*S", "[S,tau] = -h*S"),
    ("{S,xi} = 2*sinh(h*T/2)", "{S,xi} = -2*sinh(h*T/2)"),
    ("{S,S} = 2*sinh(h*T)/sinh(h)", "{S,S} = 3*sinh(h*T)/sinh(h)"),
    ("tau = tau (x) 1 + 1 (x) tau + (h/sinh(h))*xi (x) xi",
     "tau = tau (x) 1 + 1 (x) tau + (2*h/sinh(h))*xi (x) xi"),
    ("S = exp(h*T/2) (x) S + S (x) exp((-h)*T/2)",
     "S = exp(h*T/2) (x) S + S (x) exp((h)*T/2)"),
    ("S = -S", "S = S"),
    ("T = T (x) 1 + 1 (x) T", "T = T (x) 1 - 1 (x) T"),
    ("tau = 0", "tau = 1"),
    ("{xi,xi} = 0", "{xi,xi} = 2*tau"),
    ("[tau,xi] = (h/2)*xi", "[tau,xi] = h*xi"),
]


def test_criterion_8_mutation_sensitivity(derivation):
    derived, _, _ = derivation
    reference = load_presentation("sd_reference")
    base_text = emit_presentation(reference)
    cut = Cutoffs(5, 8)
    baseline = set(structural_compare(derived, reference, cut))
    detected = 0
    for old, new in MUTATIONS:
        text = base_text.replace(old, new, 1)
        assert text != base_text, (old, new)
        mutated = parse_presentation(text)
        hopf = verify_hopf(mutated, cut, audit=False)
        if hopf.status == "fail":
            detected += 1
            continue
        diffs = set(structural_compare(derived, mutated, cut))
        if diffs != baseline:
            detected += 1
            continue
    ok = detected == len(MUTATIONS)
    _verdict("8 mutation sensitivity: 10 single-token mutations all detected",
             ok, f"{detected}/{len(MUTATIONS)}")


# -------------------------------------------------------------- criterion 9

ALL_FILES = ["ptsa_q", "brst_q", "brst_q_alpha2", "sd_reference", "sd_hp",
             "sd_line", "h0_point", "d0_variety", "h1_point", "d1_variety",
             "variety_3d", "newquant"]


def test_criterion_9_parser_roundtrip_and_errors():
    ok = True
    for name in ALL_FILES:
        p = load_presentation(name)
        if parse_presentation(emit_presentation(p)) != p:
            ok = False
    base = emit_presentation(load_presentation("brst_q"))
    errors = 0
    try:
        parse_presentation(base.replace("h*xi", "h*)xi").replace("(h/2)*xi", "(h/2)*)xi"))
    except ParseError:
        errors += 1
    try:
        parse_presentation(base.replace("{xi,xi} = 0", "{xi,xi} = zeta"))
    except UnknownGeneratorError:
        errors += 1
    try:
        parse_presentation(base.replace("[tau,xi] = (h/2)*xi", "[tau,xi] = (h/2)*tau"))
    except ParityMismatchError:
        errors += 1
    try:
        parse_presentation(base.replace("tau = -tau", "tau = -tau + sinh(h*xi)*xi"))
    except (NonCentralSeriesError, ParityMismatchError):
        errors += 1
    ok = ok and errors == 4
    _verdict("9 parser: 100% round-trip on 12 shipped files + all documented "
             "error classes raised", ok, f"{errors}/4 error classes")
