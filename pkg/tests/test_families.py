from fractions import Fraction as F

import pytest

from hopfforge.families import (compare_limit_with, deforming_field_at_0,
                                instantiate, limit_h0, structural_compare,
                                verify_alpha_arbitrariness, verify_deforming_field,
                                verify_h1_limit, verify_newquant_consistency)
from hopfforge.lang import HVar
from hopfforge.pbw import Cutoffs, Engine
from hopfforge.presentation import load_presentation
from hopfforge.scalars import Scalar

CUT = Cutoffs(6, 10)


def test_sd_hp_at_line_point_equals_sd_line():
    bound = instantiate("sd_hp", {"p": "1-h", "alpha": 2})
    assert structural_compare(bound, load_presentation("sd_line"), CUT) == []


def test_variety_boundary_value_is_the_line():
    bound = instantiate("variety_3d", {"mu": 1, "theta": 1})
    assert structural_compare(bound, load_presentation("sd_line"), CUT) == []


def test_trivial_point_shared_by_both_varieties():
    p0 = instantiate("d0_variety", {"mu": 0, "theta": 0})
    p1 = instantiate("d1_variety", {"mu": 0, "theta": 0})
    assert structural_compare(p0, p1, CUT) == []
    eng = Engine(p0, CUT)
    from hopfforge.families import _bracket_element
    for a in p0.gen_names():
        for b in p0.gen_names():
            assert _bracket_element(eng, a, b).is_zero()


def test_missing_binding_keeps_symbolic_parameter():
    bound = instantiate("d0_variety", {"mu": 1})
    assert bound.params == ("theta",)


def test_limit_h0_of_line_is_endpoint():
    r = compare_limit_with("sd_line", "h0_point", CUT)
    assert r.status == "pass", r.text()


def test_limit_h0_values():
    eng, brackets, coproducts, _ = limit_h0("sd_line", cutoffs=CUT)
    # {S,S} -> 2T, [tau,xi] -> 0, Delta tau -> ... + xi (x) xi
    iT = eng.presentation.gen_index("T")
    ss = brackets[("S", "S")]
    mono = tuple(1 if i == iT else 0 for i in range(eng.n))
    assert ss.coefficient(mono) == Scalar.from_fraction(2)
    assert brackets[("xi", "tau")].is_zero()
    ixi = eng.presentation.gen_index("xi")
    xi_m = tuple(1 if i == ixi else 0 for i in range(eng.n))
    assert coproducts["tau"].coefficient((xi_m, xi_m)) == Scalar.one()


def test_limit_h0_pole_rejected():
    # a pole in a structure constant is refused before any limit is attempted
    from hopfforge.presentation import parse_presentation, PresentationError
    bad = """
name bad
[generators]
T even 1
[relations]
[coproduct]
T = T (x) 1 + 1 (x) T + (1/sinh(h))*T (x) T
[counit]
T = 0
[antipode]
T = -T
"""
    with pytest.raises(PresentationError):
        limit_h0_of(parse_presentation(bad))


def limit_h0_of(pres):
    from hopfforge.hopf import HopfOps
    eng = Engine(pres, CUT)
    ops = HopfOps(eng)
    cop = {g: ops.coproduct_gen(g).map_coeffs(lambda c: c.substitute(h_to_zero=True))
           for g in pres.gen_names()}
    return eng, cop


def test_deforming_field_matches_published_flow():
    r = verify_deforming_field(CUT)
    assert r.status == "pass", r.text()


def test_deforming_field_values():
    eng, brackets, coproducts = deforming_field_at_0("variety_3d", CUT)
    # {S,xi} first order: mu*T; [tau,xi] first order: -mu*xi (stored orientation)
    iT = eng.presentation.gen_index("T")
    t_m = tuple(1 if i == iT else 0 for i in range(eng.n))
    got = brackets[("xi", "S")]
    assert got.coefficient(t_m) == Scalar.param("mu")
    # mu -> 0 kills every bracket perturbation
    for el in brackets.values():
        assert el.substitute({"mu": 0}).is_zero()


def test_h1_limit_factorwise():
    r = verify_h1_limit(CUT)
    assert r.status == "pass", r.text()


def test_h1_limit_not_closed_form_reported():
    # without a vanishing (1-h) factor the sinh(1) denominator survives and the
    # expression is not closed-form evaluable at h=1
    from hopfforge.families import NotClosedForm, _h1_element
    from hopfforge.lang import parse_expr_text
    teng = Engine(load_presentation("h1_point"), CUT)
    with pytest.raises(NotClosedForm):
        _h1_element(teng, parse_expr_text("h*S - (2*h/sinh(h))*xi*cosh(h*T/2)"))
    with pytest.raises(NotClosedForm):
        _h1_element(teng, parse_expr_text("xi/sinh(h)"))
    # while the (1-h)-carrying factor evaluates to zero cleanly
    el = _h1_element(teng, parse_expr_text("(2*h*(1-h)/sinh(h))*xi*cosh(h*T/2)"))
    assert el.is_zero()


def test_newquant_consistency():
    r = verify_newquant_consistency(CUT)
    assert r.status == "pass", r.text()


def test_theta_substitution_matches_newquant_structurally():
    v3 = load_presentation("variety_3d").bind({"theta": HVar()})
    assert structural_compare(v3, load_presentation("newquant"), CUT) == []


def test_alpha_stays_arbitrary():
    r = verify_alpha_arbitrariness(Cutoffs(5, 8))
    assert r.status == "pass"


@pytest.mark.parametrize("family,point", [
    ("sd_hp", {"p": F(1, 2), "alpha": 2}),
    ("d0_variety", {"mu": 1, "theta": F(1, 3)}),
    ("d1_variety", {"mu": 1, "theta": 2}),
    ("variety_3d", {"mu": F(2, 3), "theta": 1}),
    ("newquant", {"mu": 1}),
])
def test_rational_points_are_hopf(family, point):
    from hopfforge.hopf import verify_hopf
    pres = instantiate(family, point)
    r = verify_hopf(pres, Cutoffs(5, 8), audit=False)
    assert r.status == "pass", r.text()


def test_structural_compare_reports_differences():
    p1 = load_presentation("sd_line")
    p2 = load_presentation("sd_reference")
    diffs = structural_compare(p1, p2, Cutoffs(4, 8))
    assert any("(xi,tau)" in d or "(tau,xi)" in d for d in diffs)
