from fractions import Fraction as F
from math import factorial

import pytest

from hopfforge.double import verify_universal_identity
from hopfforge.pbw import Cutoffs
from hopfforge.rmatrix import (build_context, build_R, check_triangularity,
                               verify_auxiliary, verify_coproduct_laws,
                               verify_intertwining)
from hopfforge.scalars import Scalar


@pytest.fixture(scope="module")
def ctx():
    return build_context(4, 4)


@pytest.fixture(scope="module")
def R_closed(ctx):
    return build_R(ctx, "closed-form")


@pytest.fixture(scope="module")
def R_canon(ctx):
    return build_R(ctx, "canonical")


def key(ctx, leg1, leg2):
    eng = ctx.engine
    a, b = [0] * eng.n, [0] * eng.n
    for name, e in leg1.items():
        a[eng.presentation.gen_index(name)] = e
    for name, e in leg2.items():
        b[eng.presentation.gen_index(name)] = e
    return (tuple(a), tuple(b))


# ------------------------------------------------------------------ structure

def test_closed_form_low_degree_terms(ctx, R_closed):
    assert R_closed.coefficient(key(ctx, {}, {})) == Scalar.one().truncate(4)
    assert R_closed.coefficient(key(ctx, {"S": 1}, {"xi": 1})) == Scalar.one().truncate(4)
    assert R_closed.coefficient(key(ctx, {"T": 1}, {"tau": 1})) == Scalar.one().truncate(4)
    assert R_closed.coefficient(key(ctx, {"S": 1, "T": 1}, {"xi": 1, "tau": 1})) == \
        Scalar.one().truncate(4)


def test_exponential_coefficients(ctx, R_closed, R_canon):
    for n in range(5):
        want = Scalar.from_fraction(F(1, factorial(n)))
        got_p = R_closed.coefficient(key(ctx, {"T": n}, {"tau": n}))
        got_c = R_canon.coefficient(key(ctx, {"T": n}, {"tau": n}))
        assert (got_p - want).is_zero() and (got_c - want).is_zero(), n


def test_canonical_r_has_the_exponential_correction(ctx, R_closed, R_canon):
    # the canonical element is (1 + S e^{hT/2} (x) xi) e^{T (x) tau}
    d = R_canon - R_closed
    assert d.coefficient(key(ctx, {"S": 1, "T": 1}, {"xi": 1})) == \
        (Scalar.h() * F(1, 2)).truncate(4)
    assert d.coefficient(key(ctx, {"S": 1, "T": 2}, {"xi": 1})) == \
        (Scalar.h() * Scalar.h() * F(1, 8)).truncate(4)
    assert d.coefficient(key(ctx, {"S": 1}, {"xi": 1})).is_zero()
    assert d.coefficient(key(ctx, {"T": 2}, {"tau": 2})).is_zero()


# ------------------------------------------------------------------- checks

def test_intertwining_canonical_passes(ctx, R_canon):
    r = verify_intertwining(ctx, R_canon, "canonical", audit=False)
    assert r.status == "pass", r.text()


def test_intertwining_closed_form_fails_at_order_h2(ctx, R_closed):
    r = verify_intertwining(ctx, R_closed, "closed-form", audit=False)
    assert r.status == "fail"
    assert "T^2 (x) xi" in r.residual and "1/2*h^2" in r.residual


def test_intertwining_on_t_is_trivial(ctx, R_canon):
    from hopfforge.tensors import tensor_mul
    eng = ctx.engine
    two = ctx.ops.coproduct(eng.generator("T"))
    diff = tensor_mul(R_canon, two) - tensor_mul(two.flip(), R_canon)
    assert diff.is_zero()


def test_coproduct_laws_canonical(ctx, R_canon):
    r = verify_coproduct_laws(ctx, R_canon, "canonical", audit=False)
    assert r.status == "pass", r.text()


def test_auxiliary_identity_confirmed(ctx):
    r = verify_auxiliary(ctx, audit=False)
    assert r.status == "pass"
    assert any("confirmed exactly" in d for d in r.details)


def test_triangularity_is_a_finding(ctx, R_canon):
    r = check_triangularity(ctx, R_canon, "canonical")
    assert r.status == "finding"
    assert "T (x) tau" in r.residual
    assert any("R R^-1 == 1 (x) 1: True" in d for d in r.details)
    assert any("quasitriangular, not triangular" in d for d in r.details)


def test_universal_identity_canonical(ctx, R_canon):
    r = verify_universal_identity(ctx.dbl, ctx.derived, R_canon, max_degree=3,
                                  cutoffs=Cutoffs(4, ctx.d_int), compare_degree=4)
    assert r.status == "pass", r.text()


def test_universal_identity_unit_case(ctx, R_canon):
    r = verify_universal_identity(ctx.dbl, ctx.derived, R_canon, max_degree=0,
                                  cutoffs=Cutoffs(4, ctx.d_int), compare_degree=4)
    assert r.status == "pass"


def test_universal_identity_closed_form_fails(ctx, R_closed):
    r = verify_universal_identity(ctx.dbl, ctx.derived, R_closed, max_degree=2,
                                  cutoffs=Cutoffs(4, ctx.d_int), compare_degree=4)
    assert r.status == "fail"


def test_stability_of_retained_terms():
    small = build_context(3, 3)
    big = build_context(4, 4)
    r_small = build_R(small, "canonical")
    r_big = build_R(big, "canonical")
    for kk, c in r_small.truncate_degree(3).terms.items():
        kk_big = tuple(tuple(m) + (0,) * 0 for m in kk)
        cb = r_big.coefficient(kk_big).truncate(c.trunc)
        assert (cb - c).is_zero(), kk
