"""Hopf structure maps extended from generators, and the axiom certifier.

The coproduct extends as an even algebra homomorphism into the Koszul-signed
tensor square, the counit as an algebra map to scalars, and the antipode as a
graded anti-homomorphism S(xy) = (-1)^{|x||y|} S(y) S(x).  verify_hopf checks,
at the working cutoffs: the maps respect every relation, coassociativity, the
counit axiom, the antipode axiom, and parity preservation.
"""

from __future__ import annotations

from .pbw import Cutoffs, Engine, PbwElement
from .presentation import HopfPresentation, PresentationError
from .report import FAIL, PASS, Timer, VerificationReport
from .scalars import Scalar
from .tensors import TensorElement, evaluate_tensor, tensor_mul

__all__ = ["HopfOps", "verify_hopf"]


class HopfOps:
    """Coproduct / counit / antipode for one presentation at fixed cutoffs."""

    def __init__(self, engine: Engine):
        self.engine = engine
        pres = engine.presentation
        self.presentation = pres
        self._delta = {}
        self._eps = {}
        self._anti = {}
        for name, node in pres.coproduct:
            self._delta[name] = evaluate_tensor(engine, node, legs=2)
        for name, node in pres.counit:
            self._eps[name] = engine.evaluate_scalar(node)
        for name, node in pres.antipode:
            self._anti[name] = engine.evaluate(node)
        self._assert_pole_free()
        self._delta_mono_cache: dict = {}
        self._anti_mono_cache: dict = {}

    def _assert_pole_free(self):
        for name, t in self._delta.items():
            for c in t.terms.values():
                if c.pole_order > 0:
                    raise PresentationError(f"coproduct of {name} has a pole in h")
        for name, el in self._anti.items():
            for c in el.terms.values():
                if c.pole_order > 0:
                    raise PresentationError(f"antipode of {name} has a pole in h")
        for (i, j), (_, tail) in self.engine._rules.items():
            for c in tail.values():
                if c.pole_order > 0:
                    raise PresentationError("structure constant has a pole in h")

    # -- coproduct -------------------------------------------------------------
    def coproduct_gen(self, name: str) -> TensorElement:
        return self._delta[name]

    def coproduct_mono(self, mono) -> TensorElement:
        key = tuple(mono)
        got = self._delta_mono_cache.get(key)
        if got is None:
            eng = self.engine
            got = TensorElement.unit((eng, eng))
            for i, e in enumerate(key):
                d = self._delta[eng.gen_names[i]]
                for _ in range(e):
                    got = tensor_mul(got, d)
            self._delta_mono_cache[key] = got
        return got

    def coproduct(self, el: PbwElement) -> TensorElement:
        eng = self.engine
        out = TensorElement.zero((eng, eng))
        for m, c in el.terms.items():
            out = out + self.coproduct_mono(m).scale(c)
        return out

    def coproduct_op(self, el: PbwElement) -> TensorElement:
        return self.coproduct(el).flip()

    def iterated_coproduct(self, el: PbwElement, side: str = "left") -> TensorElement:
        """(Delta (x) id) Delta or (id (x) Delta) Delta, as a 3-leg tensor."""
        two = self.coproduct(el)
        pos = 0 if side == "left" else 1
        return two.expand_leg(pos, self.coproduct_mono)

    # -- counit ----------------------------------------------------------------
    def counit_mono(self, mono) -> Scalar:
        out = Scalar.one()
        for i, e in enumerate(mono):
            for _ in range(e):
                out = out * self._eps[self.engine.gen_names[i]]
        return out

    def counit(self, el: PbwElement) -> Scalar:
        N = self.engine.cutoffs.h_order
        out = Scalar.zero(N)
        for m, c in el.terms.items():
            out = out + (self.counit_mono(m) * c).truncate(N)
        return out

    # -- antipode ----------------------------------------------------------------
    def antipode_mono(self, mono) -> PbwElement:
        key = tuple(mono)
        got = self._anti_mono_cache.get(key)
        if got is None:
            eng = self.engine
            word = eng.monomial_to_word(key)
            odd = sum(1 for i in word if eng.parities[i])
            sign = -1 if (odd * (odd - 1) // 2) % 2 else 1
            got = eng.one()
            for i in reversed(word):
                got = eng.multiply(got, self._anti[eng.gen_names[i]])
            got = got.scale(sign)
            self._anti_mono_cache[key] = got
        return got

    def antipode(self, el: PbwElement) -> PbwElement:
        out = self.engine.zero()
        for m, c in el.terms.items():
            out = out + self.antipode_mono(m).scale(c)
        return out

    def antipode_squared_is_identity(self) -> bool:
        eng = self.engine
        for name in eng.gen_names:
            g = eng.generator(name)
            if not (self.antipode(self.antipode(g)) - g).is_zero():
                return False
        return True

    def antipode_inverse(self, el: PbwElement) -> PbwElement:
        """S^-1; for every shipped algebra S^2 = id, so S itself is used."""
        if not self.antipode_squared_is_identity():
            raise NotImplementedError(
                "antipode inverse beyond involutive antipodes is not implemented")
        return self.antipode(el)

    # -- helpers ------------------------------------------------------------------
    def counit_contract(self, t: TensorElement, pos: int) -> PbwElement:
        """(eps on leg pos) applied to a 2-leg tensor."""
        eng = self.engine
        out = eng.zero()
        for key, c in t.terms.items():
            e = self.counit_mono(key[pos])
            rest = key[1 - pos]
            out = out + PbwElement(eng, {rest: Scalar.one()}).scale(c * e)
        return out

    def multiply_legs(self, t: TensorElement) -> PbwElement:
        """The multiplication map m: x (x) y -> xy (no sign)."""
        eng = self.engine
        out = eng.zero()
        for (m1, m2), c in t.terms.items():
            prod = eng.multiply(PbwElement(eng, {m1: Scalar.one()}),
                                PbwElement(eng, {m2: Scalar.one()}))
            out = out + prod.scale(c)
        return out

    def relation_sides(self, rel):
        """(graded bracket of the pair as an element, rhs element)."""
        eng = self.engine
        a, b = eng.generator(rel.a), eng.generator(rel.b)
        pa, pb = eng.presentation.parity(rel.a), eng.presentation.parity(rel.b)
        sign = -1 if (pa and pb) else 1
        lhs = eng.multiply(a, b) - eng.multiply(b, a).scale(sign)
        return lhs, eng.evaluate(rel.rhs)


def _first_residual_tensor(t: TensorElement):
    for key in sorted(t.terms):
        c = t.terms[key]
        if not c.is_zero():
            word = " (x) ".join(e.monomial_str(m) for e, m in zip(t.engines, key))
            return f"({c!r})*[{word}]"
    return None


def _first_residual_element(el: PbwElement):
    for m in sorted(el.terms):
        c = el.terms[m]
        if not c.is_zero():
            return f"({c!r})*{el.engine.monomial_str(m)}"
    return None


def _run_axioms(pres: HopfPresentation, cutoffs: Cutoffs):
    """All axiom checks; returns (first failure description or None, details)."""
    eng = Engine(pres, cutoffs)
    ops = HopfOps(eng)
    details = []

    # (a)+(b): structure maps respect every relation
    for rel in pres.relations:
        lhs, rhs = ops.relation_sides(rel)
        name = f"{'{' if rel.kind == 'anti' else '['}{rel.a},{rel.b}{'}' if rel.kind == 'anti' else ']'}"
        d = tensor_mul(ops.coproduct_mono(_pair_mono(eng, rel, 0)),
                       ops.coproduct_mono(_pair_mono(eng, rel, 1)))
        sign = -1 if (pres.parity(rel.a) and pres.parity(rel.b)) else 1
        d_rev = tensor_mul(ops.coproduct_mono(_pair_mono(eng, rel, 1)),
                           ops.coproduct_mono(_pair_mono(eng, rel, 0))).scale(sign)
        diff = (d - d_rev) - ops.coproduct(rhs)
        if not diff.is_zero():
            return (f"coproduct does not respect {name}", _first_residual_tensor(diff), details)
        e_diff = ops.counit(lhs) - ops.counit(rhs)
        if not e_diff.is_zero():
            return (f"counit does not respect {name}", repr(e_diff), details)
        s_diff = ops.antipode(lhs) - ops.antipode(rhs)
        if not s_diff.is_zero():
            return (f"antipode does not respect {name}", _first_residual_element(s_diff), details)
    details.append(f"{len(pres.relations)} relations respected by all three maps")

    for name in pres.gen_names():
        g = eng.generator(name)
        # (c) coassociativity
        diff3 = ops.iterated_coproduct(g, "left") - ops.iterated_coproduct(g, "right")
        if not diff3.is_zero():
            return (f"coassociativity fails on {name}", _first_residual_tensor(diff3), details)
        # (d) counit axiom
        two = ops.coproduct(g)
        left = ops.counit_contract(two, 0) - g
        right = ops.counit_contract(two, 1) - g
        if not left.is_zero() or not right.is_zero():
            res = _first_residual_element(left if not left.is_zero() else right)
            return (f"counit axiom fails on {name}", res, details)
        # (e) antipode axiom
        want = eng.one().scale(ops.counit(g))
        lhs1 = ops.multiply_legs(two.apply_leg(0, ops.antipode_mono)) - want
        lhs2 = ops.multiply_legs(two.apply_leg(1, ops.antipode_mono)) - want
        if not lhs1.is_zero() or not lhs2.is_zero():
            res = _first_residual_element(lhs1 if not lhs1.is_zero() else lhs2)
            return (f"antipode axiom fails on {name}", res, details)
        # (f) parity preservation
        if two.parity() not in (pres.parity(name), None):
            return (f"coproduct of {name} changes parity", None, details)
        if ops._anti[name].parity() not in (pres.parity(name), None):
            return (f"antipode of {name} changes parity", None, details)
    details.append("coassociativity, counit, antipode, parity checks on all generators")
    return (None, None, details)


def _pair_mono(eng: Engine, rel, which: int):
    name = rel.a if which == 0 else rel.b
    i = eng.presentation.gen_index(name)
    return tuple(1 if j == i else 0 for j in range(eng.n))


def verify_hopf(pres: HopfPresentation, cutoffs: Cutoffs = Cutoffs(),
                audit: bool = True) -> VerificationReport:
    """Certify the full Hopf-superalgebra axiom suite for a presentation."""
    with Timer() as t:
        failure, residual, details = _run_axioms(pres, cutoffs)
        audit_status = "skipped"
        if audit:
            b = cutoffs.bumped()
            failure2, residual2, _ = _run_axioms(pres, b)
            audit_status = PASS if (failure2 is None) == (failure is None) else FAIL
    status = PASS if failure is None else FAIL
    if failure is not None:
        details = details + [failure]
    return VerificationReport(
        check="hopf-axioms",
        target=pres.name,
        cutoffs={"N": cutoffs.h_order, "W": cutoffs.word_degree},
        status=status,
        residual=residual,
        audit=audit_status,
        details=details,
        wall_time=t.elapsed,
    )
