"""The Drinfeld superdouble of the proper-time/BRST dual pair.

Cross multiplication x*f (x in the algebra H, f in the dual K) is computed two
independent ways:

* contraction route: build the 3-leg tensors Phi(f) = (id (x) flip) Delta^2_K(f)
  and Psi(x) = (flip (x) id)(id (x) flip)(id (x) id (x) S^-1) Delta^2_H(x), pair
  leg 1 with leg 1 and leg 2 with leg 2, multiply the third legs (dual letter
  left), and apply the global sign (-1)^{|x||f|};

* structure-constant route: the explicit quintuple sum with coefficient arrays
  extracted from the iterated coproducts, the antipode-inverse matrix, the sign
  (-1)^{sigma_n(sigma_l+sigma_k) + sigma_u sigma_k + sigma_s sigma_t}, and all
  index contractions running through the pairing Gram matrix.

Both must agree term by term; the derived cross relations are compared against
the published double presentation.
"""

from __future__ import annotations

from .hopf import HopfOps, verify_hopf
from .lang import Add, HVar, Mul, Num, Pow, Gen, Node
from .pairing import Pairing, standard_pair
from .pbw import Cutoffs, Engine, PbwElement
from .presentation import (HopfPresentation, Relation, load_presentation,
                           validate)
from .report import FAIL, PASS, Timer, VerificationReport
from .scalars import Scalar
from .tensors import TensorElement, tensor_mul, tensor_of

__all__ = ["Double", "derive_double_presentation", "verify_universal_identity"]

from fractions import Fraction


class Double:
    """Cross-multiplication machinery over a calibrated pairing."""

    def __init__(self, pairing: Pairing):
        self.pairing = pairing
        self.H, self.K = pairing.H, pairing.K
        self.h_ops, self.k_ops = pairing.h_ops, pairing.k_ops
        self.cutoffs = Cutoffs(min(self.H.cutoffs.h_order, self.K.cutoffs.h_order),
                               min(self.H.cutoffs.word_degree, self.K.cutoffs.word_degree))
        self._carrier = self._build_carrier()

    # the carrier engine only represents normal-ordered words (dual letters
    # left); its cross brackets are placeholders and are never used to rewrite
    def _build_carrier(self) -> Engine:
        pres = merge_presentations(
            self.K.presentation, self.H.presentation, name="double_carrier")
        return Engine(pres, self.cutoffs)

    @property
    def carrier(self) -> Engine:
        return self._carrier

    def embed(self, k_mono, h_mono):
        return tuple(k_mono) + tuple(h_mono)

    def embed_k(self, el: PbwElement) -> PbwElement:
        zero_h = (0,) * self.H.n
        return PbwElement(self._carrier,
                          {self.embed(m, zero_h): c for m, c in el.terms.items()},
                          el.truncated)

    def embed_h(self, el: PbwElement) -> PbwElement:
        zero_k = (0,) * self.K.n
        return PbwElement(self._carrier,
                          {self.embed(zero_k, m): c for m, c in el.terms.items()},
                          el.truncated)

    # -- the two 3-leg tensors ---------------------------------------------------
    def phi(self, f: PbwElement) -> TensorElement:
        """(id (x) graded flip) of the iterated dual coproduct."""
        three = self.k_ops.iterated_coproduct(f, "left")
        return three.flip_adjacent(1)

    def psi(self, x: PbwElement) -> TensorElement:
        """Leg-3 antipode inverse, then legs 2,3 and 1,2 graded flips."""
        three = self.h_ops.iterated_coproduct(x, "left")
        three = three.apply_leg(2, self.h_ops.antipode_mono)  # S^-1 = S here
        return three.flip_adjacent(1).flip_adjacent(0)

    # -- route 1: contraction ------------------------------------------------------
    def cross_product(self, x: PbwElement, f: PbwElement) -> PbwElement:
        out = self._carrier.zero()
        for xp in _parity_components(x):
            for fp in _parity_components(f):
                out = out + self._cross_homogeneous(xp, fp)
        return out

    def _cross_homogeneous(self, x: PbwElement, f: PbwElement) -> PbwElement:
        px, pf = x.parity(), f.parity()
        if px is None or pf is None:
            return self._carrier.zero()
        gsign = -1 if (px == 1 and pf == 1) else 1
        N = self.cutoffs.h_order
        psi3 = self.psi(x)
        phi3 = self.phi(f)
        acc: dict = {}
        for (k1, k2, k3), cpsi in psi3.terms.items():
            for (l1, l2, l3), cphi in phi3.terms.items():
                v1 = self.pairing.pair_mono(k1, l1)
                if v1.is_zero() and v1.trunc is None:
                    continue
                v2 = self.pairing.pair_mono(k2, l2)
                if v2.is_zero() and v2.trunc is None:
                    continue
                coeff = (cpsi * cphi * v1 * v2).truncate(N)
                if coeff.is_zero() and coeff.trunc is None:
                    continue
                mono = self.embed(l3, k3)
                prev = acc.get(mono)
                acc[mono] = coeff if prev is None else prev + coeff
        out = PbwElement(self._carrier,
                         {m: c for m, c in acc.items() if not c.is_zero()},
                         psi3.truncated or phi3.truncated)
        return out.scale(gsign)

    # -- route 2: explicit structure-constant sum ------------------------------------
    def cross_product_via_structure_constants(self, x: PbwElement, f: PbwElement) -> PbwElement:
        out = self._carrier.zero()
        for xp in _parity_components(x):
            for fp in _parity_components(f):
                out = out + self._cross_sc_homogeneous(xp, fp)
        return out

    def _cross_sc_homogeneous(self, x: PbwElement, f: PbwElement) -> PbwElement:
        H, K = self.H, self.K
        px, pf = x.parity(), f.parity()
        if px is None or pf is None:
            return self._carrier.zero()
        gsign = -1 if (px == 1 and pf == 1) else 1
        N = self.cutoffs.h_order
        # mu_s^{klj}: raw iterated coproduct of x over H
        mu = self.h_ops.iterated_coproduct(x, "left")
        # m^t_{nuk}: raw iterated coproduct of f over K
        mm = self.k_ops.iterated_coproduct(f, "left")
        acc: dict = {}
        for (k_h, l_h, j_h), c_mu in mu.terms.items():
            # antipode-inverse matrix applied to the j index
            sj = self.h_ops.antipode_mono(j_h)
            pl = H.monomial_parity(l_h)
            pk_h = H.monomial_parity(k_h)
            for (n_k, u_k, k_k), c_m in mm.terms.items():
                pn = K.monomial_parity(n_k)
                pu = K.monomial_parity(u_k)
                pk = K.monomial_parity(k_k)
                sgn = pn * (pl + pk) + pu * pk
                # contract k: <e_{k_h}, e^{k_k}>
                gk = self.pairing.pair_mono(k_h, k_k)
                if gk.is_zero() and gk.trunc is None:
                    continue
                # contract n with S^-1 e_{j_h}: sum_{j'} A^{j'}_j <e_{j'}, e^{n_k}>
                gn = Scalar.zero(N)
                for jp, a in sj.terms.items():
                    gn = gn + (a * self.pairing.pair_mono(jp, n_k)).truncate(N)
                if gn.is_zero() and gn.trunc is None:
                    continue
                coeff = (c_mu * c_m * gk * gn).truncate(N)
                if sgn % 2:
                    coeff = -coeff
                if coeff.is_zero() and coeff.trunc is None:
                    continue
                mono = self.embed(u_k, l_h)
                prev = acc.get(mono)
                acc[mono] = coeff if prev is None else prev + coeff
        out = PbwElement(self._carrier,
                         {m: c for m, c in acc.items() if not c.is_zero()})
        return out.scale(gsign)

    # -- generator-level relations ------------------------------------------------
    def cross_bracket(self, hgen: str, kgen: str, route: str = "contraction") -> PbwElement:
        """x*f -+ f*x as an element of the carrier (the derived bracket rhs)."""
        x = self.H.generator(hgen)
        f = self.K.generator(kgen)
        if route == "contraction":
            xf = self.cross_product(x, f)
        else:
            xf = self.cross_product_via_structure_constants(x, f)
        ph = self.H.presentation.parity(hgen)
        pk = self.K.presentation.parity(kgen)
        sign = -1 if (ph and pk) else 1
        fx = self._carrier.multiply(
            self.embed_k(f), self.embed_h(x))  # already normal ordered
        return xf - fx.scale(sign)


def _parity_components(el: PbwElement):
    even = {m: c for m, c in el.terms.items() if el.engine.monomial_parity(m) == 0}
    odd = {m: c for m, c in el.terms.items() if el.engine.monomial_parity(m) == 1}
    out = []
    if even:
        out.append(PbwElement(el.engine, even, el.truncated))
    if odd:
        out.append(PbwElement(el.engine, odd, el.truncated))
    return out


def merge_presentations(k_pres: HopfPresentation, h_pres: HopfPresentation,
                        name: str, cross_relations=()) -> HopfPresentation:
    """Dual generators first, then algebra generators; union of structure maps."""
    gens = tuple(k_pres.generators) + tuple(h_pres.generators)
    rels = tuple(k_pres.relations) + tuple(h_pres.relations) + tuple(cross_relations)
    pres = HopfPresentation(
        name=name,
        params=tuple(dict.fromkeys(k_pres.params + h_pres.params)),
        generators=gens,
        relations=rels,
        coproduct=tuple(k_pres.coproduct) + tuple(h_pres.coproduct),
        counit=tuple(k_pres.counit) + tuple(h_pres.counit),
        antipode=tuple(k_pres.antipode) + tuple(h_pres.antipode),
    )
    return validate(pres)


def element_to_ast(el: PbwElement) -> Node:
    """Exact expression tree for a PBW element with polynomial coefficients."""
    eng = el.engine
    terms = []
    for mono in sorted(el.terms):
        c = el.terms[mono]
        for k in sorted(c.coeffs):
            poly = c.coeffs[k]
            for pkey in sorted(poly.terms):
                q = poly.terms[pkey]
                factors = [Num(q)]
                for pname, pe in pkey:
                    factors.append(Pow(Gen(pname), pe) if pe > 1 else Gen(pname))
                if k:
                    factors.append(Pow(HVar(), k) if k > 1 else HVar())
                for i, e in enumerate(mono):
                    gname = eng.gen_names[i]
                    factors.append(Pow(Gen(gname), e) if e > 1 else Gen(gname))
                    if e == 1:
                        factors[-1] = Gen(gname)
                terms.append(Mul(tuple(factors)) if len(factors) > 1 else factors[0])
    if not terms:
        return Num(Fraction(0))
    return terms[0] if len(terms) == 1 else Add(tuple(terms))


def derive_double_presentation(cutoffs: Cutoffs = Cutoffs(), audit: bool = True):
    """Build the double, compare with the published presentation, and report.

    Returns (derived HopfPresentation, VerificationReport, Double).
    """
    with Timer() as t:
        pairing = standard_pair(cutoffs, alpha2=True)
        dbl = Double(pairing)
        reference = load_presentation("sd_reference")
        ref_engine = Engine(reference, dbl.cutoffs)
        details = []
        status = PASS
        residual = None

        # derive the four cross brackets both ways and compare with reference
        pairs = [("T", "tau"), ("T", "xi"), ("S", "tau"), ("S", "xi")]
        derived_rhs = {}
        for hg, kg in pairs:
            rhs1 = dbl.cross_bracket(hg, kg, "contraction")
            rhs2 = dbl.cross_bracket(hg, kg, "structure-constants")
            if not (rhs1 - rhs2).is_zero():
                status = FAIL
                residual = f"route disagreement on ({hg},{kg}): {(rhs1 - rhs2)!r}"
                break
            derived_rhs[(hg, kg)] = rhs1
        if status == PASS:
            details.append("contraction and structure-constant routes agree on all "
                           "generator pairs")
            for (hg, kg), rhs in derived_rhs.items():
                rel = reference.bracket(hg, kg)
                want = _reference_bracket_element(ref_engine, reference, hg, kg, dbl)
                diff = rhs - want
                if not diff.is_zero():
                    status = FAIL
                    residual = f"cross relation ({hg},{kg}) differs: {diff!r}"
                    break
                br = "{%s,%s}" % (hg, kg) if rel is not None and rel.kind == "anti" \
                    else f"[{hg},{kg}]"
                details.append(f"derived {br} matches the published double")
        # the dual-subalgebra normalization difference is a finding, not a failure
        alpha_note = ("published [tau,xi] = (h/2)*xi is the alpha=1 scaling; the "
                      "pairing-consistent double carries [tau,xi] = h*xi (alpha=2)")

        derived = None
        if status == PASS:
            derived = _assemble_derived(dbl, reference, derived_rhs, cutoffs)
            hopf_rep = verify_hopf(derived, dbl.cutoffs, audit=False)
            if hopf_rep.status != PASS:
                status = FAIL
                residual = f"derived double fails Hopf axioms: {hopf_rep.residual}"
            else:
                details.append("derived double passes the full Hopf axiom suite")
            # coproducts and antipodes inherited from the two halves match
            for name in ("xi", "tau", "S", "T"):
                ref_ast = reference.structure_map("coproduct", name)
                der_ast = derived.structure_map("coproduct", name)
                from .tensors import evaluate_tensor
                d_eng = Engine(derived, dbl.cutoffs)
                if not (evaluate_tensor(d_eng, ref_ast, 2)
                        - evaluate_tensor(d_eng, der_ast, 2)).is_zero():
                    status = FAIL
                    residual = f"coproduct of {name} differs from reference"
                    break
                ref_anti = d_eng.evaluate(reference.structure_map("antipode", name))
                der_anti = d_eng.evaluate(derived.structure_map("antipode", name))
                if not (ref_anti - der_anti).is_zero():
                    status = FAIL
                    residual = f"antipode of {name} differs from reference"
                    break
            else:
                details.append("coproducts and antipodes match the published double")

        audit_status = "skipped"
        if audit and status == PASS:
            sub = derive_double_presentation(cutoffs.bumped(), audit=False)
            audit_status = PASS if sub[1].status == PASS else FAIL

    report = VerificationReport(
        check="double-reconstruction",
        target="SD(ptsa_q, brst_q_alpha2)",
        cutoffs={"N": cutoffs.h_order, "W": cutoffs.word_degree},
        status=status,
        residual=residual,
        audit=audit_status,
        details=details + ["finding: " + alpha_note],
        wall_time=t.elapsed,
    )
    return derived, report, dbl


def _reference_bracket_element(ref_engine: Engine, reference: HopfPresentation,
                               hg: str, kg: str, dbl: Double) -> PbwElement:
    """The published bracket rhs for (hg, kg), in carrier coordinates."""
    rel = reference.bracket(hg, kg)
    if rel is None:
        return dbl.carrier.zero()
    rhs = ref_engine.evaluate(rel.rhs)
    # reference orders the pair as written; our derived bracket is [hg, kg]
    same_order = (rel.a == hg)
    el = PbwElement(dbl.carrier, {_remap(ref_engine, dbl.carrier, m): c
                                  for m, c in rhs.terms.items()}, rhs.truncated)
    if same_order:
        return el
    pa = reference.parity(rel.a)
    pb = reference.parity(rel.b)
    # [b,a] = -(-1)^{|a||b|} [a,b]
    return el.scale(-1 if not (pa and pb) else 1)


def _remap(src: Engine, dst: Engine, mono):
    out = [0] * dst.n
    for i, e in enumerate(mono):
        if e:
            out[dst.presentation.gen_index(src.gen_names[i])] = e
    return tuple(out)


def _assemble_derived(dbl: Double, reference: HopfPresentation, derived_rhs,
                      cutoffs: Cutoffs) -> HopfPresentation:
    """Derived presentation: closed forms from the reference where they matched,
    with the dual subalgebra in the duality scaling."""
    cross = []
    for (hg, kg), rhs in derived_rhs.items():
        rel = reference.bracket(hg, kg)
        ph, pk = dbl.H.presentation.parity(hg), dbl.K.presentation.parity(kg)
        kind = "anti" if (ph and pk) else "comm"
        if rel is not None and rel.a == hg and rel.kind == kind:
            cross.append(Relation(kind, hg, kg, rel.rhs))
        elif rel is not None and rel.kind == kind:
            # stored in the opposite order: emit as written in the reference
            cross.append(Relation(kind, rel.a, rel.b, rel.rhs))
        else:
            cross.append(Relation(kind, hg, kg, element_to_ast(rhs)))
    merged = merge_presentations(dbl.K.presentation, dbl.H.presentation,
                                 name="sd_derived", cross_relations=cross)
    return merged


def verify_route_equivalence(dbl: Double, count: int = 20, max_degree: int = 3,
                             seed: int = 0) -> VerificationReport:
    """Contraction route versus structure-constant route on random pairs."""
    import random
    rng = random.Random(seed)
    from .pairing import _h_basis
    hb = [m for m in _h_basis(dbl.H, max_degree)]
    kb = [m for m in _h_basis(dbl.K, max_degree)]
    with Timer() as t:
        status, residual = PASS, None
        pairs = [(rng.choice(hb), rng.choice(kb)) for _ in range(count)]
        for mh, mk in pairs:
            x = PbwElement(dbl.H, {mh: Scalar.one()})
            f = PbwElement(dbl.K, {mk: Scalar.one()})
            d = dbl.cross_product(x, f) - dbl.cross_product_via_structure_constants(x, f)
            if not d.is_zero():
                status = FAIL
                residual = (f"routes disagree at ({dbl.H.monomial_str(mh)}, "
                            f"{dbl.K.monomial_str(mk)}): {d!r}")
                break
    return VerificationReport(
        check="double-route-equivalence",
        target=f"{count} random pairs of degree <= {max_degree} (seed {seed})",
        cutoffs={"N": dbl.cutoffs.h_order, "W": dbl.cutoffs.word_degree},
        status=status, residual=residual, wall_time=t.elapsed)


def verify_universal_identity(dbl: Double, derived: HopfPresentation,
                              r_matrix: TensorElement, max_degree: int = 3,
                              cutoffs: Cutoffs = Cutoffs(),
                              compare_degree: int | None = None) -> VerificationReport:
    """(m (x) id)[(1 (x) R1 (x) R2) Psi(e_s)] = (1 (x) e_s) R for basis e_s."""
    with Timer() as t:
        d_eng = r_matrix.engines[0]
        d_ops = HopfOps(d_eng)
        status, residual = PASS, None
        checked = 0
        from .pairing import _h_basis
        for mono in _h_basis(dbl.H, max_degree):
            x = PbwElement(dbl.H, {mono: Scalar.one()})
            # Psi over H, embedded into the double
            psi3 = dbl.psi(x)
            emb = TensorElement((d_eng,) * 3,
                                {tuple(_remap(dbl.H, d_eng, m) for m in key): c
                                 for key, c in psi3.terms.items()}, psi3.truncated)
            big = TensorElement((d_eng,) * 3, {})
            for (r1, r2), rc in r_matrix.terms.items():
                one = (0,) * d_eng.n
                piece = TensorElement((d_eng,) * 3, {(one, r1, r2): rc})
                big = big + tensor_mul(piece, emb)
            lhs = _merge_first_two_legs(d_ops, big)
            x_d = PbwElement(d_eng, {_remap(dbl.H, d_eng, mono): Scalar.one()})
            rhs_t = tensor_mul(tensor_of(d_eng.one(), x_d), r_matrix)
            diff = lhs - rhs_t
            if compare_degree is not None:
                diff = diff.truncate_degree(compare_degree)
            checked += 1
            if not diff.is_zero():
                status = FAIL
                from .hopf import _first_residual_tensor
                residual = (f"universal identity fails on {dbl.H.monomial_str(mono)}: "
                            f"{_first_residual_tensor(diff)}")
                break
    return VerificationReport(
        check="universal-identity",
        target=f"basis elements of degree <= {max_degree}",
        cutoffs={"N": cutoffs.h_order, "W": cutoffs.word_degree, "D": max_degree},
        status=status,
        residual=residual,
        details=[f"{checked} basis elements checked"],
        wall_time=t.elapsed,
    )


def _merge_first_two_legs(d_ops: HopfOps, t3: TensorElement) -> TensorElement:
    """(m (x) id): multiply legs 1 and 2 in the double (no sign)."""
    eng = d_ops.engine
    out = TensorElement((eng, eng), {})
    for (m1, m2, m3), c in t3.terms.items():
        prod = eng.multiply(PbwElement(eng, {m1: Scalar.one()}),
                            PbwElement(eng, {m2: Scalar.one()}))
        piece = TensorElement((eng, eng),
                              {(mp, m3): pc for mp, pc in prod.terms.items()},
                              prod.truncated)
        out = out + piece.scale(c)
    return out
