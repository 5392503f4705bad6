"""PBW normal forms for presented superalgebras by oriented rewriting.

Monomials are exponent vectors over the presentation's generator order (odd
generators capped at exponent 1); a word is normal when its letters are
nondecreasing in that order and no odd letter repeats.  Relations orient as
rules moving later-ordered letters rightward:

    g_i g_j  ->  (-1)^{|i||j|} g_j g_i  +  bracket tail      (i > j)
    g g      ->  {g,g}/2                                      (g odd)

All computation lives in the quotient by (h^(N+1)) plus word degree > W; terms
beyond the cutoffs are dropped and recorded in a truncation flag.  Each rewrite
step strictly decreases the measure (N - h-valuation of the coefficient,
non-central word degree, inversion count), which is asserted per step; rule
tails are validated at build time to make that measure sound (pole-free
coefficients, and h-free tail terms must drop non-central degree).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .lang import Add, Div, Gen, HVar, Mul, Neg, Node, Num, Param, Pow, SeriesCall, Tensor
from .presentation import EVEN, ODD, HopfPresentation, PresentationError
from .scalars import Scalar, ScalarError, series_fn, _series_coeff

__all__ = ["Cutoffs", "RewriteError", "PbwElement", "Engine"]

CHECK_TERMINATION = True
STEP_BUDGET = 500_000


class RewriteError(RuntimeError):
    pass


@dataclass(frozen=True)
class Cutoffs:
    h_order: int = 6   # N: drop h-exponents above this
    word_degree: int = 10  # W: drop monomials of filtration degree above this

    def bumped(self, dn: int = 1, dw: int = 2) -> "Cutoffs":
        return Cutoffs(self.h_order + dn, self.word_degree + dw)


def _inversions(word, parities):
    inv = 0
    for i in range(len(word)):
        for j in range(i + 1, len(word)):
            if word[i] > word[j]:
                inv += 1
    return inv


class PbwElement:
    """Finite Scalar-linear combination of PBW monomials, with cutoff flags."""

    __slots__ = ("engine", "terms", "truncated")

    def __init__(self, engine: "Engine", terms: dict | None = None, truncated: bool = False):
        self.engine = engine
        self.terms = terms or {}
        self.truncated = truncated

    # -- constructors --------------------------------------------------------
    def _wrap(self, terms, truncated=False):
        return PbwElement(self.engine, terms, self.truncated or truncated)

    def copy(self):
        return PbwElement(self.engine, dict(self.terms), self.truncated)

    # -- linear structure ----------------------------------------------------
    def __add__(self, other: "PbwElement") -> "PbwElement":
        assert self.engine is other.engine, "presentation mismatch"
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(m, None)
            else:
                out[m] = s
        return PbwElement(self.engine, _clean(out), self.truncated or other.truncated)

    def __neg__(self):
        return self._wrap({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "PbwElement":
        if isinstance(c, (int, Fraction)):
            c = Scalar.from_fraction(c)
        N = self.engine.cutoffs.h_order
        out = {}
        for m, coeff in self.terms.items():
            s = (coeff * c).truncate(N)
            if not s.is_zero():
                out[m] = s
        return self._wrap(_clean(out))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        return self.engine.multiply(self, other)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.terms.values())

    def __eq__(self, other) -> bool:
        if isinstance(other, PbwElement):
            return (self - other).is_zero()
        return NotImplemented

    def __hash__(self):
        raise TypeError("PbwElement is not hashable")

    # -- structure -----------------------------------------------------------
    def parity(self):
        """0, 1, or None for zero / mixed."""
        seen = {self.engine.monomial_parity(m) for m, c in self.terms.items() if not c.is_zero()}
        if not seen:
            return None
        return seen.pop() if len(seen) == 1 else "mixed"

    def degree(self) -> int:
        degs = [self.engine.monomial_degree(m) for m, c in self.terms.items() if not c.is_zero()]
        return max(degs, default=0)

    def coefficient(self, mono) -> Scalar:
        return self.terms.get(tuple(mono), Scalar.zero())

    def map_coeffs(self, fn) -> "PbwElement":
        out = {}
        for m, c in self.terms.items():
            s = fn(c)
            if not s.is_zero():
                out[m] = s
        return self._wrap(_clean(out))

    def substitute(self, bindings=None, h_to_zero=False):
        return self.map_coeffs(lambda c: c.substitute(bindings, h_to_zero))

    def h_coefficient(self, k: int) -> "PbwElement":
        """Element of h^k coefficients (parameters only), as exact scalars."""
        return self.map_coeffs(lambda c: Scalar.from_poly(c.coeff(k)))

    def truncate_degree(self, max_degree: int) -> "PbwElement":
        """View with monomials above the total filtration degree removed."""
        kept = {m: c for m, c in self.terms.items()
                if self.engine.monomial_degree(m) <= max_degree}
        return PbwElement(self.engine, kept, self.truncated or len(kept) < len(self.terms))

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for m in sorted(self.terms):
            c = self.terms[m]
            word = self.engine.monomial_str(m)
            cs = repr(c)
            if len(c.coeffs) > 1 or c.trunc is not None or any(
                    len(p.terms) > 1 for p in c.coeffs.values()) or cs.startswith("-"):
                cs = f"({cs})"
            bits.append(f"{cs}*{word}" if word != "1" else cs)
        return " + ".join(bits)


def _clean(terms: dict) -> dict:
    return {m: c for m, c in terms.items() if not c.is_zero()}


class Engine:
    """Rewriting engine for one presentation at fixed cutoffs."""

    def __init__(self, presentation: HopfPresentation, cutoffs: Cutoffs = Cutoffs()):
        self.presentation = presentation
        self.cutoffs = cutoffs
        self.gen_names = presentation.gen_names()
        self.parities = tuple(g.parity for g in presentation.generators)
        self.degrees = tuple(g.degree for g in presentation.generators)
        self.n = len(self.gen_names)
        self.central = tuple(presentation.is_central(g.name) for g in presentation.generators)
        # expressions are evaluated with h-order headroom so that divisions by
        # powers of h (and by sinh(h)) still deliver full precision at h_order
        self._eval_order = cutoffs.h_order + 3
        self._rules: dict = {}
        self._product_cache: dict = {}
        self._build_rules()

    # -- monomial helpers ----------------------------------------------------
    def one(self) -> PbwElement:
        return PbwElement(self, {(0,) * self.n: Scalar.one()})

    def zero(self) -> PbwElement:
        return PbwElement(self, {})

    def generator(self, name: str) -> PbwElement:
        i = self.presentation.gen_index(name)
        mono = tuple(1 if j == i else 0 for j in range(self.n))
        return PbwElement(self, {mono: Scalar.one()})

    def element(self, terms: dict) -> PbwElement:
        return PbwElement(self, _clean({tuple(m): c for m, c in terms.items()}))

    def monomial_parity(self, mono) -> int:
        return sum(e for e, p in zip(mono, self.parities) if p == ODD) % 2

    def monomial_degree(self, mono) -> int:
        return sum(e * d for e, d in zip(mono, self.degrees))

    def word_degree(self, word) -> int:
        return sum(self.degrees[i] for i in word)

    def word_degree_noncentral(self, word) -> int:
        return sum(self.degrees[i] for i in word if not self.central[i])

    def word_degree_central(self, word) -> int:
        return sum(self.degrees[i] for i in word if self.central[i])

    def monomial_degree_central(self, mono) -> int:
        return sum(e * d for e, d, c in zip(mono, self.degrees, self.central) if c)

    def monomial_to_word(self, mono):
        out = []
        for i, e in enumerate(mono):
            out.extend([i] * e)
        return tuple(out)

    def word_to_monomial(self, word):
        mono = [0] * self.n
        for i in word:
            mono[i] += 1
        return tuple(mono)

    def monomial_str(self, mono) -> str:
        bits = []
        for name, e in zip(self.gen_names, mono):
            if e == 1:
                bits.append(name)
            elif e > 1:
                bits.append(f"{name}^{e}")
        return "*".join(bits) if bits else "1"

    # -- rules ---------------------------------------------------------------
    def _build_rules(self):
        pres = self.presentation
        declared = {}
        for rel in pres.relations:
            ia, ib = pres.gen_index(rel.a), pres.gen_index(rel.b)
            declared[(ia, ib)] = rel
        for i in range(self.n):
            for j in range(self.n):
                if i < j:
                    continue
                if i == j and self.parities[i] == EVEN:
                    continue
                sign = -1 if (self.parities[i] == ODD and self.parities[j] == ODD) else 1
                rel = declared.get((i, j)) or declared.get((j, i))
                if rel is None:
                    tail = {}
                elif (pres.gen_index(rel.a), pres.gen_index(rel.b)) == (i, j):
                    # rel: g_i g_j - sign g_j g_i = rhs
                    tail = self._raw_words(rel.rhs)
                else:
                    # rel: g_j g_i - sign g_i g_j = rhs  =>  tail = -sign * rhs
                    tail = {w: c * (-sign) for w, c in self._raw_words(rel.rhs).items()}
                if i == j:
                    # odd square: 2 g^2 = {g,g}  =>  g g -> rhs/2, no swap term
                    tail = {w: c * Fraction(1, 2) for w, c in tail.items()}
                    self._rules[(i, j)] = (None, tail)
                else:
                    self._rules[(i, j)] = (sign, tail)
        # soundness: tails must be PBW-normal, pole-free, and compatible with
        # the termination measure (h-free tail terms drop non-central degree)
        for (i, j), (_, tail) in self._rules.items():
            pair_deg = self.word_degree_noncentral((i, j))
            for word, c in tail.items():
                if self._first_descent(word) is not None:
                    raise PresentationError(
                        f"relation tail for ({self.gen_names[i]},{self.gen_names[j]}) "
                        f"is not in PBW normal form")
                if c.pole_order > 0:
                    raise PresentationError(
                        f"structure constant for ({self.gen_names[i]},{self.gen_names[j]}) "
                        f"has a pole in h")
                v = c.valuation()
                if (v is None or v == 0) and self.word_degree_noncentral(word) >= pair_deg:
                    raise PresentationError(
                        f"cannot orient relation ({self.gen_names[i]},{self.gen_names[j]}) "
                        f"terminatingly: h-free tail term does not drop degree")

    def _first_descent(self, word):
        for k in range(len(word) - 1):
            a, b = word[k], word[k + 1]
            if a > b or (a == b and self.parities[a] == ODD):
                return k
        return None

    # -- normal form ---------------------------------------------------------
    def normal_form(self, word, coeff: Scalar | None = None) -> PbwElement:
        """PBW-ordered combination equal to the word in the quotient algebra."""
        N, W = self.cutoffs.h_order, self.cutoffs.word_degree
        coeff = Scalar.one().truncate(N) if coeff is None else coeff.truncate(N)
        out: dict = {}
        truncated = False
        work = [(coeff, tuple(word))]
        steps = 0
        while work:
            c, w = work.pop()
            if _droppable(c, N):
                continue
            # central letters never disappear under rewriting, so this prune is
            # exact: such a word cannot contribute below the degree cutoff
            if self.word_degree_central(w) > W:
                truncated = True
                continue
            k = self._first_descent(w)
            if k is None:
                m = self.word_to_monomial(w)
                prev = out.get(m)
                out[m] = c if prev is None else prev + c
                continue
            steps += 1
            if steps > STEP_BUDGET:
                raise RewriteError("rewrite step budget exceeded (non-terminating?)")
            if CHECK_TERMINATION:
                parent = self._measure(c, w)
            sign, tail = self._rules[(w[k], w[k + 1])]
            prefix, suffix = w[:k], w[k + 2:]
            if sign is not None:
                swapped = prefix + (w[k + 1], w[k]) + suffix
                cs = c if sign == 1 else -c
                if CHECK_TERMINATION:
                    self._assert_decrease(parent, cs, swapped, c, w)
                work.append((cs, swapped))
            for tw, tc in tail.items():
                nc = (c * tc).truncate(N)
                if _droppable(nc, N):
                    continue
                nw = prefix + tw + suffix
                if CHECK_TERMINATION:
                    self._assert_decrease(parent, nc, nw, c, w)
                work.append((nc, nw))
        return PbwElement(self, _clean(out), truncated)

    def _measure(self, c: Scalar, w):
        v = c.valuation()
        if v is None:
            # zero known to O(h^(t+1)) behaves like valuation t+1
            v = (c.trunc + 1) if c.trunc is not None else self.cutoffs.h_order + 1
        return (self.cutoffs.h_order - v, self.word_degree_noncentral(w),
                _inversions(w, self.parities))

    def _assert_decrease(self, parent, c, w, pc, pw):
        child = self._measure(c, w)
        if not child < parent:
            raise RewriteError(
                f"termination measure did not decrease: {pw} -> {w} ({parent} -> {child})")

    def multiply(self, a: PbwElement, b: PbwElement) -> PbwElement:
        assert a.engine is self and b.engine is self, "presentation mismatch"
        N = self.cutoffs.h_order
        out = self.zero()
        out.truncated = a.truncated or b.truncated
        for ma, ca in a.terms.items():
            for mb, cb in b.terms.items():
                c = (ca * cb).truncate(N)
                if _droppable(c, N):
                    continue
                key = (ma, mb)
                nf = self._product_cache.get(key)
                if nf is None:
                    nf = self.normal_form(self.monomial_to_word(ma) + self.monomial_to_word(mb))
                    self._product_cache[key] = nf
                out = out + nf.scale(c)
        return out

    def multiply_all(self, factors) -> PbwElement:
        out = self.one()
        for f in factors:
            out = self.multiply(out, f)
        return out

    # -- central series ------------------------------------------------------
    def central_series(self, fn: str, coeff: Scalar, gen_name: str, order=None) -> PbwElement:
        """sum_k c_k (coeff^k) g^k for the Maclaurin coefficients c_k of fn.

        ``order`` is the h-order to carry; expression evaluation passes the
        margin order so that later divisions keep full precision.
        """
        if not self.presentation.is_central(gen_name):
            raise PresentationError(f"series function on non-central generator {gen_name!r}")
        i = self.presentation.gen_index(gen_name)
        if order is None:
            order = self.cutoffs.h_order
        W = self.cutoffs.word_degree
        coeff = coeff.truncate(order)
        v = coeff.valuation()
        if v is not None and v < 0:
            raise ScalarError(f"{fn} of a coefficient with a pole in h")
        # the generator is central, so its powers are bounded by the central
        # degree cutoff; an h factor in the coefficient bounds them further
        kmax = W // max(1, self.degrees[i])
        if v is not None and v > 0:
            kmax = min(kmax, order // v)
        terms = {}
        power = Scalar.one().truncate(order)
        c0 = _series_coeff(fn, 0)
        if c0:
            terms[(0,) * self.n] = Scalar.from_fraction(c0, trunc=order)
        for k in range(1, kmax + 1):
            power = (power * coeff).truncate(order)
            ck = _series_coeff(fn, k)
            if not ck or power.is_zero():
                continue
            mono = tuple(k if j == i else 0 for j in range(self.n))
            terms[mono] = power * ck
        return PbwElement(self, _clean(terms), False)

    # -- expression evaluation ------------------------------------------------
    def evaluate(self, node: Node, normalize: bool = True) -> PbwElement:
        """Evaluate an algebra-level expression AST to a PbwElement."""
        N = self.cutoffs.h_order
        raw, den = self._eval(node)
        if den is not None:
            raw = {w: c.div(den) for w, c in raw.items()}
        raw = {w: c.truncate(N) for w, c in raw.items()}
        if not normalize:
            for w in raw:
                if self._first_descent(w) is not None:
                    raise PresentationError("expression is not in PBW normal form")
            return self.element({self.word_to_monomial(w): c for w, c in raw.items()})
        out = self.zero()
        for w, c in raw.items():
            out = out + self.normal_form(w, c)
        return out

    def evaluate_scalar(self, node: Node) -> Scalar:
        el = self.evaluate(node)
        unit = (0,) * self.n
        for m, c in el.terms.items():
            if m != unit and not c.is_zero():
                raise PresentationError("expected a scalar expression")
        return el.terms.get(unit, Scalar.zero(self.cutoffs.h_order))

    def _raw_words(self, node: Node) -> dict:
        raw, den = self._eval(node)
        if den is not None:
            raw = {w: c.div(den) for w, c in raw.items()}
        raw = {w: c.truncate(self.cutoffs.h_order) for w, c in raw.items()}
        return _cleanw(raw)

    def _eval(self, node: Node):
        """Evaluate to (word -> Scalar, deferred denominator or None); words raw."""
        N = self._eval_order
        if isinstance(node, Num):
            return ({(): Scalar.from_fraction(node.value)} if node.value else {}), None
        if isinstance(node, HVar):
            return {(): Scalar.h()}, None
        if isinstance(node, Param):
            if node.name not in self.presentation.params:
                raise PresentationError(f"unbound parameter {node.name!r}")
            return {(): Scalar.param(node.name)}, None
        if isinstance(node, Gen):
            if node.name in self.presentation.params:
                return {(): Scalar.param(node.name)}, None
            i = self.presentation.gen_index(node.name)
            return {(i,): Scalar.one()}, None
        if isinstance(node, Neg):
            raw, den = self._eval(node.arg)
            return {w: -c for w, c in raw.items()}, den
        if isinstance(node, Add):
            total: dict = {}
            total_den = None
            for t in node.terms:
                raw, den = self._eval(t)
                if den is not None:
                    # fold invertible denominators immediately, defer the rest
                    try:
                        raw = {w: c.div(den) for w, c in raw.items()}
                        den = None
                    except ScalarError:
                        pass
                if den is None:
                    if total_den is not None:
                        raw = {w: c * total_den for w, c in raw.items()}
                elif total_den is None:
                    total = {w: c * den for w, c in total.items()}
                    total_den = den
                else:
                    raw = {w: c * total_den for w, c in raw.items()}
                    total = {w: c * den for w, c in total.items()}
                    total_den = total_den * den
                for w, c in raw.items():
                    prev = total.get(w)
                    total[w] = c if prev is None else prev + c
            return _cleanw(total), total_den
        if isinstance(node, Mul):
            raw: dict = {(): Scalar.one()}
            den = None
            for f in node.factors:
                fraw, fden = self._eval(f)
                if fden is not None:
                    den = fden if den is None else den * fden
                raw = self._raw_mul(raw, fraw)
            return raw, den
        if isinstance(node, Pow):
            raw: dict = {(): Scalar.one()}
            den = None
            base_raw, base_den = self._eval(node.base)
            for _ in range(node.exp):
                raw = self._raw_mul(raw, base_raw)
                if base_den is not None:
                    den = base_den if den is None else den * base_den
            return raw, den
        if isinstance(node, Div):
            nraw, nden = self._eval(node.num)
            draw, dden = self._eval(node.den)
            dscalar = _as_scalar(draw)
            if dscalar is None:
                raise PresentationError("division by a non-scalar expression")
            if dden is not None:
                # (a/d1) / (b/d2) = a d2 / (d1 b)
                nraw = {w: c * dden for w, c in nraw.items()}
            den = dscalar if nden is None else nden * dscalar
            return nraw, den
        if isinstance(node, SeriesCall):
            araw, aden = self._eval(node.arg)
            scal = _as_scalar(araw)
            if scal is not None:
                if aden is not None:
                    scal = scal.div(aden)
                return {(): series_fn(node.fn, scal.truncate(N), order=N)}, None
            gens = {w for w in araw if w}
            if len(gens) != 1 or len(next(iter(gens))) != 1 or araw.get(()) not in (None,):
                raise PresentationError(
                    "series argument must be a scalar multiple of one central generator")
            (gi,) = next(iter(gens))
            coeff = araw[(gi,)]
            if aden is not None:
                coeff = coeff.div(aden)
            el = self.central_series(node.fn, coeff, self.gen_names[gi], order=N)
            return {self.monomial_to_word(m): c for m, c in el.terms.items()}, None
        if isinstance(node, Tensor):
            raise PresentationError("tensor expression where an algebra element was expected")
        raise TypeError(node)

    def _raw_mul(self, a: dict, b: dict) -> dict:
        N = self._eval_order
        W = self.cutoffs.word_degree
        out: dict = {}
        for wa, ca in a.items():
            for wb, cb in b.items():
                w = wa + wb
                if self.word_degree_central(w) > W:
                    continue
                c = (ca * cb).truncate(N)
                prev = out.get(w)
                out[w] = c if prev is None else prev + c
        return _cleanw(out)

    # -- confluence ----------------------------------------------------------
    def _rewrite_once(self, word, pos):
        """One rule application at pos; returns list of (coeff, word)."""
        sign, tail = self._rules[(word[pos], word[pos + 1])]
        prefix, suffix = word[:pos], word[pos + 2:]
        out = []
        if sign is not None:
            out.append((Scalar.from_fraction(sign), prefix + (word[pos + 1], word[pos]) + suffix))
        for tw, tc in tail.items():
            out.append((tc, prefix + tw + suffix))
        return out

    def check_confluence(self):
        """Resolve every length-3 overlap ambiguity both ways; list the failures.

        Returns (ok, failures) where failures are (word, left nf, right nf).
        """
        reducible = set(self._rules.keys())
        failures = []
        checked = 0
        for i in range(self.n):
            for j in range(self.n):
                for k in range(self.n):
                    if (i, j) not in reducible or (j, k) not in reducible:
                        continue
                    word = (i, j, k)
                    checked += 1
                    left = self.zero()
                    for c, w in self._rewrite_once(word, 0):
                        left = left + self.normal_form(w, c)
                    right = self.zero()
                    for c, w in self._rewrite_once(word, 1):
                        right = right + self.normal_form(w, c)
                    if not (left - right).is_zero():
                        failures.append((tuple(self.gen_names[x] for x in word), left, right))
        return (not failures, failures, checked)


def _cleanw(raw: dict) -> dict:
    return {w: c for w, c in raw.items() if not c.is_zero()}


def _droppable(c, N: int) -> bool:
    """A coefficient carries no information at or below h^N."""
    if not c.is_zero():
        return False
    return c.trunc is None or c.trunc >= N


def _as_scalar(raw: dict):
    for w, c in raw.items():
        if w and not c.is_zero():
            return None
    return raw.get((), Scalar.zero())
