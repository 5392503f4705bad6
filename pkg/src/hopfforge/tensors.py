"""2- and 3-leg graded tensor products of PBW elements with Koszul signs.

Multiplication is legwise with the sign (-1)^(sum_{i<j} |y_i||x_j|) for
(x_1 (x) ... (x) x_n)(y_1 (x) ... (x) y_n); the graded flip carries
(-1)^{|x||y|}.  Legs may belong to different presentations (different engines).
"""

from __future__ import annotations

from fractions import Fraction

from .lang import Add, Mul, Neg, Node, Num, Tensor
from .pbw import Engine, PbwElement, _droppable
from .presentation import PresentationError
from .scalars import Scalar

__all__ = ["TensorElement", "tensor_of", "evaluate_tensor", "exp_tensor"]


class TensorElement:
    __slots__ = ("engines", "terms", "truncated")

    def __init__(self, engines, terms=None, truncated=False):
        self.engines = tuple(engines)
        self.terms = terms or {}
        self.truncated = truncated

    @property
    def legs(self) -> int:
        return len(self.engines)

    @staticmethod
    def zero(engines) -> "TensorElement":
        return TensorElement(engines)

    @staticmethod
    def unit(engines) -> "TensorElement":
        key = tuple((0,) * e.n for e in engines)
        return TensorElement(engines, {key: Scalar.one()})

    # -- linear structure -----------------------------------------------------
    def __add__(self, other: "TensorElement") -> "TensorElement":
        assert self.engines == other.engines or all(
            a is b for a, b in zip(self.engines, other.engines)), "leg mismatch"
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return TensorElement(self.engines, out, self.truncated or other.truncated)

    def __neg__(self):
        return TensorElement(self.engines, {k: -c for k, c in self.terms.items()}, self.truncated)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TensorElement":
        if isinstance(c, (int, Fraction)):
            c = Scalar.from_fraction(c)
        N = min(e.cutoffs.h_order for e in self.engines)
        out = {}
        for k, coeff in self.terms.items():
            s = (coeff * c).truncate(N)
            if not s.is_zero():
                out[k] = s
        return TensorElement(self.engines, out, self.truncated)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.terms.values())

    def __eq__(self, other):
        if isinstance(other, TensorElement):
            return (self - other).is_zero()
        return NotImplemented

    def __hash__(self):
        raise TypeError("TensorElement is not hashable")

    def coefficient(self, monos) -> Scalar:
        return self.terms.get(tuple(tuple(m) for m in monos), Scalar.zero())

    def map_coeffs(self, fn) -> "TensorElement":
        out = {}
        for k, c in self.terms.items():
            s = fn(c)
            if not s.is_zero():
                out[k] = s
        return TensorElement(self.engines, out, self.truncated)

    def parity_of_key(self, key) -> int:
        return sum(e.monomial_parity(m) for e, m in zip(self.engines, key)) % 2

    def parity(self):
        seen = {self.parity_of_key(k) for k, c in self.terms.items() if not c.is_zero()}
        if not seen:
            return None
        return seen.pop() if len(seen) == 1 else "mixed"

    def degree_of_key(self, key) -> int:
        return sum(e.monomial_degree(m) for e, m in zip(self.engines, key))

    def central_degree_of_key(self, key) -> int:
        return sum(e.monomial_degree_central(m) for e, m in zip(self.engines, key))

    def min_degree(self):
        degs = [self.degree_of_key(k) for k, c in self.terms.items() if not c.is_zero()]
        return min(degs, default=None)

    def truncate_degree(self, max_degree: int) -> "TensorElement":
        kept = {k: c for k, c in self.terms.items() if self.degree_of_key(k) <= max_degree}
        return TensorElement(self.engines, kept, self.truncated or len(kept) < len(self.terms))

    # -- multiplication --------------------------------------------------------
    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            return self.scale(other)
        return tensor_mul(self, other)

    __rmul__ = scale

    # -- leg operations ----------------------------------------------------------
    def flip(self) -> "TensorElement":
        """Graded flip of a 2-leg tensor: x(x)y -> (-1)^{|x||y|} y(x)x."""
        assert self.legs == 2, "graded flip needs a 2-leg tensor"
        e1, e2 = self.engines
        out: dict = {}
        for (m1, m2), c in self.terms.items():
            sign = -1 if (e1.monomial_parity(m1) and e2.monomial_parity(m2)) else 1
            key = (m2, m1)
            s = c if sign == 1 else -c
            prev = out.get(key)
            out[key] = s if prev is None else prev + s
        return TensorElement((e2, e1), out, self.truncated)

    def flip_adjacent(self, pos: int) -> "TensorElement":
        """Graded flip of legs pos, pos+1 inside an n-leg tensor."""
        engines = list(self.engines)
        engines[pos], engines[pos + 1] = engines[pos + 1], engines[pos]
        out: dict = {}
        for key, c in self.terms.items():
            pa = self.engines[pos].monomial_parity(key[pos])
            pb = self.engines[pos + 1].monomial_parity(key[pos + 1])
            nk = list(key)
            nk[pos], nk[pos + 1] = nk[pos + 1], nk[pos]
            nk = tuple(nk)
            s = -c if (pa and pb) else c
            prev = out.get(nk)
            out[nk] = s if prev is None else prev + s
        return TensorElement(tuple(engines), out, self.truncated)

    def insert_unit_leg(self, pos: int, engine: Engine) -> "TensorElement":
        """R -> R_{13}-style embedding: insert the unit in a new leg at pos."""
        unit = (0,) * engine.n
        engines = self.engines[:pos] + (engine,) + self.engines[pos:]
        out = {}
        for key, c in self.terms.items():
            out[key[:pos] + (unit,) + key[pos:]] = c
        return TensorElement(engines, out, self.truncated)

    def apply_leg(self, pos: int, fn) -> "TensorElement":
        """Apply an even linear map (monomial -> PbwElement) to one leg."""
        W = min(e.cutoffs.word_degree for e in self.engines)
        out = TensorElement.zero(self.engines)
        for key, c in self.terms.items():
            img = fn(key[pos])
            terms = {}
            for m, mc in img.terms.items():
                nk = key[:pos] + (m,) + key[pos + 1:]
                if self.central_degree_of_key(nk) <= W:
                    terms[nk] = mc
            out = out + TensorElement(self.engines, terms, img.truncated).scale(c)
        return out

    def expand_leg(self, pos: int, fn) -> "TensorElement":
        """Replace leg pos by the two legs of fn(monomial) (an even map into a
        2-leg tensor), splicing in place; used for coproduct leg application."""
        sample = None
        out_terms: dict = {}
        truncated = self.truncated
        W = min(e.cutoffs.word_degree for e in self.engines)
        for key, c in self.terms.items():
            img = fn(key[pos])  # TensorElement with 2 legs
            sample = img
            truncated = truncated or img.truncated
            for ik, ic in img.terms.items():
                nk = key[:pos] + ik + key[pos + 1:]
                s = ic * c
                prev = out_terms.get(nk)
                out_terms[nk] = s if prev is None else prev + s
        if sample is None:
            engines = self.engines[:pos] + (self.engines[pos], self.engines[pos]) + self.engines[pos + 1:]
            return TensorElement(engines, {}, truncated)
        engines = self.engines[:pos] + sample.engines + self.engines[pos + 1:]
        N = min(e.cutoffs.h_order for e in engines)

        def central(k):
            return sum(e.monomial_degree_central(m) for e, m in zip(engines, k))

        out_terms = {k: v.truncate(N) for k, v in out_terms.items()
                     if not v.is_zero() and central(k) <= W}
        return TensorElement(engines, out_terms, truncated)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for key in sorted(self.terms):
            c = self.terms[key]
            word = " (x) ".join(e.monomial_str(m) for e, m in zip(self.engines, key))
            bits.append(f"({c!r})*[{word}]")
        return " + ".join(bits)


def tensor_mul(a: TensorElement, b: TensorElement) -> TensorElement:
    """Legwise product with the Koszul sign."""
    if a.legs != b.legs or any(x is not y for x, y in zip(a.engines, b.engines)):
        raise PresentationError("tensor leg mismatch")
    engines = a.engines
    N = min(e.cutoffs.h_order for e in engines)
    W = min(e.cutoffs.word_degree for e in engines)
    out = TensorElement.zero(engines)
    acc: dict = {}
    truncated = a.truncated or b.truncated
    for ka, ca in a.terms.items():
        pa = [engines[i].monomial_parity(ka[i]) for i in range(len(engines))]
        for kb, cb in b.terms.items():
            pb = [engines[i].monomial_parity(kb[i]) for i in range(len(engines))]
            sgn = 0
            for i in range(len(engines)):
                for j in range(i + 1, len(engines)):
                    sgn += pb[i] * pa[j]
            c = (ca * cb).truncate(N)
            if sgn % 2:
                c = -c
            if _droppable(c, N):
                continue
            # legwise normal-form products
            legs = [engines[i].multiply(
                PbwElement(engines[i], {ka[i]: Scalar.one()}),
                PbwElement(engines[i], {kb[i]: Scalar.one()})) for i in range(len(engines))]
            truncated = truncated or any(l.truncated for l in legs)
            _distribute(acc, legs, c, N, W)
    out = TensorElement(engines, {k: v for k, v in acc.items() if not v.is_zero()}, truncated)
    return out


def _distribute(acc, legs, c, N, W=None):
    """Accumulate the outer product of leg elements times c into acc.

    Keys whose total central degree exceeds W live in the tensor-square image
    of the engine's central-degree ideal and are quotiented away.
    """
    engines = [l.engine for l in legs]

    def central(key):
        return sum(e.monomial_degree_central(m) for e, m in zip(engines, key))

    def rec(i, key, coeff):
        if _droppable(coeff, N):
            return
        if i == len(legs):
            if W is not None and central(key) > W:
                return
            s = coeff.truncate(N)
            prev = acc.get(key)
            acc[key] = s if prev is None else prev + s
            return
        for m, mc in legs[i].terms.items():
            rec(i + 1, key + (m,), coeff * mc)
    rec(0, (), c)


def tensor_of(*elements: PbwElement) -> TensorElement:
    """Pure tensor of algebra elements (no signs: this is not a product)."""
    engines = tuple(el.engine for el in elements)
    out = TensorElement.zero(engines)
    acc: dict = {}
    N = min(e.cutoffs.h_order for e in engines)
    W = min(e.cutoffs.word_degree for e in engines)
    _distribute(acc, list(elements), Scalar.one(), N, W)
    return TensorElement(engines, {k: v for k, v in acc.items() if not v.is_zero()},
                         any(el.truncated for el in elements))


def exp_tensor(x: TensorElement, degree_cutoff: int) -> TensorElement:
    """sum_{n<=degree_cutoff} x^n / n! for an even, filtration-positive x."""
    if x.parity() not in (0, None):
        raise PresentationError("exp of a tensor that is not even")
    md = x.min_degree()
    if md is not None and md < 1:
        raise PresentationError("exp of a tensor with a filtration-degree-0 term")
    out = TensorElement.unit(x.engines)
    power = TensorElement.unit(x.engines)
    fact = Fraction(1)
    for n in range(1, degree_cutoff + 1):
        power = tensor_mul(power, x)
        fact = fact / n
        if power.is_zero():
            break
        out = out + power.scale(fact)
    return out


def evaluate_tensor(engine: Engine, node: Node, legs: int = 2) -> TensorElement:
    """Evaluate a coproduct-style expression: a sum of leg tensors over one engine."""
    engines = (engine,) * legs
    if isinstance(node, Num) and node.value == 0:
        return TensorElement.zero(engines)
    if isinstance(node, Add):
        out = TensorElement.zero(engines)
        for t in node.terms:
            out = out + evaluate_tensor(engine, t, legs)
        return out
    if isinstance(node, Neg):
        return -evaluate_tensor(engine, node.arg, legs)
    if isinstance(node, Tensor):
        if len(node.legs) != legs:
            raise PresentationError(f"expected a {legs}-leg tensor")
        return tensor_of(*(engine.evaluate(l) for l in node.legs))
    if isinstance(node, Mul):
        # split scalar prefactors from one tensor factor
        tensors = [f for f in node.factors if _has_tensor(f)]
        scalars = [f for f in node.factors if not _has_tensor(f)]
        if len(tensors) != 1:
            raise PresentationError("expected scalar * tensor")
        out = evaluate_tensor(engine, tensors[0], legs)
        for s in scalars:
            out = out.scale(engine.evaluate_scalar(s))
        return out
    raise PresentationError(f"cannot evaluate {node!r} as a {legs}-leg tensor")


def _has_tensor(node: Node) -> bool:
    from .lang import ast_atoms
    return any(isinstance(a, Tensor) for a in ast_atoms(node))
