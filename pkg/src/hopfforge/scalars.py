"""Exact coefficient arithmetic: rationals, parameter polynomials, truncated Laurent series.

Every structure constant in the kernel is a ``Scalar``: a Laurent series in the single
deformation variable ``h``, truncated at a known order, whose coefficients are
multivariate polynomials over Q in named parameters (mu, theta, p, alpha, ...).
Parameters are exact indeterminates, never floats.

Precision bookkeeping: ``trunc`` is the largest h-exponent whose coefficient is
known; ``None`` means the value is exact (a Laurent polynomial).  Multiplication
and division propagate precision through valuations, so pole factors such as
1/sinh(h) cannot silently launder unknown coefficients into the known range.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

__all__ = ["ScalarError", "ParamPoly", "Scalar", "series_fn"]

Q0 = Fraction(0)
Q1 = Fraction(1)

# key: sorted tuple of (parameter name, positive exponent)
PPKey = tuple


class ScalarError(ArithmeticError):
    """Raised for invalid scalar operations (bad division, bad series argument)."""


def _key_mul(a: PPKey, b: PPKey) -> PPKey:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for name, e in b:
        d[name] = d.get(name, 0) + e
    return tuple(sorted(d.items()))


class ParamPoly:
    """Polynomial over Q in named parameters; no zero coefficients stored."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = terms or {}

    @staticmethod
    def const(q) -> "ParamPoly":
        q = Fraction(q)
        return ParamPoly({(): q} if q else {})

    @staticmethod
    def var(name: str, exp: int = 1) -> "ParamPoly":
        if exp == 0:
            return ParamPoly.const(1)
        return ParamPoly({((name, exp),): Q1})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not k for k in self.terms)

    @property
    def constant(self) -> Fraction:
        return self.terms.get((), Q0)

    def names(self) -> set:
        return {name for key in self.terms for name, _ in key}

    def __eq__(self, other) -> bool:
        return isinstance(other, ParamPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "ParamPoly") -> "ParamPoly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, Q0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return ParamPoly(out)

    def __neg__(self) -> "ParamPoly":
        return ParamPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "ParamPoly") -> "ParamPoly":
        return self + (-other)

    def __mul__(self, other) -> "ParamPoly":
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if not q:
                return ParamPoly()
            return ParamPoly({k: v * q for k, v in self.terms.items()})
        out: dict = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                k = _key_mul(ka, kb)
                s = out.get(k, Q0) + va * vb
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return ParamPoly(out)

    __rmul__ = __mul__

    def substitute(self, bindings: dict) -> "Scalar":
        """Replace parameters by Fractions or Scalars; unbound names stay symbolic."""
        total = Scalar.zero()
        for key, q in self.terms.items():
            factor = Scalar.from_fraction(q)
            residual: dict = {}
            for name, e in key:
                if name in bindings:
                    val = bindings[name]
                    val = val if isinstance(val, Scalar) else Scalar.from_fraction(Fraction(val))
                    factor = factor * val.pow(e)
                else:
                    residual[name] = e
            if residual:
                factor = factor * Scalar.from_poly(ParamPoly({tuple(sorted(residual.items())): Q1}))
            total = total + factor
        return total

    def divide_exact(self, other: "ParamPoly"):
        """Exact polynomial division; returns None when the quotient does not exist."""
        if other.is_zero():
            raise ScalarError("division by zero polynomial")
        if other.is_constant():
            return self * (Q1 / other.constant)
        # single-divisor reduction in a fixed monomial order
        def order_key(k):
            return (sum(e for _, e in k), k)
        lt_key = max(other.terms, key=order_key)
        lt_coeff = other.terms[lt_key]
        lt = dict(lt_key)
        rem = dict(self.terms)
        quot: dict = {}
        while rem:
            k = max(rem, key=order_key)
            v = rem[k]
            kd = dict(k)
            if any(kd.get(n, 0) < e for n, e in lt.items()):
                return None
            qk = tuple(sorted((n, e) for n, e in ((n, kd.get(n, 0) - lt.get(n, 0)) for n in set(kd) | set(lt)) if e))
            qv = v / lt_coeff
            quot[qk] = quot.get(qk, Q0) + qv
            prod = ParamPoly(dict(other.terms)) * ParamPoly({qk: qv})
            rem_pp = ParamPoly(rem) - prod
            rem = rem_pp.terms
        return ParamPoly({k: v for k, v in quot.items() if v})

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for key in sorted(self.terms, key=lambda k: (sum(e for _, e in k), k)):
            q = self.terms[key]
            mono = "*".join(f"{n}^{e}" if e > 1 else n for n, e in key)
            if mono:
                bits.append(f"{q}*{mono}" if q != 1 else mono)
            else:
                bits.append(str(q))
        return " + ".join(bits)


def _minsum(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _addcap(t, v):
    return None if t is None else t + v


class Scalar:
    """Truncated Laurent series in h with ParamPoly coefficients.

    coeffs maps h-exponent -> nonzero ParamPoly; trunc = largest known exponent
    (None = exact).  Stored exponents never exceed trunc.
    """

    __slots__ = ("coeffs", "trunc")

    def __init__(self, coeffs: dict | None = None, trunc=None):
        self.coeffs = coeffs or {}
        self.trunc = trunc

    # -- constructors -------------------------------------------------------
    @staticmethod
    def zero(trunc=None) -> "Scalar":
        return Scalar({}, trunc)

    @staticmethod
    def one() -> "Scalar":
        return Scalar({0: ParamPoly.const(1)})

    @staticmethod
    def from_fraction(q, trunc=None) -> "Scalar":
        q = Fraction(q)
        return Scalar({0: ParamPoly.const(q)} if q else {}, trunc)

    @staticmethod
    def from_poly(p: ParamPoly, trunc=None) -> "Scalar":
        return Scalar({0: p} if not p.is_zero() else {}, trunc)

    @staticmethod
    def h(exp: int = 1) -> "Scalar":
        return Scalar({exp: ParamPoly.const(1)})

    @staticmethod
    def param(name: str) -> "Scalar":
        return Scalar({0: ParamPoly.var(name)})

    # -- structure ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def valuation(self):
        """Lowest stored h-exponent; None for the zero value."""
        return min(self.coeffs) if self.coeffs else None

    @property
    def pole_order(self) -> int:
        v = self.valuation()
        return max(0, -v) if v is not None else 0

    def coeff(self, k: int) -> ParamPoly:
        return self.coeffs.get(k, ParamPoly())

    def names(self) -> set:
        out = set()
        for p in self.coeffs.values():
            out |= p.names()
        return out

    def truncate(self, order) -> "Scalar":
        if order is None:
            return self
        t = order if self.trunc is None else min(order, self.trunc)
        return Scalar({k: v for k, v in self.coeffs.items() if k <= t}, t)

    def known_to(self, order: int) -> bool:
        return self.trunc is None or self.trunc >= order

    # -- ring operations ----------------------------------------------------
    def __add__(self, other: "Scalar") -> "Scalar":
        t = _minsum(self.trunc, other.trunc)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            s = out.get(k, ParamPoly()) + v
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        if t is not None:
            out = {k: v for k, v in out.items() if k <= t}
        return Scalar(out, t)

    def __neg__(self) -> "Scalar":
        return Scalar({k: -v for k, v in self.coeffs.items()}, self.trunc)

    def __sub__(self, other: "Scalar") -> "Scalar":
        return self + (-other)

    def __mul__(self, other) -> "Scalar":
        if isinstance(other, (int, Fraction)):
            other = Scalar.from_fraction(other)
        if isinstance(other, ParamPoly):
            other = Scalar.from_poly(other)
        va, vb = self.valuation(), other.valuation()
        if va is None or vb is None:
            # zero times anything: an exact zero gives an exact zero; a zero
            # known to O(h^(t+1)) shifts by the other factor's valuation
            if va is None and self.trunc is None:
                return Scalar.zero()
            if vb is None and other.trunc is None:
                return Scalar.zero()
            if va is None and vb is None:
                return Scalar.zero(self.trunc + other.trunc + 1)
            if va is None:
                return Scalar.zero(self.trunc + vb)
            return Scalar.zero(other.trunc + va)
        t = _minsum(_addcap(self.trunc, vb), _addcap(other.trunc, va))
        out: dict = {}
        for ka, pa in self.coeffs.items():
            for kb, pb in other.coeffs.items():
                k = ka + kb
                if t is not None and k > t:
                    continue
                s = out.get(k, ParamPoly()) + pa * pb
                if s.is_zero():
                    out.pop(k, None)
                else:
                    out[k] = s
        return Scalar(out, t)

    __rmul__ = __mul__

    def pow(self, n: int) -> "Scalar":
        if n < 0:
            raise ScalarError("negative scalar power; use div")
        out = Scalar.one()
        for _ in range(n):
            out = out * self
        return out

    def div(self, other: "Scalar") -> "Scalar":
        """Laurent long division, exact at every coefficient step.

        Succeeds whenever each step divides exactly in the parameter ring: unit
        (rational) leading coefficients always work; a parameter-polynomial
        leading coefficient works when the quotient genuinely exists (mu*h/mu).
        Anything needing the inverse of a non-constant parameter polynomial
        raises ScalarError.
        """
        if other.is_zero():
            raise ScalarError("division by zero")
        if self.is_zero():
            return Scalar.zero(self.trunc)
        va, vb = self.valuation(), other.valuation()
        lead = other.coeffs[vb]
        both_exact = self.trunc is None and other.trunc is None
        if both_exact:
            rel_prec = _SERIES_DEFAULT_GUARD
        else:
            cand = []
            if self.trunc is not None:
                cand.append(self.trunc - va)
            if other.trunc is not None:
                cand.append(other.trunc - vb)
            rel_prec = min(cand)
        # quotient q = sum_n q_n h^(va - vb + n) solves q * other = self
        q: dict = {}
        for n in range(rel_prec + 1):
            acc = self.coeffs.get(va + n, ParamPoly())
            for i in range(1, n + 1):
                bi = other.coeffs.get(vb + i)
                if bi is None or bi.is_zero():
                    continue
                qi = q.get(n - i)
                if qi is not None:
                    acc = acc - bi * qi
            d = acc.divide_exact(lead)
            if d is None:
                raise ScalarError("non-invertible leading coefficient in division")
            if not d.is_zero():
                q[n] = d
        shift = va - vb
        out = Scalar({n + shift: p for n, p in q.items()},
                     None if both_exact else rel_prec + shift)
        if both_exact:
            check = Scalar({n + shift: p for n, p in q.items()}, None)
            if (check * other - self).is_zero():
                return check
            out = Scalar(out.coeffs, _SERIES_DEFAULT_GUARD + shift)
        return out

    __truediv__ = div

    def inverse(self) -> "Scalar":
        return Scalar.one().div(self)

    # -- comparisons --------------------------------------------------------
    def equal(self, other: "Scalar") -> bool:
        """Equality of all coefficients on the common known range."""
        return (self - other).is_zero()

    __eq__ = equal

    def __hash__(self):
        raise TypeError("Scalar is not hashable")

    # -- substitution -------------------------------------------------------
    def substitute(self, bindings: dict | None = None, h_to_zero: bool = False) -> "Scalar":
        """Bind parameters to Fractions/Scalars; optionally take the h -> 0 value.

        h substitution is only allowed to 0 (the constant term); anything else is
        lossy on a truncated series and is rejected by design.
        """
        bindings = bindings or {}
        total = Scalar.zero(self.trunc)
        for k, poly in self.coeffs.items():
            total = total + Scalar.h(k) * poly.substitute(bindings)
        if h_to_zero:
            if total.pole_order > 0:
                raise ScalarError("pole at h = 0")
            return Scalar.from_poly(total.coeff(0))
        return total

    def __repr__(self):
        if not self.coeffs:
            return "0" + ("" if self.trunc is None else f" + O(h^{self.trunc + 1})")
        bits = []
        for k in sorted(self.coeffs):
            p = self.coeffs[k]
            ps = repr(p)
            if len(p.terms) > 1 or (ps.startswith("-")):
                ps = f"({ps})"
            if k == 0:
                bits.append(ps)
            else:
                hpow = "h" if k == 1 else f"h^{k}"
                bits.append(hpow if ps == "1" else f"{ps}*{hpow}")
        s = " + ".join(bits)
        if self.trunc is not None:
            s += f" + O(h^{self.trunc + 1})"
        return s


# guard order used when inverting an exact series (result is transcendental);
# callers that need more precision must truncate their inputs explicitly
_SERIES_DEFAULT_GUARD = 24


def _series_coeff(name: str, k: int) -> Fraction:
    if name == "exp":
        return Fraction(1, factorial(k))
    if name == "sinh":
        return Fraction(1, factorial(k)) if k % 2 == 1 else Q0
    if name == "cosh":
        return Fraction(1, factorial(k)) if k % 2 == 0 else Q0
    raise ScalarError(f"unknown series function {name!r}")


def series_fn(name: str, arg: Scalar, order=None) -> Scalar:
    """Maclaurin composition exp/sinh/cosh(arg), truncated.

    The argument must have no pole and no constant term, so the composition is
    well defined order by order.  ``order`` defaults to the argument's own
    truncation order and must be given for exact arguments.
    """
    if name not in ("exp", "sinh", "cosh"):
        raise ScalarError(f"unknown series function {name!r}")
    if arg.is_zero():
        base = _series_coeff(name, 0)
        return Scalar.from_fraction(base, trunc=order if order is not None else arg.trunc)
    v = arg.valuation()
    if v < 0:
        raise ScalarError(f"{name} of an argument with a pole in h")
    if v == 0:
        raise ScalarError(f"{name} of an argument with nonzero constant term")
    if order is None:
        order = arg.trunc
    if order is None:
        raise ScalarError("series of an exact argument needs an explicit truncation order")
    arg = arg.truncate(order)
    out = Scalar.from_fraction(_series_coeff(name, 0), trunc=order)
    power = Scalar.one().truncate(order)
    for k in range(1, order // v + 1):
        power = (power * arg).truncate(order)
        c = _series_coeff(name, k)
        if c:
            out = out + power * c
    return out.truncate(order)
