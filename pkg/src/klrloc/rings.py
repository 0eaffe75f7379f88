"""Exact scalar rings: rationals, Q[z], and Laurent polynomials in q.

Everything in this package is exact.  Module matrices are either Fraction
valued (base field Q) or ZPoly valued (base ring Q[z] with z homogeneous of
an even positive degree).  Characters live in ZLaurent (Z[q, q^-1]).
"""

from __future__ import annotations

from fractions import Fraction


class ZPoly:
    """Polynomial in a single central variable z with Fraction coefficients.

    coeffs[k] is the coefficient of z^k; trailing zeros are stripped.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @staticmethod
    def const(c):
        return ZPoly((Fraction(c),))

    @staticmethod
    def z(power=1):
        return ZPoly([0] * power + [1])

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        other = _zcoerce(other)
        return other is not NotImplemented and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = _zcoerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] += c
        return ZPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return ZPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        other = _zcoerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _zcoerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _zcoerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return ZPoly(())
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        out[i + j] += ai * bj
        return ZPoly(out)

    __rmul__ = __mul__

    def valuation(self):
        """z-adic valuation; None for the zero polynomial."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def shift_down(self, s):
        """Divide by z^s (requires valuation >= s)."""
        if s == 0:
            return self
        assert all(c == 0 for c in self.coeffs[:s]), "not divisible by z^s"
        return ZPoly(self.coeffs[s:])

    def at_zero(self):
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def eval(self, value):
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def degree_in_z(self):
        return len(self.coeffs) - 1 if self.coeffs else None

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                parts.append(str(c))
            elif k == 1:
                parts.append(f"{c}*z" if c != 1 else "z")
            else:
                parts.append(f"{c}*z^{k}" if c != 1 else f"z^{k}")
        return " + ".join(parts)


def _zcoerce(x):
    if isinstance(x, ZPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return ZPoly.const(x)
    return NotImplemented


class ZLaurent:
    """Laurent polynomial in q with Fraction coefficients (dict power -> coeff)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        d = {}
        if terms:
            for k, c in dict(terms).items():
                c = Fraction(c)
                if c:
                    d[int(k)] = c
        self.terms = d

    @staticmethod
    def const(c):
        return ZLaurent({0: c})

    @staticmethod
    def q(power=1):
        return ZLaurent({power: 1})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        other = _qcoerce(other)
        return other is not NotImplemented and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        other = _qcoerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return ZLaurent(out)

    __radd__ = __add__

    def __neg__(self):
        return ZLaurent({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        other = _qcoerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _qcoerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _qcoerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = {}
        for i, a in self.terms.items():
            for j, b in other.terms.items():
                k = i + j
                out[k] = out.get(k, Fraction(0)) + a * b
        return ZLaurent(out)

    __rmul__ = __mul__

    def qshift(self, k):
        """Multiply by q^k."""
        return ZLaurent({p + k: c for p, c in self.terms.items()})

    def bar(self):
        """q -> q^-1."""
        return ZLaurent({-p: c for p, c in self.terms.items()})

    def at_one(self):
        return sum(self.terms.values(), Fraction(0))

    def monomial_power(self):
        """If self = c*q^l with c != 0, return (l, c); else None."""
        if len(self.terms) != 1:
            return None
        ((p, c),) = self.terms.items()
        return (p, c)

    def sorted_items(self):
        return sorted(self.terms.items())

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for p, c in self.sorted_items():
            if p == 0:
                parts.append(str(c))
            elif p == 1:
                parts.append(f"{c}*q" if c != 1 else "q")
            else:
                parts.append(f"{c}*q^{p}" if c != 1 else f"q^{p}")
        return " + ".join(parts)


def _qcoerce(x):
    if isinstance(x, ZLaurent):
        return x
    if isinstance(x, (int, Fraction)):
        return ZLaurent.const(x)
    return NotImplemented


class BaseRing:
    """Tag for the coefficient ring of a module: Q, or Q[z] with deg z = d."""

    __slots__ = ("tag", "zdeg")

    def __init__(self, tag="Q", zdeg=None):
        if tag not in ("Q", "Qz"):
            raise ValueError(f"unknown base ring tag {tag!r}")
        if tag == "Qz":
            if zdeg is None or zdeg <= 0 or zdeg % 2 != 0:
                raise ValueError("deg z must be a positive even integer")
        self.tag = tag
        self.zdeg = zdeg

    def zero(self):
        return Fraction(0) if self.tag == "Q" else ZPoly(())

    def one(self):
        return Fraction(1) if self.tag == "Q" else ZPoly.const(1)

    def coerce(self, c):
        if self.tag == "Q":
            if isinstance(c, ZPoly):
                raise TypeError("ZPoly scalar in a Q-module")
            return Fraction(c)
        return c if isinstance(c, ZPoly) else ZPoly.const(c)

    def is_field(self):
        return self.tag == "Q"

    def __eq__(self, other):
        return isinstance(other, BaseRing) and (self.tag, self.zdeg) == (other.tag, other.zdeg)

    def __hash__(self):
        return hash((self.tag, self.zdeg))

    def __repr__(self):
        return "Q" if self.tag == "Q" else f"Q[z], deg z = {self.zdeg}"


QQ = BaseRing("Q")
