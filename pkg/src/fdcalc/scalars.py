"""Exact coefficient fields: Q and the rational-function field Q(p).

Rationals are stdlib ``fractions.Fraction`` (exact, gcd-reduced, positive
denominator).  ``RatFunc`` implements Q(p), the field of rational functions in
one formal parameter ``p`` over Q, in canonical form: the denominator is monic
and coprime to the numerator, so equality of field elements is syntactic
equality of the representation.  ``ScalarField`` selects between symbolic Q(p)
work and evaluation at a rational specialization point.

All values are immutable and all operations are pure.
"""

from __future__ import annotations

from fractions import Fraction


Rational = Fraction


class ZeroDenominator(ZeroDivisionError):
    """Denominator polynomial is identically zero."""


class PoleAtPoint(ZeroDivisionError):
    """Specialization point is a root of the denominator."""


class ZeroToNegativePower(ZeroDivisionError):
    """0**n requested with n < 0."""


class Poly:
    """Dense univariate polynomial over Q, coefficients ascending.

    Invariant: ``coeffs`` is a tuple of Fractions whose last entry is nonzero;
    the zero polynomial is the empty tuple.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [c if type(c) is Fraction else Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def const(cls, c) -> "Poly":
        return cls((Fraction(c),))

    @classmethod
    def gen(cls) -> "Poly":
        """The polynomial p."""
        return cls((0, 1))

    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def lc(self) -> Fraction:
        if not self.coeffs:
            raise ZeroDivisionError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if ca:
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
        return Poly(out)

    def val(self) -> int:
        """Index of the lowest nonzero coefficient (0 for the zero polynomial)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return 0

    def is_monomial(self) -> bool:
        return bool(self.coeffs) and all(c == 0 for c in self.coeffs[:-1])

    def scale(self, c) -> "Poly":
        if type(c) is not Fraction:
            c = Fraction(c)
        if c == 0:
            return Poly()
        return Poly(tuple(x * c for x in self.coeffs))

    def shift(self, n: int) -> "Poly":
        """Multiply by p**n, n >= 0."""
        if not self.coeffs:
            return self
        return Poly((Fraction(0),) * n + self.coeffs)

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        if other.is_monomial():
            d = other.degree()
            inv = 1 / other.lc()
            return (
                Poly(tuple(c * inv for c in self.coeffs[d:])),
                Poly(self.coeffs[:d]),
            )
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(), self
        quo = [Fraction(0)] * (dq + 1)
        inv_lc = 1 / other.lc()
        for k in range(dq, -1, -1):
            c = rem[k + other.degree()] * inv_lc
            quo[k] = c
            if c:
                for j, oc in enumerate(other.coeffs):
                    rem[k + j] -= c * oc
        return Poly(quo), Poly(rem)

    def monic(self) -> "Poly":
        if not self:
            return self
        return self.scale(1 / self.lc())

    def gcd(self, other: "Poly") -> "Poly":
        """Monic gcd by the Euclidean algorithm (exact over Q).

        Monomial operands short-circuit: gcd(c p^k, f) = p^min(k, val f).
        """
        if not self:
            return other.monic()
        if not other:
            return self.monic()
        if self.is_monomial() or other.is_monomial():
            v = min(self.val(), other.val())
            return Poly((Fraction(0),) * v + (Fraction(1),))
        a, b = self, other
        while b:
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def pow(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power of a polynomial")
        out = Poly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def eval_at(self, x) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def render(self, var: str = "p") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e in range(self.degree(), -1, -1):
            c = self.coeffs[e]
            if c == 0:
                continue
            if e == 0:
                parts.append(str(c))
            else:
                head = "" if c == 1 else ("-" if c == -1 else f"{c}*")
                parts.append(f"{head}{var}" + (f"^{e}" if e != 1 else ""))
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self.render()})"


def _clear_denominators(p: Poly) -> tuple[Poly, int]:
    """Return (integer-coefficient multiple of p, the multiplier)."""
    if not p:
        return p, 1
    m = 1
    for c in p.coeffs:
        d = c.denominator
        m = m * d // _gcd_int(m, d)
    return p.scale(m), m


def _gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


class RatFunc:
    """Element of Q(p) in canonical form: monic denominator, coprime to the
    numerator.  Equality and hashing are syntactic on the canonical form
    (constants hash like their Fraction value so mixed Q / Q(p) keys agree).
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if not isinstance(num, Poly):
            num = Poly.const(num) if isinstance(num, (int, Fraction)) else Poly(num)
        if den is None:
            den = Poly.const(1)
        elif not isinstance(den, Poly):
            den = Poly.const(den) if isinstance(den, (int, Fraction)) else Poly(den)
        if not den:
            raise ZeroDenominator("denominator polynomial is zero")
        if not num:
            self.num, self.den = Poly(), Poly.const(1)
            return
        g = num.gcd(den)
        if g.degree() > 0:
            num = num.divmod(g)[0]
            den = den.divmod(g)[0]
        lc = den.lc()
        self.num = num.scale(1 / lc)
        self.den = den.scale(1 / lc)

    @classmethod
    def p(cls) -> "RatFunc":
        return cls(Poly.gen())

    @classmethod
    def _coerce(cls, x):
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(Poly.const(x))
        return None

    def is_constant(self) -> bool:
        return self.num.degree() <= 0 and self.den == Poly.const(1)

    def as_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self!r} is not a constant")
        return self.num.coeffs[0] if self.num else Fraction(0)

    def __bool__(self) -> bool:
        return bool(self.num)

    def __eq__(self, other) -> bool:
        o = RatFunc._coerce(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self.is_constant():
            return hash(self.as_fraction())
        return hash((self.num.coeffs, self.den.coeffs))

    def __add__(self, other):
        o = RatFunc._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        r = RatFunc.__new__(RatFunc)
        r.num, r.den = -self.num, self.den
        return r

    def __sub__(self, other):
        o = RatFunc._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = RatFunc._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = RatFunc._coerce(other)
        if o is None:
            return NotImplemented
        # cross-cancel before multiplying to keep degrees small
        g1 = self.num.gcd(o.den)
        g2 = o.num.gcd(self.den)
        n1 = self.num.divmod(g1)[0] if g1.degree() > 0 else self.num
        d2 = o.den.divmod(g1)[0] if g1.degree() > 0 else o.den
        n2 = o.num.divmod(g2)[0] if g2.degree() > 0 else o.num
        d1 = self.den.divmod(g2)[0] if g2.degree() > 0 else self.den
        return RatFunc(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if not self.num:
            raise ZeroDivisionError("inverse of zero in Q(p)")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        o = RatFunc._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = RatFunc._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        return power(self, n)

    def specialize(self, p0) -> Fraction:
        """Evaluate at p = p0 exactly; PoleAtPoint if the denominator vanishes."""
        p0 = Fraction(p0)
        d = self.den.eval_at(p0)
        if d == 0:
            raise PoleAtPoint(f"denominator vanishes at p = {p0}")
        return self.num.eval_at(p0) / d

    def render(self, var: str = "p") -> str:
        """Canonical string: integer-coefficient polynomials, descending degree."""
        n, mn = _clear_denominators(self.num)
        d, md = _clear_denominators(self.den)
        # num/den == (n/mn)/(d/md) == (n*md)/(d*mn)
        n = n.scale(md)
        d = d.scale(mn)
        c = 0
        for x in (*n.coeffs, *d.coeffs):
            c = _gcd_int(c, abs(x.numerator))
        if c > 1:
            n, d = n.scale(Fraction(1, c)), d.scale(Fraction(1, c))
        if d.lc() < 0:
            n, d = n.scale(-1), d.scale(-1)
        if d == Poly.const(1):
            return n.render(var)

        def wrap(s: str) -> str:
            return s if (" " not in s and "*" not in s and "/" not in s) else f"({s})"

        return f"{wrap(n.render(var))}/{wrap(d.render(var))}"

    def __repr__(self):
        return self.render()


def normalize(f: RatFunc) -> RatFunc:
    """Canonical form of f (idempotent; construction already canonicalizes)."""
    return RatFunc(f.num, f.den)


def specialize(f, p0) -> Fraction:
    """Evaluate a scalar at p = p0: RatFunc via substitution, Q unchanged."""
    if isinstance(f, RatFunc):
        return f.specialize(p0)
    return Fraction(f)


def power(f, n: int):
    """Exact n-th power for n in Z, valid for Fraction, RatFunc, and int."""
    if n >= 0:
        if isinstance(f, int):
            return f**n
        if isinstance(f, Fraction):
            return f**n
        out = RatFunc(1)
        base = f
        m = n
        while m:
            if m & 1:
                out = out * base
            base = base * base
            m >>= 1
        return out
    if not f:
        raise ZeroToNegativePower(f"0**{n}")
    if isinstance(f, int):
        f = Fraction(f)
    if isinstance(f, Fraction):
        return (1 / f) ** (-n)
    return power(f.inverse(), -n)


class ScalarField:
    """Coefficient-field selector: symbolic Q(p) or Q at a rational point p0.

    The specialization map p -> p0 is a field homomorphism away from poles;
    p0 must have |p0| not in {0, 1} so no power of p0 degenerates to +-1.
    """

    __slots__ = ("symbolic", "p0")

    def __init__(self, symbolic: bool, p0=None):
        self.symbolic = symbolic
        if symbolic:
            self.p0 = None
        else:
            p0 = Fraction(p0)
            if p0 in (0, 1, -1):
                raise ValueError("specialization point must have |p0| not in {0, 1}")
            self.p0 = p0

    @classmethod
    def rationals(cls, p0) -> "ScalarField":
        return cls(False, p0)

    @classmethod
    def rational_functions(cls) -> "ScalarField":
        return cls(True)

    def zero(self):
        return RatFunc(0) if self.symbolic else Fraction(0)

    def one(self):
        return RatFunc(1) if self.symbolic else Fraction(1)

    def from_int(self, n: int):
        return RatFunc(n) if self.symbolic else Fraction(n)

    def p_power(self, n: int):
        """p**n in this field (p0**n when specialized)."""
        if self.symbolic:
            if n >= 0:
                return RatFunc(Poly.const(1).shift(n))
            return RatFunc(Poly.const(1), Poly.const(1).shift(-n))
        return self.p0**n

    def coerce(self, x):
        """Bring an int / Fraction / RatFunc into this field."""
        if self.symbolic:
            return x if isinstance(x, RatFunc) else RatFunc(x)
        if isinstance(x, RatFunc):
            return x.specialize(self.p0)
        return Fraction(x)

    def specialize_scalar(self, x):
        """Image of a symbolic scalar under p -> p0 (identity in symbolic mode)."""
        if self.symbolic:
            return x
        return specialize(x, self.p0)

    def render(self, x) -> str:
        if isinstance(x, RatFunc):
            return x.render()
        return str(Fraction(x))

    def __repr__(self):
        return "ScalarField(Qp)" if self.symbolic else f"ScalarField(Q, p0={self.p0})"

    def __eq__(self, other):
        return (
            isinstance(other, ScalarField)
            and self.symbolic == other.symbolic
            and self.p0 == other.p0
        )

    def __hash__(self):
        return hash((self.symbolic, self.p0))


QP = ScalarField.rational_functions()
