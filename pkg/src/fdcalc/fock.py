"""Generalized fermionic mode algebras and their universal vacuum modules.

Two specs are supported:

* the loop Clifford algebra on integer flavors with anticommutator
  ``{a(r)_m, a(s)_n} = 2*ell*(d_{r,s+1} + d_{r,s-1}) d_{m+n+1,0}`` and fields
  ``a(x) = sum a_n x^(-n-1)`` (mode-exponent offset 1);
* the single-flavor T algebra with ``{T_m, T_n} = 2 (p^m + p^-m) d_{m+n,0}``
  and fields ``T(x) = sum T_n x^(-n)`` (offset 0).

The module is the universal restricted vacuum module: basis monomials are
strictly ordered products of creation generators applied to the vacuum, with
the zero mode kept as a basis-level generator (its square reduces to the
scalar ``{T_0,T_0}/2 = 2``), so all arithmetic stays inside the exact field.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import ScalarField
from .series import INF, NEG_INF, TruncatedSeries


class FlavorOutOfWindow(ValueError):
    """A flavor outside the materialized window was requested."""


T_FLAVOR = "T"


class CarSpec:
    """Pairing rule, annihilation thresholds and field offset for one algebra."""

    __slots__ = ("kind", "field", "ell", "flavor_lo", "flavor_hi", "nu")

    def __init__(self, kind, field: ScalarField, ell=None, flavor_lo=None, flavor_hi=None):
        self.kind = kind
        self.field = field
        if kind == "E":
            self.ell = field.coerce(ell if ell is not None else 1)
            self.flavor_lo = flavor_lo if flavor_lo is not None else -4
            self.flavor_hi = flavor_hi if flavor_hi is not None else 5
            self.nu = 1
        elif kind == "T":
            self.ell = None
            self.flavor_lo = self.flavor_hi = None
            self.nu = 0
        else:
            raise ValueError(f"unknown spec kind {kind!r}")

    def check_flavor(self, r):
        if self.kind == "T":
            if r != T_FLAVOR:
                raise FlavorOutOfWindow(f"T algebra has the single flavor {T_FLAVOR!r}")
        else:
            if not isinstance(r, int) or not self.flavor_lo <= r <= self.flavor_hi:
                raise FlavorOutOfWindow(
                    f"flavor {r} outside window [{self.flavor_lo}, {self.flavor_hi}]"
                )

    def threshold(self, r) -> int:
        """Modes n >= threshold annihilate the vacuum."""
        return 1 if self.kind == "T" else 0

    def pairing(self, r, m, s, n):
        """The anticommutator scalar {a(r)_m, a(s)_n}."""
        zero = self.field.zero()
        if self.kind == "T":
            if m + n != 0:
                return zero
            return 2 * (self.field.p_power(m) + self.field.p_power(-m))
        if m + n + 1 != 0:
            return zero
        if abs(r - s) != 1:
            return zero
        return 2 * self.ell

    @staticmethod
    def order_key(gen):
        r, n = gen
        return (str(r), -n)

    @staticmethod
    def weight(gen) -> int:
        return -gen[1]


def e_spec(field: ScalarField, ell=1, flavor_lo=-4, flavor_hi=5) -> CarSpec:
    return CarSpec("E", field, ell=ell, flavor_lo=flavor_lo, flavor_hi=flavor_hi)


def t_spec(field: ScalarField) -> CarSpec:
    return CarSpec("T", field)


class FockVector:
    """Finite linear combination of basis monomials with exact coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for m, c in terms.items():
                if c:
                    self.terms[m] = c

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        if isinstance(other, FockVector):
            out = dict(self.terms)
            for m, c in other.terms.items():
                s = out.get(m, 0) + c
                if s:
                    out[m] = s
                else:
                    del out[m]
            v = FockVector.__new__(FockVector)
            v.terms = out
            return v
        if not other:
            return self
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        v = FockVector.__new__(FockVector)
        v.terms = {m: -c for m, c in self.terms.items()}
        return v

    def __sub__(self, other):
        if isinstance(other, FockVector):
            return self + (-other)
        if not other:
            return self
        return NotImplemented

    def __rsub__(self, other):
        if not other:
            return -self
        return NotImplemented

    def __rmul__(self, c):
        if isinstance(c, FockVector):
            return NotImplemented
        if not c:
            return FockVector()
        v = FockVector.__new__(FockVector)
        v.terms = {m: c * x for m, x in self.terms.items()}
        return v

    __mul__ = __rmul__

    def __eq__(self, other):
        if isinstance(other, FockVector):
            return self.terms == other.terms
        if not other:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset((m, repr(c)) for m, c in self.terms.items()))

    def grade(self) -> int:
        """Maximum grade over the monomials (0 for the zero vector)."""
        return max((sum(CarSpec.weight(g) for g in m) for m in self.terms), default=0)

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for m, c in sorted(self.terms.items(), key=lambda it: (len(it[0]), it[0])):
            mono = "*".join(f"a[{r},{n}]" for r, n in m) or "vac"
            bits.append(f"({c})*{mono}")
        return " + ".join(bits)


class FockModule:
    """Universal restricted vacuum module over a :class:`CarSpec`."""

    def __init__(self, spec: CarSpec):
        self.spec = spec
        self._memo = {}

    @property
    def field(self):
        return self.spec.field

    def vacuum(self) -> FockVector:
        return FockVector({(): self.field.one()})

    def basis_monomial(self, gens) -> FockVector:
        gens = tuple(sorted(gens, key=CarSpec.order_key))
        return FockVector({gens: self.field.one()})

    # -- mode action -----------------------------------------------------------

    def apply_mode(self, r, n: int, w: FockVector) -> FockVector:
        self.spec.check_flavor(r)
        out = FockVector()
        for mono, c in w.terms.items():
            out = out + c * self._apply_gen((r, n), mono)
        return out

    def _apply_gen(self, gen, mono) -> FockVector:
        key = (gen, mono)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        spec = self.spec
        r, n = gen
        creation = n < spec.threshold(r)
        if not mono:
            res = FockVector({(gen,): spec.field.one()}) if creation else FockVector()
            self._memo[key] = res
            return res
        h = mono[0]
        if creation:
            kg, kh = CarSpec.order_key(gen), CarSpec.order_key(h)
            if kg < kh:
                res = FockVector({(gen,) + mono: spec.field.one()})
                self._memo[key] = res
                return res
            if kg == kh:
                half = spec.pairing(r, n, r, n) * Fraction(1, 2)
                res = FockVector({mono[1:]: half}) if half else FockVector()
                self._memo[key] = res
                return res
        pair = spec.pairing(r, n, h[0], h[1])
        rest = mono[1:]
        res = FockVector({rest: pair}) if pair else FockVector()
        for m, c in self._apply_gen(gen, rest).terms.items():
            res = res + FockVector({(h,) + m: -c})
        self._memo[key] = res
        return res

    # -- structure helpers -------------------------------------------------------

    def ann_bound(self, w: FockVector) -> int:
        """N with a(r)_n w = 0 certified for every flavor and every n >= N."""
        spec = self.spec
        base = 1 if spec.kind == "T" else 0
        out = base
        for mono in w.terms:
            mags = [-n for _, n in mono]
            top = max(mags, default=0)
            out = max(out, top + 1 if spec.kind == "T" else top)
        return out

    def apply_field(self, r, scale, w: FockVector, hi: int, var: str = "x") -> TruncatedSeries:
        """a(scale * x) w = sum_e scale^e (a_{-e-nu} w) x^e, up to x**hi.

        Lower-truncated by restriction: exponents below -ann_bound(w) - nu + 1
        vanish, so the window is open below.
        """
        from .scalars import power

        nu = self.spec.nu
        floor = -self.ann_bound(w) - nu + 1
        coeffs = {}
        for e in range(floor, hi + 1):
            vec = self.apply_mode(r, -e - nu, w)
            if vec:
                if scale != 1:
                    vec = power(scale, e) * vec
                coeffs[(e,)] = vec
        return TruncatedSeries(
            (var,), coeffs, {var: (NEG_INF, hi)}, {var: (floor, INF)}
        )

    def anticommutator_check(self, g1, g2, grade_bound: int) -> bool:
        """{g1, g2} w == pairing * w on every basis monomial of grade <= N."""
        r, m = g1
        s, n = g2
        pair = self.spec.pairing(r, m, s, n)
        for w in self.basis(grade_bound):
            lhs = self.apply_mode(r, m, self.apply_mode(s, n, w)) + self.apply_mode(
                s, n, self.apply_mode(r, m, w)
            )
            if lhs != pair * w:
                return False
        return True

    # -- basis enumeration --------------------------------------------------------

    def creation_generators(self, max_weight: int):
        spec = self.spec
        gens = []
        if spec.kind == "T":
            gens.append((T_FLAVOR, 0))
            for n in range(1, max_weight + 1):
                gens.append((T_FLAVOR, -n))
        else:
            for r in range(spec.flavor_lo, spec.flavor_hi + 1):
                for n in range(1, max_weight + 1):
                    gens.append((r, -n))
        return sorted(gens, key=CarSpec.order_key)

    def basis_monomials(self, grade_bound: int):
        gens = self.creation_generators(grade_bound)
        out = []

        def rec(start, acc, weight):
            out.append(tuple(acc))
            for i in range(start, len(gens)):
                wgt = CarSpec.weight(gens[i])
                if weight + wgt <= grade_bound:
                    acc.append(gens[i])
                    rec(i + 1, acc, weight + wgt)
                    acc.pop()

        rec(0, [], 0)
        return [tuple(sorted(m, key=CarSpec.order_key)) for m in sorted(out, key=lambda m: (sum(CarSpec.weight(g) for g in m), m))]

    def basis(self, grade_bound: int):
        one = self.field.one()
        return [FockVector({m: one}) for m in self.basis_monomials(grade_bound)]

    def graded_dimensions(self, grade_bound: int):
        counts = [0] * (grade_bound + 1)
        for m in self.basis_monomials(grade_bound):
            counts[sum(CarSpec.weight(g) for g in m)] += 1
        return counts
