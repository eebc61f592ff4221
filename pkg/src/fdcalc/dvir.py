"""The deformed Virasoro algebra: structure series, defining relations on the
universal restricted module, and the two directions of the correspondence with
the neighbor-paired Clifford vertex superalgebra.

The relation checker works with the coefficient form

    sum_{l>=0} f_l (T_{m-l} T_{n+l} - T_{n-l} T_{m+l}) w
        = -((1-q)(1-p/q)/(1-p)) (p^m - p^-m) d_{m+n,0} w,

truncating the l-sum at a certified length: both T_{n+l} w and T_{m+l} w
vanish beyond it on the restricted module, so the formally infinite sum is a
finite one per vector, with the truncation length recorded.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .distributions import delta_fit
from .fock import FockModule, FockVector, t_spec
from .scalars import RatFunc, ScalarField
from .series import (
    NEG_INF,
    FactoredRational,
    TruncatedSeries,
    diagonal_collapse,
    divide_linear,
    exp_1v,
)
from .fieldcalc import (
    CompatibilityError,
    CovariantStructure,
    FieldOperator,
    LocalityDatum,
    assoc_check,
    commutator_formula_check,
    covariance_check,
    defect_series,
    laurent_annihilator,
    locality_check,
    product_on_window,
    quadrant_verdict,
    ye_product,
)


@dataclass(frozen=True)
class DVirParams:
    """Parameters (p, q) with t = q/p; p symbolic or a rational |p0| not 0, 1."""

    field: ScalarField
    q: object = -1

    @classmethod
    def symbolic(cls) -> "DVirParams":
        return cls(ScalarField.rational_functions(), -1)

    @classmethod
    def at(cls, p0, q=-1) -> "DVirParams":
        return cls(ScalarField.rationals(p0), q)

    def p(self):
        return self.field.p_power(1)

    def is_minus_one(self) -> bool:
        return self.q == -1


_F_CACHE: dict = {}


def f_coefficients(params: DVirParams, N: int):
    """Coefficients of exp(sum_n (1-q^n)(1-t^-n)/(1+p^n) z^n/n) up to z**N."""
    key = (params.field, repr(params.q))
    hit = _F_CACHE.get(key)
    if hit is not None and len(hit) > N:
        return hit[: N + 1]
    out = _f_coefficients(params, max(N, 16))
    _F_CACHE[key] = out
    return out[: N + 1]


def _f_coefficients(params: DVirParams, N: int):
    fld = params.field
    if fld.symbolic and params.q != -1:
        raise ValueError("symbolic p supports only q = -1")
    q = fld.coerce(params.q)
    g = {}
    one = fld.one()
    for n in range(1, N + 1):
        qn = q**n if isinstance(q, RatFunc) else Fraction(q) ** n
        tn = (fld.p_power(n)) * (q**-n if isinstance(q, RatFunc) else Fraction(q) ** -n)
        num = (one - qn) * (one - tn)
        if not num:
            continue
        den = one + fld.p_power(n)
        g[n] = num * (den**-1 if isinstance(den, RatFunc) else 1 / den) * Fraction(1, n)
    e = exp_1v(g, N)
    return [fld.coerce(e.get(l, 0)) for l in range(N + 1)]


def central_term(params: DVirParams, m: int):
    """Scalar on the right of the (m, -m) relation."""
    fld = params.field
    if m == 0:
        return fld.zero()
    one = fld.one()
    q = fld.coerce(params.q)
    p = fld.p_power(1)
    qinv = q**-1 if isinstance(q, RatFunc) else 1 / Fraction(q)
    factor = (one - q) * (one - p * qinv)
    inv = (one - p) ** -1 if fld.symbolic else 1 / (one - p)
    return -factor * inv * (fld.p_power(m) - fld.p_power(-m))


def t_fock(params: DVirParams) -> FockModule:
    """The universal restricted module over the mode algebra of the q = -1
    anticommutator pairing."""
    if not params.is_minus_one():
        raise ValueError("the module realization is specific to q = -1")
    return FockModule(t_spec(params.field))


@dataclass(frozen=True)
class DVirRelationReport:
    m: int
    n: int
    central: object
    trunc_len: int
    defect: object  # first nonzero defect vector, or a zero FockVector
    defect_at: object  # basis monomial where the defect occurred, or None
    stable: bool  # truncation extension left every defect unchanged


def vir_relation_check(
    module: FockModule,
    params: DVirParams,
    m: int,
    n: int,
    grade_bound: int,
    extend: int = 5,
) -> DVirRelationReport:
    """Check the (m, n) relation on every basis vector of grade <= bound.

    The l-sum is truncated at the certified restriction length per vector and
    additionally recomputed with the truncation extended by ``extend`` to
    confirm the certificate.
    """
    fld = params.field
    central = central_term(params, m) if m + n == 0 else fld.zero()
    worst = (FockVector(), None)
    max_len = 0
    stable = True
    fs = f_coefficients(params, max(0, grade_bound + 1 - min(m, n)) + extend)
    for w in module.basis(grade_bound):
        bound = module.ann_bound(w)
        L = max(0, bound - min(m, n))
        max_len = max(max_len, L)

        def term(l):
            t1 = module.apply_mode("T", n + l, w)
            if t1:
                t1 = module.apply_mode("T", m - l, t1)
            t2 = module.apply_mode("T", m + l, w)
            if t2:
                t2 = module.apply_mode("T", n - l, t2)
            return t1 - t2

        base = FockVector()
        for l in range(0, L + 1):
            t = term(l)
            if t:
                base = base + fs[l] * t
        # certificate: every term beyond the recorded truncation vanishes
        for l in range(L + 1, L + extend + 1):
            if term(l):
                stable = False
                break
        rhs = central * w if m + n == 0 else FockVector()
        defect = base - rhs
        if defect and worst[1] is None:
            worst = (defect, next(iter(w.terms)))
    return DVirRelationReport(m, n, central, max_len, worst[0], worst[1], stable)


def standard_annihilator(params: DVirParams, r: int, s: int, with_extra: bool = True) -> FactoredRational:
    """(y - p^(s+1-r)) (y - p^(s-1-r)), optionally with the (y + p^(s-r)) factor
    of the locality witness."""
    fld = params.field
    one = fld.one()
    factors = [(fld.p_power(s + 1 - r), 1), (fld.p_power(s - 1 - r), 1)]
    if with_extra:
        factors.append((-fld.p_power(s - r), 1))
    return FactoredRational(one, 0, tuple(factors))


def realization(params: DVirParams, module: FockModule | None = None):
    """The covariant realization r -> T(p^r x) with character n -> p^n."""
    module = module or t_fock(params)
    fld = params.field

    def realize(r: int) -> FieldOperator:
        return FieldOperator(module, "T", fld.p_power(r))

    return module, CovariantStructure(
        realize=realize, chi=lambda nn: fld.p_power(nn), shift_lo=-8, shift_hi=8
    )


def neighbor_locality(params: DVirParams, module: FockModule, r: int, s: int) -> LocalityDatum:
    fld = params.field
    a = FieldOperator(module, "T", fld.p_power(r))
    b = FieldOperator(module, "T", fld.p_power(s))
    minus_one = FactoredRational(-fld.one())
    return LocalityDatum(a, b, ((b, a, minus_one),), standard_annihilator(params, r, s))


def theorem58_suite(
    params: DVirParams,
    flavor_lo: int = -2,
    flavor_hi: int = 3,
    grade_bound: int = 5,
    zorder: int = 6,
    hi: int | None = None,
    margin: int = 2,
):
    """Locality, commutator kernels, covariance, associativity and top modes
    for the realization r -> T(p^r x) on the universal restricted module.

    Returns a list of (check id, ok, detail) triples.
    """
    module, C = realization(params)
    fld = params.field
    basis = module.basis(grade_bound)
    if hi is None:
        hi = grade_bound + 3
    results = []

    ok_all, detail = True, None
    for r in range(flavor_lo, flavor_hi + 1):
        for s in range(flavor_lo, flavor_hi + 1):
            L = neighbor_locality(params, module, r, s)
            for w in basis:
                ok, ce = locality_check(L, w, hi, hi)
                if not ok:
                    ok_all, detail = False, (r, s, repr(w), ce)
                    break
            if not ok_all:
                break
        if not ok_all:
            break
    results.append(("trig-locality", ok_all, detail))

    ok_all, detail = True, None
    box = {"x1": (-hi, hi), "x2": (-hi, hi)}
    for r in range(flavor_lo, flavor_hi + 1):
        for s in range(flavor_lo, flavor_hi + 1):
            Lmin = LocalityDatum(
                FieldOperator(module, "T", fld.p_power(r)),
                FieldOperator(module, "T", fld.p_power(s)),
                ((FieldOperator(module, "T", fld.p_power(s)), FieldOperator(module, "T", fld.p_power(r)), FactoredRational(-fld.one())),),
                standard_annihilator(params, r, s, with_extra=False),
            )
            want = sorted([s + 1 - r, s - 1 - r])
            Cw = CovariantStructure(C.realize, C.chi, want[0] - 2, want[1] + 2)
            for w in basis:
                ok, ce, contrib = commutator_formula_check(
                    Lmin, Cw, w, box, zorder, hi + 2, hi + 2, margin=margin
                )
                got = sorted(nn for nn, _, _ in contrib)
                if not ok or got != want:
                    ok_all, detail = False, (r, s, repr(w), ce, got, want)
                    break
            if not ok_all:
                break
        if not ok_all:
            break
    results.append(("anticommutator-delta-kernel", ok_all, detail))

    ok_all, detail = True, None
    for r in range(flavor_lo, flavor_hi + 1):
        for shift in range(flavor_lo - r, flavor_hi - r + 1):
            ok, ce = covariance_check(C, r, shift, min(grade_bound, 3), hi)
            if not ok:
                ok_all, detail = False, (r, shift, ce)
                break
        if not ok_all:
            break
    results.append(("covariance-rescaling", ok_all, detail))

    ok_all, detail = True, None
    for r in range(flavor_lo, flavor_hi + 1):
        s = r - 1
        if s < flavor_lo:
            continue
        u = FieldOperator(module, "T", fld.p_power(r))
        v = FieldOperator(module, "T", fld.p_power(s))
        p_inner = standard_annihilator(params, r, s, with_extra=False)
        p_outer = standard_annihilator(params, r, s, with_extra=True)
        for w in basis[: max(4, len(basis) // 3)]:
            try:
                ok, ce = assoc_check(u, v, p_inner, p_outer, w, zorder, hi + 2, hi + 2, margin)
            except CompatibilityError as exc:
                ok, ce = False, str(exc)
            if not ok:
                ok_all, detail = False, (r, s, repr(w), ce)
                break
        if not ok_all:
            break
    results.append(("exp-substitution-associativity", ok_all, detail))

    ok_all, detail = True, None
    for s in range(flavor_lo, flavor_hi):
        r = s + 1
        u = FieldOperator(module, "T", fld.p_power(r))
        v = FieldOperator(module, "T", fld.p_power(s))
        p_wit = standard_annihilator(params, r, s, with_extra=True)
        for w in basis:
            ye = ye_product(u, v, p_wit, zorder, w, hi + 2, hi + 2, margin=margin, xvar="x2")
            if ye.zero_order != 1:
                ok_all, detail = False, (r, s, "zero order", ye.zero_order)
                break
            m0 = ye.mode(0)
            expected = TruncatedSeries(
                ("x2",), {(0,): 2 * w}, {"x2": (NEG_INF, hi)}, {"x2": (0, 0)}
            )
            ok, ce = m0.eq_on_common(expected)
            if not ok:
                ok_all, detail = False, (r, s, repr(w), ce)
                break
        if not ok_all:
            break
    results.append(("top-mode-identity", ok_all, detail))
    return results


def theorem59_suite(
    params: DVirParams,
    mode_bound: int = 4,
    grade_bound: int = 5,
    hi: int | None = None,
    margin: int = 2,
):
    """Relations of the realized field T(x) := Y(e_(1), x) = T(p x), the
    intermediate two-variable factorization, and the mode-extracted pairing.

    Returns a list of (check id, ok, detail) triples.
    """
    module, C = realization(params)
    fld = params.field
    p = fld.p_power(1)
    if hi is None:
        hi = grade_bound + 3
    results = []

    # realized field modes satisfy the defining relations
    ok_all, detail = True, None
    for m in range(-mode_bound, mode_bound + 1):
        for n in range(-mode_bound, mode_bound + 1):
            rep = vir_relation_check(module, params, m, n, grade_bound, extend=2)
            if rep.defect or not rep.stable:
                ok_all, detail = False, (m, n, repr(rep.defect), rep.defect_at)
                break
        if not ok_all:
            break
    results.append(("realized-field-relations", ok_all, detail))

    # (x1 - p x2)(p x1 - x2) T'(x1) T'(x2) = (x1 - x2) A(x1, x2) and the two
    # diagonal evaluations of A
    ok_all, detail = True, None
    a = C.realize(1)
    g4 = min(grade_bound, 4)
    hi_loc = 3 * g4 + 9
    cap = g4 + 5
    for w in module.basis(g4):
        prod = product_on_window(a, "x1", a, "x2", w, hi_loc, hi_loc)
        two_roots = FactoredRational(fld.one(), 0, ((p, 1), (fld.p_power(-1), 1)))
        F = laurent_annihilator(two_roots, "x1", "x2") * prod
        F = F.scaled(p).shifted(x2=2)  # (x1 - p x2)(p x1 - x2) = p x2^2 (y-p)(y-1/p)
        verdict = quadrant_verdict(F, "x1", "x2", margin)
        if verdict.status != "compatible":
            ok_all, detail = False, (repr(w), "compat", verdict.status)
            break
        if verdict.bound is not None:
            F = F.assert_support_floor({"x1": verdict.bound[0], "x2": verdict.bound[1]})
        A = divide_linear(F.untagged(), "x1", "x2", fld.one(), hi2_cap=cap)
        lin = TruncatedSeries.exact(("x1", "x2"), {(1, 0): fld.one(), (0, 1): -fld.one()})
        ok, ce = (lin * A).eq_on_common(F)
        if not ok:
            ok_all, detail = False, (repr(w), "divisibility", ce)
            break
        # A(p x2, x2) = 2(p+1) p x2 w  and  A(x1, p x1) = 2(p+1) p x1 w
        d1 = diagonal_collapse(A, "x1", "x2", p)
        d2 = diagonal_collapse(A, "x2", "x1", p)
        if d1.win("x2")[1] < 3 or d2.win("x1")[1] < 3:
            ok_all, detail = False, (repr(w), "diagonal window too small",
                                     (d1.win("x2"), d2.win("x1")))
            break
        w1 = TruncatedSeries(
            ("x2",), {(1,): (2 * (p + 1) * p) * w}, {"x2": d1.win("x2")}, {"x2": (1, 1)}
        )
        ok1, ce1 = d1.eq_on_common(w1)
        w2 = TruncatedSeries(
            ("x1",), {(1,): (2 * (p + 1) * p) * w}, {"x1": d2.win("x1")}, {"x1": (1, 1)}
        )
        ok2, ce2 = d2.eq_on_common(w2)
        if not (ok1 and ok2):
            ok_all, detail = False, (repr(w), "delta evaluation", ce1 or ce2)
            break
    results.append(("defect-factorization", ok_all, detail))

    # mode-extracted anticommutator == the pairing the module was built from
    ok_all, detail = True, None
    Lself = neighbor_locality(params, module, 1, 1)
    box = {"x1": (-hi, hi), "x2": (-hi, hi)}
    for w in module.basis(min(grade_bound, 4)):
        D = defect_series(Lself, w, hi + 2, hi + 2).restricted(box)
        terms = delta_fit(D, [p, fld.p_power(-1)], 0, "x1", "x2")
        expect = {repr(p): 2 * w, repr(fld.p_power(-1)): 2 * w}
        got = {}
        for t in terms:
            if t.j != 0:
                ok_all, detail = False, (repr(w), "unexpected derivative kernel", t.j)
                break
            got[repr(t.lam)] = t.coeff.get(**{t.coeff.vars[0]: 0}) if t.coeff.vars else 0
            nonconst = [e for e in t.coeff.coeffs if any(x != 0 for x in e)]
            if nonconst:
                ok_all, detail = False, (repr(w), "kernel not constant", nonconst)
                break
        if not ok_all:
            break
        if got != expect:
            ok_all, detail = False, (repr(w), "pairing mismatch", repr(got))
            break
    results.append(("mode-extracted-pairing", ok_all, detail))
    return results
