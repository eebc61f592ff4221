"""Field calculus on a Fock module: windowed two-field products, trigonometric
locality, the exponential-substitution mode products, scaled-mode extraction,
the residue formula and the covariant commutator-formula verifier.

Every operation is window-exact: products are materialized on explicit finite
boxes, quadrant (joint lower-truncation) claims are certified by a stability
test against margin-shrunken boxes, and any verdict records the box it was
obtained on.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .distributions import DeltaSum, DeltaTerm, laurent_annihilator
from .fock import FockModule, FockVector
from .scalars import power
from .series import (
    INF,
    NEG_INF,
    FactoredRational,
    InsufficientWindow,
    TruncatedSeries,
    invert_unit_1v,
    subst_exp,
    var_scaled,
)


class CompatibilityError(ValueError):
    """The pair is not certified compatible with the given annihilator."""


@dataclass(frozen=True)
class FieldOperator:
    """A mode family a(scale * x) on a Fock module, or the identity field."""

    module: FockModule
    flavor: object = None
    scale: object = 1
    identity: bool = False

    def scaled(self, mu) -> "FieldOperator":
        if self.identity:
            return self
        return FieldOperator(self.module, self.flavor, mu * self.scale, False)

    def coeff_apply(self, e: int, w: FockVector) -> FockVector:
        """Coefficient of x**e in a(scale x) w."""
        if self.identity:
            return w if e == 0 else FockVector()
        vec = self.module.apply_mode(self.flavor, -e - self.module.spec.nu, w)
        if vec and self.scale != 1:
            vec = power(self.scale, e) * vec
        return vec

    def floor(self, w: FockVector) -> int:
        """Exponents below this are certified to annihilate w."""
        if self.identity:
            return 0
        return -self.module.ann_bound(w) - self.module.spec.nu + 1

    def series(self, w: FockVector, hi: int, var: str = "x") -> TruncatedSeries:
        if self.identity:
            return TruncatedSeries(
                (var,), {(0,): w} if w else {}, {var: (NEG_INF, hi)}, {var: (0, 0)}
            )
        return self.module.apply_field(self.flavor, self.scale, w, hi, var)


@dataclass(frozen=True)
class LocalityDatum:
    """p(x1/x2) a(x1) b(x2) = p(x1/x2) sum_i iota_{x2,x1}(f_i(x2/x1)) b_i(x2) a_i(x1).

    ``partners`` is a tuple of (b_i, a_i, f_i) with f_i a FactoredRational in
    the ratio x2/x1; ``annihilator`` is the polynomial p in the ratio x1/x2.
    """

    a: FieldOperator
    b: FieldOperator
    partners: tuple
    annihilator: FactoredRational


@dataclass(frozen=True)
class CovariantStructure:
    """Integer shift group acting on flavors, with a multiplicative character."""

    realize: object  # flavor -> FieldOperator
    chi: object  # int -> scalar
    shift_lo: int
    shift_hi: int

    def shifts(self):
        return range(self.shift_lo, self.shift_hi + 1)


@dataclass(frozen=True)
class CompatVerdict:
    status: str  # "compatible" | "incompatible" | "undetermined"
    bound: tuple | None
    box: dict
    witness: object = None

    def __bool__(self):
        return self.status == "compatible"


def product_on_window(
    outer: FieldOperator,
    ov: str,
    inner: FieldOperator,
    iv: str,
    w: FockVector,
    hi_outer: int,
    hi_inner: int,
) -> TruncatedSeries:
    """outer(ov) inner(iv) w materialized on the box ov,iv <= hi.

    Every cell with exponents at most the ceilings is computed exactly; the
    inner variable carries the structural restriction floor.
    """
    ifloor = inner.floor(w)
    coeffs = {}
    swap = ov < iv
    for j in range(ifloor, hi_inner + 1):
        vj = inner.coeff_apply(j, w)
        if not vj:
            continue
        for i in range(outer.floor(vj), hi_outer + 1):
            cell = outer.coeff_apply(i, vj)
            if cell:
                coeffs[(i, j) if swap else (j, i)] = cell
    vars = tuple(sorted((ov, iv)))
    window = {ov: (NEG_INF, hi_outer), iv: (NEG_INF, hi_inner)}
    support = {ov: (NEG_INF, INF), iv: (ifloor, INF)}
    return TruncatedSeries(vars, coeffs, window, support)


def quadrant_verdict(F: TruncatedSeries, v1: str, v2: str, margin: int = 2) -> CompatVerdict:
    """Certify joint lower truncation of F on its box.

    The support minimum in each variable must be unchanged when the other
    variable's ceiling is lowered by ``margin``; a minimum that chases the
    shrinking ceiling is a delta tail and is reported incompatible.
    """
    box = {v: F.win(v) for v in F.vars}
    if not F.coeffs:
        return CompatVerdict("compatible", None, box)
    i1, i2 = F.vars.index(v1), F.vars.index(v2)
    hi1, hi2 = F.win(v1)[1], F.win(v2)[1]
    i0 = min(e[i1] for e in F.coeffs)
    j0 = min(e[i2] for e in F.coeffs)
    shrunk1 = [e[i1] for e in F.coeffs if e[i2] <= hi2 - margin]
    shrunk2 = [e[i2] for e in F.coeffs if e[i1] <= hi1 - margin]
    if not shrunk1 or not shrunk2:
        return CompatVerdict("undetermined", None, box)
    if min(shrunk1) != i0 or min(shrunk2) != j0:
        witness = min(
            (e for e in F.coeffs if e[i1] == i0 or e[i2] == j0),
            key=lambda e: (e[i1], e[i2]),
        )
        return CompatVerdict("incompatible", None, box, dict(zip(F.vars, witness)))
    return CompatVerdict("compatible", (i0, j0), box)


def compat_check(
    a: FieldOperator,
    b: FieldOperator,
    p: FactoredRational,
    w: FockVector,
    hi1: int,
    hi2: int,
    margin: int = 2,
    v1: str = "x1",
    v2: str = "x2",
) -> CompatVerdict:
    """Three-valued window verdict on p(v1/v2) a(v1) b(v2) w being jointly
    lower truncated."""
    if not p.is_laurent():
        raise ValueError("annihilator must be a polynomial in the ratio")
    prod = product_on_window(a, v1, b, v2, w, hi1, hi2)
    F = laurent_annihilator(p, v1, v2) * prod
    return quadrant_verdict(F, v1, v2, margin)


def _twist_series(f: FactoredRational, v1: str, v2: str, region, limits) -> TruncatedSeries:
    """Expansion of f(<ratio per region>) used to twist a reversed product."""
    return f.ratio_series(v1, v2, region, limits)


def locality_check(
    L: LocalityDatum,
    w: FockVector,
    hi1: int,
    hi2: int,
    v1: str = "x1",
    v2: str = "x2",
):
    """Compare both sides of the trigonometric locality relation on the box."""
    ann = laurent_annihilator(L.annihilator, v1, v2)
    lhs = ann * product_on_window(L.a, v1, L.b, v2, w, hi1, hi2)
    rhs = None
    for b_i, a_i, f_i in L.partners:
        rev = product_on_window(b_i, v2, a_i, v1, w, hi2, hi1)
        if f_i.factors or f_i.mexp:
            tw = _twist_series(f_i, v2, v1, (v2, v1), {v2: (NEG_INF, hi2), v1: (NEG_INF, hi1)})
            term = (tw.untagged() * rev).untagged()
        else:
            term = rev.scaled(f_i.const)
        rhs = term if rhs is None else rhs + term
    rhs = ann * rhs if rhs is not None else lhs.scaled(0)
    ok, ce = lhs.untagged().eq_on_common(rhs.untagged())
    return ok, ce


@dataclass(frozen=True)
class YeModes:
    """Mode data of the exponential-substitution product on a fixed vector.

    ``modes[n]`` is the one-variable series (a(x)_n^e b(x)) w; modes with
    n >= zero_order are certified zero, modes below ``n_min`` are outside the
    computed z-order.
    """

    modes: dict
    zero_order: int
    n_min: int
    var: str

    def mode(self, n: int) -> TruncatedSeries | None:
        if n in self.modes:
            return self.modes[n]
        if n >= self.zero_order:
            return None  # certified zero: callers treat None as zero
        raise InsufficientWindow(f"mode {n} below the computed z-order")

    def generating(self) -> TruncatedSeries | None:
        acc = None
        for n, s in self.modes.items():
            t = s.shifted(z=-n - 1)
            acc = t if acc is None else acc + t
        return acc


def ye_from_product(
    prod: TruncatedSeries,
    p: FactoredRational,
    zorder: int,
    margin: int = 2,
    xvar: str = "x",
) -> YeModes:
    """Mode split of p(e^z)^(-1) (p(x1/x) P)|_{x1 = x e^z} for a precomputed
    two-field product P on its box."""
    F = laurent_annihilator(p, "x1", xvar) * prod
    verdict = quadrant_verdict(F, "x1", xvar, margin)
    if verdict.status != "compatible":
        raise CompatibilityError(f"{verdict.status} on box {verdict.box}: {verdict.witness}")
    if verdict.bound is not None:
        F = F.assert_support_floor({"x1": verdict.bound[0], xvar: verdict.bound[1]})
    G = subst_exp(F.untagged(), "x1", xvar, "z", zorder)
    k, unit = p.exp_arg_dict(zorder)
    inv = invert_unit_1v(unit, zorder)
    inv_series = TruncatedSeries(
        ("z",), {(e,): c for e, c in inv.items()}, {"z": (NEG_INF, zorder)}, {"z": (0, INF)}
    )
    H = (G * inv_series).shifted(z=-k)
    zi = H.vars.index("z")
    xi = H.vars.index(xvar)
    slices: dict = {}
    zhi = H.win("z")[1]
    for e, c in H.coeffs.items():
        slices.setdefault(-e[zi] - 1, {})[(e[xi],)] = c
    modes = {}
    n_min = int(-zhi - 1)
    for n in range(n_min, k):
        coeffs = slices.get(n, {})
        modes[n] = TruncatedSeries(
            (xvar,), coeffs, {xvar: H.win(xvar)}, {xvar: H.sup(xvar)}
        )
    return YeModes(modes, k, n_min, xvar)


def ye_product(
    a: FieldOperator,
    b: FieldOperator,
    p: FactoredRational,
    zorder: int,
    w: FockVector,
    hi1: int,
    hi2: int,
    margin: int = 2,
    xvar: str = "x",
) -> YeModes:
    """p(e^z)^(-1) (p(x1/x) a(x1) b(x)) at x1 = x e^z, split into z-modes.

    Requires the compatibility verdict on the box; the certified quadrant
    corner is asserted as a structural floor before the diagonal-mixing
    substitution.
    """
    prod = product_on_window(a, "x1", b, xvar, w, hi1, hi2)
    return ye_from_product(prod, p, zorder, margin, xvar)


def _residue_plus(F: TruncatedSeries, v1: str, xvar: str, zvar: str, zorder: int) -> TruncatedSeries:
    """Res_{v1} (x e^z - side kernel) applied to F: sum_{i>=0} (x e^z)^i F[v1=i]."""
    i1 = F.vars.index(v1)
    ix = F.vars.index(xvar)
    hi1 = F.win(v1)[1]
    hi2 = F.win(xvar)[1]
    slo2 = F.sup(xvar)[0]
    e_hi = min((hi1 + slo2) if (hi1 != INF and slo2 != NEG_INF) else INF, hi2)
    coeffs: dict = {}
    fact = [1]
    for t in range(1, zorder + 1):
        fact.append(fact[-1] * t)
    for e, c in F.coeffs.items():
        i = e[i1]
        if i < 0:
            continue
        out_e = i + e[ix]
        if out_e > e_hi:
            continue
        for t in range(0, zorder + 1):
            wgt = Fraction(i**t, fact[t])
            if not wgt:
                continue
            key = (out_e, t) if xvar < zvar else (t, out_e)
            s = coeffs.get(key, 0) + wgt * c
            if s:
                coeffs[key] = s
            else:
                coeffs.pop(key, None)
    vars = tuple(sorted((xvar, zvar)))
    return TruncatedSeries(
        vars,
        coeffs,
        {xvar: (NEG_INF, e_hi), zvar: (NEG_INF, zorder)},
        {xvar: (NEG_INF, INF), zvar: (0, INF)},
    )


def _residue_minus_twisted(
    rev: TruncatedSeries,
    qd: dict,
    v1: str,
    xvar: str,
    zvar: str,
    zorder: int,
) -> TruncatedSeries:
    """Res_{v1} of the opposite kernel against a twisted reversed product.

    Computes -sum_{i>=0} (x e^z)^(-1-i) [q(v1/x) rev](v1-coeff i), where ``qd``
    holds the ascending coefficients of q; the convolution over the twist is
    fused so only the finitely many cells above the reversed product's
    structural v1-floor are touched.
    """
    i1 = rev.vars.index(v1)
    ix = rev.vars.index(xvar)
    slo1 = rev.sup(v1)[0]
    if slo1 == NEG_INF:
        raise InsufficientWindow("opposite-kernel residue needs a certified v1 floor")
    hi1 = rev.win(v1)[1]
    hi2 = rev.win(xvar)[1]
    if hi1 < -1 - min(qd, default=0):
        raise InsufficientWindow("reversed-product v1 ceiling too low for the twist")
    e_hi = (hi2 + slo1) if hi2 != INF else INF
    coeffs: dict = {}
    fact = [1]
    for t in range(1, zorder + 1):
        fact.append(fact[-1] * t)
    for e, c in rev.coeffs.items():
        c1, c2 = e[i1], e[ix]
        out_e = c1 + c2  # residue against the antidiagonal kernel
        if out_e > e_hi:
            continue
        for tq, qc in qd.items():
            g1 = c1 + tq  # v1-exponent of the twisted cell; pairs at -1-i
            if g1 > -1:
                continue
            val = qc * c
            if not val:
                continue
            for t in range(0, zorder + 1):
                wgt = Fraction(g1**t, fact[t])
                key = (out_e, t) if xvar < zvar else (t, out_e)
                s = coeffs.get(key, 0) + (-wgt) * val
                if s:
                    coeffs[key] = s
                else:
                    coeffs.pop(key, None)
    vars = tuple(sorted((xvar, zvar)))
    return TruncatedSeries(
        vars,
        coeffs,
        {xvar: (NEG_INF, e_hi), zvar: (NEG_INF, zorder)},
        {xvar: (NEG_INF, INF), zvar: (0, INF)},
    )


def residue_ye(
    L: LocalityDatum,
    zorder: int,
    w: FockVector,
    hi1: int,
    hi2: int,
    xvar: str = "x",
) -> tuple[YeModes, TruncatedSeries]:
    """Mode data via the residue formula, plus the top-mode residue series.

    Returns (modes, top) where ``top`` equals (1/k!) p^(k)(1) (a_{k-1}^e b) w
    when p has a zero of order k at 1 (the z-free residue evaluation).
    """
    p = L.annihilator
    prod = product_on_window(L.a, "x1", L.b, xvar, w, hi1, hi2)
    F = laurent_annihilator(p, "x1", xvar) * prod

    def minus_side(zz, zord):
        acc = None
        for b_i, a_i, f_i in L.partners:
            rev = product_on_window(b_i, xvar, a_i, "x1", w, hi2, hi1)
            q = p * f_i.reciprocal_arg()  # q(y) = p(y) f_i(1/y), y = x1/x
            s = -1 - int(rev.sup("x1")[0])  # kernel indices pair v1-exps <= -1
            qd = q.ratio_coeffs_ascending(max(s, q.mexp))
            term = _residue_minus_twisted(rev, qd, "x1", xvar, zz, zord)
            acc = term if acc is None else acc + term
        if acc is None:
            raise ValueError("locality datum has no partners")
        return acc

    bracket = _residue_plus(F.untagged(), "x1", xvar, "z", zorder) - minus_side("z", zorder)
    k, unit = p.exp_arg_dict(zorder)
    inv = invert_unit_1v(unit, zorder)
    inv_series = TruncatedSeries(
        ("z",), {(e,): c for e, c in inv.items()}, {"z": (NEG_INF, zorder)}, {"z": (0, INF)}
    )
    H = (bracket * inv_series).shifted(z=-k)
    zi = H.vars.index("z")
    xi = H.vars.index(xvar)
    slices: dict = {}
    for e, c in H.coeffs.items():
        slices.setdefault(-e[zi] - 1, {})[(e[xi],)] = c
    zhi = H.win("z")[1]
    modes = {}
    n_min = int(-zhi - 1)
    for n in range(n_min, k):
        modes[n] = TruncatedSeries(
            (xvar,), slices.get(n, {}), {xvar: H.win(xvar)}, {xvar: H.sup(xvar)}
        )
    # z-free residue evaluation: the top-mode closed form
    top = _residue_plus(F.untagged(), "x1", xvar, "z0", 0) - minus_side("z0", 0)
    txi = top.vars.index(xvar)
    top_coeffs = {(e[txi],): c for e, c in top.coeffs.items()}
    top_series = TruncatedSeries(
        (xvar,), top_coeffs, {xvar: top.win(xvar)}, {xvar: (NEG_INF, INF)}
    )
    return YeModes(modes, k, n_min, xvar), top_series


def modes_agree(y1: YeModes, y2: YeModes):
    """Compare two mode families on their common n-range and windows."""
    for n in sorted(set(y1.modes) | set(y2.modes)):
        lo = max(y1.n_min, y2.n_min)
        if n < lo:
            continue
        s1 = y1.mode(n) if n < y1.zero_order else None
        s2 = y2.mode(n) if n < y2.zero_order else None
        if s1 is None and s2 is None:
            continue
        if s1 is None:
            ok, ce = s2.is_zero_on_window()
        elif s2 is None:
            ok, ce = s1.is_zero_on_window()
        else:
            ok, ce = s1.eq_on_common(s2)
        if not ok:
            return False, (n, ce)
    return True, None


def defect_series(
    L: LocalityDatum,
    w: FockVector,
    hi1: int,
    hi2: int,
    v1: str = "x1",
    v2: str = "x2",
    thm_region: bool = False,
    direct: TruncatedSeries | None = None,
) -> TruncatedSeries:
    """a(v1) b(v2) w minus the twisted reversed product, on the box.

    ``thm_region`` selects the commutator-theorem expansion of the twist
    (descending in v1/v2) instead of the locality-definition one (descending
    in v2/v1); the two coincide for constant twists.
    """
    if direct is None:
        direct = product_on_window(L.a, v1, L.b, v2, w, hi1, hi2)
    out = direct.untagged()
    for b_i, a_i, f_i in L.partners:
        rev = product_on_window(b_i, v2, a_i, v1, w, hi2, hi1)
        if f_i.factors or f_i.mexp:
            limits = {v1: (NEG_INF, hi1), v2: (NEG_INF, hi2)}
            if thm_region:
                tw = f_i.reciprocal_arg().ratio_series(v1, v2, (v1, v2), limits)
            else:
                tw = f_i.ratio_series(v2, v1, (v2, v1), limits)
            term = (tw.untagged() * rev).untagged()
        else:
            term = rev.scaled(f_i.const)
        out = out - term
    return out


def scaled_mode_extract(
    L: LocalityDatum,
    lambdas,
    w: FockVector,
    box: dict,
    zorder: int,
    hi1: int,
    hi2: int,
    margin: int = 2,
):
    """Fit the locality defect as delta terms and cross-check each coefficient
    against the exponential-substitution modes of the correspondingly scaled
    field: A_ij = j! * (fit coefficient), per the extraction identity.

    Returns (terms, agreements) where agreements[(lam, j)] is True/False per
    checked pair; raises NotDeltaSum when the defect is not a delta sum.
    """
    from .distributions import delta_fit

    jmax = max((m for _, m in L.annihilator.factors), default=1) - 1
    D = defect_series(L, w, hi1, hi2).restricted(box)
    terms = delta_fit(D, list(lambdas), jmax, "x1", "x2")
    fitted = {}
    for t in terms:
        fitted[(repr(t.lam), t.j)] = t
    agreements = {}
    fact = [1]
    for t in range(1, jmax + 1):
        fact.append(fact[-1] * t)
    for lam in lambdas:
        ye = ye_product(
            L.a.scaled(lam), L.b, L.annihilator.scale_arg(lam), zorder, w, hi1, hi2,
            margin=margin, xvar="x2",
        )
        for j in range(0, jmax + 1):
            t = fitted.get((repr(lam), j))
            expected = t.coeff.scaled(fact[j]) if t is not None else None
            got = ye.mode(j) if j < ye.zero_order else None
            if expected is None and got is None:
                agreements[(repr(lam), j)] = True
            elif expected is None:
                agreements[(repr(lam), j)] = got.is_zero_on_window()[0]
            elif got is None:
                agreements[(repr(lam), j)] = expected.is_zero_on_window()[0]
            else:
                agreements[(repr(lam), j)] = expected.eq_on_common(got)[0]
    return terms, agreements


def commutator_formula_check(
    L: LocalityDatum,
    C: CovariantStructure,
    w: FockVector,
    box: dict,
    zorder: int,
    hi1: int,
    hi2: int,
    margin: int = 2,
):
    """Covariant commutator formula on the box: the locality defect equals the
    group sum of delta kernels weighted by scaled-field mode products.

    Returns (ok, counterexample, contributing) with ``contributing`` the list
    of (shift, character value, top modes) that produced nonzero kernels.
    """
    chis = [C.chi(n) for n in C.shifts()]
    if len({repr(c) for c in chis}) != len(chis):
        raise ValueError("character must be injective on the shift window")
    base = product_on_window(L.a, "x1", L.b, "x2", w, hi1, hi2)
    lhs = defect_series(L, w, hi1, hi2, thm_region=True, direct=base).restricted(box)
    rhs = DeltaSum()
    contributing = []
    fact = [1]
    for t in range(1, zorder + 1):
        fact.append(fact[-1] * t)
    for n in C.shifts():
        chi = C.chi(n)
        pg = L.annihilator.scale_arg(chi)
        # a(chi x1) b(x2) w is the base product with x1-rows rescaled by chi
        ye = ye_from_product(var_scaled(base, "x1", chi), pg, zorder, margin, xvar="x2")
        used = []
        for j in range(0, ye.zero_order):
            s = ye.mode(j)
            if s is None or s.is_zero_series():
                continue
            rhs = rhs + DeltaSum([DeltaTerm(chi, j, s.scaled(Fraction(1, fact[j])))])
            used.append(j)
        if used:
            contributing.append((n, chi, used))
    expanded = rhs.merged().expand("x1", "x2", box)
    ok, ce = lhs.eq_on_common(expanded)
    return ok, ce, contributing


def assoc_check(
    u: FieldOperator,
    v: FieldOperator,
    p_inner: FactoredRational,
    p_outer: FactoredRational,
    w: FockVector,
    zorder: int,
    hi1: int,
    hi2: int,
    margin: int = 2,
):
    """p(e^z) Y(Y(u,z)v, x2) w == (p(x1/x2) u(x1) v(x2) w) at x1 = x2 e^z.

    The inner modes are produced by the exponential-substitution product with
    ``p_inner``; the right side uses ``p_outer`` directly, so running the two
    with different valid annihilators makes this a well-definedness check and
    not a tautology.
    """
    inner = ye_product(u, v, p_inner, zorder, w, hi1, hi2, margin=margin, xvar="x2")
    gen = inner.generating()
    if gen is None:
        gen = TruncatedSeries.exact(("x2", "z"), {})
    k, unit = p_outer.exp_arg_dict(zorder)
    pe = TruncatedSeries(
        ("z",), {(e + k,): c for e, c in unit.items()}, {"z": (NEG_INF, zorder + k)}, {"z": (k, INF)}
    )
    lhs = pe * gen
    prod = product_on_window(u, "x1", v, "x2", w, hi1, hi2)
    F = laurent_annihilator(p_outer, "x1", "x2") * prod
    verdict = quadrant_verdict(F, "x1", "x2", margin)
    if verdict.status != "compatible":
        raise CompatibilityError(f"{verdict.status} on box {verdict.box}")
    if verdict.bound is not None:
        F = F.assert_support_floor({"x1": verdict.bound[0], "x2": verdict.bound[1]})
    rhs = subst_exp(F.untagged(), "x1", "x2", "z", zorder)
    return lhs.eq_on_common(rhs)


def covariance_check(
    C: CovariantStructure, r: int, shift: int, grade_bound: int, hi: int
):
    """Field of the shifted flavor == character-rescaled field, on all basis
    vectors of bounded grade."""
    f1 = C.realize(r + shift)
    f2 = C.realize(r).scaled(C.chi(shift))
    module = f1.module
    for w in module.basis(grade_bound):
        ok, ce = f1.series(w, hi).eq_on_common(f2.series(w, hi))
        if not ok:
            return False, (w, ce)
    return True, None


def find_annihilator(
    a: FieldOperator,
    b: FieldOperator,
    vectors,
    roots,
    hi1: int,
    hi2: int,
    margin: int = 2,
    max_degree: int = 4,
    max_mult: int = 2,
):
    """Smallest product of (y - root)^k over the given candidate roots (k <=
    max_mult) whose compatibility verdict is positive on every vector."""
    from itertools import combinations_with_replacement

    for deg in range(0, max_degree + 1):
        for combo in combinations_with_replacement(range(len(roots)), deg):
            counts = {}
            for i in combo:
                counts[i] = counts.get(i, 0) + 1
            if any(c > max_mult for c in counts.values()):
                continue
            p = FactoredRational(Fraction(1), 0, tuple((roots[i], m) for i, m in counts.items()))
            if all(
                compat_check(a, b, p, w, hi1, hi2, margin=margin) for w in vectors
            ):
                return p
    return None
