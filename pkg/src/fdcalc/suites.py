"""Named verification suites with machine-readable results.

Each check is a pure callable returning a :class:`CheckResult`; a suite is an
ordered list of named checks.  Randomized instance checks use a fixed seed so
identical configurations produce identical reports.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import dvir as dv
from .distributions import (
    DeltaSum,
    DeltaTerm,
    NotDeltaSum,
    annihilation_check,
    delta_decompose,
    delta_fit,
    shifted_delta_term,
    three_term_check,
    vanishing_order,
)
from .fock import FockModule, FockVector, e_spec, t_spec
from .fieldcalc import (
    CovariantStructure,
    FieldOperator,
    LocalityDatum,
    commutator_formula_check,
    modes_agree,
    residue_ye,
    ye_product,
)
from .scalars import RatFunc, ScalarField
from .series import (
    INF,
    NEG_INF,
    FactoredRational,
    TruncatedSeries,
    iota_expand,
    partial_fractions,
    var_scaled,
)


class ConfigError(ValueError):
    """Invalid suite configuration."""


@dataclass(frozen=True)
class SuiteConfig:
    suite: str = "all"
    p: object = "symbolic"  # "symbolic" or a Fraction
    grade: int = 5
    modes: int = 4
    flavor_lo: int = -2
    flavor_hi: int = 3
    zorder: int = 6
    margin: int = 2
    jobs: int = 1
    seed: int = 20240811

    def __post_init__(self):
        if self.grade < 1 or self.modes < 1 or self.zorder < 1 or self.margin < 1:
            raise ConfigError("all bounds must be positive")
        if self.flavor_lo > self.flavor_hi:
            raise ConfigError("empty flavor window")
        if self.p != "symbolic":
            p0 = Fraction(self.p)
            if p0 in (0, 1, -1):
                raise ConfigError("rational p must have |p| not in {0, 1}")

    def scalar_field(self) -> ScalarField:
        if self.p == "symbolic":
            return ScalarField.rational_functions()
        return ScalarField.rationals(Fraction(self.p))

    def params(self) -> dv.DVirParams:
        return dv.DVirParams(self.scalar_field(), -1)

    def as_dict(self) -> dict:
        return {
            "suite": self.suite,
            "p": "symbolic" if self.p == "symbolic" else str(Fraction(self.p)),
            "grade": self.grade,
            "modes": self.modes,
            "flavors": f"{self.flavor_lo}..{self.flavor_hi}",
            "zorder": self.zorder,
            "window_margin": self.margin,
            "jobs": self.jobs,
            "seed": self.seed,
        }


@dataclass
class CheckResult:
    check_id: str
    status: str  # "pass" | "fail" | "undetermined"
    window: str | None = None
    counterexample: dict | None = None
    wall_ms: float = 0.0

    def payload(self) -> dict:
        return {
            "id": self.check_id,
            "status": self.status,
            "window": self.window,
            "counterexample": self.counterexample,
        }


def _render(x) -> str:
    if isinstance(x, RatFunc):
        return x.render()
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    return repr(x)


def _ce(exps=None, value=None, note=None) -> dict:
    out = {}
    if exps is not None:
        out["exponents"] = {k: int(v) for k, v in exps.items()}
    if value is not None:
        out["value"] = _render(value) if not isinstance(value, (tuple, list, str)) else str(value)
    if note is not None:
        out["note"] = str(note)
    return out


def _box(r: int) -> dict:
    return {"x1": (-r, r), "x2": (-r, r)}


def _rand_scalar(rng, fld, allow_zero=False):
    num = rng.randint(-6, 6)
    den = rng.randint(1, 4)
    if not allow_zero and num == 0:
        num = 1
    return fld.coerce(Fraction(num, den))


# -- formal-calc checks --------------------------------------------------------


def check_delta_annihilation(cfg: SuiteConfig) -> CheckResult:
    fld = cfg.scalar_field()
    radius = 20
    lim = _box(radius)
    lams = [Fraction(1), Fraction(2), Fraction(-3)]
    if fld.symbolic:
        lams.append(RatFunc.p())
    else:
        lams.append(fld.p_power(1))
    for lam in lams:
        for k in range(1, 5):
            for j in range(0, k):
                if not annihilation_check(lam, k, j, "x1", "x2", lim):
                    return CheckResult(
                        "delta-annihilation-exhaustive", "fail", f"radius {radius}",
                        _ce(note=f"lambda={_render(lam)} k={k} j={j}"),
                    )
    # negative control: j = k is not annihilated
    if annihilation_check(Fraction(1), 1, 1, "x1", "x2", lim):
        return CheckResult(
            "delta-annihilation-exhaustive", "fail", f"radius {radius}",
            _ce(note="j = k control unexpectedly annihilated"),
        )
    return CheckResult("delta-annihilation-exhaustive", "pass", f"radius {radius}")


def _random_delta_sum(rng, fld, v2="x2"):
    nlam = rng.randint(1, 3)
    pool = [Fraction(1), Fraction(2), Fraction(-3), Fraction(1, 2), Fraction(5), Fraction(-1)]
    rng.shuffle(pool)
    lams = [fld.coerce(x) for x in pool[:nlam]]
    terms = []
    for lam in lams:
        for j in range(0, rng.randint(1, 4)):
            if rng.random() < 0.4:
                continue
            coeffs = {}
            for _ in range(rng.randint(1, 3)):
                d = rng.randint(-5, 5)
                c = _rand_scalar(rng, fld)
                coeffs[(d,)] = c
            if coeffs:
                terms.append(DeltaTerm(lam, j, TruncatedSeries.exact((v2,), coeffs)))
    return lams, DeltaSum(terms).merged()


def check_delta_fit_roundtrip(cfg: SuiteConfig) -> CheckResult:
    fld = cfg.scalar_field()
    rng = random.Random(cfg.seed)
    radius = 18
    lim = {"x1": (-radius, radius), "x2": (-radius - 6, radius + 6)}
    for trial in range(50):
        lams, ds = _random_delta_sum(rng, fld)
        expanded = ds.expand("x1", "x2", lim)
        jmax = max((t.j for t in ds.terms), default=0)
        try:
            fit = delta_fit(expanded, lams, max(jmax, 1), "x1", "x2")
        except NotDeltaSum as exc:
            return CheckResult(
                "delta-fit-roundtrip", "fail", f"radius {radius}", _ce(note=f"trial {trial}: {exc}")
            )
        refit = DeltaSum(fit).expand("x1", "x2", lim)
        ok, ce = refit.eq_on_common(expanded)
        if not ok:
            return CheckResult(
                "delta-fit-roundtrip", "fail", f"radius {radius}",
                _ce(ce[0], ce[1], f"trial {trial}"),
            )
        # recovered coefficients match the originals on their windows
        orig = {(repr(t.lam), t.j): t for t in ds.terms}
        for t in fit:
            o = orig.pop((repr(t.lam), t.j), None)
            if o is None:
                return CheckResult(
                    "delta-fit-roundtrip", "fail", f"radius {radius}",
                    _ce(note=f"trial {trial}: spurious term ({_render(t.lam)}, {t.j})"),
                )
            ok, ce = t.coeff.eq_on_common(o.coeff)
            if not ok:
                return CheckResult(
                    "delta-fit-roundtrip", "fail", f"radius {radius}",
                    _ce(ce[0], ce[1], f"trial {trial}"),
                )
        if orig:
            return CheckResult(
                "delta-fit-roundtrip", "fail", f"radius {radius}",
                _ce(note=f"trial {trial}: missing terms {sorted(orig)}"),
            )
    return CheckResult("delta-fit-roundtrip", "pass", f"radius {radius}, 50 trials")


def check_delta_fit_zero(cfg: SuiteConfig) -> CheckResult:
    zero = TruncatedSeries(("x1", "x2"), {}, _box(12), {"x1": (INF, NEG_INF), "x2": (INF, NEG_INF)})
    fit = delta_fit(zero, [Fraction(1), Fraction(2)], 3, "x1", "x2")
    if fit:
        return CheckResult("delta-fit-zero", "fail", "radius 12", _ce(note=f"{len(fit)} terms"))
    return CheckResult("delta-fit-zero", "pass", "radius 12")


def _predicted_decomposition(p: FactoredRational, v2="x2") -> DeltaSum:
    """Delta terms predicted by partial fractions for the two expansions of
    1/p: each 1/(y-lam)^j contributes a derivative of the shifted kernel."""
    acc = DeltaSum()
    inv = p**-1
    for lam, j, a in partial_fractions(inv):
        if not a:
            continue
        base = DeltaSum([shifted_delta_term(lam, v2)])
        for _ in range(j - 1):
            base = base.d_dv2(v2)
        from .scalars import power as spow

        fact = 1
        for t in range(2, j):
            fact *= t
        coeff = a * spow(lam, 1 - j) * Fraction(1, fact)
        shift = TruncatedSeries.exact((v2,), {(j,): Fraction(1)})
        acc = acc + base.scaled_series(shift).scaled(coeff)
    return acc.merged()


def check_delta_decompose(cfg: SuiteConfig) -> CheckResult:
    fld = cfg.scalar_field()
    rng = random.Random(cfg.seed + 1)
    radius = 16
    lim = {"x1": (-radius, radius), "x2": (-radius - 8, radius + 8)}
    pool = [Fraction(1), Fraction(2), Fraction(-3), Fraction(1, 2), Fraction(3)]
    for trial in range(20):
        nroots = rng.randint(1, 2)
        rng.shuffle(pool)
        roots = [fld.coerce(x) for x in pool[:nroots]]
        facs = tuple((lam, rng.randint(1, 2)) for lam in roots)
        p = FactoredRational(fld.one(), 0, facs)
        inv = p**-1
        ab = iota_expand(inv, "x1", "x2", ("x1", "x2"), lim)
        K = iota_expand(inv, "x1", "x2", ("x2", "x1"), lim)
        terms = delta_decompose(ab, K, p, "x1", "x2")
        got = DeltaSum(terms).expand("x1", "x2", _box(10))
        want = _predicted_decomposition(p).expand("x1", "x2", _box(10))
        ok, ce = got.eq_on_common(want)
        if not ok:
            return CheckResult(
                "delta-decompose-rational", "fail", f"radius {radius}",
                _ce(ce[0], ce[1], f"trial {trial}: p = {p.render()}"),
            )
    return CheckResult("delta-decompose-rational", "pass", f"radius {radius}, 20 trials")


def check_vanishing_order(cfg: SuiteConfig) -> CheckResult:
    fld = cfg.scalar_field()
    rng = random.Random(cfg.seed + 2)
    for trial in range(30):
        lam = _rand_scalar(rng, fld)
        k = rng.randint(0, 3)
        lin = TruncatedSeries.exact(("x1", "x2"), {(1, 0): fld.one(), (0, 1): -lam})
        terms = {}
        for _ in range(rng.randint(1, 4)):
            terms[(rng.randint(-3, 3), rng.randint(-3, 3))] = _rand_scalar(rng, fld)
        B = TruncatedSeries.exact(("x1", "x2"), terms)
        # ensure B(lam x2, x2) != 0 so the constructed order is exactly k
        from .series import diagonal_collapse

        if B.is_zero_series() or diagonal_collapse(B, "x1", "x2", lam).is_zero_series():
            B = B + TruncatedSeries.exact(("x1", "x2"), {(0, 0): fld.one()})
            if diagonal_collapse(B, "x1", "x2", lam).is_zero_series():
                continue
        A = B
        for _ in range(k):
            A = A * lin
        got = vanishing_order(A, lam, "x1", "x2")
        if got != k:
            return CheckResult(
                "vanishing-order", "fail", None,
                _ce(note=f"trial {trial}: lambda={_render(lam)} expected {k} got {got}"),
            )
    return CheckResult("vanishing-order", "pass", "30 trials")


def check_three_term(cfg: SuiteConfig) -> CheckResult:
    one2 = TruncatedSeries(
        ("x1", "x2"), {(0, 0): Fraction(1)}, _box(7), {"x1": (0, 0), "x2": (0, 0)}
    )
    oneC = TruncatedSeries(
        ("x0", "x2"), {(0, 0): Fraction(1)},
        {"x0": (NEG_INF, 7), "x2": (-7, 7)}, {"x0": (0, 0), "x2": (0, 0)},
    )
    if not three_term_check(one2, one2, oneC, 0, 4):
        return CheckResult("three-term-delta-log", "fail", "radius 7", _ce(note="kernel identity"))
    # polynomial instance: A = B = x1 x2, so C = x2^2 e^(x0)
    AB = TruncatedSeries(
        ("x1", "x2"), {(1, 1): Fraction(1)}, _box(7), {"x1": (1, 1), "x2": (1, 1)}
    )
    cco = {}
    fact = 1
    for t in range(0, 8):
        if t:
            fact *= t
        cco[(t, 2)] = Fraction(1, fact)
    C2 = TruncatedSeries(
        ("x0", "x2"), cco, {"x0": (NEG_INF, 7), "x2": (-7, 7)}, {"x0": (0, INF), "x2": (2, 2)}
    )
    if not three_term_check(AB, AB, C2, 0, 4):
        return CheckResult("three-term-delta-log", "fail", "radius 7", _ce(note="monomial instance"))
    bad = one2 + TruncatedSeries.exact(("x1", "x2"), {(2, 1): Fraction(1)})
    if three_term_check(one2, bad, oneC, 0, 4):
        return CheckResult(
            "three-term-delta-log", "fail", "radius 7", _ce(note="corrupted control passed")
        )
    return CheckResult("three-term-delta-log", "pass", "radius 7")


# -- clifford checks -----------------------------------------------------------


def check_car_anticommutators(cfg: SuiteConfig) -> CheckResult:
    fld = cfg.scalar_field()
    mode_w = 3
    grade = min(cfg.grade, 4)
    for ell in (1, 2):
        E = FockModule(e_spec(fld, ell=ell, flavor_lo=0, flavor_hi=2))
        gens = [(r, m) for r in (0, 1, 2) for m in range(-mode_w, mode_w + 1)]
        for g1 in gens:
            for g2 in gens:
                if not E.anticommutator_check(g1, g2, grade):
                    return CheckResult(
                        "car-anticommutators", "fail", f"grade {grade}",
                        _ce(note=f"E(ell={ell}) {g1} {g2}"),
                    )
    M = FockModule(t_spec(fld))
    for m in range(-mode_w, mode_w + 1):
        for n in range(-mode_w, mode_w + 1):
            if not M.anticommutator_check(("T", m), ("T", n), grade):
                return CheckResult(
                    "car-anticommutators", "fail", f"grade {grade}", _ce(note=f"T {m} {n}")
                )
    return CheckResult("car-anticommutators", "pass", f"grade {grade}, |modes| <= {mode_w}")


def check_mode_square(cfg: SuiteConfig) -> CheckResult:
    fld = cfg.scalar_field()
    grade = min(cfg.grade, 4)
    M = FockModule(t_spec(fld))
    half = Fraction(1, 2)
    for m in range(-4, 5):
        pair = M.spec.pairing("T", m, "T", m)
        for w in M.basis(grade):
            got = M.apply_mode("T", m, M.apply_mode("T", m, w))
            want = (half * pair) * w if pair else FockVector()
            if got != want:
                return CheckResult(
                    "mode-square", "fail", f"grade {grade}", _ce(note=f"T_{m} on {w!r}")
                )
    return CheckResult("mode-square", "pass", f"grade {grade}")


def check_restriction(cfg: SuiteConfig) -> CheckResult:
    fld = cfg.scalar_field()
    M = FockModule(t_spec(fld))
    E = FockModule(e_spec(fld, flavor_lo=0, flavor_hi=1))
    for module, flavors in ((M, ["T"]), (E, [0, 1])):
        for w in module.basis(min(cfg.grade, 4)):
            bound = module.ann_bound(w)
            for r in flavors:
                for n in range(bound, bound + 5):
                    if module.apply_mode(r, n, w):
                        return CheckResult(
                            "restriction-certificate", "fail", None,
                            _ce(note=f"{r}_{n} on {w!r} nonzero beyond bound {bound}"),
                        )
    return CheckResult("restriction-certificate", "pass", f"grade {min(cfg.grade, 4)}")


def check_graded_dimensions(cfg: SuiteConfig) -> CheckResult:
    fld = cfg.scalar_field()
    M = FockModule(t_spec(fld))
    # distinct-part partition counts, doubled by the optional zero mode
    got = M.graded_dimensions(6)
    want = [2, 2, 2, 4, 4, 6, 8]
    if got != want:
        return CheckResult("graded-dimensions", "fail", None, _ce(note=f"T: {got} != {want}"))
    E1 = FockModule(e_spec(fld, flavor_lo=0, flavor_hi=0))
    got = E1.graded_dimensions(3)
    if got != [1, 1, 1, 2]:
        return CheckResult("graded-dimensions", "fail", None, _ce(note=f"E1: {got}"))
    return CheckResult("graded-dimensions", "pass", "grades 0..6")


def check_clifford_mode_products(cfg: SuiteConfig) -> CheckResult:
    fld = cfg.scalar_field()
    E = FockModule(e_spec(fld, flavor_lo=-2, flavor_hi=3))
    vac = E.vacuum()
    for r in range(-2, 4):
        for s in range(-2, 4):
            es = E.apply_mode(s, -1, vac)
            for n in range(0, 3):
                got = E.apply_mode(r, n, es)
                want = (2 * E.spec.ell) * vac if (n == 0 and abs(r - s) == 1) else FockVector()
                if got != want:
                    return CheckResult(
                        "clifford-mode-products", "fail", None, _ce(note=f"e({r})_{n} e({s})")
                    )
            if E.apply_mode(r, -1, E.apply_mode(r, -1, vac)):
                return CheckResult(
                    "clifford-mode-products", "fail", None, _ce(note=f"e({r})_-1 e({r}) != 0")
                )
    return CheckResult("clifford-mode-products", "pass", "flavors -2..3")


def check_field_scaling(cfg: SuiteConfig) -> CheckResult:
    fld = cfg.scalar_field()
    M = FockModule(t_spec(fld))
    lam = fld.p_power(1)
    hi = 5
    for w in M.basis(3):
        direct = M.apply_field("T", lam, w, hi)
        unscaled = M.apply_field("T", 1, w, hi)
        ok, ce = direct.eq_on_common(var_scaled(unscaled, "x", lam))
        if not ok:
            return CheckResult("field-scaling", "fail", f"hi {hi}", _ce(ce[0], None, repr(w)))
    return CheckResult("field-scaling", "pass", f"hi {hi}")


# -- dvir checks ----------------------------------------------------------------


def check_structure_series(cfg: SuiteConfig) -> CheckResult:
    t0 = time.perf_counter()
    fs = dv.f_coefficients(dv.DVirParams.symbolic(), 12)
    elapsed = time.perf_counter() - t0
    if fs[0] != 1 or any(x != 2 for x in fs[1:]):
        return CheckResult(
            "structure-series-closed-form", "fail", None,
            _ce(note=f"[{', '.join(_render(x) for x in fs[:4])}, ...]"),
        )
    if elapsed >= 1.0:
        return CheckResult(
            "structure-series-closed-form", "fail", None, _ce(note=f"too slow: {elapsed:.2f}s")
        )
    return CheckResult("structure-series-closed-form", "pass", "order 12")


def check_central_term_oracle(cfg: SuiteConfig) -> CheckResult:
    ps = dv.DVirParams.symbolic()
    p = RatFunc.p()
    module = dv.t_fock(ps)
    vac = module.vacuum()
    # hand computation: l=0 gives T_1 T_-1 vac, l=1 gives 2 T_0^2 vac
    lhs = module.apply_mode("T", 1, module.apply_mode("T", -1, vac))
    lhs = lhs + 2 * module.apply_mode("T", 0, module.apply_mode("T", 0, vac))
    want = (2 * (p + p**-1) + 4) * vac
    if lhs != want:
        return CheckResult("central-term-hand-oracle", "fail", None, _ce(note=repr(lhs)))
    c = dv.central_term(ps, 1)
    if c != 2 * (p + 2 + p**-1):
        return CheckResult("central-term-hand-oracle", "fail", None, _ce(value=c))
    if lhs != c * vac:
        return CheckResult("central-term-hand-oracle", "fail", None, _ce(note="sides differ"))
    return CheckResult("central-term-hand-oracle", "pass")


def check_tfock_relations(cfg: SuiteConfig) -> CheckResult:
    params = cfg.params()
    module = dv.t_fock(params)
    M = cfg.modes
    for m in range(-M, M + 1):
        for n in range(-M, M + 1):
            rep = dv.vir_relation_check(module, params, m, n, cfg.grade, extend=5)
            if rep.defect:
                return CheckResult(
                    "tfock-relations", "fail", f"grade {cfg.grade}",
                    _ce(note=f"(m,n)=({m},{n}) at {rep.defect_at}: {rep.defect!r}"),
                )
            if not rep.stable:
                return CheckResult(
                    "tfock-relations", "fail", f"grade {cfg.grade}",
                    _ce(note=f"(m,n)=({m},{n}): truncation certificate violated"),
                )
    return CheckResult(
        "tfock-relations", "pass", f"grade {cfg.grade}, |m|,|n| <= {M}, truncation +5 stable"
    )


# -- phi-module / commutator checks ---------------------------------------------


def _suite_results_to_checks(results, prefix="") -> list:
    out = []
    for cid, ok, detail in results:
        out.append(
            CheckResult(
                prefix + cid,
                "pass" if ok else "fail",
                None,
                None if ok else _ce(note=repr(detail)),
            )
        )
    return out


def check_phi_module(cfg: SuiteConfig) -> list:
    params = cfg.params()
    results = dv.theorem58_suite(
        params,
        flavor_lo=cfg.flavor_lo,
        flavor_hi=cfg.flavor_hi,
        grade_bound=cfg.grade,
        zorder=cfg.zorder,
        margin=cfg.margin,
    )
    return _suite_results_to_checks(results)


def check_mode_product_well_defined(cfg: SuiteConfig) -> CheckResult:
    params = cfg.params()
    fld = params.field
    module = dv.t_fock(params)
    rng = random.Random(cfg.seed + 3)
    basis = module.basis(min(cfg.grade, 3))
    hi = min(cfg.grade, 3) + 4
    extra_roots = [Fraction(3), Fraction(-2), Fraction(5)]
    for trial in range(20):
        r = rng.randint(cfg.flavor_lo, cfg.flavor_hi)
        s = rng.randint(cfg.flavor_lo, cfg.flavor_hi)
        w = rng.choice(basis)
        a = FieldOperator(module, "T", fld.p_power(r))
        b = FieldOperator(module, "T", fld.p_power(s))
        p1 = dv.standard_annihilator(params, r, s, with_extra=False)
        mu = fld.coerce(extra_roots[trial % len(extra_roots)])
        p2 = p1 * FactoredRational(fld.one(), 0, ((mu, 1),))
        y1 = ye_product(a, b, p1, cfg.zorder, w, hi, hi, cfg.margin, xvar="x2")
        y2 = ye_product(a, b, p2, cfg.zorder, w, hi + 1, hi + 1, cfg.margin, xvar="x2")
        ok, det = modes_agree(y1, y2)
        if not ok:
            return CheckResult(
                "mode-product-well-defined", "fail", f"hi {hi}",
                _ce(note=f"trial {trial} (r,s)=({r},{s}) mode {det[0]}"),
            )
    return CheckResult("mode-product-well-defined", "pass", f"hi {hi}, 20 trials")


def check_residue_agreement(cfg: SuiteConfig) -> list:
    params = cfg.params()
    fld = params.field
    module = dv.t_fock(params)
    rng = random.Random(cfg.seed + 4)
    basis = module.basis(min(cfg.grade, 3))
    hi = min(cfg.grade, 3) + 4
    top_ok = True
    top_ce = None
    for trial in range(20):
        r = rng.randint(cfg.flavor_lo, cfg.flavor_hi)
        s = rng.randint(cfg.flavor_lo, cfg.flavor_hi)
        w = rng.choice(basis)
        L = dv.neighbor_locality(params, module, r, s)
        y1 = ye_product(L.a, L.b, L.annihilator, cfg.zorder, w, hi, hi, cfg.margin, xvar="x2")
        y2, top = residue_ye(L, cfg.zorder, w, hi, hi, xvar="x2")
        ok, det = modes_agree(y1, y2)
        if not ok:
            return [
                CheckResult(
                    "residue-formula-agreement", "fail", f"hi {hi}",
                    _ce(note=f"trial {trial} (r,s)=({r},{s}) mode {det[0]}"),
                )
            ]
        # top-mode closed form: (1/k!) p^(k)(1) a_(k-1) b
        k = y1.zero_order
        lead = L.annihilator.shifted_value_at(fld.one()) if k else L.annihilator.value_at(fld.one())
        mk = y1.mode(k - 1) if (k - 1) in y1.modes else None
        if mk is not None and top_ok:
            ok, ce = top.eq_on_common(mk.scaled(lead))
            if not ok:
                top_ok, top_ce = False, _ce(ce[0], None, f"trial {trial} (r,s)=({r},{s})")
    return [
        CheckResult("residue-formula-agreement", "pass", f"hi {hi}, 20 trials"),
        CheckResult(
            "residue-top-mode", "pass" if top_ok else "fail", f"hi {hi}", top_ce
        ),
    ]


def check_commutator_matrix(cfg: SuiteConfig) -> CheckResult:
    params = cfg.params()
    fld = params.field
    module, C = dv.realization(params)
    grade = min(cfg.grade, 3)
    hi = grade + 5
    box = {"x1": (-hi + 1, hi - 1), "x2": (-hi + 1, hi - 1)}
    basis = module.basis(grade)
    for r in range(cfg.flavor_lo, cfg.flavor_hi + 1):
        for s in range(cfg.flavor_lo, cfg.flavor_hi + 1):
            L = LocalityDatum(
                C.realize(r), C.realize(s),
                ((C.realize(s), C.realize(r), FactoredRational(-fld.one())),),
                dv.standard_annihilator(params, r, s, with_extra=False),
            )
            want = sorted([s + 1 - r, s - 1 - r])
            Cw = CovariantStructure(C.realize, C.chi, want[0] - 2, want[1] + 2)
            for w in basis:
                ok, ce, contrib = commutator_formula_check(
                    L, Cw, w, box, cfg.zorder, hi, hi, cfg.margin
                )
                got = sorted(nn for nn, _, _ in contrib)
                if not ok:
                    return CheckResult(
                        "commutator-formula-matrix", "fail", f"box {hi - 1}",
                        _ce(ce[0] if ce else None, None, f"(r,s)=({r},{s})"),
                    )
                if got != want:
                    return CheckResult(
                        "commutator-formula-matrix", "fail", f"box {hi - 1}",
                        _ce(note=f"(r,s)=({r},{s}): kernels at shifts {got}, expected {want}"),
                    )
                if r == s:
                    chis = sorted(_render(c) for _, c, _ in contrib)
                    expect = sorted([_render(fld.p_power(1)), _render(fld.p_power(-1))])
                    if chis != expect:
                        return CheckResult(
                            "commutator-formula-matrix", "fail", f"box {hi - 1}",
                            _ce(note=f"diagonal pair kernels at {chis}"),
                        )
    return CheckResult(
        "commutator-formula-matrix", "pass",
        f"flavors {cfg.flavor_lo}..{cfg.flavor_hi}, grade {grade}, box {hi - 1}",
    )


def check_adjoint_module_kernels(cfg: SuiteConfig) -> CheckResult:
    """Neighbor pairs on the loop-Clifford vacuum module produce the single
    unscaled delta kernel; non-neighbor pairs give zero defect and empty sum."""
    fld = cfg.scalar_field()
    E = FockModule(e_spec(fld, ell=1, flavor_lo=cfg.flavor_lo, flavor_hi=cfg.flavor_hi))
    one = fld.one()
    grade = min(cfg.grade, 2)
    hi = grade + 4
    box = {"x1": (-hi + 1, hi - 1), "x2": (-hi + 1, hi - 1)}
    trivial = CovariantStructure(lambda r: None, lambda n: one, 0, 0)
    basis = E.basis(grade)
    for r in range(cfg.flavor_lo, cfg.flavor_hi + 1):
        for s in range(cfg.flavor_lo, cfg.flavor_hi + 1):
            a = FieldOperator(E, r)
            b = FieldOperator(E, s)
            L = LocalityDatum(
                a, b, ((b, a, FactoredRational(-one)),),
                FactoredRational(one, 0, ((one, 1),)),
            )
            for w in basis:
                ok, ce, contrib = commutator_formula_check(
                    L, trivial, w, box, cfg.zorder, hi, hi, cfg.margin
                )
                if not ok:
                    return CheckResult(
                        "adjoint-module-kernels", "fail", f"box {hi - 1}",
                        _ce(ce[0] if ce else None, None, f"(r,s)=({r},{s})"),
                    )
                neighbor = abs(r - s) == 1
                if bool(contrib) != neighbor:
                    return CheckResult(
                        "adjoint-module-kernels", "fail", f"box {hi - 1}",
                        _ce(note=f"(r,s)=({r},{s}): contributions {contrib}"),
                    )
    return CheckResult(
        "adjoint-module-kernels", "pass",
        f"flavors {cfg.flavor_lo}..{cfg.flavor_hi}, grade {grade}",
    )


def check_theorem59(cfg: SuiteConfig) -> list:
    params = cfg.params()
    results = dv.theorem59_suite(
        params, mode_bound=cfg.modes, grade_bound=cfg.grade, margin=cfg.margin
    )
    return _suite_results_to_checks(results)


SUITES = {
    "formal-calc": [
        check_delta_annihilation,
        check_delta_fit_roundtrip,
        check_delta_fit_zero,
        check_delta_decompose,
        check_vanishing_order,
        check_three_term,
    ],
    "clifford": [
        check_car_anticommutators,
        check_mode_square,
        check_restriction,
        check_graded_dimensions,
        check_clifford_mode_products,
        check_field_scaling,
    ],
    "dvir": [
        check_structure_series,
        check_central_term_oracle,
        check_tfock_relations,
        check_theorem59,
    ],
    "phi-module": [
        check_phi_module,
        check_mode_product_well_defined,
        check_residue_agreement,
    ],
    "commutator": [
        check_commutator_matrix,
        check_adjoint_module_kernels,
    ],
}
SUITES["all"] = (
    SUITES["formal-calc"]
    + SUITES["clifford"]
    + SUITES["dvir"]
    + SUITES["phi-module"]
    + SUITES["commutator"]
)


def run_suite(cfg: SuiteConfig) -> list:
    """Execute the configured suite; returns CheckResults sorted by id."""
    if cfg.suite not in SUITES:
        raise ConfigError(f"unknown suite {cfg.suite!r}; choose from {sorted(SUITES)}")
    checks = SUITES[cfg.suite]

    def run_one(fn):
        from .distributions import InsufficientWindow, WindowTooSmall
        from .fieldcalc import CompatibilityError

        t0 = time.perf_counter()
        try:
            res = fn(cfg)
        except (InsufficientWindow, WindowTooSmall) as exc:
            res = CheckResult(
                fn.__name__.replace("check_", ""), "undetermined", None, _ce(note=str(exc))
            )
        except CompatibilityError as exc:
            status = "undetermined" if "undetermined" in str(exc) else "fail"
            res = CheckResult(
                fn.__name__.replace("check_", ""), status, None, _ce(note=str(exc))
            )
        except Exception as exc:  # any other crash is a failed check
            res = CheckResult(
                fn.__name__.replace("check_", "crash-"), "fail", None, _ce(note=repr(exc))
            )
        elapsed = (time.perf_counter() - t0) * 1000.0
        results = res if isinstance(res, list) else [res]
        for r in results:
            r.wall_ms = elapsed / len(results)
        return results

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as ex:
            chunks = list(ex.map(run_one, checks))
    else:
        chunks = [run_one(fn) for fn in checks]
    out = [r for chunk in chunks for r in chunk]
    return sorted(out, key=lambda r: r.check_id)


def report_document(cfg: SuiteConfig, results: list) -> dict:
    """The serializable report; wall times quarantined under "timings"."""
    return {
        "config": cfg.as_dict(),
        "checks": [r.payload() for r in results],
        "summary": {
            "pass": sum(1 for r in results if r.status == "pass"),
            "fail": sum(1 for r in results if r.status == "fail"),
            "undetermined": sum(1 for r in results if r.status == "undetermined"),
        },
        "timings": {r.check_id: round(r.wall_ms, 3) for r in results},
    }


def exit_status(results: list) -> int:
    if any(r.status == "fail" for r in results):
        return 1
    if any(r.status == "undetermined" for r in results):
        return 2
    return 0
