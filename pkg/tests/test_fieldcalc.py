import random
from fractions import Fraction

import pytest

from fdcalc.distributions import delta_fit
from fdcalc.fock import FockModule, e_spec, t_spec
from fdcalc.fieldcalc import (
    CompatibilityError,
    CovariantStructure,
    FieldOperator,
    LocalityDatum,
    assoc_check,
    commutator_formula_check,
    compat_check,
    covariance_check,
    defect_series,
    find_annihilator,
    laurent_annihilator,
    locality_check,
    modes_agree,
    product_on_window,
    quadrant_verdict,
    residue_ye,
    scaled_mode_extract,
    var_scaled,
    ye_product,
)
from fdcalc.scalars import ScalarField
from fdcalc.series import FactoredRational, TruncatedSeries, divide_linear

F = Fraction
Q2 = ScalarField.rationals(F(2))
QP = ScalarField.rational_functions()


def tfield(module, r):
    return FieldOperator(module, "T", module.field.p_power(r))


def minimal_p(fld, r, s):
    return FactoredRational(
        fld.one(), 0, ((fld.p_power(s + 1 - r), 1), (fld.p_power(s - 1 - r), 1))
    )


def witness_p(fld, r, s):
    return minimal_p(fld, r, s) * FactoredRational(
        fld.one(), 0, ((-fld.p_power(s - r), 1),)
    )


def neighbor_locality(module, r, s):
    fld = module.field
    a, b = tfield(module, r), tfield(module, s)
    return LocalityDatum(a, b, ((b, a, FactoredRational(-fld.one())),), witness_p(fld, r, s))


@pytest.fixture(scope="module")
def tmod():
    return FockModule(t_spec(Q2))


@pytest.fixture(scope="module")
def tsym():
    return FockModule(t_spec(QP))


def test_product_coefficients(tmod):
    vac = tmod.vacuum()
    prod = product_on_window(tfield(tmod, 0), "x1", tfield(tmod, 0), "x2", vac, 4, 4)
    # T_1 T_-1 vac with p0 = 2
    assert prod.get(x1=-1, x2=1) == (2 * (F(2) + F(1, 2))) * vac
    assert prod.get(x1=1, x2=1) == 0  # square of a creation
    E = FockModule(e_spec(Q2, flavor_lo=0, flavor_hi=2))
    pe = product_on_window(FieldOperator(E, 1), "x1", FieldOperator(E, 2), "x2", E.vacuum(), 3, 3)
    assert pe.get(x1=-1, x2=0) == 2 * E.vacuum()


def test_compat_verdicts(tmod):
    vac = tmod.vacuum()
    a = tfield(tmod, 1)
    v = compat_check(a, a, minimal_p(Q2, 1, 1), vac, 7, 7)
    assert v.status == "compatible" and v.bound is not None
    v1 = compat_check(a, a, FactoredRational(F(1)), vac, 7, 7)
    assert v1.status == "incompatible" and v1.witness is not None
    with pytest.raises(ValueError):
        compat_check(a, a, FactoredRational(F(1), 0, ((F(2), -1),)), vac, 5, 5)


def test_compat_annihilator_with_spurious_root_still_works(tmod):
    vac = tmod.vacuum()
    a = tfield(tmod, 1)
    extra = minimal_p(Q2, 1, 1) * FactoredRational(F(1), 0, ((F(7), 1),))
    assert compat_check(a, a, extra, vac, 8, 8).status == "compatible"


def test_locality_all_pairs(tmod):
    for r in range(-1, 2):
        for s in range(-1, 2):
            L = neighbor_locality(tmod, r, s)
            for w in tmod.basis(3):
                ok, ce = locality_check(L, w, 6, 6)
                assert ok, (r, s, ce)


def test_locality_e_fields_neighbor():
    E = FockModule(e_spec(Q2, flavor_lo=0, flavor_hi=2))
    one = F(1)
    a, b = FieldOperator(E, 1), FieldOperator(E, 2)
    L = LocalityDatum(
        a, b, ((b, a, FactoredRational(-one)),), FactoredRational(one, 0, ((one, 1),))
    )
    for w in E.basis(3):
        ok, ce = locality_check(L, w, 5, 5)
        assert ok, ce


def test_locality_corrupted_partner_fails(tmod):
    fld = tmod.field
    a, b = tfield(tmod, 1), tfield(tmod, 1)
    L = LocalityDatum(a, b, ((b, a, FactoredRational(-2 * fld.one())),), witness_p(fld, 1, 1))
    ok, _ = locality_check(L, tmod.vacuum(), 6, 6)
    assert not ok


def test_ye_top_modes_neighbor(tmod):
    vac = tmod.vacuum()
    ye = ye_product(tfield(tmod, 1), tfield(tmod, 0), witness_p(Q2, 1, 0), 6, vac, 8, 8, xvar="x2")
    assert ye.zero_order == 1
    m0 = ye.mode(0)
    assert m0.get(x2=0) == 2 * vac
    assert all(e == (0,) for e in m0.coeffs)
    assert ye.mode(1) is None and ye.mode(5) is None


def test_ye_same_flavor_modes_vanish(tmod):
    vac = tmod.vacuum()
    ye = ye_product(tfield(tmod, 1), tfield(tmod, 1), minimal_p(Q2, 1, 1), 6, vac, 8, 8, xvar="x2")
    assert ye.zero_order == 0  # p(1) != 0: no nonnegative modes at all
    assert ye.mode(-1).is_zero_series()  # e_(r) paired with itself kills mode -1
    assert not ye.mode(-2).is_zero_series()


def test_ye_annihilator_independence(tmod):
    rng = random.Random(17)
    basis = tmod.basis(3)
    for trial in range(20):
        r, s = rng.randint(-2, 2), rng.randint(-2, 2)
        w = rng.choice(basis)
        p1 = minimal_p(Q2, r, s)
        p2 = p1 * FactoredRational(F(1), 0, ((F(rng.choice([3, 5, 7])), 1),))
        y1 = ye_product(tfield(tmod, r), tfield(tmod, s), p1, 5, w, 8, 8, xvar="x2")
        y2 = ye_product(tfield(tmod, r), tfield(tmod, s), p2, 5, w, 9, 9, xvar="x2")
        ok, det = modes_agree(y1, y2)
        assert ok, (trial, r, s, det)


def test_ye_incompatible_raises(tmod):
    with pytest.raises(CompatibilityError):
        ye_product(tfield(tmod, 1), tfield(tmod, 1), FactoredRational(F(1)), 5, tmod.vacuum(), 7, 7)


def test_ye_rescaling_naturality(tmod):
    # scaling both fields equals substituting x -> lam x in the mode data
    lam = F(2)
    p1 = minimal_p(Q2, 1, 0)
    for w in tmod.basis(2):
        y = ye_product(tfield(tmod, 1), tfield(tmod, 0), p1, 5, w, 8, 8, xvar="x2")
        ys = ye_product(
            tfield(tmod, 1).scaled(lam), tfield(tmod, 0).scaled(lam), p1, 5, w, 8, 8, xvar="x2"
        )
        for n in set(y.modes) & set(ys.modes):
            ok, ce = ys.modes[n].eq_on_common(var_scaled(y.modes[n], "x2", lam))
            assert ok, (n, ce)


def test_residue_matches_ye_and_top_mode(tmod):
    rng = random.Random(23)
    basis = tmod.basis(3)
    for trial in range(12):
        r, s = rng.randint(-1, 2), rng.randint(-1, 2)
        w = rng.choice(basis)
        L = neighbor_locality(tmod, r, s)
        y1 = ye_product(L.a, L.b, L.annihilator, 5, w, 8, 8, xvar="x2")
        y2, top = residue_ye(L, 5, w, 8, 8, xvar="x2")
        ok, det = modes_agree(y1, y2)
        assert ok, (trial, r, s, det)
        k = y1.zero_order
        lead = (
            L.annihilator.shifted_value_at(F(1)) if k else L.annihilator.value_at(F(1))
        )
        mk = y1.modes.get(k - 1)
        if mk is not None:
            ok, ce = top.eq_on_common(mk.scaled(lead))
            assert ok, (trial, r, s, ce)


def test_scaled_mode_extract(tmod):
    fld = tmod.field
    L = neighbor_locality(tmod, 1, 1)
    lambdas = [fld.p_power(1), fld.p_power(-1)]
    box = {"x1": (-7, 7), "x2": (-7, 7)}
    for w in tmod.basis(2):
        terms, agreements = scaled_mode_extract(L, lambdas, w, box, 5, 9, 9)
        assert all(agreements.values()), agreements
        got = {(repr(t.lam), t.j): t.coeff.get(x2=0) for t in terms}
        assert got == {(repr(lambdas[0]), 0): 2 * w, (repr(lambdas[1]), 0): 2 * w}
    # a lambda outside the defect's spectrum extracts nothing
    terms, agreements = scaled_mode_extract(
        L, [fld.p_power(1), fld.p_power(-1), fld.coerce(7)], tmod.vacuum(), box, 5, 9, 9
    )
    assert all(agreements.values())
    assert not any(repr(t.lam) == repr(fld.coerce(7)) for t in terms)


def test_delta_decompose_fermion_pair(tmod):
    # both orderings of the realized neighbor-field product: the defect
    # decomposes into the two scalar kernels 2 delta(p x2/x1), 2 delta(x2/(p x1))
    from fdcalc.distributions import delta_decompose

    fld = tmod.field
    a = tfield(tmod, 1)
    pmin = minimal_p(fld, 1, 1)
    for w in tmod.basis(2):
        direct = product_on_window(a, "x1", a, "x2", w, 8, 8)
        reversed_ = product_on_window(a, "x2", a, "x1", w, 8, 8)
        box = {"x1": (-6, 6), "x2": (-6, 6)}
        terms = delta_decompose(
            direct.restricted(box), -reversed_.restricted(box), pmin, "x1", "x2"
        )
        got = {repr(t.lam): t.coeff.get(x2=0) for t in terms}
        assert all(t.j == 0 for t in terms)
        assert got == {
            repr(fld.p_power(1)): 2 * w,
            repr(fld.p_power(-1)): 2 * w,
        }


def test_zero_defect_extracts_nothing(tmod):
    E = FockModule(e_spec(Q2, flavor_lo=0, flavor_hi=3))
    one = F(1)
    a, b = FieldOperator(E, 0), FieldOperator(E, 3)
    L = LocalityDatum(
        a, b, ((b, a, FactoredRational(-one)),), FactoredRational(one, 0, ((one, 1),))
    )
    D = defect_series(L, E.vacuum(), 6, 6).restricted({"x1": (-5, 5), "x2": (-5, 5)})
    assert D.is_zero_on_window()[0]
    assert delta_fit(D, [one], 0, "x1", "x2") == []


def test_commutator_formula_diagonal(tmod):
    fld = tmod.field
    C = CovariantStructure(lambda r: tfield(tmod, r), lambda n: fld.p_power(n), -3, 3)
    L = LocalityDatum(
        tfield(tmod, 1), tfield(tmod, 1),
        ((tfield(tmod, 1), tfield(tmod, 1), FactoredRational(-fld.one())),),
        minimal_p(fld, 1, 1),
    )
    box = {"x1": (-5, 5), "x2": (-5, 5)}
    for w in tmod.basis(3):
        ok, ce, contrib = commutator_formula_check(L, C, w, box, 6, 8, 8)
        assert ok, ce
        assert sorted(n for n, _, _ in contrib) == [-1, 1]
        for _, chi, used in contrib:
            assert used == [0]


def test_commutator_corrupted_character_fails(tmod):
    fld = tmod.field
    Cbad = CovariantStructure(lambda r: tfield(tmod, r), lambda n: fld.p_power(2 * n), -2, 2)
    L = LocalityDatum(
        tfield(tmod, 1), tfield(tmod, 1),
        ((tfield(tmod, 1), tfield(tmod, 1), FactoredRational(-fld.one())),),
        minimal_p(fld, 1, 1),
    )
    box = {"x1": (-5, 5), "x2": (-5, 5)}
    ok, ce, _ = commutator_formula_check(L, Cbad, tmod.vacuum(), box, 6, 8, 8)
    assert not ok and ce is not None


def test_commutator_nonneighbor_adjoint_module():
    E = FockModule(e_spec(Q2, flavor_lo=0, flavor_hi=3))
    one = F(1)
    trivial = CovariantStructure(lambda r: None, lambda n: one, 0, 0)
    box = {"x1": (-4, 4), "x2": (-4, 4)}
    for r, s, expect in ((0, 3, False), (1, 2, True)):
        a, b = FieldOperator(E, r), FieldOperator(E, s)
        L = LocalityDatum(
            a, b, ((b, a, FactoredRational(-one)),), FactoredRational(one, 0, ((one, 1),))
        )
        ok, ce, contrib = commutator_formula_check(L, trivial, E.vacuum(), box, 5, 6, 6)
        assert ok, (r, s, ce)
        assert bool(contrib) is expect


def test_assoc_check_distinct_annihilators(tmod):
    u, v = tfield(tmod, 1), tfield(tmod, 0)
    ok, ce = assoc_check(u, v, minimal_p(Q2, 1, 0), witness_p(Q2, 1, 0), tmod.vacuum(), 6, 9, 9)
    assert ok, ce
    w = tmod.basis(2)[-1]
    ok, ce = assoc_check(u, v, witness_p(Q2, 1, 0), minimal_p(Q2, 1, 0), w, 6, 9, 9)
    assert ok, ce


def test_assoc_identity_field(tmod):
    one_field = FieldOperator(tmod, identity=True)
    v = tfield(tmod, 1)
    trivial = FactoredRational(F(1), 0, ((F(7), 1),))
    ok, ce = assoc_check(one_field, v, trivial, trivial, tmod.vacuum(), 5, 6, 6)
    assert ok, ce


def test_covariance_and_negative_control(tmod):
    fld = tmod.field
    C = CovariantStructure(lambda r: tfield(tmod, r), lambda n: fld.p_power(n), -3, 3)
    assert covariance_check(C, 1, 1, 3, 5)[0]
    assert covariance_check(C, -1, 2, 3, 5)[0]
    assert covariance_check(C, 1, 0, 3, 5)[0]
    Cbad = CovariantStructure(lambda r: tfield(tmod, r), lambda n: fld.p_power(2 * n), -3, 3)
    assert not covariance_check(Cbad, 1, 1, 3, 5)[0]


def test_find_annihilator_minimal(tmod):
    roots = [F(2), F(1, 2), F(1), F(4), F(1, 4), F(8)]
    p = find_annihilator(tfield(tmod, 1), tfield(tmod, 0), tmod.basis(2), roots, 8, 8)
    assert p is not None
    assert sorted(repr(r) for r in p.roots()) == sorted([repr(F(1)), repr(F(1, 4))])


def test_mode_truncation_divisibility(tmod):
    # modes vanish for j >= -1 (same-flavor pairing), so removing one factor
    # (x1/x2 - 1) from the compatible product preserves the joint truncation;
    # the lemma's ceiling shows as the nonzero mode at -2
    # (test_ye_same_flavor_modes_vanish)
    vac = tmod.vacuum()
    a = tfield(tmod, 1)
    q = minimal_p(Q2, 1, 1)  # roots p, 1/p: q(1) != 0
    prod = product_on_window(a, "x1", a, "x2", vac, 12, 12)
    Fq = laurent_annihilator(q, "x1", "x2") * prod
    verdict = quadrant_verdict(Fq, "x1", "x2", 2)
    assert verdict.status == "compatible"
    Fq = Fq.assert_support_floor({"x1": verdict.bound[0], "x2": verdict.bound[1]})
    # (x1/x2 - 1)^(-1) q(x1/x2) ab = x2 * [divide by (x1 - x2)]
    A1 = divide_linear(Fq.untagged(), "x1", "x2", F(1), hi2_cap=6).shifted(x2=1)
    assert quadrant_verdict(A1, "x1", "x2", 2).status == "compatible"
    back = TruncatedSeries.exact(("x1", "x2"), {(1, -1): F(1), (0, 0): F(-1)}) * A1
    okb, ceb = back.eq_on_common(Fq)
    assert okb, ceb


def test_ye_symbolic_smoke(tsym):
    fld = tsym.field
    vac = tsym.vacuum()
    ye = ye_product(
        tfield(tsym, 1), tfield(tsym, 0), witness_p(fld, 1, 0), 4, vac, 6, 6, xvar="x2"
    )
    assert ye.zero_order == 1
    assert ye.mode(0).get(x2=0) == 2 * vac
