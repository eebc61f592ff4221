from fractions import Fraction

import pytest

from fdcalc.fock import (
    FlavorOutOfWindow,
    FockModule,
    FockVector,
    e_spec,
    t_spec,
)
from fdcalc.scalars import RatFunc, ScalarField
from fdcalc.series import var_scaled

F = Fraction
p = RatFunc.p()
QP = ScalarField.rational_functions()
Q2 = ScalarField.rationals(F(2))


@pytest.fixture(scope="module")
def tmod():
    return FockModule(t_spec(QP))


@pytest.fixture(scope="module")
def emod():
    return FockModule(e_spec(QP, ell=1, flavor_lo=-2, flavor_hi=3))


def test_neighbor_contraction(emod):
    vac = emod.vacuum()
    v = emod.apply_mode(1, 0, emod.apply_mode(2, -1, vac))
    assert v == 2 * vac
    assert not emod.apply_mode(1, 0, emod.apply_mode(3, -1, vac))
    # higher annihilation modes see deeper creations
    v2 = emod.apply_mode(1, 2, emod.apply_mode(2, -3, vac))
    assert v2 == 2 * vac


def test_level_two_contraction():
    e2 = FockModule(e_spec(QP, ell=2, flavor_lo=0, flavor_hi=2))
    vac = e2.vacuum()
    assert e2.apply_mode(1, 0, e2.apply_mode(2, -1, vac)) == 4 * vac


def test_creation_square_zero(emod):
    vac = emod.vacuum()
    assert not emod.apply_mode(1, -1, emod.apply_mode(1, -1, vac))


def test_t_pairing_values(tmod):
    vac = tmod.vacuum()
    assert tmod.apply_mode("T", 1, tmod.apply_mode("T", -1, vac)) == (2 * (p + p**-1)) * vac
    assert not tmod.apply_mode("T", 2, tmod.apply_mode("T", -1, vac))
    t0sq = tmod.apply_mode("T", 0, tmod.apply_mode("T", 0, vac))
    assert t0sq == 2 * vac


def test_anticommutator_invariant_all_pairs():
    # both parameter modes, |modes| <= 5, all basis vectors of grade <= 5
    for fld in (QP, Q2):
        M = FockModule(t_spec(fld))
        for m in range(-5, 6):
            for n in range(-5, 6):
                assert M.anticommutator_check(("T", m), ("T", n), 5), (fld, m, n)


def test_anticommutator_invariant_e_pairs():
    # narrow flavor window keeps the grade-5 basis tractable
    for ell in (1, 2):
        E = FockModule(e_spec(QP, ell=ell, flavor_lo=0, flavor_hi=1))
        for r in (0, 1):
            for s in (0, 1):
                for m in range(-5, 6):
                    for n in range(-5, 6):
                        assert E.anticommutator_check((r, m), (s, n), 5), (ell, r, s, m, n)


def test_generator_squares(tmod):
    half = F(1, 2)
    for m in range(-5, 6):
        pair = tmod.spec.pairing("T", m, "T", m)
        for w in tmod.basis(5):
            got = tmod.apply_mode("T", m, tmod.apply_mode("T", m, w))
            want = (half * pair) * w if pair else FockVector()
            assert got == want


def test_restriction_bound(tmod, emod):
    for module, flavors in ((tmod, ["T"]), (emod, [-2, 0, 3])):
        for w in module.basis(4):
            N = module.ann_bound(w)
            for r in flavors:
                for n in range(N, N + 6):
                    assert not module.apply_mode(r, n, w)


def test_flavor_window_guard(emod):
    with pytest.raises(FlavorOutOfWindow):
        emod.apply_mode(9, 0, emod.vacuum())
    with pytest.raises(FlavorOutOfWindow):
        FockModule(t_spec(QP)).apply_mode(1, 0, FockModule(t_spec(QP)).vacuum())


def test_graded_dimensions_oracle(tmod):
    # oracle: partitions into distinct positive parts, doubled by the optional
    # zero mode
    def distinct_partitions(n):
        memo = {}

        def rec(rest, smallest):
            if rest == 0:
                return 1
            key = (rest, smallest)
            if key in memo:
                return memo[key]
            total = 0
            for part in range(smallest, rest + 1):
                total += rec(rest - part, part + 1)
            memo[key] = total
            return total

        return rec(n, 1)

    want = [2 * distinct_partitions(g) for g in range(7)]
    assert want[:5] == [2, 2, 2, 4, 4]
    assert tmod.graded_dimensions(6) == want

    e1 = FockModule(e_spec(QP, flavor_lo=0, flavor_hi=0))
    assert e1.graded_dimensions(3) == [distinct_partitions(g) for g in range(4)]
    assert e1.graded_dimensions(3)[0] == 1  # the vacuum sits at grade 0


def test_apply_field_vacuum(tmod):
    vac = tmod.vacuum()
    s = tmod.apply_field("T", 1, vac, 3)
    for e in range(0, 4):
        assert s.get(x=e) == tmod.basis_monomial([("T", -e)])
    assert s.get(x=-1) == 0


def test_apply_field_scaling_is_substitution(tmod):
    lam = p
    for w in tmod.basis(3):
        direct = tmod.apply_field("T", lam, w, 4)
        subst = var_scaled(tmod.apply_field("T", 1, w, 4), "x", lam)
        ok, ce = direct.eq_on_common(subst)
        assert ok, ce


def test_apply_field_scaled_coefficient(tmod):
    vac = tmod.vacuum()
    sp = tmod.apply_field("T", p, vac, 2)
    assert sp.get(x=1) == p * tmod.basis_monomial([("T", -1)])


def test_e_field_offset(emod):
    vac = emod.vacuum()
    s = emod.apply_field(1, 1, vac, 3)
    # a(x) = sum a_n x^(-n-1): x^0 coefficient is the mode -1 action
    assert s.get(x=0) == emod.basis_monomial([(1, -1)])
    assert s.get(x=-1) == 0


def test_fock_vector_arithmetic(tmod):
    vac = tmod.vacuum()
    w = tmod.basis_monomial([("T", -1)])
    assert vac + w - vac == w
    assert 0 + w == w and w - 0 == w and 0 - w == -w
    assert 2 * w == w + w
    assert bool(FockVector()) is False
    assert FockVector() == 0
    assert (p * w) != w
