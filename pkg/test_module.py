"""
Test Script for Drinfeld modules: Carlitz sequences, exp/log coefficients, certified twisted operators and
the special functions omega and pi~, and the divided difference alpha
"""

import pytest

from carlitz_algebra import PolyRing, ThetaFraction, ThetaPoly, field_for_q, parse_poly
from carlitz_errors import ContextMismatch, PrecisionExhausted
from carlitz_module import (
    Deformation,
    DrinfeldModule,
    alpha_map,
    carlitz_b,
    carlitz_D,
    carlitz_ell,
    carlitz_sequences,
    certified_truncation,
    correction_series,
    exp_coefficient,
    exp_derivative_series,
    exp_series,
    log_coefficient,
    log_series,
    omega0,
    phi_theta_series,
    pitilde0,
)
from carlitz_series import GradedSeries


def test_carlitz_sequences():
    """Test 1: D_j, l_j and b_j(t)"""
    print("\n" + "="*70)
    print("TEST 1: CARLITZ SEQUENCES")
    print("="*70)

    F3 = field_for_q(3)
    assert carlitz_D(F3, 0) == ThetaPoly.one(F3)
    assert carlitz_D(F3, 1) == ThetaPoly.parse("T^3+2*T", F3)
    assert carlitz_ell(F3, 1) == -carlitz_D(F3, 1)
    assert carlitz_D(F3, 2).degree == 2 * 9
    assert carlitz_ell(F3, 2).degree == 3 + 9

    F2 = field_for_q(2)
    b2 = carlitz_b(F2, 2)
    assert b2 == parse_poly("t^2+T^2*t+T*t+T^3", b2.ring)
    assert carlitz_sequences("D", 1, F2) == ThetaPoly.parse("T^2+T", F2)
    with pytest.raises(ValueError):
        carlitz_sequences("E", 1, F2)
    print(f"✅ D_1 = {carlitz_D(F3, 1)}, b_2(t) = {b2}")


def test_exp_log_coefficients():
    """Test 2: Carlitz exp/log coefficients are 1/D_j and 1/l_j"""
    print("\n" + "="*70)
    print("TEST 2: EXP/LOG COEFFICIENTS")
    print("="*70)

    for q in (2, 3):
        F = field_for_q(q)
        phi = DrinfeldModule.carlitz(F)
        one = ThetaPoly.one(F)
        for j in range(4):
            assert exp_coefficient(phi, j) == ThetaFraction(one, carlitz_D(F, j))
            assert log_coefficient(phi, j) == ThetaFraction(one, carlitz_ell(F, j))

    F2 = field_for_q(2)
    rank2 = DrinfeldModule.from_strings(F2, ["1", "1"])
    assert rank2.rank == 2 and not rank2.is_carlitz
    assert str(rank2) == "T+tau+tau^2"
    e2 = exp_coefficient(rank2, 2)
    # e_2 (theta^4 - theta) = e_1^2 + 1
    e1 = exp_coefficient(rank2, 1)
    assert e2 * (ThetaPoly.monomial(F2, 4) - ThetaPoly.theta(F2)) == e1.frobenius(1) + 1
    assert DrinfeldModule.trivial(F2).rank == 0
    with pytest.raises(ValueError):
        DrinfeldModule.from_strings(F2, ["1", "0"])
    print(f"✅ rank-2 e_2 = {e2}")


def test_exp_series():
    """Test 3: exp_C(1/theta) over F_2"""
    print("\n" + "="*70)
    print("TEST 3: EXP SERIES")
    print("="*70)

    F2 = field_for_q(2)
    phi = DrinfeldModule.carlitz(F2)
    deformation = Deformation.symbolic(F2, 0, with_z=False)
    s = GradedSeries.monomial(deformation.ring, 1, prec=10)
    u = exp_series(phi, deformation, s)
    assert u.prec == 10
    assert sorted(u.terms) == [1, 4, 5, 6, 7, 8, 9]
    back = log_series(phi, deformation, u)
    assert back.agrees_with(s)

    with_z = Deformation.symbolic(F2, 0, with_z=True)
    s_z = GradedSeries.monomial(with_z.ring, 1, prec=10)
    derivative = exp_derivative_series(phi, with_z, s_z)
    assert sorted(derivative.terms) == [4, 5, 6, 7, 8, 9]
    print(f"✅ exp(1/T) = {u}")


def test_certified_truncation():
    """Test 4: Operators stop at a certified twist index"""
    print("\n" + "="*70)
    print("TEST 4: CERTIFIED TRUNCATION")
    print("="*70)

    F3 = field_for_q(3)
    phi = DrinfeldModule.carlitz(F3)
    J = certified_truncation(phi, 2, "exp", 0, 12)
    assert J >= 1
    assert certified_truncation(phi, 2, "exp", 0, 30) >= J
    with pytest.raises(PrecisionExhausted):
        certified_truncation(phi, 0, "exp", 1, 10, max_terms=0)

    deformation = Deformation.symbolic(F3, 1, with_z=True)
    lam_exp = exp_series(phi, deformation, GradedSeries.lam(deformation.ring, 1, prec=5))
    assert lam_exp.grade == 1 and lam_exp.prec == 5
    assert lam_exp.coefficient(0) == deformation.ring.one
    print(f"✅ J = {J} for n = 2 at precision 12")


def test_special_functions():
    """Test 5: omega(t) and the Carlitz period"""
    print("\n" + "="*70)
    print("TEST 5: OMEGA AND PI~")
    print("="*70)

    F3 = field_for_q(3)
    ring = PolyRing(F3, ("t1",))
    t = ring.var("t1")
    omega = omega0(ring, "t1", 6)
    assert omega.grade == 1 and omega.prec == 6
    assert omega.coefficient(0) == ring.one
    assert omega.coefficient(1) == t
    assert omega.coefficient(2) == t ** 2
    assert omega.coefficient(3) == t ** 3 + t

    pi = pitilde0(ring, 6)
    assert pi.grade == 1
    assert pi.valuation == -1
    assert pi.coefficient(-1) == ring.one
    with pytest.raises(ValueError):
        pitilde0(ring, 0)
    print(f"✅ omega(t) = {omega}")


def test_alpha_map():
    """Test 6: The divided difference alpha, exp^(1) and the correction operator"""
    print("\n" + "="*70)
    print("TEST 6: ALPHA MAP")
    print("="*70)

    F2 = field_for_q(2)
    phi = DrinfeldModule.carlitz(F2)
    deformation = Deformation.symbolic(F2, 1, with_z=True)
    ring = deformation.ring
    s = GradedSeries.monomial(ring, 2, ring.var("t1"), prec=12)

    assert alpha_map(phi, deformation, GradedSeries.zero(ring, 12)).is_zero

    a = alpha_map(phi, deformation, s)
    at_one = a.map_coefficients(lambda c: c.evaluate("z", 1))
    assert at_one.agrees_with(exp_derivative_series(phi, deformation, s))

    lhs = alpha_map(phi, deformation, s.shift(1)) - phi_theta_series(phi, deformation, a)
    rhs = correction_series(phi, deformation, exp_series(phi, deformation.at_z_one(), s))
    assert lhs.agrees_with(rhs)

    with pytest.raises(ContextMismatch):
        alpha_map(phi, Deformation.symbolic(F2, 1, with_z=False), s)
    print(f"✅ alpha(s) = {a}")


def main():
    """Run all tests"""
    print("\n" + "="*70)
    print("DRINFELD MODULE TEST SUITE")
    print("="*70)

    tests = [
        test_carlitz_sequences,
        test_exp_log_coefficients,
        test_exp_series,
        test_certified_truncation,
        test_special_functions,
        test_alpha_map,
    ]
    results = []
    for test in tests:
        try:
            test()
            results.append(True)
        except AssertionError as e:
            print(f"❌ {test.__name__}: {e}")
            results.append(False)

    print(f"\nTotal: {sum(results)}/{len(results)} tests passed")


if __name__ == "__main__":
    main()
