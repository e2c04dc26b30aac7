"""
Test Script for Bernoulli-Carlitz and Bernoulli-Goss numbers and the Fitting generator B of the class module
"""

from unittest.mock import patch

import pytest

from carlitz_algebra import PolyRing, ThetaFraction, ThetaPoly, field_for_q
from carlitz_classmod import (
    bernoulli_carlitz,
    bernoulli_goss,
    carlitz_factorial,
    check_monic,
    compute_B,
    fitting_at_char,
)
from carlitz_errors import ArityMismatch, GradeMismatch, NotMonic
from carlitz_lseries import DirichletCharacter
from carlitz_module import carlitz_D
from carlitz_series import theta_leading


def test_carlitz_factorial():
    """Test 1: Pi(m) from the base-q digits of m"""
    print("\n" + "="*70)
    print("TEST 1: CARLITZ FACTORIAL")
    print("="*70)

    F3 = field_for_q(3)
    assert carlitz_factorial(F3, 0) == ThetaPoly.one(F3)
    assert carlitz_factorial(F3, 2) == ThetaPoly.one(F3)
    assert carlitz_factorial(F3, 3) == carlitz_D(F3, 1)
    assert carlitz_factorial(F3, 4) == carlitz_D(F3, 1)
    assert carlitz_factorial(F3, 10) == carlitz_D(F3, 2) * carlitz_D(F3, 0)
    with pytest.raises(ValueError):
        carlitz_factorial(F3, -1)
    print("✅ Pi(3) = D_1")


def test_bernoulli_carlitz():
    """Test 2: Bernoulli-Carlitz numbers"""
    print("\n" + "="*70)
    print("TEST 2: BERNOULLI-CARLITZ")
    print("="*70)

    F3 = field_for_q(3)
    assert bernoulli_carlitz(F3, 0).value == 1
    assert bernoulli_carlitz(F3, 1).value.is_zero
    assert bernoulli_carlitz(F3, 3).value.is_zero

    bc = bernoulli_carlitz(F3, 10)
    expected = ThetaFraction(ThetaPoly.parse("2*T^6+2*T^4+2*T^2+1", F3), ThetaPoly.parse("T^3+2*T", F3))
    assert bc.value == expected
    assert bc.kind == "carlitz" and bc.field == F3
    P = ThetaPoly.parse("T^3+2*T+2", F3)
    assert bc.reduced_mod(P).is_zero
    print(f"✅ BC(10) = {bc}")


def test_bernoulli_goss():
    """Test 3: Bernoulli-Goss numbers"""
    print("\n" + "="*70)
    print("TEST 3: BERNOULLI-GOSS")
    print("="*70)

    F3 = field_for_q(3)
    assert bernoulli_goss(F3, 0).value == ThetaPoly.one(F3)
    assert bernoulli_goss(F3, 2).value.is_zero

    beta = bernoulli_goss(F3, 16)
    assert beta.value == ThetaPoly.parse("T^30+2*T^28+2*T^4+T^2+1", F3)
    assert beta.reduced_mod(ThetaPoly.parse("T^3+2*T+2", F3)) == ThetaPoly.one(F3)
    assert str(beta) == "T^30+2*T^28+2*T^4+T^2+1"
    with pytest.raises(ValueError):
        bernoulli_goss(F3, -2)
    print(f"✅ beta(16) = {beta}")


def test_trivial_class_modules():
    """Test 4: B = 1 outside n = 1 mod q-1, n > 2q-2"""
    print("\n" + "="*70)
    print("TEST 4: TRIVIAL CLASS MODULES")
    print("="*70)

    F2, F3 = field_for_q(2), field_for_q(3)
    B = compute_B(F2, 2)
    assert B == 1
    assert B.ring.names == ("T", "t1", "t2")
    assert compute_B(F3, 3) == 1
    assert compute_B(F3, 2) == 1
    with pytest.raises(GradeMismatch):
        compute_B(F3, 2, strict=True)
    with pytest.raises(ValueError):
        compute_B(F3, 0)
    print("✅ B = 1")


def test_fitting_at_character():
    """Test 5: Evaluating B at a character"""
    print("\n" + "="*70)
    print("TEST 5: FITTING GENERATOR AT A CHARACTER")
    print("="*70)

    F3 = field_for_q(3)
    chi = DirichletCharacter.parse("P=T^2+1;exponent=4", F3)
    B = compute_B(F3, 2)
    value = fitting_at_char(B, chi)
    assert value.ring.names == ("T",)
    assert value.field == chi.ext
    assert value.is_constant and value.constant_value() == 1

    with pytest.raises(ArityMismatch):
        fitting_at_char(compute_B(F3, 3), chi)

    ring = PolyRing(F3, ("T", "t1", "t2"))
    symbolic = ring.parse("T+t1*t2")
    at = fitting_at_char(symbolic, chi)
    eta1, eta2 = chi.etas
    assert at == at.ring.parse("T") + at.ring.const(chi.ext.mul(eta1, eta2))
    print(f"✅ ev_chi(T + t1*t2) = {at}")


def test_nontrivial_fitting_generator():
    """Test 6: B(t1..t5) over F_2 is monic, symmetric and stable"""
    print("\n" + "="*70)
    print("TEST 6: NONTRIVIAL FITTING GENERATOR")
    print("="*70)

    F2 = field_for_q(2)
    B = compute_B(F2, 5)
    deg, lead = theta_leading(B)
    assert lead == 1
    assert deg >= 3
    assert compute_B(F2, 5, prec=13) == B
    for i in range(2, 6):
        assert B.permute({"t1": f"t{i}", f"t{i}": "t1"}) == B
    print(f"✅ deg_theta B = {deg}")


def test_fitting_generator_must_be_monic():
    """Test 7: A generator that is not monic in theta raises instead of being rescaled"""
    print("\n" + "="*70)
    print("TEST 7: MONIC FITTING GENERATOR")
    print("="*70)

    F3 = field_for_q(3)
    ring = PolyRing(F3, ("T", "t1", "t2"))
    assert check_monic(ring.parse("T^2+t1*t2")) == ring.parse("T^2+t1*t2")
    with pytest.raises(NotMonic) as err:
        check_monic(ring.parse("2*T^2+t1"))
    assert err.value.context["leading"] == "2"
    with pytest.raises(NotMonic):
        check_monic(ring.parse("t1*T+1"))
    with pytest.raises(NotMonic):
        check_monic(ring.zero)

    F2 = field_for_q(2)
    skewed = PolyRing(F2, ("T", "t1", "t2", "t3", "t4", "t5")).parse("t1*T^3+T+1")
    with patch("carlitz_classmod.extract_polynomial", return_value=skewed):
        with pytest.raises(NotMonic):
            compute_B(F2, 5)
    print("✅ non-monic generators fail loudly")


def main():
    """Run all tests"""
    print("\n" + "="*70)
    print("CLASS MODULE TEST SUITE")
    print("="*70)

    tests = [
        test_carlitz_factorial,
        test_bernoulli_carlitz,
        test_bernoulli_goss,
        test_trivial_class_modules,
        test_fitting_at_character,
        test_nontrivial_fitting_generator,
        test_fitting_generator_must_be_monic,
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
