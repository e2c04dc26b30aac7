"""
Test Script for the unit polynomial u_C, its closed forms, orbit units, Stark generators and
log-algebraic series
"""

import pytest

from carlitz_algebra import PolyRing, ThetaPoly, field_for_q
from carlitz_lseries import DirichletCharacter, gauss_orbit_product
from carlitz_module import DrinfeldModule
from carlitz_units import (
    compute_uC,
    default_unit_precision,
    expected_degree,
    expected_leading,
    log_algebraicity,
    lseries_precision,
    orbit_unit,
    stark_generator,
    uC_profile,
    vanishes_at_one,
)


def test_closed_forms():
    """Test 1: Closed forms for deg_theta and the leading coefficient"""
    print("\n" + "="*70)
    print("TEST 1: CLOSED FORMS")
    print("="*70)

    assert expected_degree(2, 1) == 0
    assert expected_degree(2, 2) == 0
    assert expected_degree(2, 3) == 1
    assert expected_degree(3, 3) == 0
    assert expected_degree(3, 4) == 1

    ring = PolyRing(field_for_q(3), ("z",))
    z = ring.var("z")
    assert expected_leading(ring, 3, 2) == ring.one
    assert expected_leading(ring, 3, 3) == ring.one - z
    assert expected_leading(ring, 3, 4) == z

    assert vanishes_at_one(2, 2) and vanishes_at_one(3, 5)
    assert not vanishes_at_one(3, 4)
    assert not vanishes_at_one(3, 1)
    assert default_unit_precision(10) == 11
    print("✅ degrees 0, 0, 1, 0, 1")


def test_trivial_units():
    """Test 2: u_C = 1 for n < q"""
    print("\n" + "="*70)
    print("TEST 2: TRIVIAL UNITS")
    print("="*70)

    u = compute_uC(field_for_q(2), 1, prec=20)
    assert u == 1
    assert u.ring.names == ("T", "t1", "z")
    assert compute_uC(field_for_q(3), 2, prec=12) == 1

    F3 = field_for_q(3)
    chi = DirichletCharacter.parse("P=T^2+1;exponent=4", F3)
    special = compute_uC(F3, chi.type, prec=10, etas=chi.etas, ext=chi.ext)
    assert special == 1
    assert special.ring.names == ("T", "z")
    with pytest.raises(ValueError):
        compute_uC(F3, 1, prec=10, etas=chi.etas, ext=chi.ext)
    print("✅ u_C = 1")


def test_first_nontrivial_unit():
    """Test 3: u_C(t1, t2; z) over F_2"""
    print("\n" + "="*70)
    print("TEST 3: FIRST NONTRIVIAL UNIT")
    print("="*70)

    u = compute_uC(field_for_q(2), 2, prec=12)
    profile = uC_profile(u)
    assert profile.matches_closed_form(2, 2)
    assert profile.deg_theta == 0
    assert profile.at_one.is_zero
    assert lseries_precision(DrinfeldModule.carlitz(field_for_q(2)), 2, 12) >= 12
    print(f"✅ u_C = {u}")


def test_orbit_unit():
    """Test 4: Orbit units descend to A[lambda_P]"""
    print("\n" + "="*70)
    print("TEST 4: ORBIT UNITS")
    print("="*70)

    F3 = field_for_q(3)
    P = ThetaPoly.parse("T^2+1", F3)
    chi = DirichletCharacter.from_exponent(P, 4)
    unit = orbit_unit(chi, guard=4)
    assert unit.ring.field == F3
    assert unit == gauss_orbit_product(chi.zeta0, P).to_base()
    print(f"✅ u_[chi](1) = {unit}")


def test_stark_generator():
    """Test 5: The Carlitz Stark generator is 1"""
    print("\n" + "="*70)
    print("TEST 5: STARK GENERATOR")
    print("="*70)

    stark = stark_generator(DrinfeldModule.carlitz(field_for_q(2)), guard=4)
    assert stark.u == 1
    assert stark.prec == 5
    assert stark.tail_zero_witness == 4
    assert stark.attempts == [5]
    print(f"✅ u_phi = {stark.u}")


def test_log_algebraicity():
    """Test 6: Log-algebraic series for m = 1"""
    print("\n" + "="*70)
    print("TEST 6: LOG-ALGEBRAICITY")
    print("="*70)

    F2 = field_for_q(2)
    series = log_algebraicity(F2, 1, 4)
    X = PolyRing(F2, ("T", "X")).var("X")
    assert series.coefficients[0] == X
    assert all(f.is_zero for f in series.coefficients[1:])
    assert series.trailing_zero_witness == 4
    assert series.x_valuation(0) == 1
    assert series.x_valuation(1) is None

    with pytest.raises(ValueError):
        log_algebraicity(F2, 0, 4)
    print("✅ f_0 = X, f_1..f_4 = 0")


def main():
    """Run all tests"""
    print("\n" + "="*70)
    print("UNITS TEST SUITE")
    print("="*70)

    tests = [
        test_closed_forms,
        test_trivial_units,
        test_first_nontrivial_unit,
        test_orbit_unit,
        test_stark_generator,
        test_log_algebraicity,
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
