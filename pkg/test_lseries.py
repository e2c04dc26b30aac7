"""
Test Script for L-series, Euler products, Dirichlet characters and Gauss-Thakur sums
"""

import pytest

from carlitz_algebra import PolyRing, ThetaPoly, extension_of, field_for_q, monic_irreducibles, parse_poly
from carlitz_errors import ArityMismatch, ContextMismatch, NotARoot, NotIrreducible, ParseError
from carlitz_lseries import (
    CyclotomicRing,
    DirichletCharacter,
    all_characters,
    carlitz_polynomial,
    character_lseries,
    digit_sum,
    ev_char,
    euler_local,
    gauss_identities,
    gauss_orbit_sum,
    gauss_thakur,
    lseries_euler,
    lseries_infinity,
    power_sum,
    power_sum_bound,
    prime_roots,
)
from carlitz_module import DrinfeldModule


def test_power_sums():
    """Test 1: Digit sums and power sums"""
    print("\n" + "="*70)
    print("TEST 1: POWER SUMS")
    print("="*70)

    assert digit_sum(10, 3) == 2
    assert digit_sum(5, 2) == 2
    assert power_sum_bound(2, 3) == 1
    assert power_sum_bound(16, 3) == 2

    F3 = field_for_q(3)
    assert power_sum(F3, 0, 0) == ThetaPoly.one(F3)
    assert power_sum(F3, 1, 0).is_zero
    assert power_sum(F3, 0, 5) == ThetaPoly.one(F3)
    assert power_sum(F3, 1, 1).is_zero
    assert power_sum(F3, 1, 2) == ThetaPoly.const(F3, 2)
    assert power_sum(F3, 2, 2).is_zero
    print("✅ S_1(2) = 2, S_2(2) = 0")


def test_lseries_direct():
    """Test 2: L(z) over F_2 by block summation"""
    print("\n" + "="*70)
    print("TEST 2: DIRECT L-SERIES")
    print("="*70)

    F2 = field_for_q(2)
    L = lseries_infinity(F2, 0, 6)
    z = L.ring.var("z")
    assert L.prec == 6
    assert L.coefficient(0) == L.ring.one
    assert L.coefficient(1).is_zero
    for i in range(2, 6):
        assert L.coefficient(i) == z

    threaded = lseries_infinity(F2, 2, 6, threads=2)
    assert threaded == lseries_infinity(F2, 2, 6, threads=1)
    with pytest.raises(ValueError):
        lseries_infinity(F2, 0, 0)
    print(f"✅ L = {L}")


def test_euler_product():
    """Test 3: Euler product agrees with the direct sum"""
    print("\n" + "="*70)
    print("TEST 3: EULER PRODUCT")
    print("="*70)

    for q in (2, 3):
        F = field_for_q(q)
        euler = lseries_euler(DrinfeldModule.carlitz(F), 6)
        assert euler.agrees_with(lseries_infinity(F, 0, 6))

    F2 = field_for_q(2)
    phi = DrinfeldModule.carlitz(F2)
    P = ThetaPoly.parse("T^2+T+1", F2)
    g_closed, f_closed = euler_local(phi, P, "closed")
    g_matrix, _ = euler_local(phi, P, "matrix")
    assert g_closed == g_matrix
    assert f_closed == g_closed.ring.monomial({"z": 2})

    rank2 = DrinfeldModule.from_strings(F2, ["1", "1"])
    with pytest.raises(ContextMismatch):
        euler_local(rank2, P, "closed")
    with pytest.raises(NotIrreducible):
        euler_local(phi, ThetaPoly.parse("T^2+1", F2))
    print(f"✅ g_P(z) = {g_closed}")


def test_characters():
    """Test 4: Dirichlet characters of prime conductor"""
    print("\n" + "="*70)
    print("TEST 4: DIRICHLET CHARACTERS")
    print("="*70)

    F3 = field_for_q(3)
    P = ThetaPoly.parse("T^2+1", F3)
    assert len(all_characters(P)) == 8
    for N in range(1, 9):
        assert DirichletCharacter.from_exponent(P, N).exponent == N

    chi = DirichletCharacter.from_exponent(P, 4)
    assert chi.type == 2 and not chi.is_odd
    assert len(chi.etas) == 2
    assert chi.value(P) == 0
    assert chi.value(ThetaPoly.one(F3)) == 1
    assert DirichletCharacter.from_exponent(P, 1).is_odd
    assert DirichletCharacter.parse("P=T^2+1;exponent=4", F3) == chi
    assert DirichletCharacter.parse(chi.spec_string(), F3) == chi
    assert len(DirichletCharacter.from_exponent(P, 1).orbit()) == 2

    with pytest.raises(ParseError):
        DirichletCharacter.parse("T^2+1;exponent=4", F3)
    with pytest.raises(ParseError):
        DirichletCharacter.parse("P=T^2+1;exponent=9", F3)
    with pytest.raises(NotARoot):
        DirichletCharacter.parse("P=T^2+1;spec=(0,1)", F3)
    with pytest.raises(NotIrreducible):
        DirichletCharacter.from_exponent(ThetaPoly.parse("T^2+2", F3), 1)
    print(f"✅ {chi}")


def test_character_evaluation():
    """Test 5: ev_chi of the symbolic L-series is the character L-series"""
    print("\n" + "="*70)
    print("TEST 5: CHARACTER EVALUATION")
    print("="*70)

    F2 = field_for_q(2)
    P = ThetaPoly.parse("T^2+T+1", F2)
    chi = DirichletCharacter.from_exponent(P, 1)
    L = lseries_infinity(F2, 1, 6)
    assert ev_char(L, chi).agrees_with(character_lseries(chi, 6))

    chi3 = DirichletCharacter.from_exponent(P, 3)
    assert chi3.type == 2
    with pytest.raises(ArityMismatch):
        ev_char(L, chi3)
    print("✅ ev_chi(L) = L(chi)")


def test_gauss_thakur():
    """Test 6: Gauss-Thakur sums and their identities"""
    print("\n" + "="*70)
    print("TEST 6: GAUSS-THAKUR SUMS")
    print("="*70)

    F3 = field_for_q(3)
    theta = ThetaPoly.theta(F3)
    assert gauss_thakur(0, theta) == CyclotomicRing(theta).x

    F2 = field_for_q(2)
    P = ThetaPoly.parse("T^2+T+1", F2)
    ext = extension_of(F2, 2)
    ring = CyclotomicRing(P, ext)
    assert ring.carlitz_x(P).is_zero
    assert carlitz_polynomial(ThetaPoly.theta(F2)) == parse_poly("T*x+x^2", PolyRing(F2, ("T", "x")))
    assert ring.phi_polynomial() == parse_poly("x^3+T^2*x+T*x+x+T^2+T+1", PolyRing(F2, ("T", "x")))

    for zeta in prime_roots(P):
        assert all(gauss_identities(zeta, P, ring).values())
        assert gauss_orbit_sum(zeta, P, ring) == ring.x
        g = gauss_thakur(zeta, P, ring)
        b = ThetaPoly.theta(F2)
        assert g.galois(b) == g.scale(b.embed(ext).evaluate(zeta))

    Q = ThetaPoly.parse("T^2+1", F3)
    for zeta in prime_roots(Q):
        assert all(gauss_identities(zeta, Q).values())
    with pytest.raises(NotARoot):
        gauss_thakur(0, P, ring)
    print("✅ eigenvalue, tau^d, orbit sum and orbit product identities hold")


def test_euler_local_routes():
    """Test 7: Euler factors computed in A/P match the Fitting-generator route"""
    print("\n" + "="*70)
    print("TEST 7: EULER FACTOR ROUTES")
    print("="*70)

    F2, F3 = field_for_q(2), field_for_q(3)
    cases = [
        (DrinfeldModule.from_strings(F2, ["1", "1"]), 5),
        (DrinfeldModule.from_strings(F3, ["T+1", "2"]), 3),
        (DrinfeldModule.from_strings(F2, ["1", "T", "1"]), 3),
    ]
    for phi, max_degree in cases:
        for d in range(1, max_degree + 1):
            for P in monic_irreducibles(phi.field, d):
                g_residue, f_residue = euler_local(phi, P, "residue")
                g_matrix, _ = euler_local(phi, P, "matrix")
                assert g_residue == g_matrix, (phi.alphas, str(P))
                assert f_residue.degree_in("z") == phi.rank * d
                assert f_residue.degree_in("T") < d

    # q = 2, d = 1: A/P = F_2 has one nonzero d-th power, so the matrix route takes over
    rank2 = DrinfeldModule.from_strings(F2, ["1", "1"])
    P = ThetaPoly.parse("T", F2)
    assert euler_local(rank2, P)[0] == euler_local(rank2, P, "matrix")[0]
    print("✅ residue and matrix routes agree up to degree 5")


def test_gauss_sign_convention():
    """Test 8: g(rho_0) for P = theta over F_3 is +lambda_P"""
    print("\n" + "="*70)
    print("TEST 8: GAUSS-THAKUR SIGN")
    print("="*70)

    F3 = field_for_q(3)
    theta = ThetaPoly.theta(F3)
    ring = CyclotomicRing(theta)
    g = gauss_thakur(0, theta)
    assert g == ring.x
    assert g != -ring.x
    # lambda_P^2 = -theta, so sigma(g) = g^3 = -theta * g
    assert g * g == ring.const(-theta)
    assert g ** 3 == g.scale(-theta)
    assert all(gauss_identities(0, theta).values())
    print(f"✅ g = {g}")


def main():
    """Run all tests"""
    print("\n" + "="*70)
    print("L-SERIES TEST SUITE")
    print("="*70)

    tests = [
        test_power_sums,
        test_lseries_direct,
        test_euler_product,
        test_characters,
        test_character_evaluation,
        test_gauss_thakur,
        test_euler_local_routes,
        test_gauss_sign_convention,
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
