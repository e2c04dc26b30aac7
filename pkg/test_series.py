"""
Test Script for graded Laurent series in 1/theta: grade normalization, precision propagation and polynomial
extraction
"""

from fractions import Fraction

import pytest

from carlitz_algebra import PolyRing, ThetaFraction, ThetaPoly, field_for_q
from carlitz_errors import ContextMismatch, GradeMismatch, NotAUnit, NotPolynomialAtPrecision, PrecisionExhausted
from carlitz_module import Deformation, DrinfeldModule, apply_operator, build_operator, effective_valuation, exp_series
from carlitz_series import (
    GradedSeries,
    extract_polynomial,
    series_div,
    series_inv,
    series_mul,
    series_product,
    series_sum,
    theta_leading,
)


def test_grade_normalization():
    """Test 1: lambda^{q-1} = -theta"""
    print("\n" + "="*70)
    print("TEST 1: GRADE NORMALIZATION")
    print("="*70)

    F3 = field_for_q(3)
    ring = PolyRing(F3, ("z",))
    sq = GradedSeries.lam(ring, 2)
    assert sq.grade == 0
    assert sq.valuation == -1
    assert sq.coefficient(-1) == ring.const(2)

    lam = GradedSeries.lam(ring, 1)
    assert lam.grade == 1
    assert series_mul(lam, lam) == sq

    # every lambda^k for 0 <= k <= 2(q-1) against lambda^{k mod (q-1)} * (-theta)^{k div (q-1)}
    for q in (3, 5):
        F = field_for_q(q)
        ring_q = PolyRing(F, ("z",))
        single = GradedSeries.lam(ring_q, 1)
        running = GradedSeries.one(ring_q)
        for k in range(2 * (q - 1) + 1):
            e, g = divmod(k, q - 1)
            sign = ring_q.const(F.neg(1) if e % 2 else 1)
            expected = GradedSeries(ring_q, {-e: sign}, grade=g)
            power = GradedSeries.lam(ring_q, k)
            assert power == expected, (q, k)
            assert power.grade == g and power.valuation == -e
            assert running == expected, (q, k)
            running = series_mul(running, single)

    F2 = field_for_q(2)
    ring2 = PolyRing(F2, ())
    assert GradedSeries.lam(ring2, 1) == GradedSeries.monomial(ring2, -1)
    print(f"✅ lambda^2 = {sq}")


def test_geometric_inverse():
    """Test 2: (1 - z/theta)^{-1} = sum z^k theta^{-k}"""
    print("\n" + "="*70)
    print("TEST 2: GEOMETRIC INVERSE")
    print("="*70)

    F5 = field_for_q(5)
    ring = PolyRing(F5, ("z",))
    z = ring.var("z")
    a = GradedSeries(ring, {0: ring.one, 1: -z}, prec=6)
    inv = series_inv(a)
    assert inv.prec == 6
    for k in range(6):
        assert inv.coefficient(k) == z ** k
    with pytest.raises(PrecisionExhausted):
        inv.coefficient(6)
    assert series_mul(a, inv).agrees_with(GradedSeries.one(ring, 6))
    print(f"✅ {inv}")


def test_precision_propagation():
    """Test 3: Precision follows min(prec_a + v(b), prec_b + v(a))"""
    print("\n" + "="*70)
    print("TEST 3: PRECISION PROPAGATION")
    print("="*70)

    F3 = field_for_q(3)
    ring = PolyRing(F3, ())
    a = GradedSeries(ring, {0: ring.one, 1: ring.one}, prec=5)
    b = GradedSeries.monomial(ring, 2)
    assert series_mul(a, b).prec == 7
    assert series_mul(a, a).prec == 5
    assert series_mul(a, b, cap=4).prec == 4
    assert (a + b).prec == 5
    assert a.shift(1).prec == 4
    assert a.tau(1).prec == 15
    assert b.is_exact and not a.is_exact
    assert series_sum([a, b], ring).prec == 5
    assert series_sum([], ring).is_zero

    # inverse of a valuation -1 series gains two
    c = GradedSeries(ring, {-1: ring.one, 0: ring.one}, prec=5)
    assert series_inv(c).prec == 7
    assert series_div(a, c).valuation == 1
    print("✅ precisions 7, 5, 4, 5, 4, 15, 7")


def test_fraction_expansion():
    """Test 4: Fractions expand in 1/theta"""
    print("\n" + "="*70)
    print("TEST 4: FRACTION EXPANSION")
    print("="*70)

    F2 = field_for_q(2)
    ring = PolyRing(F2, ())
    # 1/(theta^2 + theta) = theta^{-2} (1 + theta^{-1} + theta^{-2} + ...)
    f = ThetaFraction(ThetaPoly.one(F2), ThetaPoly.parse("T^2+T", F2))
    s = GradedSeries.from_fraction(ring, f, 8)
    assert s.prec == 8
    assert sorted(s.terms) == [2, 3, 4, 5, 6, 7]
    product = series_product([s, GradedSeries.from_theta(ring, f.den)], ring, cap=8)
    assert product.agrees_with(GradedSeries.one(ring, 6))
    print(f"✅ {s}")


def test_errors():
    """Test 5: Mismatched rings, grades and non-units"""
    print("\n" + "="*70)
    print("TEST 5: SERIES ERRORS")
    print("="*70)

    F3 = field_for_q(3)
    r1, r2 = PolyRing(F3, ("z",)), PolyRing(F3, ("t1",))
    with pytest.raises(ContextMismatch):
        GradedSeries.one(r1) + GradedSeries.one(r2)
    with pytest.raises(GradeMismatch):
        GradedSeries.one(r1) + GradedSeries.lam(r1, 1)
    with pytest.raises(NotAUnit):
        series_inv(GradedSeries(r1, {0: r1.var("z")}, prec=4))
    with pytest.raises(NotAUnit):
        series_inv(GradedSeries.zero(r1, 4))
    with pytest.raises(PrecisionExhausted):
        series_inv(GradedSeries(r1, {0: r1.one, 1: r1.one}))
    print("✅ ContextMismatch, GradeMismatch, NotAUnit, PrecisionExhausted")


def test_extract_polynomial():
    """Test 6: Polynomial extraction needs a witnessed vanishing tail"""
    print("\n" + "="*70)
    print("TEST 6: POLYNOMIAL EXTRACTION")
    print("="*70)

    F3 = field_for_q(3)
    ring = PolyRing(F3, ("z",))
    z = ring.var("z")
    a = GradedSeries.from_theta(ring, ThetaPoly.parse("T^2+1", F3), prec=6, coeff=z)
    u = extract_polynomial(a, guard=5)
    assert u.ring.names == ("T", "z")
    assert str(u) == "T^2*z+z"
    deg, lead = theta_leading(u)
    assert deg == 2 and lead == u.ring.var("z")

    with pytest.raises(PrecisionExhausted):
        extract_polynomial(a, guard=6)
    with pytest.raises(PrecisionExhausted):
        extract_polynomial(GradedSeries.one(ring))

    tail = a + GradedSeries.monomial(ring, 3, prec=6)
    with pytest.raises(NotPolynomialAtPrecision) as info:
        extract_polynomial(tail, guard=2)
    assert info.value.context["exponent"] == 3

    with pytest.raises(GradeMismatch):
        extract_polynomial(GradedSeries.lam(ring, 1, prec=4))
    print(f"✅ extracted {u}")


def test_graded_twists():
    """Test 7: tau and twisted operators on lambda-graded series"""
    print("\n" + "="*70)
    print("TEST 7: GRADED TWISTS")
    print("="*70)

    for q in (3, 5):
        ring_q = PolyRing(field_for_q(q), ())
        lam = GradedSeries.lam(ring_q, 1)
        for j in (1, 2):
            assert lam.tau(j) == GradedSeries.lam(ring_q, q ** j)

    F3 = field_for_q(3)
    phi = DrinfeldModule.carlitz(F3)
    deformation = Deformation.symbolic(F3, 0, with_z=False)
    ring = deformation.ring
    s = GradedSeries(ring, {2: ring.one}, prec=10, grade=1)
    assert s.tau(1) == GradedSeries(ring, {5: ring.const(2)}, prec=29, grade=1)
    assert effective_valuation(s) == Fraction(3, 2)

    # lambda * theta^{-2} sits below valuation 2
    with pytest.raises(PrecisionExhausted):
        apply_operator(build_operator(phi, deformation, "exp", 2, 10), s)

    op = build_operator(phi, deformation, "exp", Fraction(3, 2), 10)
    out = apply_operator(op, s)
    assert out.grade == 1 and out.prec == 10
    # e_1 * tau(s) = -lambda * theta^{-8} (1 + theta^{-2} + ...)
    assert out.terms == {2: ring.one, 8: ring.const(2)}
    assert exp_series(phi, deformation, s) == out
    print(f"✅ exp(lambda/theta^2) = {out}")


def main():
    """Run all tests"""
    print("\n" + "="*70)
    print("SERIES TEST SUITE")
    print("="*70)

    tests = [
        test_grade_normalization,
        test_geometric_inverse,
        test_precision_propagation,
        test_fraction_expansion,
        test_errors,
        test_extract_polynomial,
        test_graded_twists,
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
