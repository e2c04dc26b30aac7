"""
Test Script for P-adic values: contexts, Teichmueller lifts, the P-adic Carlitz logarithm and both routes to
L_P(1, chi)
"""

from fractions import Fraction

import pytest

from carlitz_algebra import ThetaPoly, extension_of, field_for_q
from carlitz_errors import ContextMismatch, NonPositiveValuation
from carlitz_lseries import CyclotomicRing, DirichletCharacter, all_characters
from carlitz_padic import (
    PadicContext,
    certified_block_end,
    ell_valuation_audit,
    log_carlitz_padic,
    lp_direct,
    lp_direct_sum,
    lp_via_units,
    routes_agree,
)


def _context(M: int) -> PadicContext:
    F2 = field_for_q(2)
    return PadicContext(ThetaPoly.parse("T^2+T+1", F2), M)


def test_valuations():
    """Test 1: v_P on R_M"""
    print("\n" + "="*70)
    print("TEST 1: P-ADIC VALUATIONS")
    print("="*70)

    ctx = _context(3)
    assert ctx.D == 3
    assert ctx.lam.valuation == Fraction(1, 3)
    assert (ctx.lam ** 3).valuation == 1
    assert ctx.scalar(ctx.P).valuation == 1
    assert ctx.one.valuation == 0
    assert ctx.zero.is_zero
    assert ctx.scalar(ctx.PM).is_zero

    ext = extension_of(ctx.field, 2)
    assert ctx.embed(CyclotomicRing(ctx.P, ext).x).agrees_with(ctx.lam)
    with pytest.raises(ContextMismatch):
        ctx.lam + _context(2).lam
    print("✅ v(lambda_P) = 1/3, v(P) = 1")


def test_teichmuller():
    """Test 2: Teichmueller representatives are fixed by Frobenius^d"""
    print("\n" + "="*70)
    print("TEST 2: TEICHMUELLER LIFTS")
    print("="*70)

    ctx = _context(4)
    for r in ctx.residues():
        t = ctx.teichmuller(r)
        assert t.frobenius(ctx.d) % ctx.PM == t
        assert t % ctx.P == r % ctx.P
        assert ctx.teichmuller_lift(r).agrees_with(ctx.scalar(t))
    zeta = ctx.zeta0
    assert ctx.iota(zeta) == ctx.teichmuller(ThetaPoly.theta(ctx.field))
    print(f"✅ {len(ctx.residues())} residues lifted")


def test_padic_logarithm():
    """Test 3: log_C(P) = P + P^2/l_1 + ..."""
    print("\n" + "="*70)
    print("TEST 3: P-ADIC LOGARITHM")
    print("="*70)

    ctx = _context(4)
    y = ctx.scalar(ctx.P)
    log_y = log_carlitz_padic(y)
    assert log_y.prec == 3
    assert (log_y - y).valuation == 2
    with pytest.raises(NonPositiveValuation):
        log_carlitz_padic(ctx.one)

    for j, v, bound in ell_valuation_audit(ctx.P, 8):
        assert v == bound
    print(f"✅ log_C(P) = {log_y}")


def test_direct_route():
    """Test 4: Odd characters give L_P(1, chi) = 0 and a nonzero derivative"""
    print("\n" + "="*70)
    print("TEST 4: DIRECT L_P VALUES")
    print("="*70)

    ctx = _context(3)
    assert certified_block_end(ctx.P, 2) == 3
    for chi in all_characters(ctx.P):
        assert chi.is_odd
        summed = lp_direct_sum(chi, ctx)
        assert summed.value.is_zero
        assert summed.zero_run >= ctx.d + 2
        assert summed.blocks > summed.certified_end
        assert not lp_direct(chi, ctx, derivative=True).is_zero

    F3 = field_for_q(3)
    other = DirichletCharacter.from_exponent(ThetaPoly.parse("T^2+1", F3), 1)
    with pytest.raises(ContextMismatch):
        lp_direct_sum(other, PadicContext(ThetaPoly.parse("T^2+T+2", F3), 2))
    print("✅ 3 odd characters vanish")


def test_units_route():
    """Test 5: The unit route agrees with the direct sum"""
    print("\n" + "="*70)
    print("TEST 5: UNIT ROUTE")
    print("="*70)

    ctx = _context(3)
    chi = DirichletCharacter.from_exponent(ctx.P, 1)
    direct = lp_direct(chi, ctx, derivative=True)
    units = lp_via_units(chi, ctx)
    assert units.case == 3
    assert routes_agree(direct, units)
    print(f"✅ case {units.case}, valuation {units.valuation}")


def main():
    """Run all tests"""
    print("\n" + "="*70)
    print("P-ADIC TEST SUITE")
    print("="*70)

    tests = [
        test_valuations,
        test_teichmuller,
        test_padic_logarithm,
        test_direct_route,
        test_units_route,
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
