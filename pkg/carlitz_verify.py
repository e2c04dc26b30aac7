#!/usr/bin/env python3
"""
Carlitz Toolkit - Verification Suites
Desk-scale acceptance checks of the published values and theorems, plus seeded randomized property checks
"""

import logging
import random
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from carlitz_algebra import (
    PolyRing,
    ThetaFraction,
    ThetaPoly,
    extension_of,
    field_for_q,
    fitting_generator,
    monic_irreducibles,
)
from carlitz_config import get_settings
from carlitz_classmod import bernoulli_carlitz, bernoulli_goss, carlitz_factorial, compute_B
from carlitz_errors import CarlitzError
from carlitz_lseries import (
    CyclotomicRing,
    DirichletCharacter,
    all_characters,
    gauss_identities,
    gauss_thakur,
    lseries_euler,
    lseries_infinity,
    power_sum,
    power_sum_bound,
    prime_roots,
)
from carlitz_module import DrinfeldModule, carlitz_D
from carlitz_padic import PadicContext, lp_direct, lp_direct_sum, lp_via_units, routes_agree
from carlitz_series import GradedSeries, series_inv, series_mul, theta_leading
from carlitz_units import compute_uC, log_algebraicity, stark_generator, uC_profile, vanishes_at_one

logger = logging.getLogger(__name__)

# Vanishing tail coefficients the rank-2 Stark unit must witness; the Euler product then runs over primes of
# degree <= 20 over F_2
STARK_WITNESS = 10

# (q, z_max): z-blocks through deg a <= 8 for both fields
LOG_ALG_SCHEDULE = ((2, 8), (3, 8))


class CheckFailed(Exception):
    pass


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise CheckFailed(message)


@dataclass
class CheckResult:
    check_id: str
    name: str
    passed: bool
    detail: str


Check = Tuple[str, str, Callable[..., str]]

REFERENCE_CHECKS: List[Check] = []
PROPERTY_CHECKS: List[Check] = []


def reference_check(check_id: str, name: str):
    def register(fn):
        REFERENCE_CHECKS.append((check_id, name, fn))
        return fn
    return register


def property_check(check_id: str, name: str):
    def register(fn):
        PROPERTY_CHECKS.append((check_id, name, fn))
        return fn
    return register


def _is_one(value) -> bool:
    return value.is_constant and value.constant_value() == 1


# ==================== PUBLISHED VALUES ====================


@reference_check("1", "Bernoulli-Carlitz BC(10), q=3")
def check_bc10() -> str:
    F = field_for_q(3)
    P = ThetaPoly.parse("T^3+2*T+2", F)
    bc = bernoulli_carlitz(F, 10)
    expected = ThetaFraction(ThetaPoly.parse("2*T^6+2*T^4+2*T^2+1", F), ThetaPoly.parse("T^3+2*T", F))
    _expect(bc.value == expected, f"BC(10) = {bc.value}, expected {expected}")
    _expect(bc.reduced_mod(P).is_zero, f"BC(10) mod P = {bc.reduced_mod(P)}")
    return f"BC(10) = {bc.value}, 0 mod P"


@reference_check("2", "Bernoulli-Goss beta(16), q=3")
def check_beta16() -> str:
    F = field_for_q(3)
    P = ThetaPoly.parse("T^3+2*T+2", F)
    beta = bernoulli_goss(F, 16)
    expected = ThetaPoly.parse("T^30+2*T^28+2*T^4+T^2+1", F)
    _expect(beta.value == expected, f"beta(16) = {beta.value}")
    _expect(beta.reduced_mod(P) == ThetaPoly.one(F), f"beta(16) mod P = {beta.reduced_mod(P)}")
    return f"beta(16) = {beta.value}, 1 mod P"


@reference_check("3", "L_P'(1, chi_P^17) = 1 mod P, q=3, P=T^3-T-1")
def check_padic_congruence() -> str:
    F = field_for_q(3)
    P = ThetaPoly.parse("T^3+2*T+2", F)
    one = ThetaPoly.one(F)
    chi = DirichletCharacter.from_exponent(P, 17)
    ctx = PadicContext(P, 2)
    direct = lp_direct(chi, ctx, derivative=True)
    _expect(direct.scalar_value() % P == one, f"direct route gives {direct.scalar_value() % P} mod P")
    units = lp_via_units(chi, ctx)
    _expect(units.value is not None, "units route: g(chi) does not divide the Galois sum at M=2")
    _expect(units.value.scalar_value() % P == one, f"units route gives {units.value.scalar_value() % P} mod P")
    return f"both routes = 1 mod P (units case {units.case})"


# ==================== UNITS ====================


@reference_check("4", "u_C = 1 for n <= q-1, q in {2,3,5}")
def check_unit_triviality() -> str:
    count = 0
    for q in (2, 3, 5):
        F = field_for_q(q)
        for n in range(q):
            u = compute_uC(F, n, prec=30)
            _expect(_is_one(u), f"q={q} n={n}: u_C = {u}")
            count += 1
    return f"{count} cases exactly 1"


_PROFILE_GRID = [(2, n) for n in range(2, 7)] + [(3, n) for n in range(3, 8)]
_profiles: Dict[Tuple[int, int], object] = {}


def _profile(q: int, n: int):
    if (q, n) not in _profiles:
        _profiles[(q, n)] = uC_profile(compute_uC(field_for_q(q), n))
    return _profiles[(q, n)]


@reference_check("5", "u_C degree and leading coefficient closed forms")
def check_unit_profiles() -> str:
    for q, n in _PROFILE_GRID:
        profile = _profile(q, n)
        _expect(profile.matches_closed_form(q, n),
                f"q={q} n={n}: deg {profile.deg_theta}, leading {profile.leading}")
    return f"{len(_PROFILE_GRID)} profiles match"


@reference_check("6", "u_C(t; 1) = 0 iff n >= q and n = 1 mod q-1")
def check_vanishing_dichotomy() -> str:
    zeros = 0
    for q, n in _PROFILE_GRID:
        vanishes = _profile(q, n).at_one.is_zero
        _expect(vanishes == vanishes_at_one(q, n), f"q={q} n={n}: u_C(1) vanishing is {vanishes}")
        zeros += vanishes
    return f"{zeros} vanishing cases, {len(_PROFILE_GRID) - zeros} non-vanishing"


# ==================== P-ADIC L-VALUES ====================

_PADIC_PRIMES = [(2, "T^2+T+1"), (3, "T^2+1")]
_PADIC_M = 6


def _padic_cases():
    for q, text in _PADIC_PRIMES:
        F = field_for_q(q)
        P = ThetaPoly.parse(text, F)
        ctx = PadicContext(P, _PADIC_M)
        for chi in all_characters(P):
            yield ctx, chi


@reference_check("7", "L_P(1, chi) vanishes mod P^6 iff chi is odd")
def check_padic_vanishing() -> str:
    odd = even = 0
    for ctx, chi in _padic_cases():
        value = lp_direct_sum(chi, ctx)
        if chi.is_odd:
            _expect(value.value.is_zero, f"{chi}: L_P(1) = {value.value} for an odd character")
            need = ctx.d + get_settings().stabilization_extra
            _expect(value.zero_run >= need, f"{chi}: only {value.zero_run} vanishing blocks")
            derivative = lp_direct(chi, ctx, derivative=True)
            _expect(not derivative.is_zero, f"{chi}: L_P'(1) vanishes")
            odd += 1
        else:
            _expect(not value.value.is_zero, f"{chi}: L_P(1) vanishes for an even character")
            even += 1
    return f"{odd} odd, {even} even characters"


@reference_check("9", "direct and unit routes agree")
def check_route_agreement() -> str:
    count = 0
    for ctx, chi in _padic_cases():
        direct = lp_direct(chi, ctx, derivative=chi.is_odd)
        units = lp_via_units(chi, ctx)
        _expect(routes_agree(direct, units), f"{chi}: routes differ (case {units.case})")
        count += 1
    return f"{count} characters agree"


# ==================== GAUSS-THAKUR SUMS ====================


@reference_check("8", "Gauss-Thakur identities")
def check_gauss_identities() -> str:
    count = 0
    for q, d in ((2, 2), (2, 3), (3, 2)):
        F = field_for_q(q)
        P = monic_irreducibles(F, d)[0]
        ring = CyclotomicRing(P, extension_of(F, P.degree))
        for zeta in prime_roots(P):
            failed = [name for name, ok in gauss_identities(zeta, P, ring).items() if not ok]
            _expect(not failed, f"{P}: {', '.join(failed)} fail at zeta={ring.field.format(zeta)}")
            count += 1
    return f"{count} roots checked"


# ==================== LOG-ALGEBRAICITY ====================


@reference_check("10", "log-algebraic series are integral")
def check_log_algebraicity() -> str:
    witnesses = []
    for q, z_max in LOG_ALG_SCHEDULE:
        F = field_for_q(q)
        X = PolyRing(F, ("T", "X")).var("X")
        for m in sorted({1, q - 1, q}):
            series = log_algebraicity(F, m, z_max)
            if m == 1:
                _expect(series.coefficients[0] == X, f"q={q}: f_0 = {series.coefficients[0]}")
                for k in range(1, min(6, z_max) + 1):
                    _expect(series.coefficients[k].is_zero, f"q={q}: f_{k} = {series.coefficients[k]}")
            witnesses.append(f"q={q} m={m}: {series.trailing_zero_witness}")
    return "trailing zeros " + ", ".join(witnesses)


# ==================== EULER PRODUCTS & STARK UNITS ====================


@reference_check("11", "Euler product = direct L; rank-2 Stark unit in A[z]")
def check_euler_and_stark() -> str:
    for q in (2, 3):
        F = field_for_q(q)
        euler = lseries_euler(DrinfeldModule.carlitz(F), 12, with_z=True)
        direct = lseries_infinity(F, 0, 12, with_z=True)
        _expect(euler.agrees_with(direct), f"q={q}: Euler product and direct sum differ")
    F = field_for_q(2)
    phi = DrinfeldModule.from_strings(F, ["1", "1"])
    stark = stark_generator(phi, guard=STARK_WITNESS)
    _expect(stark.tail_zero_witness >= STARK_WITNESS, f"only {stark.tail_zero_witness} tail zeros witnessed")
    return f"u_phi = {stark.u} with {stark.tail_zero_witness} tail zeros"


# ==================== CLASS MODULES ====================


@reference_check("12", "B(t1..t5), q=2: monic, symmetric, stable, deg >= 3")
def check_b_properties() -> str:
    F = field_for_q(2)
    B = compute_B(F, 5)
    wider = compute_B(F, 5, prec=get_settings().guard + 11)
    deg, lead = theta_leading(B)
    _expect(_is_one(lead), f"leading coefficient {lead}")
    _expect(deg >= 3, f"deg_theta B = {deg}")
    _expect(B == wider, "B changes with the precision")
    for i in range(2, 6):
        _expect(B.permute({"t1": f"t{i}", f"t{i}": "t1"}) == B, f"B not symmetric in t1, t{i}")
    return f"deg_theta B = {deg}"


# ==================== RANDOMIZED PROPERTIES ====================


def _random_poly(rng: random.Random, F, degree: int, monic: bool = False) -> ThetaPoly:
    coeffs = [rng.randrange(F.order) for _ in range(degree)]
    coeffs.append(1 if monic else rng.randrange(1, F.order))
    return ThetaPoly(F, coeffs)


@property_check("P1", "Fitting generators multiply across block-triangular filtrations")
def prop_fitting_multiplicative(rng: random.Random) -> str:
    for _ in range(10):
        F = field_for_q(rng.choice((2, 3, 4, 5)))
        a, b = rng.randint(1, 3), rng.randint(1, 3)
        B1 = [[rng.randrange(F.order) for _ in range(a)] for _ in range(a)]
        B2 = [[rng.randrange(F.order) for _ in range(b)] for _ in range(b)]
        top = [[rng.randrange(F.order) for _ in range(b)] for _ in range(a)]
        full = [B1[i] + top[i] for i in range(a)] + [[0] * a + B2[j] for j in range(b)]
        f = fitting_generator(full, F)
        _expect(f.is_monic and f.degree == a + b, f"{f} is not monic of degree {a + b}")
        _expect(f == fitting_generator(B1, F) * fitting_generator(B2, F), f"multiplicativity fails for {full}")
    return "10 random filtrations"


@property_check("P2", "series times its inverse is one")
def prop_series_inverse(rng: random.Random) -> str:
    for _ in range(10):
        F = field_for_q(rng.choice((2, 3, 5)))
        ring = PolyRing(F, ("z",))
        terms = {0: ring.const(rng.randrange(1, F.order))}
        for i in range(1, 8):
            terms[i] = ring.monomial({"z": rng.randint(0, 2)}, rng.randrange(F.order))
        a = GradedSeries(ring, terms, prec=8)
        product = series_mul(a, series_inv(a))
        _expect(product.agrees_with(GradedSeries.one(ring, 8)), f"a * a^-1 = {product}")
    return "10 random units"


@property_check("P3", "characters are multiplicative and periodic mod P")
def prop_character_multiplicative(rng: random.Random) -> str:
    for _ in range(5):
        F = field_for_q(rng.choice((2, 3)))
        P = rng.choice(monic_irreducibles(F, 2))
        chi = DirichletCharacter.from_exponent(P, rng.randrange(1, F.q ** 2))
        ext = chi.ext
        a, b = _random_poly(rng, F, rng.randint(0, 4)), _random_poly(rng, F, rng.randint(0, 4))
        _expect(chi.value(a * b) == ext.mul(chi.value(a), chi.value(b)), f"{chi}: chi(ab) != chi(a)chi(b)")
        _expect(chi.value(a + P * b) == chi.value(a), f"{chi}: not periodic mod P")
    return "5 random characters"


@property_check("P4", "e_C(X) * sum BC(m)/Pi(m) X^m = X")
def prop_bernoulli_identity(rng: random.Random) -> str:
    q = rng.choice((2, 3))
    F = field_for_q(q)
    top = rng.randint(q + 1, 14)
    g = [bernoulli_carlitz(F, m).value / carlitz_factorial(F, m) for m in range(top + 1)]
    for k in range(2, top + 1):
        acc = ThetaFraction(ThetaPoly.zero(F))
        j = 0
        while q ** j <= k:
            acc = acc + g[k - q ** j] / carlitz_D(F, j)
            j += 1
        _expect(acc.is_zero, f"q={q}: X^{k} coefficient is {acc}")
    return f"q={q} through X^{top}"


@property_check("P5", "power sums vanish past the digit-sum bound")
def prop_power_sum_vanishing(rng: random.Random) -> str:
    for _ in range(5):
        q = rng.choice((2, 3))
        F = field_for_q(q)
        m = rng.randint(1, 40)
        bound = power_sum_bound(m, q)
        for degree in (bound + 1, bound + 2):
            _expect(power_sum(F, degree, m).is_zero, f"q={q} m={m}: S_{degree} nonzero")
        goss = bernoulli_goss(F, m)
        _expect(goss.kind == "goss", "wrong kind")
    return "5 random exponents"


@property_check("P6", "Gauss-Thakur sums are Galois eigenvectors")
def prop_gauss_galois(rng: random.Random) -> str:
    for _ in range(3):
        F = field_for_q(rng.choice((2, 3)))
        P = rng.choice(monic_irreducibles(F, 2))
        zeta = rng.choice(prime_roots(P))
        ring = CyclotomicRing(P, extension_of(F, P.degree))
        ext = ring.field
        b = _random_poly(rng, F, rng.randint(0, 3), monic=True)
        if (b % P).is_zero:
            continue
        g = gauss_thakur(zeta, P, ring)
        rho = b.embed(ext).evaluate(zeta)
        _expect(g.galois(b) == g.scale(rho), f"{P}: mu_b(g) != rho(b) g for b={b}")
    return "3 random Galois elements"


@property_check("P7", "reduction mod P is a ring map on fractions")
def prop_fraction_reduction(rng: random.Random) -> str:
    F = field_for_q(rng.choice((2, 3, 5)))
    P = rng.choice(monic_irreducibles(F, 3))
    for _ in range(10):
        dens = []
        while len(dens) < 2:
            den = _random_poly(rng, F, rng.randint(0, 3), monic=True)
            if not (den % P).is_zero:
                dens.append(den)
        f = ThetaFraction(_random_poly(rng, F, rng.randint(0, 4)), dens[0])
        g = ThetaFraction(_random_poly(rng, F, rng.randint(0, 4)), dens[1])
        _expect((f * g).reduce_mod(P) == (f.reduce_mod(P) * g.reduce_mod(P)) % P, f"product of {f}, {g}")
        _expect((f + g).reduce_mod(P) == (f.reduce_mod(P) + g.reduce_mod(P)) % P, f"sum of {f}, {g}")
    return "10 random pairs"


# ==================== RUNNER ====================

SUITES = {"paper": REFERENCE_CHECKS, "properties": PROPERTY_CHECKS}


def run_suite(suite: str, seed: int = 0, only: Optional[List[str]] = None) -> List[CheckResult]:
    """
    Run every check of a suite; failures and computational errors are recorded, never raised.

    Args:
        suite: "paper" or "properties"
        seed: seed of the property checks' random generator
        only: optional list of check ids to run

    Returns:
        One CheckResult per check, in registration order
    """
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    results = []
    for check_id, name, fn in SUITES[suite]:
        if only and check_id not in only:
            continue
        start = time.perf_counter()
        try:
            detail = fn(random.Random(f"{seed}:{check_id}")) if suite == "properties" else fn()
            passed = True
        except (CheckFailed, CarlitzError) as e:
            detail, passed = str(e), False
        logger.info("check %s %s in %.1fs", check_id, "passed" if passed else "FAILED", time.perf_counter() - start)
        results.append(CheckResult(check_id=check_id, name=name, passed=passed, detail=detail))
    return results
