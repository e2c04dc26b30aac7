#!/usr/bin/env python3
"""
Carlitz Toolkit - Units
The unit polynomial u_C = exp(L) of the deformed Carlitz module, its profile, orbit units of characters,
Stark generators of general Drinfeld modules and log-algebraic series
"""

import logging
from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from sympy.ntheory.multinomial import multinomial_coefficients

from carlitz_algebra import FiniteField, Poly, PolyRing, ThetaPoly
from carlitz_config import get_settings
from carlitz_errors import (
    DescentFailure,
    IntegralityViolation,
    NotPolynomialAtPrecision,
    PrecisionExhausted,
)
from carlitz_lseries import (
    CyclotomicElement,
    CyclotomicRing,
    DirichletCharacter,
    carlitz_polynomial,
    gauss_thakur_char,
    lseries_euler,
    lseries_for,
    moment_transform,
)
from carlitz_module import (
    Deformation,
    DrinfeldModule,
    carlitz_ell,
    certified_truncation,
    exp_coefficient,
    exp_series,
)
from carlitz_series import extract_polynomial, theta_leading

logger = logging.getLogger(__name__)

# ==================== CLOSED FORMS ====================


def _split(q: int, n: int) -> Tuple[int, int]:
    """n - q = r + l(q-1) with 0 <= r <= q-2"""
    if q == 2:
        return 0, n - q
    ell, r = divmod(n - q, q - 1)
    return r, ell


def expected_degree(q: int, n: int) -> int:
    """deg_theta u_C for n >= 0"""
    if n < q:
        return 0
    r, ell = _split(q, n)
    if r == 0:
        return n * (q ** ell - 1) // (q - 1) - ell * q ** ell
    return n * (q ** (ell + 1) - 1) // (q - 1) - (ell + 1) * q ** (ell + 1)


def expected_leading(ring: PolyRing, q: int, n: int) -> Poly:
    """theta-leading coefficient of u_C as an element of ring (which holds z)"""
    if n < q:
        return ring.one
    F = ring.field
    r, ell = _split(q, n)
    z = ring.var("z")
    if r == 0:
        sign = F.neg(1) if ell % 2 else 1
        return (z ** ell * (ring.one - z)).scale(sign)
    sign = F.neg(1) if (n * (ell + 1)) % 2 else 1
    return (z ** (ell + 1)).scale(sign)


def expected_profile(ring: PolyRing, q: int, n: int) -> Tuple[int, Poly]:
    return expected_degree(q, n), expected_leading(ring, q, n)


def vanishes_at_one(q: int, n: int) -> bool:
    """u_C(t; 1) = 0 exactly in this case"""
    return n >= q and (n - 1) % (q - 1) == 0


# ==================== UNIT POLYNOMIAL ====================


def default_unit_precision(guard: Optional[int] = None) -> int:
    """Absolute precision witnessing `guard` vanishing tail coefficients"""
    guard = get_settings().guard if guard is None else guard
    return guard + 1


def lseries_precision(phi: DrinfeldModule, n: int, prec: int) -> int:
    """
    Precision of L needed so that exp(L) is known below prec.

    The j-th operator term has valuation v(e_j) - n(q^j-1)/(q-1) and sees tau^j(L) to precision q^j*N_L.
    """
    q = phi.field.q
    J = certified_truncation(phi, n, "exp", 0, prec)
    need = prec
    for j in range(1, J + 1):
        e = exp_coefficient(phi, j)
        if e.is_zero:
            continue
        v = int(e.valuation) - n * (q ** j - 1) // (q - 1)
        need = max(need, -(-(prec - v) // q ** j))
    return need


def compute_uC(field: FiniteField, n: int, prec: Optional[int] = None, guard: Optional[int] = None,
               etas: Optional[Sequence[int]] = None, ext: Optional[FiniteField] = None,
               with_z: bool = True, threads: Optional[int] = None) -> Poly:
    """
    u_C(t_1..t_n; z) = exp(L) as an exact polynomial.

    Args:
        field: F_q
        n: number of t-variables (or of specialized eta values)
        prec: absolute precision of the computation (default guard + 1)
        guard: least number of witnessed vanishing tail coefficients
        etas: optional specialization t_k -> eta_k in ext
        ext: coefficient field of the etas

    Returns:
        Poly over (T, t1..tn, z), or over (T, z) with F_{q^m} coefficients when specialized
    """
    guard = get_settings().guard if guard is None else guard
    N = prec if prec is not None else default_unit_precision(guard)
    if etas is not None:
        if len(etas) != n:
            raise ValueError(f"{len(etas)} eta values for n={n}")
        deformation = Deformation.specialized(ext or field, tuple(etas), with_z)
    else:
        deformation = Deformation.symbolic(field, n, with_z)
    carlitz = DrinfeldModule.carlitz(field)
    N_L = lseries_precision(carlitz, n, N)
    logger.debug("u_C for q=%d n=%d at precision %d (L to %d)", field.q, n, N, N_L)
    L = lseries_for(deformation, N_L, threads)
    u = exp_series(carlitz, deformation, L, prec=N)
    return extract_polynomial(u, min(guard, N - 1))


@dataclass
class UnitProfile:
    deg_theta: int
    leading: Poly
    at_one: Poly
    derivative_at_one: Poly

    def matches_closed_form(self, q: int, n: int) -> bool:
        deg, lead = expected_profile(self.leading.ring, q, n)
        return self.deg_theta == deg and self.leading == lead


def uC_profile(u: Poly) -> UnitProfile:
    """deg_theta, theta-leading coefficient, u(z=1) and (d/dz u)(z=1)"""
    deg, lead = theta_leading(u)
    return UnitProfile(
        deg_theta=deg,
        leading=lead,
        at_one=u.evaluate("z", 1),
        derivative_at_one=u.derivative("z").evaluate("z", 1),
    )


# ==================== ORBIT UNITS ====================


def character_unit(chi: DirichletCharacter, ring: CyclotomicRing, derivative: bool = False,
                   guard: Optional[int] = None) -> CyclotomicElement:
    """u_chi = g(chi) * u_C(eta_chi; 1), or with the z-derivative at 1"""
    u = compute_uC(chi.field, chi.type, guard=guard, etas=chi.etas, ext=chi.ext)
    if derivative:
        u = u.derivative("z")
    value = u.evaluate("z", 1).to_theta("T")
    return gauss_thakur_char(chi, ring).scale(value)


def orbit_unit(chi: DirichletCharacter, derivative: bool = False, guard: Optional[int] = None,
               ring: Optional[CyclotomicRing] = None) -> CyclotomicElement:
    """
    u_[chi](1) = sum over the Frobenius orbit of u_psi, an element of A[lambda_P].

    Raises:
        DescentFailure: the orbit sum keeps coefficients outside F_q
    """
    ring = ring or CyclotomicRing(chi.P, chi.ext)
    total = ring.zero
    for psi in chi.orbit():
        total = total + character_unit(psi, ring, derivative, guard)
    if not total.descends():
        raise DescentFailure("orbit sum does not descend to A[lambda_P]", character=str(chi))
    return total.to_base()


# ==================== STARK GENERATORS ====================


@dataclass
class StarkUnit:
    u: Poly
    prec: int
    tail_zero_witness: int
    attempts: List[int] = dc_field(default_factory=list)


def stark_generator(phi: DrinfeldModule, prec: Optional[int] = None, guard: Optional[int] = None,
                    cap: Optional[int] = None) -> StarkUnit:
    """
    u_phi(z) = exp(L(phi~/A~)) in A[z], with L taken from the Euler product.

    The precision doubles whenever the tail has not vanished yet, up to cap.
    """
    settings = get_settings()
    guard = settings.guard if guard is None else guard
    cap = cap or settings.stark_cap
    N = prec or guard + 1
    deformation = Deformation.symbolic(phi.field, 0, True)
    attempts: List[int] = []
    while True:
        attempts.append(N)
        try:
            L = lseries_euler(phi, lseries_precision(phi, 0, N), with_z=True)
            u = exp_series(phi, deformation, L, prec=N)
            poly = extract_polynomial(u, min(guard, N - 1))
            logger.info("stark generator settled at precision %d", N)
            return StarkUnit(u=poly, prec=N, tail_zero_witness=N - 1, attempts=attempts)
        except (NotPolynomialAtPrecision, PrecisionExhausted) as e:
            if 2 * N > cap:
                raise NotPolynomialAtPrecision(
                    getattr(e, "exponent", N), prec=N, attempts=attempts, module=str(phi), residual=e.detail,
                ) from e
            logger.debug("tail not vanishing at precision %d: %s", N, e.detail)
            N *= 2


# ==================== LOG-ALGEBRAICITY ====================


XPoly = Dict[int, ThetaPoly]


def _xmul(a: XPoly, b: XPoly) -> XPoly:
    out: XPoly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = ea + eb
            out[e] = out[e] + ca * cb if e in out else ca * cb
    return {e: c for e, c in out.items() if c}


def _x_coefficients(u: Poly) -> XPoly:
    out: XPoly = {}
    for e in range(u.degree_in("X") + 1):
        c = u.coefficient("X", e)
        if c:
            out[e] = c.to_theta("T")
    return out


def _binomial_factors(field: FiniteField, s: int, power: int) -> List[Tuple[int, int]]:
    """(theta^{q^s} - theta)^power as (hi, lo) binomials theta^hi - theta^lo, via base-p digits"""
    p, q = field.p, field.q
    out = []
    r = 0
    while power:
        power, digit = divmod(power, p)
        out.extend([(q ** s * p ** r, p ** r)] * digit)
        r += 1
    return out


def _times_binomial(a: ThetaPoly, hi: int, lo: int) -> ThetaPoly:
    return a.shift(hi) - a.shift(lo)


def _divide_binomial(a: ThetaPoly, hi: int, lo: int) -> Optional[ThetaPoly]:
    """a / (theta^hi - theta^lo) when exact, else None"""
    F = a.field
    if not a:
        return a
    c = list(a.c)
    if any(c[:lo]):
        return None
    c = c[lo:]
    step = hi - lo
    top = len(c) - 1 - step
    if top < 0:
        return None
    qt = [0] * (top + 1)
    for i in range(top, -1, -1):
        qt[i] = F.add(c[i + step], qt[i + step] if i + step <= top else 0)
    for i in range(step):
        if F.add(c[i], qt[i] if i <= top else 0):
            return None
    return ThetaPoly(F, qt)


@lru_cache(maxsize=None)
def _block_numerator(field: FiniteField, m: int, j: int) -> Tuple[Tuple[int, ThetaPoly], ...]:
    """
    N_j with sum_{a in A+,j} C_a(X)^m / a = N_j / ell_j^+, ell_j^+ = prod_{s<=j} (theta^{q^s} - theta).

    C_a = sum_k a_k C_{theta^k}, so each multinomial term needs only the moments
    sum_a prod_{k<j} a_k^{e_k} * (ell_j^+ / a).
    """
    q, p = field.q, field.p
    ell = carlitz_ell(field, j)
    ell_monic = ell.scale(field.neg(1)) if j % 2 else ell
    width = ell_monic.degree - j + 1
    vectors = []
    # index = sum a_i q^i over the lower coefficients of a
    for idx in range(q ** j):
        a = ThetaPoly(field, [(idx // q ** i) % q for i in range(j)] + [1])
        quotient = ell_monic.exact_div(a).c
        vectors.append(list(quotient) + [0] * (width - len(quotient)))
    moments = moment_transform(field, vectors, j)

    def reduced(e: int) -> int:
        return 0 if e == 0 else (e - 1) % (q - 1) + 1

    basis = [_x_coefficients(carlitz_polynomial(ThetaPoly.monomial(field, k), "X")) for k in range(j + 1)]
    powers: Dict[Tuple[int, int], XPoly] = {}

    def power(k: int, e: int) -> XPoly:
        if (k, e) not in powers:
            powers[(k, e)] = {0: ThetaPoly.one(field)} if e == 0 else _xmul(power(k, e - 1), basis[k])
        return powers[(k, e)]

    total: XPoly = {}
    for exps, coeff in multinomial_coefficients(j + 1, m).items():
        if coeff % p == 0:
            continue
        key = sum(reduced(e) * q ** k for k, e in enumerate(exps[:j]))
        moment = ThetaPoly(field, moments[key])
        if not moment:
            continue
        prod: XPoly = {0: ThetaPoly.one(field)}
        for k, e in enumerate(exps):
            if e:
                prod = _xmul(prod, power(k, e))
        for E, c in prod.items():
            piece = (c * moment).scale(coeff % p)
            total[E] = total[E] + piece if E in total else piece
    return tuple(sorted((E, c) for E, c in total.items() if c))


@dataclass
class LogAlgebraicSeries:
    field: FiniteField
    m: int
    z_max: int
    coefficients: List[Poly]

    @property
    def trailing_zero_witness(self) -> int:
        """Number of vanishing f_k at the top of the computed range"""
        count = 0
        for f in reversed(self.coefficients):
            if f:
                break
            count += 1
        return count

    def x_valuation(self, k: int) -> Optional[int]:
        f = self.coefficients[k]
        if not f:
            return None
        return min(exps[f.ring.index["X"]] for exps, _ in f.items())


def log_algebraicity(field: FiniteField, m: int, z_max: int) -> LogAlgebraicSeries:
    """
    z-coefficients f_0..f_{z_max} of exp(sum_{a in A+} C_a(X)^m z^{deg a}/a) under the deformed Carlitz
    exponential, f_k = sum_{i+j=k} tau^i(S_j)/D_i.

    Each f_k is divided exactly by a product of binomials theta^{q^s} - theta; a remainder raises
    IntegralityViolation with the offending k.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if z_max < 0:
        raise ValueError("z_max must be >= 0")
    q = field.q
    ring = PolyRing(field, ("T", "X"))
    blocks = [dict(_block_numerator(field, m, j)) for j in range(z_max + 1)]
    coefficients: List[Poly] = []
    for k in range(z_max + 1):
        # exponent of (theta^{q^s} - theta) in the denominator of term i
        def weight(i: int, s: int) -> int:
            j = k - i
            return (q ** i if s <= j else 0) + (q ** (i - s) if s <= i else 0)

        common = {s: max(weight(i, s) for i in range(k + 1)) for s in range(1, k + 1)}
        numerator: XPoly = {}
        for i in range(k + 1):
            for E, c in blocks[k - i].items():
                term = c.frobenius(i)
                for s in range(1, k + 1):
                    for hi, lo in _binomial_factors(field, s, common[s] - weight(i, s)):
                        term = _times_binomial(term, hi, lo)
                key = E * q ** i
                numerator[key] = numerator[key] + term if key in numerator else term
        f = ring.zero
        for E, c in numerator.items():
            for s in range(1, k + 1):
                for hi, lo in _binomial_factors(field, s, common[s]):
                    c = _divide_binomial(c, hi, lo)
                    if c is None:
                        raise IntegralityViolation(
                            f"f_{k} has a denominator at X^{E}",
                            k=k, exponent=E, denominator=f"(T^{q ** s}-T)^{common[s]}",
                        )
            f = f + Poly.from_theta(ring, c) * ring.monomial({"X": E})
        logger.debug("log-algebraic block %d: %d X-terms", k, len(f.terms))
        coefficients.append(f)
    return LogAlgebraicSeries(field=field, m=m, z_max=z_max, coefficients=coefficients)
