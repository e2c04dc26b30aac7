#!/usr/bin/env python3
"""
Carlitz Toolkit - Class Modules & Bernoulli Numbers
The Fitting generator B(t_1..t_n) of the class module through omega and the Carlitz period, its character
evaluations, and Bernoulli-Carlitz / Bernoulli-Goss numbers
"""

import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Union

from carlitz_algebra import FiniteField, Poly, PolyRing, ThetaFraction, ThetaPoly
from carlitz_config import get_settings
from carlitz_errors import ArityMismatch, GradeMismatch, NonConvergent, NotMonic
from carlitz_lseries import DirichletCharacter, ev_char, lseries_infinity, power_sum, power_sum_bound
from carlitz_module import carlitz_D, omega0, pitilde0
from carlitz_series import extract_polynomial, series_div, series_mul, theta_leading

logger = logging.getLogger(__name__)

# ==================== BERNOULLI NUMBERS ====================


def carlitz_factorial(field: FiniteField, m: int) -> ThetaPoly:
    """Pi(m) = prod_j D_j^{c_j} for m = sum_j c_j q^j"""
    if m < 0:
        raise ValueError("m must be >= 0")
    q = field.q
    result = ThetaPoly.one(field)
    j = 0
    while m:
        m, c = divmod(m, q)
        if c:
            result = result * carlitz_D(field, j) ** c
        j += 1
    return result


@dataclass
class BNumber:
    kind: str
    m: int
    value: Union[ThetaFraction, ThetaPoly]

    @property
    def field(self) -> FiniteField:
        return self.value.field

    def reduced_mod(self, P: ThetaPoly) -> ThetaPoly:
        """Image in A/P (the denominator of a Bernoulli-Carlitz number must be prime to P)"""
        if isinstance(self.value, ThetaFraction):
            return self.value.reduce_mod(P)
        return self.value % P

    def __str__(self):
        return str(self.value)


@lru_cache(maxsize=None)
def _inverse_exp_coefficients(field: FiniteField, m: int) -> List[ThetaFraction]:
    """Coefficients g_0..g_m of X/e_C(X), e_C(X) = sum_j X^{q^j}/D_j"""
    q = field.q
    f = []
    j = 1
    while q ** j - 1 <= m:
        f.append((q ** j - 1, ThetaFraction(ThetaPoly.one(field), carlitz_D(field, j))))
        j += 1
    g = [ThetaFraction(ThetaPoly.one(field))]
    for k in range(1, m + 1):
        acc = ThetaFraction(ThetaPoly.zero(field))
        for step, c in f:
            if step > k:
                break
            if g[k - step]:
                acc = acc + c * g[k - step]
        g.append(-acc)
    return g


def bernoulli_carlitz(field: FiniteField, m: int) -> BNumber:
    """BC(m) with X/e_C(X) = sum_m BC(m)/Pi(m) X^m"""
    if m < 0:
        raise ValueError("m must be >= 0")
    g = _inverse_exp_coefficients(field, m)[m]
    return BNumber(kind="carlitz", m=m, value=g * carlitz_factorial(field, m))


def bernoulli_goss(field: FiniteField, m: int, guard_blocks: int = 2) -> BNumber:
    """
    beta(m) = sum_{d >= 0} sum_{a in A+,d} a^m.

    Blocks past floor(l_q(m)/(q-1)) vanish; guard_blocks further blocks are computed and must be zero.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    q = field.q
    bound = power_sum_bound(m, q)
    total = ThetaPoly.zero(field)
    for d in range(bound + 1):
        total = total + power_sum(field, d, m)
    for d in range(bound + 1, bound + 1 + guard_blocks):
        if power_sum(field, d, m):
            raise NonConvergent(f"power sum of degree {d} is nonzero past the digit-sum bound {bound}",
                                m=m, degree=d, bound=bound)
    logger.debug("beta(%d) summed %d blocks", m, bound + 1)
    return BNumber(kind="goss", m=m, value=total)


# ==================== FITTING GENERATOR ====================


def compute_B(field: FiniteField, n: int, prec: Optional[int] = None, guard: Optional[int] = None,
              strict: bool = False, threads: Optional[int] = None) -> Poly:
    """
    B(t_1..t_n) = (-1)^{(n-1)/(q-1)} L(t; 1) omega(t_1)...omega(t_n) / pi~ as a polynomial in (T, t1..tn).

    Args:
        prec: absolute precision of the extracted product (default guard + 1)
        strict: raise GradeMismatch instead of returning 1 when n != 1 mod q-1

    Returns:
        The monic Fitting generator
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    q = field.q
    ring = PolyRing(field, tuple(f"t{i}" for i in range(1, n + 1)))
    out_ring = ring.extend("T", front=True)
    if (n - 1) % (q - 1):
        if strict:
            raise GradeMismatch(f"n={n} is not 1 mod q-1; the class module is trivial", n=n, q=q)
        return out_ring.one
    if n <= 2 * q - 2:
        return out_ring.one
    guard = get_settings().guard if guard is None else guard
    N = prec if prec is not None else guard + 1
    work = N + n + 2
    L = lseries_infinity(field, n, work, with_z=False, threads=threads)
    product = L
    for i in range(1, n + 1):
        product = series_mul(product, omega0(ring, f"t{i}", work), cap=work)
    B = series_div(product, pitilde0(ring, work), cap=work)
    k = (n - 1) // (q - 1)
    if k % 2:
        B = -B
    if B.grade:
        raise GradeMismatch("omega product did not normalize to grade 0", grade=B.grade)
    B = B.truncate(N)
    return check_monic(extract_polynomial(B, min(guard, N - 1)))


def check_monic(poly: Poly) -> Poly:
    """Fitting generators come out monic in theta; anything else is an error upstream"""
    _, lead = theta_leading(poly)
    if lead != 1:
        raise NotMonic(f"leading theta-coefficient is {lead}, not 1", leading=str(lead), poly=str(poly))
    return poly


def fitting_at_char(B: Poly, chi: DirichletCharacter) -> Poly:
    """ev_chi(B): the Fitting generator of the chi-part of the class module"""
    t_names = [nm for nm in B.ring.names if re.fullmatch(r"t\d+", nm)]
    if len(t_names) != chi.type:
        raise ArityMismatch(f"B has {len(t_names)} t-variables, the character has type {chi.type}",
                            variables=len(t_names), type=chi.type)
    if B.is_constant:
        ext = chi.ext
        target = PolyRing(ext, tuple(nm for nm in B.ring.names if nm not in t_names))
        return target.const(ext.base_elements[B.constant_value()])
    return ev_char(B, chi)
