#!/usr/bin/env python3
"""
Carlitz Toolkit - Graded Series
Truncated Laurent series in 1/theta over F[t1..tn, z] with absolute precision and a lambda_theta grade
"""

import logging
import math
from typing import Callable, Dict, Iterable, Optional, Union

from carlitz_algebra import Poly, PolyRing, ThetaFraction, ThetaPoly
from carlitz_errors import (
    ContextMismatch,
    GradeMismatch,
    NotAUnit,
    NotPolynomialAtPrecision,
    PrecisionExhausted,
)

logger = logging.getLogger(__name__)

INF = math.inf
Precision = Union[int, float]


class GradedSeries:
    """
    lambda_theta^grade * sum_i c_i theta^{-i}; exponents i >= prec are unknown.

    prec may be math.inf for exact (finite) values. The grade is normalized to 0 <= grade <= q-2 through
    lambda_theta^{q-1} = -theta.
    """

    __slots__ = ("ring", "terms", "prec", "grade")

    def __init__(self, ring: PolyRing, terms: Optional[Dict[int, Poly]] = None, prec: Precision = INF,
                 grade: int = 0, normalize: bool = True):
        self.ring = ring
        self.prec = prec
        self.terms = {i: c for i, c in (terms or {}).items() if i < prec and c}
        self.grade = grade
        if normalize:
            self._normalize()

    def _normalize(self) -> None:
        q1 = self.ring.field.q - 1
        g = self.grade % q1 if q1 > 1 else 0
        k = (self.grade - g) // q1 if q1 > 1 else self.grade
        if k:
            # lambda^{k(q-1)} = (-theta)^k moves exponent i to i - k
            sign = self.ring.field.neg(1) if k % 2 else 1
            self.terms = {i - k: c.scale(sign) for i, c in self.terms.items()}
            self.prec = self.prec - k
        self.grade = g

    # ---------- constructors ----------

    @classmethod
    def zero(cls, ring: PolyRing, prec: Precision = INF, grade: int = 0) -> "GradedSeries":
        return cls(ring, {}, prec, grade)

    @classmethod
    def one(cls, ring: PolyRing, prec: Precision = INF) -> "GradedSeries":
        return cls(ring, {0: ring.one}, prec)

    @classmethod
    def lam(cls, ring: PolyRing, power: int = 1, prec: Precision = INF) -> "GradedSeries":
        """lambda_theta^power"""
        return cls(ring, {0: ring.one}, prec, grade=power)

    @classmethod
    def monomial(cls, ring: PolyRing, exponent: int, coeff: Optional[Poly] = None,
                 prec: Precision = INF) -> "GradedSeries":
        """coeff * theta^{-exponent}"""
        return cls(ring, {exponent: coeff if coeff is not None else ring.one}, prec)

    @classmethod
    def from_theta(cls, ring: PolyRing, a: ThetaPoly, prec: Precision = INF,
                   coeff: Optional[Poly] = None) -> "GradedSeries":
        """Exact series of a polynomial in theta (times an optional ring coefficient)"""
        a = _into_field(a, ring)
        base = coeff if coeff is not None else ring.one
        return cls(ring, {-i: base.scale(x) for i, x in enumerate(a.c) if x}, prec)

    @classmethod
    def from_fraction(cls, ring: PolyRing, f: ThetaFraction, prec: Precision) -> "GradedSeries":
        """Expansion of num/den in 1/theta to absolute precision prec"""
        num = cls.from_theta(ring, f.num)
        if f.den.degree == 0:
            return num.truncate(prec)
        inv = series_inv(cls.from_theta(ring, f.den), cap=prec + max(f.num.degree, 0))
        return series_mul(num, inv, cap=prec)

    # ---------- structure ----------

    @property
    def valuation(self) -> Precision:
        """v_inf: least stored exponent, or the precision for an empty series"""
        return min(self.terms) if self.terms else self.prec

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_exact(self) -> bool:
        return self.prec == INF

    @property
    def tail_witness(self) -> int:
        """Number of vanishing coefficients witnessed past theta^0"""
        return max(int(self.prec) - 1, 0) if self.prec != INF else 0

    def coefficient(self, i: int) -> Poly:
        if i >= self.prec:
            raise PrecisionExhausted(f"coefficient {i} lies beyond precision {self.prec}", exponent=i, prec=self.prec)
        return self.terms.get(i, self.ring.zero)

    def truncate(self, cap: Precision) -> "GradedSeries":
        if cap >= self.prec:
            return self
        return GradedSeries(self.ring, self.terms, cap, self.grade, normalize=False)

    def _check(self, other: "GradedSeries") -> None:
        if other.ring is not self.ring and other.ring != self.ring:
            raise ContextMismatch("series over different coefficient rings", left=repr(self.ring),
                                  right=repr(other.ring))
        if other.grade != self.grade:
            raise GradeMismatch("cannot add series of different lambda grades", left=self.grade, right=other.grade)

    # ---------- arithmetic ----------

    def __add__(self, other: "GradedSeries") -> "GradedSeries":
        self._check(other)
        prec = min(self.prec, other.prec)
        out = {i: c for i, c in self.terms.items() if i < prec}
        for i, c in other.terms.items():
            if i < prec:
                s = out[i] + c if i in out else c
                if s:
                    out[i] = s
                else:
                    out.pop(i, None)
        return GradedSeries(self.ring, out, prec, self.grade, normalize=False)

    def __neg__(self) -> "GradedSeries":
        return GradedSeries(self.ring, {i: -c for i, c in self.terms.items()}, self.prec, self.grade,
                            normalize=False)

    def __sub__(self, other: "GradedSeries") -> "GradedSeries":
        return self + (-other)

    def __mul__(self, other: "GradedSeries") -> "GradedSeries":
        return series_mul(self, other)

    def scale(self, c: Union[Poly, int]) -> "GradedSeries":
        """Multiply by a ring coefficient (valuation 0)"""
        if isinstance(c, int):
            return GradedSeries(self.ring, {i: v.scale(c) for i, v in self.terms.items()}, self.prec, self.grade,
                                normalize=False)
        return GradedSeries(self.ring, {i: v * c for i, v in self.terms.items()}, self.prec, self.grade,
                            normalize=False)

    def shift(self, k: int) -> "GradedSeries":
        """Multiply by theta^k"""
        return GradedSeries(self.ring, {i - k: c for i, c in self.terms.items()}, self.prec - k, self.grade,
                            normalize=False)

    def tau(self, j: int = 1, coeff_map: Optional[Callable[[Poly], Poly]] = None) -> "GradedSeries":
        """
        tau^j: theta^{-i} -> theta^{-i q^j}; t-variables, z and constants are fixed.

        coeff_map lets formal variables twist along (X -> X^{q^j} for log-algebraicity).
        """
        if j == 0:
            return self
        Q = self.ring.field.q ** j
        out = {i * Q: (coeff_map(c) if coeff_map else c) for i, c in self.terms.items()}
        return GradedSeries(self.ring, out, self.prec * Q, self.grade * Q)

    def substitute(self, values: Dict[str, Union[Poly, int]], target: PolyRing) -> "GradedSeries":
        """Coefficient-wise substitution into another coefficient ring"""
        out = {i: c.substitute(values, target) for i, c in self.terms.items()}
        return GradedSeries(target, out, self.prec, self.grade, normalize=False)

    def map_coefficients(self, fn: Callable[[Poly], Poly], target: Optional[PolyRing] = None) -> "GradedSeries":
        out = {i: fn(c) for i, c in self.terms.items()}
        return GradedSeries(target or self.ring, out, self.prec, self.grade, normalize=False)

    # ---------- comparison and text ----------

    def agrees_with(self, other: "GradedSeries") -> bool:
        """Equality below the shared precision"""
        prec = min(self.prec, other.prec)
        return (self.grade == other.grade
                and self.truncate(prec).terms == other.truncate(prec).terms)

    def __eq__(self, other):
        return (isinstance(other, GradedSeries) and self.grade == other.grade and self.prec == other.prec
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.grade, self.prec, frozenset(self.terms.items())))

    def __str__(self):
        parts = []
        for i in sorted(self.terms):
            c = self.terms[i]
            cs = str(c)
            if len(c.terms) > 1:
                cs = f"({cs})"
            if i == 0:
                parts.append(cs)
            else:
                mono = f"T^{-i}" if i < 0 else f"T^-{i}"
                mono = "T" if i == -1 else mono
                parts.append(mono if cs == "1" else f"{cs}*{mono}")
        body = f"lambda^{self.grade} * ( {' + '.join(parts) if parts else '0'} )"
        if self.prec != INF:
            body += f" + O(T^-{int(self.prec)})"
        return body

    def __repr__(self):
        return f"GradedSeries({self})"


def _into_field(a: ThetaPoly, ring: PolyRing) -> ThetaPoly:
    if a.field == ring.field:
        return a
    return a.embed(ring.field)


# ==================== RING OPERATIONS ====================


def series_mul(a: GradedSeries, b: GradedSeries, cap: Optional[Precision] = None) -> GradedSeries:
    """
    Product with propagated precision min(prec_a + v(b), prec_b + v(a)).

    Args:
        a, b: factors (grades add)
        cap: optional absolute precision bound for the product, before grade normalization

    Returns:
        The normalized product
    """
    if b.ring is not a.ring and b.ring != a.ring:
        raise ContextMismatch("series over different coefficient rings", left=repr(a.ring), right=repr(b.ring))
    va, vb = a.valuation, b.valuation
    prec = min(a.prec + vb, b.prec + va)
    if cap is not None:
        prec = min(prec, cap)
    out: Dict[int, Poly] = {}
    b_items = sorted(b.terms.items())
    for i, ci in a.terms.items():
        for j, cj in b_items:
            k = i + j
            if k >= prec:
                break
            prod = ci * cj
            if k in out:
                s = out[k] + prod
                if s:
                    out[k] = s
                else:
                    del out[k]
            elif prod:
                out[k] = prod
    return GradedSeries(a.ring, out, prec, a.grade + b.grade)


def series_inv(a: GradedSeries, cap: Optional[Precision] = None) -> GradedSeries:
    """
    Inverse of a series whose leading coefficient lies in F^x.

    The relative precision prec - v is preserved, so the result has absolute precision prec - 2v. Exact inputs
    with more than one term need a cap.
    """
    if a.is_zero:
        raise NotAUnit("zero series has no inverse", prec=a.prec)
    v = a.valuation
    lead = a.terms[v]
    if not lead.is_constant:
        raise NotAUnit("leading coefficient is not a constant unit", leading=str(lead))
    F = a.ring.field
    c_inv = F.inv(lead.constant_value())
    prec = a.prec - 2 * v
    if cap is not None:
        prec = min(prec, cap)
    if prec == INF:
        if len(a.terms) == 1:
            return GradedSeries(a.ring, {-v: a.ring.const(c_inv)}, INF, -a.grade)
        raise PrecisionExhausted("inverse of an exact multi-term series needs a precision cap")
    rel = int(prec + v)  # relative terms b_0 .. b_{rel-1}
    tail = sorted((i - v, c) for i, c in a.terms.items() if 0 < i - v < rel)
    inv_terms: Dict[int, Poly] = {0: a.ring.const(c_inv)} if rel > 0 else {}
    for k in range(1, rel):
        acc = a.ring.zero
        for j, cj in tail:
            if j > k:
                break
            prev = inv_terms.get(k - j)
            if prev is not None:
                acc = acc + cj * prev
        if acc:
            inv_terms[k] = (-acc).scale(c_inv)
    return GradedSeries(a.ring, {k - v: c for k, c in inv_terms.items()}, prec, -a.grade)


def series_div(a: GradedSeries, b: GradedSeries, cap: Optional[Precision] = None) -> GradedSeries:
    inv_cap = None
    if cap is not None:
        inv_cap = cap - (a.valuation if a.terms else 0)
    return series_mul(a, series_inv(b, cap=inv_cap), cap=cap)


def series_sum(items: Iterable[GradedSeries], ring: PolyRing, prec: Precision = INF, grade: int = 0) -> GradedSeries:
    total = GradedSeries.zero(ring, prec, grade)
    for s in items:
        total = total + s
    return total


def series_product(items: Iterable[GradedSeries], ring: PolyRing, cap: Optional[Precision] = None) -> GradedSeries:
    total = GradedSeries.one(ring)
    for s in items:
        total = series_mul(total, s, cap=cap)
    return total


# ==================== POLYNOMIAL EXTRACTION ====================


def extract_polynomial(a: GradedSeries, guard: int = 0, name: str = "T") -> Poly:
    """
    Polynomial part sum_{i <= 0} c_i theta^{-i} of a series whose tail [1, prec) vanishes.

    Args:
        a: grade-0 series
        guard: least number of witnessed vanishing tail coefficients
        name: variable used for theta in the returned ring

    Returns:
        Poly over (name, ring variables...)
    """
    if a.grade != 0:
        raise GradeMismatch("only grade-0 series extract to polynomials", grade=a.grade)
    if a.prec == INF:
        raise PrecisionExhausted("exact series has no witnessed tail")
    if a.tail_witness < guard:
        raise PrecisionExhausted(f"precision {a.prec} witnesses fewer than {guard} tail coefficients",
                                 prec=a.prec, guard=guard)
    tail = [i for i in a.terms if i >= 1]
    if tail:
        raise NotPolynomialAtPrecision(min(tail), prec=a.prec)
    out_ring = a.ring.extend(name, front=True)
    result = out_ring.zero
    for i, c in a.terms.items():
        result = result + c.to_ring(out_ring).shift_key(out_ring.unit_key(name, -i))
    logger.debug("extracted polynomial with %d tail zeros witnessed", a.tail_witness)
    return result


def theta_leading(u: Poly, name: str = "T"):
    """(deg_theta, leading coefficient as a Poly without theta)"""
    deg = u.degree_in(name)
    if deg < 0:
        return -1, u.ring.zero
    return deg, u.coefficient(name, deg)
