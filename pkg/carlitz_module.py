#!/usr/bin/env python3
"""
Carlitz Toolkit - Drinfeld Modules
Drinfeld modules over A, their t/z deformations, certified exp/log operators, omega and the Carlitz period
"""

import logging
import math
from dataclasses import dataclass, field as dc_field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple, Union

from carlitz_algebra import FiniteField, Poly, PolyRing, ThetaFraction, ThetaPoly
from carlitz_config import get_settings
from carlitz_errors import ContextMismatch, PrecisionExhausted
from carlitz_series import INF, GradedSeries, Precision, series_mul

logger = logging.getLogger(__name__)

# theta^{-1}-valuations; lambda-graded inputs have fractional ones
Valuation = Union[int, Fraction]

# ==================== CARLITZ SEQUENCES ====================


@lru_cache(maxsize=None)
def carlitz_D(field: FiniteField, j: int) -> ThetaPoly:
    """D_0 = 1, D_j = (theta^{q^j} - theta) D_{j-1}^q"""
    if j == 0:
        return ThetaPoly.one(field)
    step = ThetaPoly.monomial(field, field.q ** j) - ThetaPoly.theta(field)
    return step * carlitz_D(field, j - 1).frobenius(1)


@lru_cache(maxsize=None)
def carlitz_ell(field: FiniteField, j: int) -> ThetaPoly:
    """l_0 = 1, l_j = (theta - theta^{q^j}) l_{j-1}"""
    if j == 0:
        return ThetaPoly.one(field)
    return (ThetaPoly.theta(field) - ThetaPoly.monomial(field, field.q ** j)) * carlitz_ell(field, j - 1)


def carlitz_b(field: FiniteField, j: int, var: str = "t") -> Poly:
    """b_j(var) = prod_{i<j} (var - theta^{q^i}) in F_q[T, var]"""
    ring = PolyRing(field, ("T", var))
    result = ring.one
    for i in range(j):
        result = result * (ring.var(var) - ring.monomial({"T": field.q ** i}))
    return result


def carlitz_sequences(kind: str, j: int, field: FiniteField, var: str = "t"):
    if j < 0:
        raise ValueError("index must be >= 0")
    if kind == "D":
        return carlitz_D(field, j)
    if kind == "ell":
        return carlitz_ell(field, j)
    if kind == "b":
        return carlitz_b(field, j, var)
    raise ValueError(f"unknown sequence {kind!r}")


# ==================== DRINFELD MODULES ====================


@dataclass(frozen=True)
class DrinfeldModule:
    """phi_theta = theta + alpha_1 tau + ... + alpha_r tau^r"""

    field: FiniteField
    alphas: Tuple[ThetaPoly, ...]

    def __post_init__(self):
        if self.alphas and self.alphas[-1].is_zero:
            raise ValueError("the top coefficient alpha_r must be nonzero")
        for a in self.alphas:
            if a.field != self.field:
                raise ContextMismatch("coefficients over a different field", field=str(a.field))

    @classmethod
    def carlitz(cls, field: FiniteField) -> "DrinfeldModule":
        return cls(field, (ThetaPoly.one(field),))

    @classmethod
    def trivial(cls, field: FiniteField) -> "DrinfeldModule":
        """phi_theta = theta (rank 0)"""
        return cls(field, ())

    @classmethod
    def from_strings(cls, field: FiniteField, coefficients: Sequence[str]) -> "DrinfeldModule":
        return cls(field, tuple(ThetaPoly.parse(c, field) for c in coefficients))

    @property
    def rank(self) -> int:
        return len(self.alphas)

    @property
    def max_degree(self) -> int:
        return max((a.degree for a in self.alphas), default=0)

    @property
    def is_carlitz(self) -> bool:
        return self.rank == 1 and self.alphas[0] == ThetaPoly.one(self.field)

    def alpha(self, j: int) -> ThetaPoly:
        if j == 0:
            return ThetaPoly.theta(self.field)
        if j <= self.rank:
            return self.alphas[j - 1]
        return ThetaPoly.zero(self.field)

    def exp_coefficients(self, J: int) -> List[ThetaFraction]:
        return exp_coefficients(self, J)

    def log_coefficients(self, J: int) -> List[ThetaFraction]:
        return log_coefficients(self, J)

    def __str__(self):
        parts = ["T"]
        for j, a in enumerate(self.alphas, start=1):
            if a.is_zero:
                continue
            tau = "tau" if j == 1 else f"tau^{j}"
            parts.append(tau if a == 1 else f"({a})*{tau}")
        return "+".join(parts)


@lru_cache(maxsize=None)
def exp_coefficient(phi: DrinfeldModule, i: int) -> ThetaFraction:
    """e_i (theta^{q^i} - theta) = sum_{k=1}^{min(i,r)} alpha_k e_{i-k}^{q^k}"""
    F = phi.field
    if i == 0:
        return ThetaFraction(ThetaPoly.one(F))
    acc = ThetaFraction(ThetaPoly.zero(F))
    for k in range(1, min(i, phi.rank) + 1):
        a = phi.alpha(k)
        if a:
            acc = acc + exp_coefficient(phi, i - k).frobenius(k) * a
    return acc / (ThetaPoly.monomial(F, F.q ** i) - ThetaPoly.theta(F))


@lru_cache(maxsize=None)
def log_coefficient(phi: DrinfeldModule, m: int) -> ThetaFraction:
    """(theta - theta^{q^m}) l_m = sum_{k<m} l_k alpha_{m-k}^{q^k}"""
    F = phi.field
    if m == 0:
        return ThetaFraction(ThetaPoly.one(F))
    acc = ThetaFraction(ThetaPoly.zero(F))
    for k in range(max(0, m - phi.rank), m):
        a = phi.alpha(m - k)
        if a:
            acc = acc + log_coefficient(phi, k) * a.frobenius(k)
    return acc / (ThetaPoly.theta(F) - ThetaPoly.monomial(F, F.q ** m))


def exp_coefficients(phi: DrinfeldModule, J: int) -> List[ThetaFraction]:
    return [exp_coefficient(phi, i) for i in range(J + 1)]


def log_coefficients(phi: DrinfeldModule, J: int) -> List[ThetaFraction]:
    return [log_coefficient(phi, i) for i in range(J + 1)]


# ==================== DEFORMATIONS ====================

TValue = Union[Poly, int]


@dataclass(frozen=True)
class Deformation:
    """
    Coefficient ring of the deformation with the values of t_1..t_n and z.

    t-values are ring variables (symbolic) or constants eta of the ring's field (character specialization);
    z is the ring variable z or the constant 1.
    """

    ring: PolyRing
    t_values: Tuple[TValue, ...] = ()
    z_value: TValue = 1

    @classmethod
    def symbolic(cls, field: FiniteField, n: int, with_z: bool = True) -> "Deformation":
        names = tuple(f"t{i}" for i in range(1, n + 1)) + (("z",) if with_z else ())
        ring = PolyRing(field, names)
        return cls(ring, tuple(ring.var(f"t{i}") for i in range(1, n + 1)), ring.var("z") if with_z else 1)

    @classmethod
    def specialized(cls, field: FiniteField, etas: Sequence[int], with_z: bool = True) -> "Deformation":
        ring = PolyRing(field, ("z",) if with_z else ())
        return cls(ring, tuple(etas), ring.var("z") if with_z else 1)

    @property
    def n(self) -> int:
        return len(self.t_values)

    @property
    def q(self) -> int:
        return self.ring.field.q

    @property
    def z_symbolic(self) -> bool:
        return isinstance(self.z_value, Poly)

    def at_z_one(self) -> "Deformation":
        return replace(self, z_value=1)

    def t_poly(self, k: int) -> Poly:
        t = self.t_values[k]
        return t if isinstance(t, Poly) else self.ring.const(t)


@lru_cache(maxsize=None)
def _b_series(ring: PolyRing, t: TValue, j: int) -> GradedSeries:
    F = ring.field
    tp = t if isinstance(t, Poly) else ring.const(t)
    minus_one = ring.const(F.neg(1))
    result = GradedSeries.one(ring)
    for i in range(j):
        result = series_mul(result, GradedSeries(ring, {0: tp, -(F.q ** i): minus_one}))
    return result


@lru_cache(maxsize=None)
def deformation_weight(deformation: Deformation, j: int) -> GradedSeries:
    """prod_k b_j(t_k) * z^j as an exact series"""
    ring = deformation.ring
    result = GradedSeries.one(ring)
    for t in deformation.t_values:
        result = series_mul(result, _b_series(ring, t, j))
    if deformation.z_symbolic and j:
        result = result.scale(deformation.z_value ** j)
    return result


# ==================== TWISTED OPERATORS ====================


@dataclass
class TwistedOperator:
    """sum_j c_j tau^j, certified for inputs of valuation >= input_valuation up to target_prec"""

    kind: str
    terms: List[Tuple[int, GradedSeries]] = dc_field(default_factory=list)
    J: int = 0
    input_valuation: Valuation = 0
    target_prec: Precision = INF

    def __call__(self, s: GradedSeries) -> GradedSeries:
        return apply_operator(self, s)


def _twist_coefficient(phi: DrinfeldModule, kind: str, j: int) -> ThetaFraction:
    return exp_coefficient(phi, j) if kind == "exp" else log_coefficient(phi, j)


def certified_truncation(phi: DrinfeldModule, n: int, kind: str, input_valuation: Valuation,
                         target_prec: Precision, max_terms: Optional[int] = None) -> int:
    """
    Least J such that every term j > J of the operator has valuation >= target_prec.

    With x_i = v(c_i)/q^i the window minimum m over the last r indices bounds all later x_i once
    q^{J+1} >= max deg alpha (log operators also need m <= (q^s - D)/(q^s - 1)). Later terms then have
    valuation >= q^i (m - n/(q-1) + v) + n/(q-1), increasing in i when the slope is positive.
    """
    q = phi.field.q
    c = Fraction(n, q - 1)
    v_s = Fraction(input_valuation)
    r, D = phi.rank, phi.max_degree
    budget = max_terms if max_terms is not None else get_settings().max_twist_terms
    log_cap = None
    if kind == "log":
        log_cap = min(Fraction(q - D, q - 1), Fraction(q ** r - D, q ** r - 1))
    slopes: List[Optional[Fraction]] = []
    for j in range(budget + 1):
        v = _twist_coefficient(phi, kind, j).valuation
        slopes.append(None if v == INF else Fraction(int(v), q ** j))
        window = [x for x in slopes[-r:] if x is not None]
        if not window:
            continue
        m = min(window)
        if log_cap is not None:
            m = min(m, log_cap)
        slope = m - c + v_s
        if slope > 0 and q ** (j + 1) >= D and q ** (j + 1) * slope + c >= target_prec:
            logger.debug("%s operator certified at J=%d (input valuation %s, target %s)",
                         kind, j, input_valuation, target_prec)
            return j
    raise PrecisionExhausted(
        f"no certified {kind} truncation within {budget} twists",
        kind=kind, input_valuation=input_valuation, target_prec=target_prec, n=n,
    )


@lru_cache(maxsize=None)
def operator_coefficient(phi: DrinfeldModule, deformation: Deformation, kind: str, j: int,
                         prec: Precision) -> GradedSeries:
    """c_j = (e_j or l_j) * prod_k b_j(t_k) * z^j to absolute precision prec"""
    ring = deformation.ring
    weight = deformation_weight(deformation, j)
    f = _twist_coefficient(phi, kind, j)
    wv = weight.valuation
    if f.is_zero or weight.is_zero:
        return GradedSeries.zero(ring, prec)
    coeff = GradedSeries.from_fraction(ring, f, prec - wv)
    return series_mul(coeff, weight, cap=prec)


def build_operator(phi: DrinfeldModule, deformation: Deformation, kind: str, input_valuation: Valuation,
                   target_prec: Precision, weight: Optional[Callable[[int], int]] = None) -> TwistedOperator:
    """
    Certified exp ("exp") or log ("log") operator of the deformed module.

    Args:
        weight: optional F_p multiplier per twist index (j mod p gives exp^(1))
    """
    if target_prec == INF:
        raise PrecisionExhausted("operators need a finite target precision")
    F = deformation.ring.field
    q, p, n = F.q, F.p, deformation.n
    J = certified_truncation(phi, n, kind, input_valuation, target_prec)
    op = TwistedOperator(kind=kind, J=J, input_valuation=input_valuation, target_prec=target_prec)
    for j in range(J + 1):
        w = weight(j) % p if weight else 1
        if not w:
            continue
        f = _twist_coefficient(phi, kind, j)
        if f.is_zero:
            continue
        v_term = f.valuation - n * (q ** j - 1) // (q - 1) + q ** j * input_valuation
        if v_term >= target_prec:
            continue
        coeff = operator_coefficient(phi, deformation, kind, j, math.ceil(target_prec - q ** j * input_valuation))
        op.terms.append((j, coeff if w == 1 else coeff.scale(w)))
    return op


def effective_valuation(s: GradedSeries) -> Union[Valuation, Precision]:
    """theta^{-1}-valuation of lambda^grade * s, counting lambda as -1/(q-1)"""
    if s.valuation == INF or not s.grade:
        return s.valuation
    return s.valuation - Fraction(s.grade, s.ring.field.q - 1)


def apply_operator(op: TwistedOperator, s: GradedSeries) -> GradedSeries:
    """sum_j c_j tau^j(s) below the propagated precision; the result keeps the grade of s"""
    if effective_valuation(s) < op.input_valuation:
        raise PrecisionExhausted("input valuation below the certified bound",
                                 valuation=s.valuation, grade=s.grade, certified=op.input_valuation)
    result = GradedSeries.zero(s.ring, min(op.target_prec, s.prec), grade=s.grade)
    for j, c in op.terms:
        result = result + series_mul(c, s.tau(j), cap=op.target_prec)
    return result


def _run(phi: DrinfeldModule, deformation: Deformation, kind: str, s: GradedSeries,
         prec: Optional[Precision], weight=None) -> GradedSeries:
    target = s.prec if prec is None else min(prec, s.prec)
    if s.is_zero:
        return GradedSeries.zero(s.ring, target, grade=s.grade)
    op = build_operator(phi, deformation, kind, effective_valuation(s), target, weight)
    return apply_operator(op, s)


def exp_series(phi: DrinfeldModule, deformation: Deformation, s: GradedSeries,
               prec: Optional[Precision] = None) -> GradedSeries:
    """exp of the deformed module applied to s"""
    return _run(phi, deformation, "exp", s, prec)


def log_series(phi: DrinfeldModule, deformation: Deformation, s: GradedSeries,
               prec: Optional[Precision] = None) -> GradedSeries:
    return _run(phi, deformation, "log", s, prec)


def exp_derivative_series(phi: DrinfeldModule, deformation: Deformation, s: GradedSeries,
                          prec: Optional[Precision] = None) -> GradedSeries:
    """exp^(1): the z-derivative at z = 1, coefficients j * b_j(t) e_j"""
    return _run(phi, deformation.at_z_one(), "exp", s, prec, weight=lambda j: j)


def phi_theta_series(phi: DrinfeldModule, deformation: Deformation, s: GradedSeries) -> GradedSeries:
    """The deformed theta-action sum_j alpha_j b_j(t) z^j tau^j(s)"""
    ring = s.ring
    result = None
    for j in range(phi.rank + 1):
        a = phi.alpha(j)
        if a.is_zero:
            continue
        coeff = series_mul(GradedSeries.from_theta(ring, a), deformation_weight(deformation, j))
        term = series_mul(coeff, s.tau(j))
        result = term if result is None else result + term
    return result


def correction_series(phi: DrinfeldModule, deformation: Deformation, s: GradedSeries) -> GradedSeries:
    """sum_{j>=1} alpha_j b_j(t) (z^j - 1)/(z - 1) tau^j(s)"""
    if not deformation.z_symbolic:
        raise ContextMismatch("the correction operator needs a symbolic z")
    ring = s.ring
    z = deformation.z_value
    flat = deformation.at_z_one()
    result = GradedSeries.zero(ring, s.prec)
    geometric = ring.zero
    power = ring.one
    for j in range(1, phi.rank + 1):
        geometric = geometric + power
        power = power * z
        a = phi.alpha(j)
        if a.is_zero:
            continue
        coeff = series_mul(GradedSeries.from_theta(ring, a), deformation_weight(flat, j)).scale(geometric)
        result = result + series_mul(coeff, s.tau(j))
    return result


def alpha_map(phi: DrinfeldModule, deformation: Deformation, s: GradedSeries,
              prec: Optional[Precision] = None) -> GradedSeries:
    """(exp_phi~(s) - exp_phi(s))/(z - 1), divided coefficient-wise"""
    if not deformation.z_symbolic:
        raise ContextMismatch("the divided difference needs a symbolic z")
    diff = exp_series(phi, deformation, s, prec) - exp_series(phi, deformation.at_z_one(), s, prec)
    return diff.map_coefficients(lambda c: c.divide_linear("z", 1))


# ==================== SPECIAL FUNCTIONS ====================


def _geometric_factor(ring: PolyRing, ratio: Poly, step: int, prec: Precision) -> GradedSeries:
    """(1 - ratio * theta^{-step})^{-1} to absolute precision prec"""
    terms = {}
    power = ring.one
    k = 0
    while k * step < prec:
        terms[k * step] = power
        power = power * ratio
        k += 1
    return GradedSeries(ring, terms, prec)


def omega0(ring: PolyRing, t: Union[str, Poly, int], prec: int) -> GradedSeries:
    """
    omega(t) as lambda_theta * prod_{k>=0} (1 - t theta^{-q^k})^{-1}, truncated at prec.

    Args:
        ring: coefficient ring
        t: variable name, ring element or field constant
        prec: absolute precision
    """
    if prec < 1:
        raise ValueError("precision must be >= 1")
    if isinstance(t, str):
        t = ring.var(t)
    elif isinstance(t, int):
        t = ring.const(t)
    q = ring.field.q
    result = GradedSeries.one(ring, prec)
    k = 0
    while q ** k < prec:
        result = series_mul(result, _geometric_factor(ring, t, q ** k, prec), cap=prec)
        k += 1
    return GradedSeries(ring, result.terms, prec, grade=1)


def pitilde0(ring: PolyRing, prec: int) -> GradedSeries:
    """The Carlitz period lambda_theta * theta * prod_{j>=1} (1 - theta^{1-q^j})^{-1}"""
    if prec < 1:
        raise ValueError("precision must be >= 1")
    q = ring.field.q
    inner = prec + 1
    result = GradedSeries.one(ring, inner)
    j = 1
    while q ** j - 1 < inner:
        result = series_mul(result, _geometric_factor(ring, ring.one, q ** j - 1, inner), cap=inner)
        j += 1
    return GradedSeries(ring, {i - 1: c for i, c in result.terms.items()}, prec, grade=1)
