#!/usr/bin/env python3
"""
Carlitz Toolkit - P-adic Values
Completions A/P^M, the totally ramified ring R_M = (A/P^M)[x]/Phi_P(x), Teichmueller lifts, the P-adic Carlitz
logarithm and P-adic L-values at 1 by direct summation and through units
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union

from carlitz_algebra import FiniteField, MonicEnumerator, ThetaPoly, extension_of, require_irreducible
from carlitz_config import get_settings
from carlitz_errors import ContextMismatch, NonConvergent, NonPositiveValuation
from carlitz_lseries import (
    CyclotomicElement,
    CyclotomicRing,
    DirichletCharacter,
    gauss_thakur_char,
    power_sum,
    power_sum_bound,
    prime_roots,
)
from carlitz_module import carlitz_ell
from carlitz_units import orbit_unit

logger = logging.getLogger(__name__)

# ==================== CONTEXT ====================


class PadicContext:
    """
    Precision context for P-adic values: A/P^M and the ramified ring R_M with v_P(lambda_P) = 1/(q^d - 1).
    """

    def __init__(self, P: ThetaPoly, M: int):
        require_irreducible(P)
        if M < 1:
            raise ValueError("precision M must be >= 1")
        self.P = P
        self.M = M
        self.field: FiniteField = P.field
        self.d = P.degree
        self.q = self.field.q
        self.D = self.q ** self.d - 1
        self.PM = P ** M
        self.ext = extension_of(self.field, self.d)
        self.ring = CyclotomicRing(P, self.field, modulus=self.PM)
        self._teichmuller: Dict[Tuple[int, ...], ThetaPoly] = {}
        self._iota: Dict[int, ThetaPoly] = {}
        self._table: Optional[Dict[int, ThetaPoly]] = None

    def with_precision(self, M: int) -> "PadicContext":
        return PadicContext(self.P, M)

    def __eq__(self, other):
        return isinstance(other, PadicContext) and self.P == other.P and self.M == other.M

    def __hash__(self):
        return hash((self.P, self.M))

    def __repr__(self):
        return f"PadicContext(P={self.P}, M={self.M})"

    # ---------- elements ----------

    def element(self, value: Union[CyclotomicElement, Sequence[ThetaPoly]], prec: Optional[int] = None) -> "PadicElement":
        if isinstance(value, CyclotomicElement):
            value = self.ring.element(list(value.c))
        else:
            value = self.ring.element(list(value))
        return PadicElement(self, value, self.M if prec is None else min(prec, self.M))

    def scalar(self, c: Union[ThetaPoly, int], prec: Optional[int] = None) -> "PadicElement":
        if isinstance(c, int):
            c = ThetaPoly.const(self.field, c)
        return self.element([c], prec)

    @property
    def zero(self) -> "PadicElement":
        return self.element([])

    @property
    def one(self) -> "PadicElement":
        return self.scalar(1)

    @property
    def lam(self) -> "PadicElement":
        """lambda_P, a uniformizer of R_M"""
        return PadicElement(self, self.ring.x, self.M)

    # ---------- Teichmueller ----------

    def teichmuller(self, residue: ThetaPoly) -> ThetaPoly:
        """The xi = xi^{q^d} congruent to residue mod P, as a representative mod P^M"""
        r = residue % self.P
        key = r.c
        if key not in self._teichmuller:
            xi = r
            while True:
                nxt = xi.frobenius(self.d) % self.PM
                if nxt == xi:
                    break
                xi = nxt
            self._teichmuller[key] = xi
        return self._teichmuller[key]

    def teichmuller_lift(self, residue: ThetaPoly) -> "PadicElement":
        return self.scalar(self.teichmuller(residue))

    @property
    def zeta0(self) -> int:
        return prime_roots(self.P)[0]

    def _residue_table(self) -> Dict[int, ThetaPoly]:
        """h(zeta_0) -> h for every h of degree < d"""
        F, ext = self.field, self.ext
        table = {}
        for coeffs in product(F.base_elements, repeat=self.d):
            h = ThetaPoly(F, coeffs)
            table[h.embed(ext).evaluate(self.zeta0)] = h
        return table

    def iota(self, y: int) -> ThetaPoly:
        """Embedding F_{q^d} -> A/P^M with zeta_0 -> Teichmueller lift of theta"""
        if y not in self._iota:
            if self._table is None:
                self._table = self._residue_table()
            h = self._table[y]
            self._iota[y] = h.compose_mod(self.teichmuller(ThetaPoly.theta(self.field)), self.PM)
        return self._iota[y]

    def embed(self, value: CyclotomicElement, prec: Optional[int] = None) -> "PadicElement":
        """Map an element of F[theta][x]/Phi_P (F = F_q or F_{q^d}) into R_M"""
        if value.ring.P != self.P:
            raise ContextMismatch("element has a different conductor", conductor=str(value.ring.P), P=str(self.P))
        F = self.field
        coeffs = []
        for c in value.c:
            if c.field == F:
                coeffs.append(c)
                continue
            acc = ThetaPoly.zero(F)
            for k, y in enumerate(c.c):
                if y:
                    acc = acc + self.iota(y).shift(k)
            coeffs.append(acc % self.PM)
        return self.element(coeffs, prec)

    def character_value(self, chi: DirichletCharacter, a: ThetaPoly) -> ThetaPoly:
        """Teichmueller character value iota(chi(a)) mod P^M"""
        return self.iota(chi.value(a))

    def residues(self) -> List[ThetaPoly]:
        """Nonzero residues mod P (degree < d)"""
        F = self.field
        return [ThetaPoly(F, c) for c in product(F.base_elements, repeat=self.d) if any(c)]


# ==================== ELEMENTS ====================


class PadicElement:
    """Element of R_M known modulo P^prec (prec <= M)"""

    __slots__ = ("ctx", "value", "prec")

    def __init__(self, ctx: PadicContext, value: CyclotomicElement, prec: int):
        self.ctx = ctx
        self.value = value
        self.prec = prec

    def _check(self, other: "PadicElement") -> None:
        if other.ctx != self.ctx:
            raise ContextMismatch("P-adic values from different contexts", left=repr(self.ctx), right=repr(other.ctx))

    def __add__(self, other):
        self._check(other)
        return PadicElement(self.ctx, self.value + other.value, min(self.prec, other.prec))

    def __neg__(self):
        return PadicElement(self.ctx, -self.value, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (ThetaPoly, int)):
            return self.scale(other)
        self._check(other)
        return PadicElement(self.ctx, self.value * other.value, min(self.prec, other.prec))

    def scale(self, c: Union[ThetaPoly, int]) -> "PadicElement":
        return PadicElement(self.ctx, self.value.scale(c), self.prec)

    def __pow__(self, n: int):
        result = self.ctx.one
        for _ in range(n):
            result = result * self
        return result

    def frobenius(self, j: int = 1) -> "PadicElement":
        """y -> y^{q^j}"""
        value = self.value
        for _ in range(j):
            value = value.sigma()
        return PadicElement(self.ctx, value, min(self.ctx.M, self.prec * self.ctx.q ** j))

    def galois(self, b: ThetaPoly) -> "PadicElement":
        """mu_b: lambda_P -> C_b(lambda_P)"""
        return PadicElement(self.ctx, self.value.galois(b), self.prec)

    def divide_P(self, e: int) -> "PadicElement":
        """Exact division by P^e, losing e digits"""
        if e == 0:
            return self
        Pe = self.ctx.P ** e
        coeffs = [c.exact_div(Pe) for c in self.value.c]
        return PadicElement(self.ctx, self.ctx.ring.element(coeffs), self.prec - e)

    # ---------- valuation ----------

    def coefficient_valuations(self) -> List[Optional[int]]:
        """v_P of each x^i coefficient, None when it vanishes mod P^prec"""
        out = []
        for c in self.value.c:
            v = c.valuation_at(self.ctx.P) if c else float("inf")
            out.append(None if v >= self.prec else int(v))
        return out

    @property
    def is_zero(self) -> bool:
        return all(v is None for v in self.coefficient_valuations())

    @property
    def valuation(self) -> Fraction:
        """min_i v_P(c_i) + i/(q^d-1), capped at prec"""
        best = Fraction(self.prec)
        for i, v in enumerate(self.coefficient_valuations()):
            if v is not None:
                best = min(best, v + Fraction(i, self.ctx.D))
        return best

    def agrees_with(self, other: "PadicElement") -> bool:
        return (self - other).is_zero

    def scalar_value(self) -> ThetaPoly:
        """The x^0 coefficient (the whole value for elements of A/P^M)"""
        return self.value.coeff(0)

    def truncated(self, ctx: PadicContext) -> "PadicElement":
        """Re-read in a context of lower precision"""
        if ctx.P != self.ctx.P or ctx.M > self.ctx.M:
            raise ContextMismatch("can only truncate to a coarser context", source=repr(self.ctx), target=repr(ctx))
        return ctx.element([c % ctx.PM for c in self.value.c], min(self.prec, ctx.M))

    def __str__(self):
        return str(self.value)

    def __repr__(self):
        return f"PadicElement({self}, prec={self.prec})"


# ==================== CARLITZ LOGARITHM ====================


@lru_cache(maxsize=None)
def _ell_data(P: ThetaPoly, j: int, M: int) -> Tuple[int, ThetaPoly]:
    """(e, u^{-1} mod P^M) with l_j = P^e * u"""
    ell = carlitz_ell(P.field, j)
    e = int(ell.valuation_at(P))
    unit = ell.exact_div(P ** e) if e else ell
    return e, unit.inverse_mod(P ** M)


def ell_valuation_audit(P: ThetaPoly, J: int) -> List[Tuple[int, int, int]]:
    """(j, v_P(1/l_j), -floor(j/d)) for j <= J"""
    d = P.degree
    return [(j, -int(carlitz_ell(P.field, j).valuation_at(P)), -(j // d)) for j in range(J + 1)]


def log_carlitz_padic(y: PadicElement) -> PadicElement:
    """
    log_C(y) = sum_j y^{q^j} / l_j for v_P(y) > 0.

    Terms stop once q^j v - v_P(l_j) >= M and the bound is increasing; the result is known modulo
    P^{M - max_j v_P(l_j)} at best.
    """
    ctx = y.ctx
    if y.is_zero:
        return PadicElement(ctx, ctx.ring.zero, y.prec)
    v = y.valuation
    if v <= 0:
        raise NonPositiveValuation("the P-adic logarithm needs v_P(y) > 0", valuation=str(v))
    q, M = ctx.q, ctx.M
    total: Optional[PadicElement] = None
    power = y
    j = 0
    while True:
        e, unit_inv = _ell_data(ctx.P, j, M)
        term = power.scale(unit_inv).divide_P(e)
        total = term if total is None else total + term
        bound = q ** j * v - e
        if bound >= M and q ** j * v * (q - 1) >= 1:
            break
        power = power.frobenius(1)
        j += 1
    logger.debug("P-adic log used %d terms, precision %d", j + 1, total.prec)
    return total


# ==================== DIRECT L-VALUES ====================


@lru_cache(maxsize=None)
def _block_table(P: ThetaPoly, M: int, k: int) -> Tuple[Tuple[Tuple[int, ...], ThetaPoly], ...]:
    """
    V_k(c) = sum_{a in A+,k, a = c mod P} a^{-1} mod P^M for every residue c with a nonzero value.

    For k >= d, a = c + P*b with b in A+,{k-d}, and (c + Pb)^{-1} = sum_i (-P)^i c^{-1-i} b^i.
    """
    F = P.field
    d = P.degree
    PM = P ** M
    if k < d:
        return tuple((a.c, a.inverse_mod(PM)) for a in MonicEnumerator(F, k))
    m = k - d
    sums = [power_sum(F, m, i) % PM for i in range(M)]
    if not any(sums):
        return ()
    minus_P = -P
    out = []
    for coeffs in product(F.base_elements, repeat=d):
        if not any(coeffs):
            continue
        c = ThetaPoly(F, coeffs)
        c_inv = c.inverse_mod(PM)
        acc = ThetaPoly.zero(F)
        factor = c_inv
        for i in range(M):
            if sums[i]:
                acc = acc + factor * sums[i]
            factor = (factor * c_inv * minus_P) % PM
        acc = acc % PM
        if acc:
            out.append((c.c, acc))
    return tuple(out)


def certified_block_end(P: ThetaPoly, M: int) -> int:
    """Blocks of degree above this vanish mod P^M"""
    q = P.field.q
    return P.degree + max(power_sum_bound(i, q) for i in range(M))


@dataclass
class LpDirectResult:
    value: PadicElement
    blocks: int
    zero_run: int
    certified_end: int


def lp_direct_sum(chi: DirichletCharacter, ctx: PadicContext, derivative: bool = False) -> LpDirectResult:
    """
    sum_k w_k sum_{a in A+,k} chi(a)/a mod P^M with w_k = 1, or k for the z-derivative at 1.

    Summation stops after the certified end once d + stabilization_extra consecutive blocks vanish.
    """
    if chi.P != ctx.P:
        raise ContextMismatch("character conductor differs from the context prime", chi=str(chi), P=str(ctx.P))
    settings = get_settings()
    F = ctx.field
    need = ctx.d + settings.stabilization_extra
    end = certified_block_end(ctx.P, ctx.M)
    total = ThetaPoly.zero(F)
    zero_run = 0
    k = 0
    while True:
        if k >= settings.block_budget:
            raise NonConvergent(f"no stabilization within {settings.block_budget} blocks",
                                blocks=k, zero_run=zero_run, character=str(chi))
        weight = k % F.p if derivative else 1
        block = ThetaPoly.zero(F)
        if weight:
            for coeffs, v in _block_table(ctx.P, ctx.M, k):
                block = block + ctx.character_value(chi, ThetaPoly(F, coeffs)) * v
            block = (block % ctx.PM).scale(weight)
        if block:
            total = total + block
            zero_run = 0
        else:
            zero_run += 1
        k += 1
        if k > end and zero_run >= need:
            break
    logger.debug("direct L_P summed %d blocks (certified end %d)", k, end)
    return LpDirectResult(value=ctx.scalar(total % ctx.PM), blocks=k, zero_run=zero_run, certified_end=end)


def lp_direct(chi: DirichletCharacter, ctx: PadicContext, derivative: bool = False) -> PadicElement:
    return lp_direct_sum(chi, ctx, derivative).value


# ==================== L-VALUES THROUGH UNITS ====================


@dataclass
class LpUnitsResult:
    case: int
    galois_sum: PadicElement
    gauss: PadicElement
    value: Optional[PadicElement]

    @property
    def valuation(self) -> Fraction:
        return self.galois_sum.valuation

    @property
    def effective_precision(self) -> int:
        return self.galois_sum.prec


def _galois_sum(chi: DirichletCharacter, ctx: PadicContext, Y: PadicElement,
                representatives: Optional[Sequence[ThetaPoly]]) -> PadicElement:
    """(1/|Delta|) sum_b chi(b)^{-1} mu_b(log Y), with 1/|Delta| = -1"""
    ext = ctx.ext
    log_y = log_carlitz_padic(Y)
    reps = representatives if representatives is not None else ctx.residues()
    total = PadicElement(ctx, ctx.ring.zero, log_y.prec)
    for b in reps:
        weight = ctx.iota(ext.inv(chi.value(b)))
        total = total + log_y.galois(b).scale(weight)
    return -total


def _read_off(G: PadicElement, g: PadicElement) -> Optional[PadicElement]:
    """L with G = g*L for a scalar L, read at the coefficient where g has least valuation"""
    ctx = G.ctx
    candidates = [(v, i) for i, v in enumerate(g.coefficient_valuations()) if v is not None]
    if not candidates:
        return None
    e, i = min(candidates)
    Pe = ctx.P ** e
    g_i = g.value.coeff(i)
    G_i = G.value.coeff(i)
    if G_i % Pe:
        return None
    unit_inv = g_i.exact_div(Pe).inverse_mod(ctx.PM)
    value = (G_i.exact_div(Pe) * unit_inv) % ctx.PM
    return ctx.scalar(value, G.prec - e)


def _units_once(chi: DirichletCharacter, ctx: PadicContext,
                representatives: Optional[Sequence[ThetaPoly]], guard: Optional[int]) -> LpUnitsResult:
    F = ctx.field
    if chi.is_odd and chi.type == 1:
        case = 3
        Y = ctx.lam ** ctx.q
    elif chi.is_odd:
        case = 2
        Y = ctx.embed(orbit_unit(chi, derivative=True, guard=guard))
    else:
        case = 1
        Y = ctx.embed(orbit_unit(chi, derivative=False, guard=guard))
    G = _galois_sum(chi, ctx, Y, representatives)
    if case == 3:
        delta = (ThetaPoly.theta(F) - ctx.iota(chi.value(ThetaPoly.theta(F)))) % ctx.PM
        e = int(delta.valuation_at(ctx.P))
        unit_inv = delta.exact_div(ctx.P ** e).inverse_mod(ctx.PM)
        G = G.scale(unit_inv).divide_P(e)
    gauss = ctx.embed(gauss_thakur_char(chi, CyclotomicRing(chi.P, chi.ext)))
    return LpUnitsResult(case=case, galois_sum=G, gauss=gauss, value=_read_off(G, gauss))


def lp_via_units(chi: DirichletCharacter, ctx: PadicContext,
                 representatives: Optional[Sequence[ThetaPoly]] = None,
                 guard: Optional[int] = None) -> LpUnitsResult:
    """
    g(chi) * L_P(1, chi) (even chi) or g(chi) * L_P^(1)(1, chi) (odd chi) from the logarithm of units.

    A run that loses precision is repeated once at a higher M and read back in ctx.
    """
    if chi.P != ctx.P:
        raise ContextMismatch("character conductor differs from the context prime", chi=str(chi), P=str(ctx.P))
    result = _units_once(chi, ctx, representatives, guard)
    lost = ctx.M - result.effective_precision
    if lost <= 0:
        return result
    logger.debug("units route lost %d digits; rerunning at M=%d", lost, ctx.M + lost)
    wide = _units_once(chi, ctx.with_precision(ctx.M + lost), representatives, guard)
    return LpUnitsResult(
        case=wide.case,
        galois_sum=wide.galois_sum.truncated(ctx),
        gauss=wide.gauss.truncated(ctx),
        value=wide.value.truncated(ctx) if wide.value is not None else None,
    )


def routes_agree(direct: PadicElement, units: LpUnitsResult) -> bool:
    """iota(g(chi)) * L_direct against the Galois sum, modulo the smaller precision"""
    lhs = units.gauss * direct
    return lhs.agrees_with(units.galois_sum)
