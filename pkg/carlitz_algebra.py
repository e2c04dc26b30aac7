#!/usr/bin/env python3
"""
Carlitz Toolkit - Exact Algebra
Finite fields, A = F_q[theta] and its fractions, multivariate coefficient rings, the polynomial grammar,
monic enumeration and Fitting generators of theta-actions
"""

import re
from functools import lru_cache
from itertools import product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from sympy import Symbol, factorint, isprime, primefactors
from sympy.polys.domains import GF, ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_mul, gf_rem, gf_strip
from sympy.polys.matrices import DomainMatrix

from carlitz_errors import (
    ContextMismatch,
    ExponentOverflow,
    IntegralityViolation,
    NonSquare,
    NotAUnit,
    NotIrreducible,
    NotPrime,
    ParseError,
)

# ==================== PRIME FIELD HELPERS ====================
# Base-p encodings of residues; polynomial arithmetic over F_p goes through sympy's galoistools,
# whose dense lists are high degree first.


def _digits(n: int, p: int, k: int) -> List[int]:
    out = []
    for _ in range(k):
        n, r = divmod(n, p)
        out.append(r)
    return out


def _undigits(ds: Sequence[int], p: int) -> int:
    n = 0
    for c in reversed(ds):
        n = n * p + int(c)
    return n


def _gf_dense(coeffs: Sequence[int], p: int) -> List[int]:
    """Low-degree-first coefficients as a stripped galoistools list"""
    return gf_strip([ZZ(c % p) for c in reversed(coeffs)])


def is_irreducible_mod_p(coeffs: Sequence[int], p: int) -> bool:
    f = _gf_dense(coeffs, p)
    if len(f) < 2:
        return False
    return bool(gf_irreducible_p(f, p, ZZ))


@lru_cache(maxsize=None)
def smallest_irreducible(p: int, k: int) -> Tuple[int, ...]:
    """Monic irreducible of degree k with the smallest base-p encoding (constant term least significant)"""
    for enc in range(p ** k):
        coeffs = _digits(enc, p, k) + [1]
        if gf_irreducible_p([ZZ(c) for c in reversed(coeffs)], p, ZZ):
            return tuple(coeffs)
    raise NotIrreducible(f"no irreducible of degree {k} over F_{p}", p=p, k=k)


# ==================== FINITE FIELDS ====================


class FiniteField:
    """
    F_{p^k} with elements encoded as ints (base-p digits of the residue polynomial in u).

    For tower fields built by make_field, q is the order of the base field F_q, d the tower degree and
    base_elements[i] the encoding of the base element i.
    """

    _ADD_TABLE_LIMIT = 729

    def __init__(self, p: int, k: int = 1, modulus: Optional[Sequence[int]] = None):
        if not isprime(p):
            raise NotPrime(f"{p} is not prime", p=p)
        if k < 1:
            raise ValueError("extension degree must be >= 1")
        self.p, self.k = p, k
        self.order = p ** k
        if modulus is None:
            modulus = smallest_irreducible(p, k)
        elif len(modulus) != k + 1 or not is_irreducible_mod_p(modulus, p):
            raise NotIrreducible("modulus is not an irreducible of the right degree", modulus=list(modulus))
        self.modulus = tuple(modulus)
        self.q, self.e, self.d = self.order, k, 1
        self.base = self
        self.base_elements: List[int] = list(range(self.order))
        self.tower_modulus: Optional[Tuple[int, ...]] = None
        self._to_base: Optional[Dict[int, int]] = None
        self._build_tables()

    # ---------- construction ----------

    def _raw_mul(self, a: int, b: int) -> int:
        p, k = self.p, self.k
        prod = gf_mul(_gf_dense(_digits(a, p, k), p), _gf_dense(_digits(b, p, k), p), p, ZZ)
        res = gf_rem(prod, _gf_dense(self.modulus, p), p, ZZ)
        return _undigits(res[::-1], p)

    def _build_tables(self) -> None:
        p, order = self.p, self.order
        m1 = order - 1
        if self.k == 1:
            step = lambda x, g: x * g % p
        else:
            step = self._raw_mul
        gen = 1
        exp = [1]
        for g in range(2 if order > 2 else 1, order):
            exp = [1]
            x = g
            while x != 1:
                exp.append(x)
                x = step(x, g)
            if len(exp) == m1:
                gen = g
                break
        self.primitive = gen
        log = [0] * order
        for i, x in enumerate(exp):
            log[x] = i
        self._exp = exp + exp
        self._log = log

        if p == 2:
            self.add = self.sub = lambda a, b: a ^ b
            self.neg = lambda a: a
        elif self.k == 1:
            self.add = lambda a, b: (a + b) % p
            self.sub = lambda a, b: (a - b) % p
            self.neg = lambda a: (-a) % p
        else:
            dig = [_digits(i, p, self.k) for i in range(order)]
            weights = [p ** i for i in range(self.k)]

            def add_slow(a, b):
                return sum(((x + y) % p) * w for x, y, w in zip(dig[a], dig[b], weights))

            def sub_slow(a, b):
                return sum(((x - y) % p) * w for x, y, w in zip(dig[a], dig[b], weights))

            negs = [sum(((-x) % p) * w for x, w in zip(dig[a], weights)) for a in range(order)]
            self.neg = negs.__getitem__
            if order <= self._ADD_TABLE_LIMIT:
                table = [[add_slow(a, b) for b in range(order)] for a in range(order)]
                self.add = lambda a, b: table[a][b]
                self.sub = lambda a, b: table[a][negs[b]]
            else:
                self.add, self.sub = add_slow, sub_slow

        if self.k == 1:
            self.mul = lambda a, b: a * b % p
        else:
            e2, lg = self._exp, self._log

            def mul(a, b):
                if not a or not b:
                    return 0
                return e2[lg[a] + lg[b]]

            self.mul = mul
        self._m1 = m1

    def _attach_base(self, base: "FiniteField") -> None:
        """Embed base into self through the smallest root of base.modulus"""
        d, rem = divmod(self.k, base.k)
        if rem or base.p != self.p:
            raise ContextMismatch("base field does not embed", base=str(base), field=str(self))
        root = next(r for r in range(self.order) if self._eval_int_poly(base.modulus, r) == 0) if base.k > 1 else 0
        images = []
        for i in range(base.order):
            acc = 0
            for c in reversed(_digits(i, base.p, base.k)):
                acc = self.add(self.mul(acc, root), c)
            images.append(acc)
        self.base = base
        self.q, self.e, self.d = base.order, base.k, d
        self.base_elements = images
        self._to_base = {img: i for i, img in enumerate(images)}
        # minimal polynomial of u over F_q
        u = self.generator
        mp = [1]
        for j in range(d):
            root_j = self.frob(u, j)
            shifted = [0] + mp
            for i, c in enumerate(mp):
                shifted[i] = self.sub(shifted[i], self.mul(root_j, c))
            mp = shifted
        self.tower_modulus = tuple(self._to_base[c] for c in mp)

    def _eval_int_poly(self, coeffs: Sequence[int], x: int) -> int:
        acc = 0
        for c in reversed(coeffs):
            acc = self.add(self.mul(acc, x), c % self.p)
        return acc

    # ---------- arithmetic ----------

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in finite field")
        return self._exp[(self._m1 - self._log[a]) % self._m1]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n == 0:
            return 1
        if a == 0:
            if n < 0:
                raise ZeroDivisionError("negative power of 0")
            return 0
        return self._exp[(self._log[a] * n) % self._m1]

    def frob(self, a: int, s: int = 1) -> int:
        """a -> a^{q^s}; the identity on F_q"""
        if self.d == 1 or a == 0:
            return a
        return self._exp[(self._log[a] * pow(self.q, s, self._m1)) % self._m1]

    def to_base(self, a: int) -> int:
        if self._to_base is None:
            return a
        try:
            return self._to_base[a]
        except KeyError:
            raise ContextMismatch("element does not lie in the base field", element=self.format(a)) from None

    def in_base(self, a: int) -> bool:
        return self._to_base is None or a in self._to_base

    @property
    def generator(self) -> int:
        """The class of u (only meaningful for k > 1)"""
        return self.p if self.k > 1 else 0

    def roots(self, coeffs: Sequence[int]) -> List[int]:
        """Roots (ascending encoding) of a polynomial with coefficients in this field"""
        out = []
        for x in range(self.order):
            acc = 0
            for c in reversed(coeffs):
                acc = self.add(self.mul(acc, x), c)
            if acc == 0:
                out.append(x)
        return out

    # ---------- text ----------

    def format(self, a: int) -> str:
        if a < self.p:
            return str(a)
        terms = []
        ds = _digits(a, self.p, self.k)
        for i in range(self.k - 1, -1, -1):
            c = ds[i]
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                mono = "u" if i == 1 else f"u^{i}"
                terms.append(mono if c == 1 else f"{c}*{mono}")
        return "+".join(terms)

    def parse(self, text: str) -> int:
        return parse_poly(text, PolyRing(self, ())).constant_value()

    def _key(self):
        return (self.p, self.k, self.modulus, self.q)

    def __eq__(self, other):
        return self is other or (isinstance(other, FiniteField) and self._key() == other._key())

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.d > 1:
            return f"F_{self.q}^{self.d}"
        return f"F_{self.order}"


@lru_cache(maxsize=None)
def make_field(p: int, e: int = 1, d: int = 1) -> FiniteField:
    """
    Deterministic field context F_{q^d} with q = p^e.

    Args:
        p: characteristic
        e: degree of F_q over F_p
        d: tower degree over F_q

    Returns:
        F_q itself when d = 1, otherwise F_{p^{ed}} carrying its embedded F_q
    """
    if not isprime(p):
        raise NotPrime(f"{p} is not prime", p=p)
    if e < 1 or d < 1:
        raise ValueError("degrees must be >= 1")
    base = FiniteField(p, e)
    if d == 1:
        return base
    ext = FiniteField(p, e * d)
    ext._attach_base(base)
    return ext


def field_for_q(q: int) -> FiniteField:
    """F_q for a prime power q"""
    factors = factorint(q) if q > 1 else {}
    if len(factors) != 1:
        raise NotPrime(f"{q} is not a prime power", q=q)
    (p, e), = factors.items()
    return make_field(p, e, 1)


def extension_of(field: FiniteField, d: int) -> FiniteField:
    base = field.base
    return make_field(base.p, base.k, d)


# ==================== UNIVARIATE POLYNOMIALS IN THETA ====================


def _trim(c: List[int]) -> Tuple[int, ...]:
    n = len(c)
    while n and not c[n - 1]:
        n -= 1
    return tuple(c[:n])


def _mul_kernel(F: FiniteField, a: Sequence[int], b: Sequence[int]) -> List[int]:
    if not a or not b:
        return []
    res = [0] * (len(a) + len(b) - 1)
    nb = [(j, y) for j, y in enumerate(b) if y]
    if F.k == 1:
        p = F.p
        for i, x in enumerate(a):
            if x:
                for j, y in nb:
                    res[i + j] += x * y
        return [c % p for c in res]
    add, mul = F.add, F.mul
    for i, x in enumerate(a):
        if x:
            for j, y in nb:
                res[i + j] = add(res[i + j], mul(x, y))
    return res


def _divmod_kernel(F: FiniteField, a: Sequence[int], b: Sequence[int]) -> Tuple[List[int], List[int]]:
    db = len(b) - 1
    if db < 0:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) - 1 < db:
        return [], list(a)
    r = list(a)
    qt = [0] * (len(a) - db)
    inv_lead = F.inv(b[-1])
    nz = [(j, c) for j, c in enumerate(b[:-1]) if c]
    if F.k == 1:
        p = F.p
        for i in range(len(a) - 1, db - 1, -1):
            coef = r[i] % p
            if not coef:
                continue
            coef = coef * inv_lead % p
            k = i - db
            qt[k] = coef
            for j, c in nz:
                r[k + j] -= coef * c
        return qt, [x % p for x in r[:db]]
    sub, mul = F.sub, F.mul
    for i in range(len(a) - 1, db - 1, -1):
        coef = r[i]
        if not coef:
            continue
        coef = mul(coef, inv_lead)
        k = i - db
        qt[k] = coef
        for j, c in nz:
            r[k + j] = sub(r[k + j], mul(coef, c))
    return qt, r[:db]


class ThetaPoly:
    """Element of F[theta] for a finite field F; deg(0) is the sentinel -1"""

    __slots__ = ("field", "c")

    def __init__(self, field: FiniteField, coeffs: Sequence[int] = ()):
        self.field = field
        self.c = _trim(list(coeffs))

    # ---------- constructors ----------

    @classmethod
    def zero(cls, field: FiniteField) -> "ThetaPoly":
        return cls(field)

    @classmethod
    def one(cls, field: FiniteField) -> "ThetaPoly":
        return cls(field, (1,))

    @classmethod
    def theta(cls, field: FiniteField) -> "ThetaPoly":
        return cls(field, (0, 1))

    @classmethod
    def const(cls, field: FiniteField, a: int) -> "ThetaPoly":
        return cls(field, (a,))

    @classmethod
    def monomial(cls, field: FiniteField, k: int, a: int = 1) -> "ThetaPoly":
        return cls(field, [0] * k + [a])

    @classmethod
    def parse(cls, text: str, field: FiniteField) -> "ThetaPoly":
        return parse_poly(text, PolyRing(field, ("T",))).to_theta()

    # ---------- structure ----------

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    @property
    def leading(self) -> int:
        return self.c[-1] if self.c else 0

    @property
    def is_zero(self) -> bool:
        return not self.c

    @property
    def is_monic(self) -> bool:
        return bool(self.c) and self.c[-1] == 1

    @property
    def is_constant(self) -> bool:
        return len(self.c) <= 1

    def coeff(self, i: int) -> int:
        return self.c[i] if 0 <= i < len(self.c) else 0

    def __bool__(self):
        return bool(self.c)

    def _check(self, other: "ThetaPoly") -> None:
        if other.field is not self.field and other.field != self.field:
            raise ContextMismatch("polynomials over different fields", left=str(self.field), right=str(other.field))

    def _coerce(self, other) -> "ThetaPoly":
        if isinstance(other, ThetaPoly):
            self._check(other)
            return other
        if isinstance(other, int):
            return ThetaPoly(self.field, (other % self.field.p,))
        return NotImplemented

    # ---------- ring operations ----------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.field
        a, b = (self.c, other.c) if len(self.c) >= len(other.c) else (other.c, self.c)
        res = list(a)
        add = F.add
        for i, x in enumerate(b):
            if x:
                res[i] = add(res[i], x)
        return ThetaPoly(F, res)

    __radd__ = __add__

    def __neg__(self):
        return ThetaPoly(self.field, [self.field.neg(x) for x in self.c])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.field
        n = max(len(self.c), len(other.c))
        res = list(self.c) + [0] * (n - len(self.c))
        sub = F.sub
        for i, x in enumerate(other.c):
            if x:
                res[i] = sub(res[i], x)
        return ThetaPoly(F, res)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ThetaPoly(self.field, _mul_kernel(self.field, self.c, other.c))

    __rmul__ = __mul__

    def scale(self, a: int) -> "ThetaPoly":
        mul = self.field.mul
        return ThetaPoly(self.field, [mul(a, x) for x in self.c])

    def shift(self, k: int) -> "ThetaPoly":
        """Multiply by theta^k"""
        if not self.c:
            return self
        return ThetaPoly(self.field, [0] * k + list(self.c))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result, base = ThetaPoly.one(self.field), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        qt, r = _divmod_kernel(self.field, self.c, other.c)
        return ThetaPoly(self.field, qt), ThetaPoly(self.field, r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other: "ThetaPoly") -> "ThetaPoly":
        qt, r = divmod(self, other)
        if r:
            raise IntegralityViolation("division is not exact", numerator=str(self), denominator=str(other))
        return qt

    def monic(self) -> "ThetaPoly":
        if not self.c or self.c[-1] == 1:
            return self
        return self.scale(self.field.inv(self.c[-1]))

    def gcd(self, other: "ThetaPoly") -> "ThetaPoly":
        a, b = self, other
        while b:
            a, b = b, a % b
        return a.monic()

    def xgcd(self, other: "ThetaPoly") -> Tuple["ThetaPoly", "ThetaPoly", "ThetaPoly"]:
        """(g, s, t) with s*self + t*other = g monic"""
        F = self.field
        r0, r1 = self, other
        s0, s1 = ThetaPoly.one(F), ThetaPoly.zero(F)
        t0, t1 = ThetaPoly.zero(F), ThetaPoly.one(F)
        while r1:
            qt, r = divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - qt * s1
            t0, t1 = t1, t0 - qt * t1
        if not r0:
            return r0, s0, t0
        inv = F.inv(r0.leading)
        return r0.scale(inv), s0.scale(inv), t0.scale(inv)

    def inverse_mod(self, modulus: "ThetaPoly") -> "ThetaPoly":
        g, s, _ = self.xgcd(modulus)
        if g.degree != 0:
            raise NotAUnit("not invertible modulo the given polynomial", element=str(self), modulus=str(modulus))
        return s % modulus

    def powmod(self, n: int, modulus: "ThetaPoly") -> "ThetaPoly":
        result = ThetaPoly.one(self.field) % modulus
        base = self % modulus
        while n:
            if n & 1:
                result = (result * base) % modulus
            n >>= 1
            if n:
                base = (base * base) % modulus
        return result

    # ---------- Frobenius and evaluation ----------

    def frobenius(self, j: int = 1) -> "ThetaPoly":
        """tau^j: theta -> theta^{q^j} and coefficients raised to q^j"""
        if j == 0 or not self.c:
            return self
        F = self.field
        Q = F.q ** j
        res = [0] * ((len(self.c) - 1) * Q + 1)
        for i, x in enumerate(self.c):
            if x:
                res[i * Q] = F.frob(x, j)
        return ThetaPoly(F, res)

    def stretch(self, k: int) -> "ThetaPoly":
        """theta -> theta^k with constants fixed"""
        if k == 1 or len(self.c) <= 1:
            return self
        res = [0] * ((len(self.c) - 1) * k + 1)
        for i, x in enumerate(self.c):
            res[i * k] = x
        return ThetaPoly(self.field, res)

    def coeff_frobenius(self, j: int = 1) -> "ThetaPoly":
        """Frobenius on the constant field only"""
        if self.field.d == 1:
            return self
        F = self.field
        return ThetaPoly(F, [F.frob(x, j) for x in self.c])

    def evaluate(self, x: int) -> int:
        F = self.field
        acc = 0
        for c in reversed(self.c):
            acc = F.add(F.mul(acc, x), c)
        return acc

    def compose_mod(self, value: "ThetaPoly", modulus: "ThetaPoly") -> "ThetaPoly":
        """self(value) mod modulus"""
        acc = ThetaPoly.zero(self.field)
        for c in reversed(self.c):
            acc = (acc * value + ThetaPoly.const(self.field, c)) % modulus
        return acc

    def embed(self, ext: FiniteField) -> "ThetaPoly":
        if ext is self.field:
            return self
        if ext.base != self.field:
            raise ContextMismatch("cannot embed", field=str(self.field), target=str(ext))
        images = ext.base_elements
        return ThetaPoly(ext, [images[x] for x in self.c])

    def to_base(self) -> "ThetaPoly":
        F = self.field
        if F.d == 1:
            return self
        return ThetaPoly(F.base, [F.to_base(x) for x in self.c])

    def valuation_at(self, P: "ThetaPoly") -> float:
        """P-adic valuation (inf for 0)"""
        if not self.c:
            return float("inf")
        v, a = 0, self
        while True:
            qt, r = divmod(a, P)
            if r:
                return v
            v, a = v + 1, qt

    # ---------- identity and text ----------

    def __eq__(self, other):
        if isinstance(other, int):
            return self.c == _trim([other % self.field.p])
        return isinstance(other, ThetaPoly) and self.c == other.c and self.field == other.field

    def __hash__(self):
        return hash((self.field.order, self.c))

    def __str__(self):
        return format_terms(self.field, [((i,), x) for i, x in enumerate(self.c) if x], ("T",))

    def __repr__(self):
        return f"ThetaPoly({self})"


# ==================== FRACTIONS ====================


class ThetaFraction:
    """Element of F(theta): reduced num/den with monic denominator"""

    __slots__ = ("num", "den")

    def __init__(self, num: ThetaPoly, den: Optional[ThetaPoly] = None, reduce: bool = True):
        if den is None:
            den = ThetaPoly.one(num.field)
        if den.is_zero:
            raise ZeroDivisionError("fraction with zero denominator")
        if reduce:
            g = num.gcd(den) if num else den.monic()
            if g.degree > 0:
                num, den = num // g, den // g
            lead = den.leading
            if lead != 1:
                inv = num.field.inv(lead)
                num, den = num.scale(inv), den.scale(inv)
        self.num, self.den = num, den

    @property
    def field(self) -> FiniteField:
        return self.num.field

    @classmethod
    def from_int(cls, field: FiniteField, a: int) -> "ThetaFraction":
        return cls(ThetaPoly.const(field, a % field.p))

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __bool__(self):
        return bool(self.num)

    def _lift(self, other) -> "ThetaFraction":
        if isinstance(other, ThetaFraction):
            return other
        if isinstance(other, ThetaPoly):
            return ThetaFraction(other, reduce=False)
        if isinstance(other, int):
            return ThetaFraction.from_int(self.field, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return ThetaFraction(self.num + other.num, self.den)
        return ThetaFraction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return ThetaFraction(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return ThetaFraction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "ThetaFraction":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero fraction")
        return ThetaFraction(self.den, self.num)

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return ThetaFraction(self.num ** n, self.den ** n, reduce=False)

    def frobenius(self, j: int = 1) -> "ThetaFraction":
        return ThetaFraction(self.num.frobenius(j), self.den.frobenius(j), reduce=False)

    @property
    def valuation(self) -> float:
        """infinity-adic valuation deg den - deg num"""
        if self.is_zero:
            return float("inf")
        return self.den.degree - self.num.degree

    def valuation_at(self, P: ThetaPoly) -> float:
        return self.num.valuation_at(P) - self.den.valuation_at(P)

    def reduce_mod(self, P: ThetaPoly) -> ThetaPoly:
        """Image in A/P; the denominator must be prime to P"""
        return (self.num * self.den.inverse_mod(P)) % P

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return False
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __str__(self):
        if self.den.degree == 0:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"ThetaFraction({self})"


# ==================== MULTIVARIATE COEFFICIENT RINGS ====================

_BITS = 20
_MASK = (1 << _BITS) - 1


class PolyRing:
    """F[v_1, ..., v_k] with named variables; name order is the monomial priority order"""

    def __init__(self, field: FiniteField, names: Sequence[str]):
        self.field = field
        self.names = tuple(names)
        self.index = {nm: i for i, nm in enumerate(self.names)}
        if len(self.index) != len(self.names):
            raise ValueError("duplicate variable names")

    def unpack(self, key: int) -> Tuple[int, ...]:
        return tuple((key >> (_BITS * i)) & _MASK for i in range(len(self.names)))

    def unit_key(self, name: str, e: int = 1) -> int:
        if not 0 <= e <= _MASK:
            raise ExponentOverflow(f"exponent {e} of {name} is outside 0..{_MASK}", variable=name, exponent=e)
        return e << (_BITS * self.index[name])

    def check_sum(self, left: Sequence[int], right: Sequence[int]) -> None:
        """Raise if adding two exponent vectors would carry out of a key field"""
        for nm, x, y in zip(self.names, left, right):
            if x + y > _MASK:
                raise ExponentOverflow(f"exponent {x + y} of {nm} is outside 0..{_MASK}", variable=nm,
                                       exponent=x + y)

    @property
    def zero(self) -> "Poly":
        return Poly(self, {})

    @property
    def one(self) -> "Poly":
        return Poly(self, {0: 1})

    def const(self, a: int) -> "Poly":
        return Poly(self, {0: a} if a else {})

    def var(self, name: str) -> "Poly":
        return Poly(self, {self.unit_key(name): 1})

    def monomial(self, exps: Dict[str, int], a: int = 1) -> "Poly":
        key = 0
        for nm, e in exps.items():
            key += self.unit_key(nm, e)
        return Poly(self, {key: a} if a else {})

    def has(self, name: str) -> bool:
        return name in self.index

    def extend(self, *names: str, front: bool = False) -> "PolyRing":
        extra = tuple(nm for nm in names if nm not in self.index)
        return PolyRing(self.field, extra + self.names if front else self.names + extra)

    def parse(self, text: str) -> "Poly":
        return parse_poly(text, self)

    def __eq__(self, other):
        return self is other or (isinstance(other, PolyRing) and self.names == other.names and self.field == other.field)

    def __hash__(self):
        return hash((self.names, self.field))

    def __repr__(self):
        return f"{self.field!r}[{','.join(self.names)}]"


class Poly:
    """Sparse polynomial: packed exponent key -> nonzero field element"""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: Optional[Dict[int, int]] = None):
        self.ring = ring
        self.terms = {k: v for k, v in terms.items() if v} if terms else {}

    @classmethod
    def _raw(cls, ring: PolyRing, terms: Dict[int, int]) -> "Poly":
        obj = cls.__new__(cls)
        obj.ring, obj.terms = ring, terms
        return obj

    # ---------- structure ----------

    @property
    def field(self) -> FiniteField:
        return self.ring.field

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_value(self) -> int:
        if not self.is_constant:
            raise ValueError(f"not a constant: {self}")
        return self.terms.get(0, 0)

    def degree_in(self, name: str) -> int:
        if name not in self.ring.index:
            return 0 if self.terms else -1
        shift = _BITS * self.ring.index[name]
        return max(((k >> shift) & _MASK for k in self.terms), default=-1)

    def coefficient(self, name: str, e: int) -> "Poly":
        """Coefficient of name^e, as a polynomial in the other variables (same ring)"""
        shift = _BITS * self.ring.index[name]
        out = {}
        for k, v in self.terms.items():
            if (k >> shift) & _MASK == e:
                out[k - (e << shift)] = v
        return Poly._raw(self.ring, out)

    def top_exponents(self) -> Tuple[int, ...]:
        """Largest exponent of each variable"""
        top = [0] * len(self.ring.names)
        for k in self.terms:
            for i, e in enumerate(self.ring.unpack(k)):
                if e > top[i]:
                    top[i] = e
        return tuple(top)

    def items(self) -> Iterator[Tuple[Tuple[int, ...], int]]:
        for k, v in self.terms.items():
            yield self.ring.unpack(k), v

    # ---------- ring operations ----------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ContextMismatch("polynomials over different rings", left=repr(self.ring), right=repr(other.ring))
            return other
        if isinstance(other, int):
            return self.ring.const(other % self.field.p)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            return other + self
        out = dict(self.terms)
        add = self.field.add
        for k, v in other.terms.items():
            s = add(out.get(k, 0), v)
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return Poly._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        neg = self.field.neg
        return Poly._raw(self.ring, {k: neg(v) for k, v in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.terms, other.terms
        if not a or not b:
            return Poly._raw(self.ring, {})
        if len(a) == 1 and 0 in a:
            return other.scale(a[0])
        if len(b) == 1 and 0 in b:
            return self.scale(b[0])
        self.ring.check_sum(self.top_exponents(), other.top_exponents())
        F = self.field
        out: Dict[int, int] = {}
        if F.k == 1:
            p = F.p
            get = out.get
            for ka, va in a.items():
                for kb, vb in b.items():
                    k = ka + kb
                    out[k] = get(k, 0) + va * vb
            return Poly._raw(self.ring, {k: v % p for k, v in out.items() if v % p})
        add, mul = F.add, F.mul
        for ka, va in a.items():
            for kb, vb in b.items():
                k = ka + kb
                out[k] = add(out.get(k, 0), mul(va, vb))
        return Poly._raw(self.ring, {k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def scale(self, a: int) -> "Poly":
        if not a:
            return Poly._raw(self.ring, {})
        if a == 1:
            return self
        mul = self.field.mul
        return Poly._raw(self.ring, {k: mul(a, v) for k, v in self.terms.items()})

    def shift_key(self, key: int) -> "Poly":
        """Multiply by the monomial with packed key"""
        if self.terms:
            self.ring.check_sum(self.top_exponents(), self.ring.unpack(key))
        return Poly._raw(self.ring, {k + key: v for k, v in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result, base = self.ring.one, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # ---------- calculus and substitution ----------

    def derivative(self, name: str) -> "Poly":
        if name not in self.ring.index:
            return self.ring.zero
        shift = _BITS * self.ring.index[name]
        F = self.field
        out = {}
        for k, v in self.terms.items():
            e = (k >> shift) & _MASK
            if e % F.p:
                out[k - (1 << shift)] = F.mul(e % F.p, v)
        return Poly._raw(self.ring, out)

    def evaluate(self, name: str, value: int) -> "Poly":
        """Set one variable to a field constant (same ring)"""
        if name not in self.ring.index:
            return self
        shift = _BITS * self.ring.index[name]
        F = self.field
        out: Dict[int, int] = {}
        for k, v in self.terms.items():
            e = (k >> shift) & _MASK
            nk = k - (e << shift)
            out[nk] = F.add(out.get(nk, 0), F.mul(v, F.pow(value, e)))
        return Poly(self.ring, out)

    def substitute(self, values: Dict[str, Union["Poly", int]], target: Optional[PolyRing] = None) -> "Poly":
        """
        Substitute variables by polynomials of the target ring (or field constants).

        Variables not named in values are carried over by name into the target ring.
        """
        target = target or self.ring
        F = target.field
        cache: Dict[Tuple[str, int], Poly] = {}

        def power(nm: str, e: int) -> Poly:
            key = (nm, e)
            if key not in cache:
                val = values[nm]
                if isinstance(val, int):
                    cache[key] = target.const(F.pow(val, e))
                else:
                    cache[key] = val ** e
            return cache[key]

        result = target.zero
        names = self.ring.names
        for exps, coeff in self.items():
            term_key = 0
            term = None
            for nm, e in zip(names, exps):
                if not e:
                    continue
                if nm in values:
                    pw = power(nm, e)
                    term = pw if term is None else term * pw
                elif nm in target.index:
                    term_key += target.unit_key(nm, e)
                else:
                    raise ContextMismatch(f"variable {nm} missing from target ring", variable=nm)
            mono = Poly._raw(target, {term_key: coeff})
            result = result + (mono if term is None else mono * term)
        return result

    def to_ring(self, target: PolyRing, field_map=None) -> "Poly":
        """Re-express in a ring containing all variables that occur (optionally mapping coefficients)"""
        src = self.ring
        out = {}
        for k, v in self.terms.items():
            nk = 0
            for nm, e in zip(src.names, src.unpack(k)):
                if e:
                    if nm not in target.index:
                        raise ContextMismatch(f"variable {nm} missing from target ring", variable=nm)
                    nk += target.unit_key(nm, e)
            out[nk] = field_map(v) if field_map else v
        return Poly(target, out)

    def permute(self, mapping: Dict[str, str]) -> "Poly":
        ring = self.ring
        out = {}
        for k, v in self.terms.items():
            nk = 0
            for nm, e in zip(ring.names, ring.unpack(k)):
                if e:
                    nk += ring.unit_key(mapping.get(nm, nm), e)
            out[nk] = v
        return Poly._raw(ring, out)

    def divide_linear(self, name: str, c: int) -> "Poly":
        """Exact division by (name - c)"""
        shift = _BITS * self.ring.index[name]
        F = self.field
        groups: Dict[int, Dict[int, int]] = {}
        for k, v in self.terms.items():
            e = (k >> shift) & _MASK
            groups.setdefault(k - (e << shift), {})[e] = v
        out: Dict[int, int] = {}
        for rest, uni in groups.items():
            top = max(uni)
            carry = 0
            for e in range(top, 0, -1):
                carry = F.add(uni.get(e, 0), F.mul(c, carry))
                if carry:
                    out[rest + ((e - 1) << shift)] = carry
            remainder = F.add(uni.get(0, 0), F.mul(c, carry))
            if remainder:
                raise IntegralityViolation(f"not divisible by {name}-{F.format(c)}", poly=str(self))
        return Poly._raw(self.ring, out)

    def map_coefficients(self, fn) -> "Poly":
        return Poly(self.ring, {k: fn(v) for k, v in self.terms.items()})

    # ---------- theta view ----------

    def to_theta(self, name: str = "T") -> ThetaPoly:
        """Univariate view (the ring may contain only `name`)"""
        coeffs: Dict[int, int] = {}
        for exps, v in self.items():
            for nm, e in zip(self.ring.names, exps):
                if e and nm != name:
                    raise ContextMismatch("polynomial involves other variables", variable=nm)
            coeffs[exps[self.ring.index[name]] if name in self.ring.index else 0] = v
        top = max(coeffs, default=-1)
        return ThetaPoly(self.field, [coeffs.get(i, 0) for i in range(top + 1)])

    @classmethod
    def from_theta(cls, ring: PolyRing, a: ThetaPoly, name: str = "T") -> "Poly":
        return cls(ring, {ring.unit_key(name, i): x for i, x in enumerate(a.c) if x})

    # ---------- identity and text ----------

    def sorted_items(self) -> List[Tuple[Tuple[int, ...], int]]:
        """Graded lexicographic order, largest first"""
        return sorted(self.items(), key=lambda it: (sum(it[0]), it[0]), reverse=True)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other % self.field.p)
        return isinstance(other, Poly) and self.terms == other.terms and self.ring == other.ring

    def __hash__(self):
        return hash((self.ring.names, frozenset(self.terms.items())))

    def __str__(self):
        return format_terms(self.field, self.sorted_items(), self.ring.names, presorted=True)

    def __repr__(self):
        return f"Poly({self})"


# ==================== GRAMMAR ====================


def format_terms(field: FiniteField, items, names: Sequence[str], presorted: bool = False) -> str:
    """Render (exponents, coefficient) pairs in the canonical grammar"""
    if not presorted:
        items = sorted(items, key=lambda it: (sum(it[0]), tuple(it[0])), reverse=True)
    parts = []
    for exps, c in items:
        mono = "*".join(nm if e == 1 else f"{nm}^{e}" for nm, e in zip(names, exps) if e)
        cs = field.format(c)
        if c >= field.p:
            cs = f"({cs})"
        if not mono:
            parts.append(cs)
        elif c == 1:
            parts.append(mono)
        else:
            parts.append(f"{cs}*{mono}")
    return "+".join(parts) if parts else "0"


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\S))")


class _Parser:
    def __init__(self, text: str, ring: PolyRing):
        self.ring = ring
        self.tokens: List[Tuple[str, str]] = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"cannot tokenize {text!r}", position=pos)
            pos = m.end()
            if m.group(1):
                self.tokens.append(("int", m.group(1)))
            elif m.group(2):
                self.tokens.append(("name", m.group(2)))
            elif m.group(3):
                self.tokens.append(("op", m.group(3)))
        self.i = 0
        self.text = text

    def peek(self) -> Optional[Tuple[str, str]]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> Tuple[str, str]:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"unexpected end of input in {self.text!r}")
        self.i += 1
        return tok

    def expect(self, op: str) -> None:
        tok = self.take()
        if tok != ("op", op):
            raise ParseError(f"expected {op!r} in {self.text!r}", got=tok[1])

    def parse(self) -> Poly:
        if not self.tokens:
            raise ParseError("empty polynomial")
        value = self.expr()
        if self.peek() is not None:
            raise ParseError(f"trailing input in {self.text!r}", token=self.peek()[1])
        return value

    def expr(self) -> Poly:
        negate = False
        if self.peek() == ("op", "-"):
            self.take()
            negate = True
        value = self.term()
        if negate:
            value = -value
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> Poly:
        value = self.power()
        while self.peek() == ("op", "*"):
            self.take()
            value = value * self.power()
        return value

    def power(self) -> Poly:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, tok = self.take()
            if kind != "int":
                raise ParseError(f"exponent must be a non-negative integer in {self.text!r}", got=tok)
            base = base ** int(tok)
        return base

    def atom(self) -> Poly:
        kind, tok = self.take()
        ring = self.ring
        if kind == "int":
            return ring.const(int(tok) % ring.field.p)
        if kind == "name":
            if tok in ring.index:
                return ring.var(tok)
            if tok == "u" and ring.field.k > 1:
                return ring.const(ring.field.generator)
            raise ParseError(f"unknown variable {tok!r}", allowed=list(ring.names))
        if tok == "(":
            value = self.expr()
            self.expect(")")
            return value
        raise ParseError(f"unexpected {tok!r} in {self.text!r}")


def parse_poly(text: str, ring: PolyRing) -> Poly:
    """Parse the canonical grammar (also accepts '-' and parentheses)"""
    return _Parser(text, ring).parse()


def format_poly(value) -> str:
    return str(value)


# ==================== MONIC ENUMERATION ====================


class MonicEnumerator:
    """The q^d monic polynomials of degree d over F_q, lexicographic in (a_{d-1}, ..., a_0)"""

    def __init__(self, field: FiniteField, degree: int):
        if degree < 0:
            raise ValueError("degree must be >= 0")
        self.field = field
        self.degree = degree

    def __len__(self):
        return self.field.q ** self.degree

    def coefficient_lists(self) -> Iterator[List[int]]:
        """Low-degree-first coefficient lists, leading 1 included"""
        for tail in product(self.field.base_elements, repeat=self.degree):
            out = list(tail[::-1])
            out.append(1)
            yield out

    def __iter__(self) -> Iterator[ThetaPoly]:
        F = self.field
        for coeffs in self.coefficient_lists():
            yield ThetaPoly(F, coeffs)


def enumerate_monic(d: int, field: FiniteField) -> MonicEnumerator:
    return MonicEnumerator(field, d)


@lru_cache(maxsize=None)
def monic_irreducibles(field: FiniteField, d: int) -> Tuple[ThetaPoly, ...]:
    """Monic irreducibles of degree d in enumeration order, by a product sieve"""
    if d < 1:
        return ()
    if d == 1:
        return tuple(MonicEnumerator(field, 1))
    reducible = set()
    for k in range(1, d // 2 + 1):
        for f in monic_irreducibles(field, k):
            for g in MonicEnumerator(field, d - k).coefficient_lists():
                reducible.add(tuple(_mul_kernel(field, f.c, g)))
    return tuple(ThetaPoly(field, c) for c in MonicEnumerator(field, d).coefficient_lists()
                 if tuple(c) not in reducible)


def is_irreducible(P: ThetaPoly) -> bool:
    """Rabin test over the coefficient field"""
    d = P.degree
    if d < 1:
        return False
    F = P.field
    theta = ThetaPoly.theta(F)
    Pm = P.monic()

    def frob_power(k: int) -> ThetaPoly:
        return theta.powmod(F.order ** k, Pm)

    if frob_power(d) != theta % Pm:
        return False
    for r in primefactors(d):
        if (frob_power(d // r) - theta).gcd(Pm).degree > 0:
            return False
    return True


def require_irreducible(P: ThetaPoly) -> None:
    if not P.is_monic or not is_irreducible(P):
        raise NotIrreducible(f"{P} is not monic irreducible", P=str(P))


# ==================== FITTING GENERATORS ====================


def berkowitz_charpoly(matrix: Sequence[Sequence], one, zero) -> List:
    """
    Division-free characteristic polynomial det(X*Id - M).

    Args:
        matrix: square matrix over any commutative ring supporting + - *
        one, zero: ring constants

    Returns:
        Coefficients, highest degree first (leading 1)
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise NonSquare("matrix is not square", rows=n, cols=[len(row) for row in matrix])
    if n == 0:
        return [one]

    def dot(u, v):
        s = zero
        for x, y in zip(u, v):
            s = s + x * y
        return s

    p = [one, -matrix[n - 1][n - 1]]
    for k in range(n - 2, -1, -1):
        m = n - k - 1
        row = [matrix[k][j] for j in range(k + 1, n)]
        col_vec = [matrix[i][k] for i in range(k + 1, n)]
        sub = [r[k + 1:] for r in matrix[k + 1:]]
        toeplitz = [one, -matrix[k][k]]
        v = col_vec
        for step in range(m):
            toeplitz.append(-dot(row, v))
            if step < m - 1:
                v = [dot(r, v) for r in sub]
        new = []
        for i in range(m + 2):
            s = zero
            for j in range(max(0, i - m - 1), min(i, m) + 1):
                s = s + toeplitz[i - j] * p[j]
            new.append(s)
        p = new
    return p


def charpoly(matrix: Sequence[Sequence["Poly"]], ring: PolyRing) -> List["Poly"]:
    """
    det(X*Id - M) for a square matrix of ring elements, highest degree first.

    Over F_p[vars] this is sympy's DomainMatrix.charpoly; F_{p^k} with k > 1 has no sympy domain with our
    element encoding, so those rings go through berkowitz_charpoly.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise NonSquare("matrix is not square", rows=n, cols=[len(row) for row in matrix])
    if n == 0 or ring.field.k > 1:
        return berkowitz_charpoly(matrix, ring.one, ring.zero)

    p = ring.field.p
    dom = GF(p)
    if ring.names:
        dom = dom.poly_ring(*[Symbol(nm) for nm in ring.names])

    def to_dom(x: "Poly"):
        if not ring.names:
            return dom(x.constant_value())
        return dom.ring.from_dict(dict(x.items()))

    def from_dom(c) -> "Poly":
        if not ring.names:
            return ring.const(int(c) % p)
        terms = {}
        for monom, v in c.items():
            key = 0
            for nm, e in zip(ring.names, monom):
                key += ring.unit_key(nm, e)
            terms[key] = int(v) % p
        return Poly(ring, terms)

    dm = DomainMatrix([[to_dom(x) for x in row] for row in matrix], (n, n), dom)
    return [from_dom(c) for c in dm.charpoly()]


def fitting_generator(theta_action: Sequence[Sequence], base: FiniteField):
    """
    [M]_A = det(X*Id - theta_action) at X = theta.

    Entries are field elements (ints) or Poly over a coefficient ring; the result is a ThetaPoly in the first
    case and a Poly in (T, ring variables...) in the second.
    """
    sample = next((x for row in theta_action for x in row if isinstance(x, Poly)), None)
    ring = sample.ring if sample is not None else PolyRing(base, ())
    mat = [[x if isinstance(x, Poly) else ring.const(x) for x in row] for row in theta_action]
    coeffs = charpoly(mat, ring)
    n = len(coeffs) - 1
    if sample is None:
        return ThetaPoly(base, [coeffs[n - i].constant_value() for i in range(n + 1)])
    out_ring = ring.extend("T", front=True)
    result = out_ring.zero
    for i, c in enumerate(coeffs):
        result = result + c.to_ring(out_ring).shift_key(out_ring.unit_key("T", n - i))
    return result


def theta_action_matrix(alphas: Sequence[ThetaPoly], P: ThetaPoly, ring: Optional[PolyRing] = None,
                        var: str = "z") -> List[List]:
    """
    Matrix of x -> sum_j alpha_j z^j x^{q^j} on A/P in the basis 1, theta, ..., theta^{d-1}.

    Without a ring the z-weights are dropped (z = 1) and entries are field elements.
    """
    F = P.field
    d = P.degree
    theta = ThetaPoly.theta(F)
    zero = ring.zero if ring else 0
    mat = [[zero] * d for _ in range(d)]
    for i in range(d):
        for j, a in enumerate(alphas):
            if a.is_zero:
                continue
            img = (theta.powmod(i * F.q ** j, P) * a) % P
            for r, c in enumerate(img.c):
                if not c:
                    continue
                if ring:
                    mat[r][i] = mat[r][i] + ring.monomial({var: j}, c)
                else:
                    mat[r][i] = F.add(mat[r][i], c)
    return mat


def norm_mod(alpha: ThetaPoly, P: ThetaPoly) -> int:
    """det of multiplication by alpha on A/P (the resultant Res(P, alpha) for monic P)"""
    F = P.field
    d = P.degree
    mat = [[0] * d for _ in range(d)]
    theta = ThetaPoly.theta(F)
    for i in range(d):
        img = (theta.powmod(i, P) * alpha) % P
        for r, c in enumerate(img.c):
            mat[r][i] = c
    coeffs = fitting_generator(mat, F)
    const = coeffs.coeff(0)
    return F.neg(const) if d % 2 else const
