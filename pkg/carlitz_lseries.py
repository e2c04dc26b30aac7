#!/usr/bin/env python3
"""
Carlitz Toolkit - L-Series, Characters & Gauss-Thakur Sums
Direct and Euler-product L-series, local Euler factors, Dirichlet characters and cyclotomic function rings
"""

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

from carlitz_algebra import (
    FiniteField,
    MonicEnumerator,
    Poly,
    PolyRing,
    ThetaPoly,
    extension_of,
    fitting_generator,
    monic_irreducibles,
    norm_mod,
    require_irreducible,
    theta_action_matrix,
)
from carlitz_config import get_settings
from carlitz_errors import ArityMismatch, ContextMismatch, NotARoot, ParseError
from carlitz_module import Deformation, DrinfeldModule
from carlitz_series import GradedSeries, series_inv, series_mul

logger = logging.getLogger(__name__)

# ==================== BLOCK SUMS ====================


def inverse_digits(field: FiniteField, coeffs: Sequence[int], length: int) -> List[int]:
    """
    Expansion 1/a = theta^{-d} * sum_k b_k theta^{-k} of a monic a.

    Args:
        coeffs: coefficients of a, low degree first, leading 1 last
        length: number of b_k wanted

    Returns:
        [b_0, ..., b_{length-1}] over the coefficient field
    """
    d = len(coeffs) - 1
    tail = [(i, coeffs[d - i]) for i in range(1, d + 1) if coeffs[d - i]]
    b = [0] * max(length, 0)
    if length <= 0:
        return b
    b[0] = 1
    if field.k == 1:
        p = field.p
        for k in range(1, length):
            s = 0
            for i, c in tail:
                if i > k:
                    break
                s += c * b[k - i]
            b[k] = (-s) % p
        return b
    add, mul, neg = field.add, field.mul, field.neg
    for k in range(1, length):
        s = 0
        for i, c in tail:
            if i > k:
                break
            s = add(s, mul(c, b[k - i]))
        b[k] = neg(s)
    return b


def digit_sum(m: int, q: int) -> int:
    """Sum of the base-q digits of m"""
    total = 0
    while m:
        m, r = divmod(m, q)
        total += r
    return total


def power_sum_bound(m: int, q: int) -> int:
    """Largest degree whose power sum S_d(m) may be nonzero"""
    return digit_sum(m, q) // (q - 1)


@lru_cache(maxsize=None)
def power_sum(field: FiniteField, degree: int, m: int) -> ThetaPoly:
    """S_degree(m) = sum_{a in A+,degree} a^m"""
    total = ThetaPoly.zero(field)
    if m == 0:
        return ThetaPoly.one(field) if degree == 0 else total
    for a in MonicEnumerator(field, degree):
        total = total + a ** m
    return total


def block_valuation_bound(d: int, n: int, q: int) -> int:
    """Lower bound for v_inf of sum_{a in A+,d} a(t_1)...a(t_n)/a"""
    extra = d * (q - 1) - n
    if extra <= 0:
        return d
    losses = [i for i in range(1, d + 1) for _ in range(q - 1)]
    return d + sum(losses[:extra])


def moment_transform(field: FiniteField, values: List[List[int]], d: int) -> List[List[int]]:
    """Per-coordinate transform c -> c^e (0^0 = 1) turning sums over a into sums of prod a_i^{e_i}"""
    q = field.q
    elems = field.base_elements
    matrix = [[1 if e == 0 else (field.pow(c, e) if c else 0) for c in elems] for e in range(q)]
    p, prime = field.p, field.k == 1
    for i in range(d):
        stride = q ** i
        for start in range(len(values)):
            if (start // stride) % q:
                continue
            group = [values[start + c * stride] for c in range(q)]
            for e in range(q):
                row = matrix[e]
                out = [0] * len(group[0])
                for c, vec in enumerate(group):
                    w = row[c]
                    if not w:
                        continue
                    if prime:
                        for k, x in enumerate(vec):
                            if x:
                                out[k] += w * x
                    else:
                        for k, x in enumerate(vec):
                            if x:
                                out[k] = field.add(out[k], field.mul(w, x))
                values[start + e * stride] = [x % p for x in out] if prime else out
    return values


def _symbolic_block(deformation: Deformation, d: int, prec: int) -> Dict[int, Poly]:
    ring = deformation.ring
    F = ring.field
    q = F.q
    length = prec - d
    # index = sum a_i q^i over the lower coefficients of a
    moments = [inverse_digits(F, [(idx // q ** i) % q for i in range(d)] + [1], length)
               for idx in range(q ** d)]
    moments = moment_transform(F, moments, d)

    def inc(e: int) -> int:
        return e + 1 if e < q - 1 else 1

    state: Dict[int, Poly] = {0: ring.one}
    for k in range(deformation.n):
        t = deformation.t_poly(k)
        powers = [ring.one]
        for _ in range(d):
            powers.append(powers[-1] * t)
        nxt: Dict[int, Poly] = {}
        for key, poly in state.items():
            for i in range(d + 1):
                if i == d:
                    nk = key
                else:
                    digit = (key // q ** i) % q
                    nk = key + (inc(digit) - digit) * q ** i
                term = poly * powers[i]
                nxt[nk] = nxt[nk] + term if nk in nxt else term
        state = nxt
    terms: Dict[int, Poly] = {}
    for key, poly in state.items():
        for k, val in enumerate(moments[key]):
            if val:
                piece = poly.scale(val)
                terms[d + k] = terms[d + k] + piece if d + k in terms else piece
    return terms


def _specialized_block(deformation: Deformation, d: int, prec: int) -> Dict[int, Poly]:
    ring = deformation.ring
    F = ring.field
    base = F.base
    length = prec - d
    etas = deformation.t_values
    images = F.base_elements
    groups: Dict[int, List[int]] = {}
    # a is grouped by w(a) = prod_k a(eta_k)
    for coeffs in MonicEnumerator(base, d).coefficient_lists():
        w = 1
        for eta in etas:
            acc = 0
            for c in reversed(coeffs):
                acc = F.add(F.mul(acc, eta), images[c])
            w = F.mul(w, acc)
            if not w:
                break
        if not w:
            continue
        b = inverse_digits(base, coeffs, length)
        if w in groups:
            g = groups[w]
            for k, x in enumerate(b):
                if x:
                    g[k] = base.add(g[k], x)
        else:
            groups[w] = b
    sums = [0] * length
    for w, b in groups.items():
        for k, x in enumerate(b):
            if x:
                sums[k] = F.add(sums[k], F.mul(w, images[x]))
    return {d + k: ring.const(v) for k, v in enumerate(sums) if v}


def lseries_block(deformation: Deformation, d: int, prec: int) -> GradedSeries:
    """z^d * sum_{a in A+,d} a(t_1)...a(t_n)/a to absolute precision prec"""
    ring = deformation.ring
    if d >= prec:
        return GradedSeries.zero(ring, prec)
    symbolic = all(isinstance(t, Poly) for t in deformation.t_values)
    terms = _symbolic_block(deformation, d, prec) if symbolic else _specialized_block(deformation, d, prec)
    block = GradedSeries(ring, terms, prec)
    if deformation.z_symbolic and d:
        block = block.scale(deformation.z_value ** d)
    return block


def lseries_for(deformation: Deformation, prec: int, threads: Optional[int] = None) -> GradedSeries:
    """
    L(phi~/A~) of the deformed Carlitz module by degree-block summation.

    Only blocks whose valuation bound lies below prec are enumerated; blocks run on a thread pool and are
    merged in degree order.
    """
    if prec < 1:
        raise ValueError("precision must be >= 1")
    q, n = deformation.q, deformation.n
    degrees = [d for d in range(prec) if block_valuation_bound(d, n, q) < prec]
    threads = threads or get_settings().threads
    logger.debug("summing %d degree blocks (n=%d, q=%d, prec=%d)", len(degrees), n, q, prec)
    if threads > 1 and len(degrees) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(lambda d: lseries_block(deformation, d, prec), degrees))
    else:
        blocks = [lseries_block(deformation, d, prec) for d in degrees]
    total = GradedSeries.zero(deformation.ring, prec)
    for block in blocks:
        total = total + block
    return total


def lseries_infinity(field: FiniteField, n: int, prec: int, with_z: bool = True,
                     threads: Optional[int] = None) -> GradedSeries:
    """sum_{a in A+} a(t_1)...a(t_n) z^{deg a}/a over F_q[t_1..t_n, z]"""
    return lseries_for(Deformation.symbolic(field, n, with_z), prec, threads)


# ==================== EULER FACTORS ====================


def _evaluation_points(ext: FiniteField, d: int, count: int) -> List[int]:
    points, seen = [], set()
    for c in range(ext.order):
        w = ext.pow(c, d) if c else 0
        if w not in seen:
            seen.add(w)
            points.append(c)
            if len(points) == count:
                return points
    raise ContextMismatch("not enough evaluation points", degree=d, needed=count)


def _euler_local_matrix(phi: DrinfeldModule, P: ThetaPoly) -> Poly:
    """
    g_P(z) from the z-weighted theta-action matrix.

    Every term of det(X - M(z)) has z-degree d*k with k <= r, so g_P is recovered from r+1 evaluations at
    points with distinct z^d by Vandermonde interpolation.
    """
    F = phi.field
    d, r = P.degree, phi.rank
    zring = PolyRing(F, ("z",))
    mat = theta_action_matrix([phi.alpha(j) for j in range(r + 1)], P, zring)
    m = 1
    while F.q ** m < (r + 1) * d + 1:
        m += 1
    ext = extension_of(F, m) if m > 1 else F
    points = _evaluation_points(ext, d, r + 1)
    samples = []
    for c in points:
        numeric = [[_eval_z(entry, c, ext) for entry in row] for row in mat]
        samples.append(list(fitting_generator(numeric, ext).c))
    ws = [ext.pow(c, d) for c in points]
    coeffs = _vandermonde_solve(ext, ws, samples)
    out_ring = PolyRing(F, ("T", "z"))
    g = out_ring.zero
    for k, row in enumerate(coeffs):
        for i, val in enumerate(row):
            if val:
                g = g + out_ring.monomial({"T": i, "z": d * k}, ext.to_base(val))
    return g


def _residues(field: FiniteField, d: int):
    """Nonzero elements of A/P (deg P = d) as reduced polynomials, smallest encoding first"""
    q = field.order
    for code in range(1, q ** d):
        digits = []
        while code:
            code, x = divmod(code, q)
            digits.append(x)
        yield ThetaPoly(field, digits)


def _residue_det(rows: List[Dict[int, ThetaPoly]], P: ThetaPoly) -> ThetaPoly:
    """Determinant over A/P of a sparse matrix given as column -> entry rows"""
    F = P.field
    rows = [dict(row) for row in rows]
    n = len(rows)
    det = ThetaPoly.one(F)
    for k in range(n):
        piv = next((i for i in range(k, n) if k in rows[i]), None)
        if piv is None:
            return ThetaPoly.zero(F)
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            det = -det
        pivot_row = rows[k]
        inv = pivot_row[k].inverse_mod(P)
        det = (det * pivot_row[k]) % P
        for i in range(k + 1, n):
            row = rows[i]
            c = row.pop(k, None)
            if c is None:
                continue
            f = (c * inv) % P
            for col, v in pivot_row.items():
                if col == k:
                    continue
                nv = (row.get(col, ThetaPoly.zero(F)) - f * v) % P
                if nv:
                    row[col] = nv
                else:
                    row.pop(col, None)
    return det % P


def _residue_solve(rows: List[List[ThetaPoly]], rhs: List[ThetaPoly], P: ThetaPoly) -> List[ThetaPoly]:
    """Square linear system over A/P by Gauss-Jordan elimination"""
    size = len(rows)
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    for col in range(size):
        pivot = next(r for r in range(col, size) if aug[r][col])
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = aug[col][col].inverse_mod(P)
        aug[col] = [(inv * x) % P for x in aug[col]]
        for r in range(size):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [(x - f * y) % P for x, y in zip(aug[r], aug[col])]
    return [row[size] for row in aug]


def _euler_local_residue(phi: DrinfeldModule, P: ThetaPoly) -> Optional[Poly]:
    """
    g_P(z) computed in A/P, where the theta-action splits along Frobenius conjugates.

    Row i of X - M(z) carries X - theta^{q^i} on the diagonal and -alpha_j^{q^i} z^j in column i+j mod d.
    At X = theta the determinant is sum_k gamma_k z^{dk} with deg gamma_k < d, so r distinct values of z^d
    in A/P fix every gamma_k. Returns None when A/P has too few distinct d-th powers.
    """
    F = phi.field
    d, r, q = P.degree, phi.rank, F.q
    theta = ThetaPoly.theta(F) % P
    conj: List[List[ThetaPoly]] = []
    for j in range(r + 1):
        x = phi.alpha(j) % P
        powers = []
        for _ in range(d):
            powers.append(x)
            x = x.powmod(q, P)
        conj.append(powers)

    points: List[Tuple[ThetaPoly, ThetaPoly]] = []
    for w in _residues(F, d):
        u = w.powmod(d, P)
        if all(u != seen for _, seen in points):
            points.append((w, u))
            if len(points) == r:
                break
    else:
        return None

    values = []
    for w, _ in points:
        w_powers = [ThetaPoly.one(F)]
        for _ in range(r):
            w_powers.append((w_powers[-1] * w) % P)
        # rows and columns start at 1 so that only the last r+1 rows wrap around
        order = [(i + 1) % d for i in range(d)]
        position = {c: k for k, c in enumerate(order)}
        rows = []
        for i in order:
            row: Dict[int, ThetaPoly] = {position[i]: theta - conj[0][i]}
            for j in range(1, r + 1):
                col = position[(i + j) % d]
                row[col] = row.get(col, ThetaPoly.zero(F)) - conj[j][i] * w_powers[j]
            rows.append({c: v % P for c, v in row.items() if v % P})
        values.append(_residue_det(rows, P))

    us = [u for _, u in points]
    vandermonde = [[u.powmod(k, P) for k in range(1, r + 1)] for u in us]
    gammas = _residue_solve(vandermonde, values, P)
    out_ring = PolyRing(F, ("T", "z"))
    g = Poly.from_theta(out_ring, P)
    for k, gamma in enumerate(gammas, start=1):
        if gamma:
            g = g + Poly.from_theta(out_ring, gamma).shift_key(out_ring.unit_key("z", d * k))
    return g


def _eval_z(entry: Poly, c: int, ext: FiniteField) -> int:
    acc = 0
    for (e,), v in entry.items():
        acc = ext.add(acc, ext.mul(ext.base_elements[v], ext.pow(c, e)))
    return acc


def _vandermonde_solve(F: FiniteField, ws: List[int], samples: List[List[int]]) -> List[List[int]]:
    """Coefficient vectors g_k with sum_k g_k w^k = sample(w) at every point w"""
    size = len(ws)
    rows = [[F.pow(w, k) for k in range(size)] + list(samples[i]) for i, w in enumerate(ws)]
    for col in range(size):
        pivot = next(r for r in range(col, size) if rows[r][col])
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = F.inv(rows[col][col])
        rows[col] = [F.mul(inv, x) for x in rows[col]]
        for r in range(size):
            if r != col and rows[r][col]:
                f = rows[r][col]
                rows[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[r], rows[col])]
    return [row[size:] for row in rows]


def euler_local(phi: DrinfeldModule, P: ThetaPoly, route: str = "auto") -> Tuple[Poly, Poly]:
    """
    Local Euler data (g_P(z), f_P(z) = P - g_P(z)) in F_q[T, z].

    Args:
        route: "closed" (rank 1: g = P - z^d Res(P, alpha_1)), "residue" (determinant in A/P, falling back
            to "matrix" when A/P is too small), "matrix" (Fitting generator over an extension) or "auto"
    """
    require_irreducible(P)
    F = phi.field
    out_ring = PolyRing(F, ("T", "z"))
    P_poly = Poly.from_theta(out_ring, P)
    if route == "closed" or (route == "auto" and phi.rank == 1):
        if phi.rank != 1:
            raise ContextMismatch("closed-form Euler factor needs rank 1", rank=phi.rank)
        a1 = phi.alpha(1)
        res = F.pow(a1.leading, P.degree) if a1.is_constant else norm_mod(a1, P)
        g = P_poly - out_ring.monomial({"z": P.degree}, res)
    else:
        g = _euler_local_residue(phi, P) if route in ("auto", "residue") else None
        if g is None:
            g = _euler_local_matrix(phi, P)
    return g, P_poly - g


def _local_ratio(ring: PolyRing, f: Poly, P: ThetaPoly, prec: int) -> GradedSeries:
    """f/P as a series in 1/theta with z-polynomial coefficients"""
    d = P.degree
    inv = inverse_digits(P.field, P.c, prec - d + f.degree_in("T"))
    inv_series = GradedSeries(ring, {d + k: ring.const(x) for k, x in enumerate(inv) if x}, prec + f.degree_in("T"))
    numerator = {}
    for i in range(f.degree_in("T") + 1):
        c = f.coefficient("T", i)
        if c:
            numerator[-i] = c.to_ring(ring)
    return series_mul(GradedSeries(ring, numerator), inv_series, cap=prec)


def lseries_euler(phi: DrinfeldModule, prec: int, with_z: bool = True) -> GradedSeries:
    """
    prod_P P/g_P(z) over monic irreducibles of degree <= r(prec-1).

    Primes whose first-order term f_P/P has valuation >= prec/2 are grouped into 1 + sum f_P/P.
    """
    if prec < 1:
        raise ValueError("precision must be >= 1")
    F = phi.field
    ring = PolyRing(F, ("z",))
    one = GradedSeries.one(ring, prec)
    half = (prec + 1) // 2
    grouped = GradedSeries.zero(ring, prec)
    result = one
    max_deg = phi.rank * (prec - 1)
    primes = 0
    for d in range(1, max_deg + 1):
        for P in monic_irreducibles(F, d):
            _, f = euler_local(phi, P)
            if f.is_zero:
                continue
            v1 = d - f.degree_in("T")
            if v1 >= prec:
                continue
            primes += 1
            x = _local_ratio(ring, f, P, prec)
            if v1 >= half:
                grouped = grouped + x
            else:
                result = series_mul(result, series_inv(one - x, cap=prec), cap=prec)
    result = series_mul(result, one + grouped, cap=prec)
    logger.debug("Euler product over %d primes (degree <= %d) at prec %d", primes, max_deg, prec)
    if not with_z:
        flat = PolyRing(F, ())
        result = result.substitute({"z": 1}, flat)
    return result


# ==================== DIRICHLET CHARACTERS ====================


@dataclass(frozen=True)
class DirichletCharacter:
    """chi(a) = prod_j a(eta_j)^{n_j} for a prime conductor P"""

    P: ThetaPoly
    spec: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        require_irreducible(self.P)
        ext = self.ext
        roots = set(self.roots)
        q = self.P.field.q
        if not self.spec:
            raise ValueError("a character needs at least one (eta, multiplicity) pair")
        for eta, mult in self.spec:
            if eta not in roots:
                raise NotARoot(f"{ext.format(eta)} is not a root of {self.P}", eta=ext.format(eta), P=str(self.P))
            if not 1 <= mult <= q - 1:
                raise ValueError(f"multiplicity {mult} outside 1..{q - 1}")

    # ---------- construction ----------

    @classmethod
    def from_exponent(cls, P: ThetaPoly, N: int) -> "DirichletCharacter":
        """chi = omega^N with omega(a) = a(zeta_0) for the smallest root zeta_0"""
        require_irreducible(P)
        q, d = P.field.q, P.degree
        if not 1 <= N < q ** d:
            raise ValueError(f"exponent {N} outside 1..{q ** d - 1}")
        ext = extension_of(P.field, d)
        zeta0 = prime_roots(P)[0]
        spec = []
        for k in range(d):
            N, digit = divmod(N, q)
            if digit:
                spec.append((ext.frob(zeta0, k), digit))
        return cls(P, tuple(spec))

    @classmethod
    def parse(cls, text: str, field: FiniteField) -> "DirichletCharacter":
        """P=<poly>;spec=(<eta in u>,<mult>);(...) or P=<poly>;exponent=<N>"""
        parts = [p.strip() for p in text.split(";") if p.strip()]
        if not parts or not parts[0].startswith("P="):
            raise ParseError(f"character spec must start with P=: {text!r}")
        P = ThetaPoly.parse(parts[0][2:], field)
        require_irreducible(P)
        rest = parts[1:]
        if len(rest) == 1 and rest[0].startswith("exponent="):
            try:
                return cls.from_exponent(P, int(rest[0][len("exponent="):]))
            except ValueError as e:
                raise ParseError(str(e), spec=text) from e
        if not rest or not rest[0].startswith("spec="):
            raise ParseError(f"missing spec= in {text!r}")
        rest[0] = rest[0][len("spec="):]
        ext = extension_of(field, P.degree)
        pairs = []
        for item in rest:
            m = re.fullmatch(r"\(\s*(.+?)\s*,\s*(\d+)\s*\)", item)
            if not m:
                raise ParseError(f"bad (eta,mult) pair {item!r}")
            pairs.append((ext.parse(m.group(1)), int(m.group(2))))
        try:
            return cls(P, tuple(pairs))
        except ValueError as e:
            raise ParseError(str(e), spec=text) from e

    # ---------- invariants ----------

    @property
    def field(self) -> FiniteField:
        return self.P.field

    @property
    def degree(self) -> int:
        return self.P.degree

    @property
    def ext(self) -> FiniteField:
        return extension_of(self.P.field, self.P.degree)

    @property
    def roots(self) -> Tuple[int, ...]:
        return prime_roots(self.P)

    @property
    def zeta0(self) -> int:
        return self.roots[0]

    @property
    def type(self) -> int:
        return sum(m for _, m in self.spec)

    @property
    def is_odd(self) -> bool:
        return (self.type - 1) % (self.field.q - 1) == 0

    @property
    def exponent(self) -> int:
        """N with chi(a) = a(zeta_0)^N"""
        ext, q = self.ext, self.field.q
        conj = [ext.frob(self.zeta0, k) for k in range(self.degree)]
        return sum(m * q ** conj.index(eta) for eta, m in self.spec)

    @property
    def etas(self) -> Tuple[int, ...]:
        """eta values laid out as t_1..t_s (each repeated by its multiplicity)"""
        return tuple(eta for eta, m in self.spec for _ in range(m))

    # ---------- values ----------

    def value(self, a: ThetaPoly) -> int:
        ext = self.ext
        ae = a.embed(ext)
        v = 1
        for eta, m in self.spec:
            v = ext.mul(v, ext.pow(ae.evaluate(eta), m))
        return v

    def conjugate(self, k: int = 1) -> "DirichletCharacter":
        """Coefficient-Frobenius conjugate: eta -> eta^{q^k}"""
        ext = self.ext
        return DirichletCharacter(self.P, tuple((ext.frob(eta, k), m) for eta, m in self.spec))

    def orbit(self) -> List["DirichletCharacter"]:
        seen, out = set(), []
        for k in range(self.degree):
            c = self.conjugate(k)
            if c.exponent not in seen:
                seen.add(c.exponent)
                out.append(c)
        return out

    def spec_string(self) -> str:
        ext = self.ext
        pairs = ";".join(f"({ext.format(eta)},{m})" for eta, m in self.spec)
        return f"P={self.P};spec={pairs}"

    def __str__(self):
        return self.spec_string()


@lru_cache(maxsize=None)
def prime_roots(P: ThetaPoly) -> Tuple[int, ...]:
    ext = extension_of(P.field, P.degree)
    return tuple(ext.roots(P.embed(ext).c))


def all_characters(P: ThetaPoly) -> List[DirichletCharacter]:
    """The q^d - 1 nontrivial characters of conductor P, by exponent"""
    q, d = P.field.q, P.degree
    return [DirichletCharacter.from_exponent(P, N) for N in range(1, q ** d)]


def ev_char(value: Union[GradedSeries, Poly], chi: DirichletCharacter):
    """Substitute t_k -> eta_k (the character layout) into a polynomial or series"""
    names = value.ring.names
    t_names = [nm for nm in names if re.fullmatch(r"t\d+", nm)]
    if len(t_names) != chi.type:
        raise ArityMismatch(f"{len(t_names)} t-variables for a character of type {chi.type}",
                            variables=len(t_names), type=chi.type)
    ext = chi.ext
    wide = PolyRing(ext, names)
    target = PolyRing(ext, tuple(nm for nm in names if nm not in t_names))
    values = {f"t{k + 1}": eta for k, eta in enumerate(chi.etas)}

    def ev(c: Poly) -> Poly:
        if c.field == ext:
            lifted = c.to_ring(wide)
        elif c.field == chi.field:
            lifted = c.to_ring(wide, field_map=lambda v: ext.base_elements[v])
        else:
            raise ContextMismatch("value lies over an unrelated field", field=repr(c.field))
        return lifted.substitute(values, target)

    if isinstance(value, GradedSeries):
        return value.map_coefficients(ev, target)
    return ev(value)


def character_lseries(chi: DirichletCharacter, prec: int, with_z: bool = True) -> GradedSeries:
    """sum_a chi(a) z^{deg a}/a by direct per-element expansion"""
    ext = chi.ext
    ring = PolyRing(ext, ("z",) if with_z else ())
    total = GradedSeries.zero(ring, prec)
    for d in range(prec):
        zpow = ring.monomial({"z": d}) if with_z else ring.one
        for a in MonicEnumerator(chi.field, d):
            v = chi.value(a)
            if not v:
                continue
            inv = series_inv(GradedSeries.from_theta(ring, a), cap=prec)
            total = total + inv.scale(zpow.scale(v))
    return total


# ==================== CYCLOTOMIC RINGS ====================


@lru_cache(maxsize=None)
def _theta_power_carlitz(field: FiniteField, k: int) -> Tuple[ThetaPoly, ...]:
    """[theta^k, i] for i = 0..k"""
    if k == 0:
        return (ThetaPoly.one(field),)
    prev = _theta_power_carlitz(field, k - 1)
    theta = ThetaPoly.theta(field)
    out = []
    for i in range(k + 1):
        c = ThetaPoly.zero(field)
        if i < len(prev):
            c = c + theta * prev[i]
        if i >= 1:
            c = c + prev[i - 1].frobenius(1)
        out.append(c)
    return tuple(out)


def carlitz_coefficients(a: ThetaPoly) -> List[ThetaPoly]:
    """[a, i] with C_a = sum_i [a, i] tau^i"""
    F = a.field
    out = [ThetaPoly.zero(F) for _ in range(max(a.degree, 0) + 1)]
    for k, ak in enumerate(a.c):
        if ak:
            for i, c in enumerate(_theta_power_carlitz(F, k)):
                out[i] = out[i] + c.scale(ak)
    return out


def carlitz_polynomial(a: ThetaPoly, var: str = "x") -> Poly:
    """C_a(var) in F_q[T, var]"""
    ring = PolyRing(a.field, ("T", var))
    result = ring.zero
    q = a.field.q
    for i, c in enumerate(carlitz_coefficients(a)):
        result = result + Poly.from_theta(ring, c) * ring.monomial({var: q ** i})
    return result


class CyclotomicRing:
    """
    F[theta][x]/(Phi_P(x)) with Phi_P = C_P(x)/x, optionally with coefficients reduced mod a power of P.

    The coefficient field F is F_q or an extension F_{q^m}.
    """

    def __init__(self, P: ThetaPoly, field: Optional[FiniteField] = None, modulus: Optional[ThetaPoly] = None):
        require_irreducible(P)
        self.P = P
        self.base = P.field
        self.field = field or P.field
        self.d = P.degree
        self.q = self.base.q
        self.D = self.q ** self.d - 1
        self.modulus = modulus.embed(self.field) if modulus is not None else None
        phi_coeffs = carlitz_coefficients(P)
        # x^D = -sum_{i<d} [P,i] x^{q^i - 1}
        self._relation = [(self.q ** i - 1, self._coeff(-c))
                          for i, c in enumerate(phi_coeffs[:-1]) if c]

    def _coeff(self, c: ThetaPoly) -> ThetaPoly:
        c = c.embed(self.field) if c.field != self.field else c
        return c % self.modulus if self.modulus is not None else c

    # ---------- elements ----------

    def element(self, coeffs: Sequence[ThetaPoly]) -> "CyclotomicElement":
        return CyclotomicElement(self, self.reduce(list(coeffs)))

    @property
    def zero(self) -> "CyclotomicElement":
        return CyclotomicElement(self, ())

    @property
    def one(self) -> "CyclotomicElement":
        return self.const(ThetaPoly.one(self.field))

    @property
    def x(self) -> "CyclotomicElement":
        """lambda_P"""
        return self.element([ThetaPoly.zero(self.field), ThetaPoly.one(self.field)])

    def const(self, c: Union[ThetaPoly, int]) -> "CyclotomicElement":
        if isinstance(c, int):
            c = ThetaPoly.const(self.field, c)
        return self.element([c])

    def reduce(self, coeffs: List[ThetaPoly]) -> Tuple[ThetaPoly, ...]:
        F = self.field
        coeffs = [self._coeff(c) if c.field != F or self.modulus is not None else c for c in coeffs]
        D = self.D
        for k in range(len(coeffs) - 1, D - 1, -1):
            c = coeffs[k]
            if not c:
                continue
            coeffs[k] = ThetaPoly.zero(F)
            for offset, rel in self._relation:
                idx = k - D + offset
                term = c * rel
                if self.modulus is not None:
                    term = term % self.modulus
                coeffs[idx] = coeffs[idx] + term
        out = coeffs[:D]
        while out and not out[-1]:
            out.pop()
        return tuple(out)

    def carlitz_x(self, a: ThetaPoly) -> "CyclotomicElement":
        """C_a(lambda_P)"""
        coeffs: Dict[int, ThetaPoly] = {}
        for i, c in enumerate(carlitz_coefficients(a)):
            if c:
                coeffs[self.q ** i] = self._coeff(c)
        top = max(coeffs, default=-1)
        return self.element([coeffs.get(i, ThetaPoly.zero(self.field)) for i in range(top + 1)])

    def phi_polynomial(self) -> Poly:
        """Phi_P(x) in F_q[T, x]"""
        ring = PolyRing(self.base, ("T", "x"))
        result = ring.zero
        for i, c in enumerate(carlitz_coefficients(self.P)):
            result = result + Poly.from_theta(ring, c) * ring.monomial({"x": self.q ** i - 1})
        return result


class CyclotomicElement:
    __slots__ = ("ring", "c")

    def __init__(self, ring: CyclotomicRing, coeffs: Tuple[ThetaPoly, ...]):
        self.ring = ring
        self.c = coeffs

    def coeff(self, i: int) -> ThetaPoly:
        return self.c[i] if i < len(self.c) else ThetaPoly.zero(self.ring.field)

    @property
    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def _check(self, other: "CyclotomicElement") -> None:
        if other.ring is not self.ring and (other.ring.P != self.ring.P or other.ring.field != self.ring.field
                                           or other.ring.modulus != self.ring.modulus):
            raise ContextMismatch("elements of different cyclotomic rings")

    def __add__(self, other):
        self._check(other)
        n = max(len(self.c), len(other.c))
        return self.ring.element([self.coeff(i) + other.coeff(i) for i in range(n)])

    def __neg__(self):
        return CyclotomicElement(self.ring, tuple(-c for c in self.c))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (ThetaPoly, int)):
            return self.scale(other)
        self._check(other)
        if not self.c or not other.c:
            return self.ring.zero
        F = self.ring.field
        out = [ThetaPoly.zero(F) for _ in range(len(self.c) + len(other.c) - 1)]
        mod = self.ring.modulus
        for i, a in enumerate(self.c):
            if not a:
                continue
            for j, b in enumerate(other.c):
                if b:
                    out[i + j] = out[i + j] + a * b
        if mod is not None:
            out = [c % mod for c in out]
        return self.ring.element(out)

    def scale(self, c: Union[ThetaPoly, int]) -> "CyclotomicElement":
        if isinstance(c, int):
            c = ThetaPoly.const(self.ring.field, c)
        c = self.ring._coeff(c)
        return self.ring.element([a * c for a in self.c])

    def __pow__(self, n: int):
        result, base = self.ring.one, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # ---------- Frobenius twists and Galois action ----------

    def sigma(self) -> "CyclotomicElement":
        """theta -> theta^q, x -> x^q, F_{q^m}-constants fixed"""
        q = self.ring.q
        F = self.ring.field
        out = [ThetaPoly.zero(F) for _ in range((len(self.c) - 1) * q + 1)] if self.c else []
        for i, a in enumerate(self.c):
            out[i * q] = a.stretch(q)
        return self.ring.element(out)

    def coeff_frobenius(self, k: int = 1) -> "CyclotomicElement":
        return CyclotomicElement(self.ring, tuple(a.coeff_frobenius(k) for a in self.c))

    def tau(self) -> "CyclotomicElement":
        """Full q-power Frobenius: sigma composed with the constant-field Frobenius"""
        return self.sigma().coeff_frobenius(1)

    def galois(self, b: ThetaPoly) -> "CyclotomicElement":
        """mu_b: x -> C_b(x)"""
        ring = self.ring
        y = ring.carlitz_x(b)
        result = ring.zero
        power = ring.one
        for i, a in enumerate(self.c):
            if i:
                power = power * y
            if a:
                result = result + power.scale(a)
        return result

    def descends(self) -> bool:
        """Fixed by the constant-field Frobenius, i.e. coefficients in F_q[theta]"""
        return self.coeff_frobenius(1) == self

    def to_base(self) -> "CyclotomicElement":
        base_ring = CyclotomicRing(self.ring.P, self.ring.base,
                                   self.ring.modulus.to_base() if self.ring.modulus is not None else None)
        return CyclotomicElement(base_ring, tuple(a.to_base() for a in self.c))

    def __eq__(self, other):
        return isinstance(other, CyclotomicElement) and self.ring.P == other.ring.P and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def as_poly(self) -> Poly:
        ring = PolyRing(self.ring.field, ("T", "x"))
        result = ring.zero
        for i, a in enumerate(self.c):
            if a:
                result = result + Poly.from_theta(ring, a) * ring.monomial({"x": i})
        return result

    def __str__(self):
        return str(self.as_poly())

    def __repr__(self):
        return f"CyclotomicElement({self})"


# ==================== GAUSS-THAKUR SUMS ====================


def gauss_thakur(zeta: int, P: ThetaPoly, ring: Optional[CyclotomicRing] = None) -> CyclotomicElement:
    """
    g(rho_zeta) = -sum_{a in (A/P)^x} rho_zeta(a)^{-1} C_a(lambda_P).

    Scaling a by c in F_q^x leaves each term unchanged, so the sum over all residues is -1 times the sum over
    monic a of degree < d.
    """
    d = P.degree
    ext = extension_of(P.field, d)
    if P.embed(ext).evaluate(zeta) != 0:
        raise NotARoot(f"{ext.format(zeta)} is not a root of {P}", zeta=ext.format(zeta), P=str(P))
    ring = ring or CyclotomicRing(P, ext)
    total = ring.zero
    for n in range(d):
        for a in MonicEnumerator(P.field, n):
            rho = a.embed(ext).evaluate(zeta)
            total = total + ring.carlitz_x(a).scale(ext.inv(rho))
    return total


def gauss_thakur_char(chi: DirichletCharacter, ring: Optional[CyclotomicRing] = None) -> CyclotomicElement:
    """g(chi) = prod_j g(rho_{eta_j})^{n_j}"""
    ring = ring or CyclotomicRing(chi.P, chi.ext)
    result = ring.one
    cache: Dict[int, CyclotomicElement] = {}
    for eta, m in chi.spec:
        if eta not in cache:
            cache[eta] = gauss_thakur(eta, chi.P, ring)
        result = result * cache[eta] ** m
    return result


def gauss_orbit_product(zeta: int, P: ThetaPoly, ring: Optional[CyclotomicRing] = None) -> CyclotomicElement:
    """prod_k g(rho_{zeta^{q^k}})"""
    ext = extension_of(P.field, P.degree)
    ring = ring or CyclotomicRing(P, ext)
    result = ring.one
    for k in range(P.degree):
        result = result * gauss_thakur(ext.frob(zeta, k), P, ring)
    return result


def gauss_orbit_sum(zeta: int, P: ThetaPoly, ring: Optional[CyclotomicRing] = None) -> CyclotomicElement:
    """sum_k g(rho_{zeta^{q^k}}), which equals lambda_P"""
    ext = extension_of(P.field, P.degree)
    ring = ring or CyclotomicRing(P, ext)
    result = ring.zero
    for k in range(P.degree):
        result = result + gauss_thakur(ext.frob(zeta, k), P, ring)
    return result


def gauss_identities(zeta: int, P: ThetaPoly, ring: Optional[CyclotomicRing] = None) -> Dict[str, bool]:
    """
    Exact checks of the Gauss-Thakur relations at one root zeta of P:
    sigma(g) = (zeta - theta) g, tau^d(g) = sigma^d(g) = prod_{k<d} (zeta - theta^{q^k}) g,
    sum over the Frobenius orbit = lambda_P, sigma(G) = (-1)^d P G for the orbit product G.
    """
    d, q = P.degree, P.field.q
    ext = extension_of(P.field, d)
    ring = ring or CyclotomicRing(P, ext)
    minus_one = ext.neg(1)
    g = gauss_thakur(zeta, P, ring)
    twisted, sigma_d, factor = g, g, ThetaPoly.one(ext)
    for k in range(d):
        twisted = twisted.tau()
        sigma_d = sigma_d.sigma()
        factor = factor * (ThetaPoly.const(ext, zeta) - ThetaPoly.monomial(ext, q ** k))
    G = gauss_orbit_product(zeta, P, ring)
    P_ext = P.embed(ext)
    return {
        "sigma_eigenvalue": g.sigma() == g.scale(ThetaPoly(ext, [zeta, minus_one])),
        "tau_d_scaling": twisted == sigma_d == g.scale(factor),
        "orbit_sum": gauss_orbit_sum(zeta, P, ring) == ring.x,
        "orbit_product": G.sigma() == G.scale(P_ext if d % 2 == 0 else -P_ext),
    }
