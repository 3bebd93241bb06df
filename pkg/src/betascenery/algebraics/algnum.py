"""Real algebraic numbers and exact number-field arithmetic.

An AlgebraicNumber is (irreducible minimal polynomial, rational isolating
interval); the interval is refined monotonically in place, so repeated
comparisons get cheaper and a refinement can never jump to a different root.

A NumberField wraps a monic irreducible polynomial and does exact field
arithmetic on coordinate vectors; signs of nonzero elements are decided by
interval Horner evaluation over the generator's isolating interval, refined
until the value interval excludes zero.  A nonzero coordinate vector has a
nonzero value (the minimal polynomial is minimal), so the loop terminates:
every comparison is exact, with no floating point on the decision path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

from .intpoly import IntPolynomial, interval_add, interval_mul
from .roots import RealRootInterval, isolate_real_roots, refine_real_root


def _count_real_roots(p: IntPolynomial, lo: Fraction, hi: Fraction) -> int:
    from sympy.polys.domains import QQ, ZZ
    from sympy.polys.rootisolation import dup_count_real_roots
    return dup_count_real_roots(
        p.to_sympy_dup(), ZZ,
        inf=QQ(lo.numerator, lo.denominator),
        sup=QQ(hi.numerator, hi.denominator))


class AlgebraicNumber:
    """A real root of an irreducible integer polynomial.

    The isolating interval [lo, hi] contains this root and no other root of
    min_poly.  refine() narrows it in place; all comparisons against
    rationals are exact.
    """

    __slots__ = ("min_poly", "_lo", "_hi", "_isolation")

    def __init__(self, min_poly, lo, hi, _validated: bool = False):
        poly = IntPolynomial.parse(min_poly).primitive()
        lo, hi = Fraction(lo), Fraction(hi)
        if not _validated:
            if poly.degree < 1:
                raise ValueError("constant polynomial has no roots")
            if not poly.is_irreducible():
                raise ValueError(
                    f"{poly} is reducible; minimal polynomials must be "
                    "irreducible over Q")
            if _count_real_roots(poly, lo, hi) != 1:
                raise ValueError(
                    f"[{lo}, {hi}] does not isolate exactly one root of {poly}")
        self.min_poly = poly
        self._lo = lo
        self._hi = hi
        self._isolation = None

    # -- constructors --------------------------------------------------

    @classmethod
    def from_rational(cls, q) -> "AlgebraicNumber":
        q = Fraction(q)
        poly = IntPolynomial((-q.numerator, q.denominator))
        return cls(poly, q, q, _validated=True)

    @classmethod
    def largest_root(cls, poly) -> "AlgebraicNumber":
        """The greatest real root of `poly` (errors if there is none)."""
        poly = IntPolynomial.parse(poly).primitive()
        if not poly.is_irreducible():
            raise ValueError(f"{poly} is reducible; pass the minimal polynomial")
        iso = isolate_real_roots(poly, precision=16)
        if not iso.real_roots:
            raise ValueError(f"{poly} has no real roots")
        iv = iso.real_roots[-1]
        return cls(poly, iv.lo, iv.hi, _validated=True)

    # -- refinement -----------------------------------------------------

    @property
    def lo(self) -> Fraction:
        return self._lo

    @property
    def hi(self) -> Fraction:
        return self._hi

    @property
    def degree(self) -> int:
        return self.min_poly.degree

    def refine(self, width: Fraction) -> Tuple[Fraction, Fraction]:
        if self._hi - self._lo > width:
            iv = refine_real_root(self.min_poly, self._lo, self._hi, width)
            self._lo, self._hi = iv.lo, iv.hi
        return (self._lo, self._hi)

    def refine_bits(self, bits: int) -> Tuple[Fraction, Fraction]:
        return self.refine(Fraction(1, 2**bits))

    def approx_fraction(self, bits: int = 128) -> Tuple[Fraction, Fraction]:
        """(midpoint, radius) with radius <= 2^-bits."""
        lo, hi = self.refine_bits(bits + 1)
        return ((lo + hi) / 2, (hi - lo) / 2)

    def __float__(self) -> float:
        lo, hi = self.refine_bits(64)
        return float((lo + hi) / 2)

    # -- exact comparisons ------------------------------------------------

    def to_rational(self) -> Optional[Fraction]:
        if self.degree == 1:
            return Fraction(-self.min_poly.coeffs[0], self.min_poly.coeffs[1])
        return None

    def cmp_rational(self, q) -> int:
        q = Fraction(q)
        r = self.to_rational()
        if r is not None:
            return (r > q) - (r < q)
        if self.min_poly(q) == 0:  # impossible for irreducible degree >= 2
            raise ArithmeticError("rational root of an irreducible polynomial")
        lo, hi = self._lo, self._hi
        while lo <= q <= hi:
            width = (hi - lo) / 4
            lo, hi = self.refine(width)
        return 1 if lo > q else -1

    def sign(self) -> int:
        return self.cmp_rational(0)

    def floor(self) -> int:
        r = self.to_rational()
        if r is not None:
            return r.numerator // r.denominator
        import math
        lo, hi = self._lo, self._hi
        # degree >= 2 here, so the value is irrational and never sits on an
        # integer boundary: refinement must eventually decide the floor
        while math.floor(lo) != math.floor(hi):
            lo, hi = self.refine((hi - lo) / 4)
        return math.floor(lo)

    def equals(self, other: "AlgebraicNumber") -> bool:
        if self.min_poly != other.min_poly:
            return False
        # same polynomial: distinct roots separate under refinement
        sep = _root_separation_bound(self.min_poly)
        a = self.refine(sep / 4)
        b = other.refine(sep / 4)
        return not (a[1] < b[0] or b[1] < a[0])

    def negated(self) -> "AlgebraicNumber":
        return AlgebraicNumber(self.min_poly.compose_negate().primitive(),
                               -self._hi, -self._lo, _validated=True)

    def abs_value(self) -> "AlgebraicNumber":
        return self if self.sign() >= 0 else self.negated()

    def conjugates(self):
        """Root isolation of the full minimal polynomial (cached)."""
        if self._isolation is None:
            self._isolation = isolate_real_roots(self.min_poly, precision=32)
        return self._isolation

    def __repr__(self) -> str:
        return f"AlgebraicNumber({self.min_poly} ~ {float(self):.10g})"


def _root_separation_bound(p: IntPolynomial) -> Fraction:
    """A valid lower bound on the distance between distinct roots, from
    Mahler's inequality sep > sqrt(3) * d^-(d+2)/2 * M(p)^-(d-1) with the
    Mahler measure bounded by the coefficient 2-norm (Landau)."""
    d = p.degree
    if d < 2:
        return Fraction(1)
    norm_sq = sum(c * c for c in p.coeffs)
    denom = (d ** (d + 2)) * (norm_sq ** (d - 1))
    from math import isqrt
    return Fraction(1, isqrt(denom) + 1)


# ---------------------------------------------------------------------------
# Number fields
# ---------------------------------------------------------------------------


class NumberField:
    """Q(beta) for beta a root of a monic irreducible integer polynomial."""

    __slots__ = ("poly", "generator", "degree", "_red_rows", "_same_field")

    def __init__(self, generator: AlgebraicNumber):
        poly = generator.min_poly
        if not poly.is_monic:
            raise ValueError(
                f"{poly} is not monic; field arithmetic here requires an "
                "algebraic integer generator")
        self.poly = poly
        self.generator = generator
        self.degree = poly.degree
        self._red_rows = None
        self._same_field: dict = {}

    def same_field(self, other: "NumberField") -> bool:
        """True iff `other` designates the same generator root (cached)."""
        if other is self:
            return True
        hit = self._same_field.get(id(other))
        if hit is None:
            hit = (self.poly == other.poly and
                   self.generator.equals(other.generator))
            self._same_field[id(other)] = hit
            other._same_field[id(self)] = hit
        return hit

    def _reduction_rows(self):
        """Rows r_k (k >= d): beta^k as a vector in the power basis."""
        if self._red_rows is None:
            d = self.degree
            base = [Fraction(-c) for c in self.poly.coeffs[:d]]
            rows = [base]
            for _ in range(d - 1):
                prev = rows[-1]
                shifted = [Fraction(0)] + prev[:-1]
                hi = prev[-1]
                rows.append([shifted[i] + hi * base[i] for i in range(d)])
            self._red_rows = rows
        return self._red_rows

    def element(self, vec) -> "FieldElement":
        d = self.degree
        v = [Fraction(x) for x in vec]
        if len(v) > d:
            rows = self._reduction_rows()
            out = v[:d]
            for k in range(d, len(v)):
                c = v[k]
                if c:
                    row = rows[k - d]
                    for i in range(d):
                        out[i] += c * row[i]
            v = out
        else:
            v = v + [Fraction(0)] * (d - len(v))
        return FieldElement(self, tuple(v))

    def from_rational(self, q) -> "FieldElement":
        return self.element([Fraction(q)])

    def beta(self) -> "FieldElement":
        return self.element([0, 1])

    def __repr__(self) -> str:
        return f"NumberField({self.poly})"


class FieldElement:
    """Element of a NumberField in power-basis coordinates (Fractions)."""

    __slots__ = ("field", "vec")

    def __init__(self, field: NumberField, vec: Tuple[Fraction, ...]):
        self.field = field
        self.vec = vec

    # -- ring ops ---------------------------------------------------------

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.field is not self.field:
                if self.field.same_field(other.field):
                    return FieldElement(self.field, other.vec)
                raise TypeError(
                    "mixing elements of distinct algebraic fields is not "
                    "supported; express both in one field")
            return other
        return self.field.from_rational(Fraction(other))

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(self.field,
                            tuple(a + b for a, b in zip(self.vec, o.vec)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.vec))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        d = self.field.degree
        prod = [Fraction(0)] * (2 * d - 1)
        for i, a in enumerate(self.vec):
            if a:
                for j, b in enumerate(o.vec):
                    if b:
                        prod[i + j] += a * b
        return self.field.element(prod)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        """Multiplicative inverse via the extended Euclidean algorithm in
        Q[x] against the (irreducible) minimal polynomial."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        a = [Fraction(c) for c in self.field.poly.coeffs]
        b = list(self.vec)
        while len(b) > 1 and b[-1] == 0:
            b.pop()
        s_prev, s_cur = [Fraction(0)], [Fraction(1)]

        def poly_divmod(num, den):
            num = num[:]
            q = [Fraction(0)] * max(len(num) - len(den) + 1, 1)
            while len(num) >= len(den) and any(num):
                while num and num[-1] == 0:
                    num.pop()
                if len(num) < len(den):
                    break
                c = num[-1] / den[-1]
                k = len(num) - len(den)
                q[k] = c
                for i, dc in enumerate(den):
                    num[i + k] -= c * dc
                num.pop()
            return q, (num or [Fraction(0)])

        r_prev, r_cur = a, b
        while True:
            while len(r_cur) > 1 and r_cur[-1] == 0:
                r_cur.pop()
            if len(r_cur) == 1:
                break
            q, r_next = poly_divmod(r_prev, r_cur)
            # s_next = s_prev - q * s_cur
            s_next = [Fraction(0)] * max(len(s_prev), len(q) + len(s_cur) - 1)
            for i, c in enumerate(s_prev):
                s_next[i] += c
            for i, qc in enumerate(q):
                if qc:
                    for j, sc in enumerate(s_cur):
                        s_next[i + j] -= qc * sc
            r_prev, r_cur = r_cur, r_next
            s_prev, s_cur = s_cur, s_next
        c = r_cur[0]
        if c == 0:
            raise ArithmeticError("gcd degenerated; polynomial not irreducible?")
        return self.field.element([s / c for s in s_cur])

    def __truediv__(self, other):
        o = self._coerce(other)
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.field.from_rational(Fraction(other)) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.from_rational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- exact decisions ----------------------------------------------------

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.vec)

    def to_rational(self) -> Optional[Fraction]:
        if all(c == 0 for c in self.vec[1:]):
            return self.vec[0]
        return None

    def sign(self) -> int:
        if self.is_zero():
            return 0
        r = self.to_rational()
        if r is not None:
            return (r > 0) - (r < 0)
        gen = self.field.generator
        lo, hi = gen.lo, gen.hi
        while True:
            acc = (self.vec[-1], self.vec[-1])
            for c in reversed(self.vec[:-1]):
                acc = interval_add(interval_mul(acc, (lo, hi)), (c, c))
            if acc[0] > 0:
                return 1
            if acc[1] < 0:
                return -1
            lo, hi = gen.refine((hi - lo) / 16)

    def cmp(self, other) -> int:
        return (self - other).sign()

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field.poly == other.field.poly and self.vec == other.vec
        try:
            return (self - other).is_zero()
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash((self.field.poly.coeffs, self.vec))

    def __lt__(self, other):
        return self.cmp(other) < 0

    def __le__(self, other):
        return self.cmp(other) <= 0

    def __gt__(self, other):
        return self.cmp(other) > 0

    def __ge__(self, other):
        return self.cmp(other) >= 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def floor(self) -> int:
        r = self.to_rational()
        if r is not None:
            return r.numerator // r.denominator
        import math
        gen = self.field.generator
        while True:
            lo, hi = gen.lo, gen.hi
            acc = (self.vec[-1], self.vec[-1])
            for c in reversed(self.vec[:-1]):
                acc = interval_add(interval_mul(acc, (lo, hi)), (c, c))
            flo = math.floor(acc[0])
            fhi = math.floor(acc[1])
            if flo == fhi:
                return flo
            # an irrational element never equals an integer, so refining decides
            gen.refine((hi - lo) / 16)

    def enclosure(self, bits: int = 64) -> Tuple[Fraction, Fraction]:
        """Certified rational interval of width below 2^-bits."""
        r = self.to_rational()
        if r is not None:
            return (r, r)
        gen = self.field.generator
        width = Fraction(1, 2 ** bits)
        lo, hi = gen.lo, gen.hi
        while True:
            acc = (self.vec[-1], self.vec[-1])
            for c in reversed(self.vec[:-1]):
                acc = interval_add(interval_mul(acc, (lo, hi)), (c, c))
            if acc[1] - acc[0] < width:
                return acc
            lo, hi = gen.refine((hi - lo) / 16)

    def __float__(self) -> float:
        gen = self.field.generator
        lo, hi = gen.refine_bits(80)
        acc = (self.vec[-1], self.vec[-1])
        for c in reversed(self.vec[:-1]):
            acc = interval_add(interval_mul(acc, (lo, hi)), (c, c))
        return float((acc[0] + acc[1]) / 2)

    def to_algebraic(self) -> AlgebraicNumber:
        """Minimal polynomial + isolating interval for this element."""
        r = self.to_rational()
        if r is not None:
            return AlgebraicNumber.from_rational(r)
        import sympy
        x, t = sympy.symbols("x t")
        gen_poly = self.field.poly.to_sympy_expr(t)
        elem = sum(sympy.Rational(c.numerator, c.denominator) * t**k
                   for k, c in enumerate(self.vec))
        res = sympy.resultant(gen_poly, x - elem, t)
        poly = sympy.Poly(res, x)
        candidates = []
        for fac, _ in poly.factor_list()[1]:
            coeffs = [int(c) for c in reversed(sympy.Poly(fac, x).all_coeffs())]
            candidates.append(IntPolynomial(tuple(coeffs)).primitive())
        # the minimal polynomial is the irreducible factor that vanishes at
        # this element, checked by exact Horner evaluation inside the field
        target = None
        for fac in candidates:
            acc = self.field.from_rational(fac.coeffs[-1])
            for c in reversed(fac.coeffs[:-1]):
                acc = acc * self + c
            if acc.is_zero():
                target = fac
                break
        if target is None:
            raise ArithmeticError("no resultant factor vanishes at element")
        # isolating interval: refine the generator until the Horner interval
        # of this element isolates exactly one root of the target
        gen = self.field.generator
        while True:
            lo, hi = gen.lo, gen.hi
            acc = (self.vec[-1], self.vec[-1])
            for c in reversed(self.vec[:-1]):
                acc = interval_add(interval_mul(acc, (lo, hi)), (c, c))
            if _count_real_roots(target, acc[0], acc[1]) == 1:
                return AlgebraicNumber(target, acc[0], acc[1], _validated=True)
            gen.refine((hi - lo) / 16)


# ---------------------------------------------------------------------------
# Pisot test
# ---------------------------------------------------------------------------


def is_pisot(x) -> bool:
    """True iff x is a Pisot number: a real algebraic integer > 1 whose other
    conjugates all have modulus strictly below 1.

    The decision is exact: moduli are compared to 1 through certified
    rational interval and rectangle bounds, refined until strict; unit-circle
    conjugates can occur only for self-reciprocal polynomials, which are
    dispatched combinatorially, so refinement always terminates.
    """
    if isinstance(x, FieldElement):
        x = x.to_algebraic()
    if isinstance(x, (int, Fraction)):
        q = Fraction(x)
        return q.denominator == 1 and q >= 2
    if not isinstance(x, AlgebraicNumber):
        raise TypeError(f"cannot test {type(x).__name__} for the Pisot property")

    if x.cmp_rational(1) <= 0:
        return False
    p = x.min_poly
    if not p.is_monic:
        return False
    d = p.degree
    if d == 1:
        return True  # integer >= 2 at this point
    if p.is_self_reciprocal():
        # roots closed under z -> 1/z: degree 2 gives {beta, 1/beta}; any
        # higher degree forces a second root with modulus >= 1
        return d == 2

    iso = x.conjugates()

    # locate x among the real roots: its interval overlaps exactly one of
    # the pairwise-disjoint isolation intervals once refined enough
    own = None
    while own is None:
        hits = [idx for idx, r in enumerate(iso.real_roots)
                if not (x.hi < r.lo or r.hi < x.lo)]
        if len(hits) == 1:
            own = hits[0]
        elif not hits:
            raise ArithmeticError("root lost during isolation")
        else:
            x.refine((x.hi - x.lo) / 4)

    for idx, r in enumerate(iso.real_roots):
        if idx == own:
            continue
        lo, hi = r.lo, r.hi
        while True:
            mlo, mhi = RealRootInterval(lo, hi).modulus_bounds()
            if mhi < 1:
                break
            if mlo > 1:
                return False
            refined = refine_real_root(p, lo, hi, (hi - lo) / 4)
            lo, hi = refined.lo, refined.hi

    from .roots import refine_complex_box
    for box in iso.complex_pairs:
        cur = box
        while True:
            lo2, hi2 = cur.modulus_sq_bounds()
            if hi2 < 1:
                break
            if lo2 > 1:
                return False
            cur = refine_complex_box(p, cur, cur.diameter / 4)
    return True


# ---------------------------------------------------------------------------
# Named constants and scalar parsing
# ---------------------------------------------------------------------------


def _named(poly: str) -> AlgebraicNumber:
    return AlgebraicNumber.largest_root(IntPolynomial.parse(poly))


def named_constant(name: str) -> AlgebraicNumber:
    table = {
        "golden": "x^2 - x - 1",
        "sqrt2": "x^2 - 2",
        "tribonacci": "x^3 - x^2 - x - 1",
        "plastic": "x^3 - x - 1",
        "supergolden": "x^3 - x^2 - 1",
    }
    if name not in table:
        raise ValueError(f"unknown named constant {name!r}; "
                         f"known: {sorted(table)}")
    return _named(table[name])


ExactScalar = Union[Fraction, FieldElement]


def parse_scalar(text: str) -> ExactScalar:
    """Parse an exact scalar: a rational like '-2/3', a named constant like
    'golden', or simple quotient forms '1/golden', 'golden/2', '-1/golden'."""
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        pass
    neg = text.startswith("-")
    if neg:
        text = text[1:].strip()
    num, _, den = text.partition("/")
    num, den = num.strip(), den.strip()

    def to_part(s):
        try:
            return Fraction(s)
        except ValueError:
            a = named_constant(s)
            return NumberField(a).beta()

    if den:
        value = _as_field_pair_div(to_part(num), to_part(den))
    else:
        value = to_part(num)
    if neg:
        value = -value
    return value


def _as_field_pair_div(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a / b
    if isinstance(a, Fraction):
        return b.field.from_rational(a) / b
    if isinstance(b, Fraction):
        return a / b
    return a / b


def scalar_to_str(x: ExactScalar) -> str:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, AlgebraicNumber):
        return f"root ~ {exact_float(x):.12g} of {x.min_poly}"
    parts = []
    for k, c in enumerate(x.vec):
        if not c:
            continue
        if k == 0:
            parts.append(str(c))
        else:
            mag = "b" if k == 1 else f"b^{k}"
            if c == 1:
                term = mag
            elif c == -1:
                term = f"-{mag}"
            else:
                term = f"{c}*{mag}"
            parts.append(term)
    body = " + ".join(parts).replace("+ -", "- ") if parts else "0"
    return f"{body} ~ {float(x):.12g} (b root of {x.field.poly})"


def exact_sign(x: ExactScalar) -> int:
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    return x.sign()


def exact_enclosure(x: ExactScalar, bits: int = 64):
    """Certified rational (lo, hi) with hi - lo < 2^-bits."""
    if isinstance(x, int):
        x = Fraction(x)
    if isinstance(x, Fraction):
        return (x, x)
    return x.enclosure(bits)


def exact_float(x) -> float:
    return float(x)


def exact_abs(x: ExactScalar) -> ExactScalar:
    return -x if exact_sign(x) < 0 else x
