"""
Exact arithmetic in x and q: sparse Laurent polynomials (negative q-degrees allowed),
their fractions, and bivariate power series truncated in q.

Everything is immutable once built. Bivariate gcd and exact division are delegated to
sympy's sparse polynomial rings; the rest is plain dict arithmetic on Python ints.
"""
import logging
import re
from math import comb
from typing import Iterable, Mapping, Optional

from sympy.polys.domains import ZZ
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import ring

from qfe.errors import QfeError

logger = logging.getLogger(__name__)

Term = tuple[int, int]

_RING, _, _ = ring("x,q", ZZ)


class PolyParseError(QfeError):
    """Raised when a polynomial string is not in the accepted textual form."""


class DivisionError(QfeError):
    """Raised on division by zero or a division that does not come out exact."""


class SeriesError(QfeError):
    """Raised on truncation-order mismatch or negative q-degrees in a series."""


# ==================== Polynomials ====================

class PolyXQ:
    """
    Sparse polynomial in x (non-negative degrees) and q (any integer degree).

    Terms are kept in a dict keyed by (xdeg, qdeg), sorted lexicographically, with no
    zero coefficients stored. Two equal polynomials always have identical term maps.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Term, int]] = None):
        clean = {}
        for (xdeg, qdeg), coeff in (terms or {}).items():
            if xdeg < 0:
                raise ValueError(f"x-degree must be non-negative, got {xdeg}")
            if coeff:
                clean[(int(xdeg), int(qdeg))] = int(coeff)
        self._terms = dict(sorted(clean.items()))
        self._hash = None

    @classmethod
    def monomial(cls, coeff: int = 1, xdeg: int = 0, qdeg: int = 0) -> "PolyXQ":
        return cls({(xdeg, qdeg): coeff})

    @classmethod
    def constant(cls, coeff: int) -> "PolyXQ":
        return cls({(0, 0): coeff})

    # ----- inspection -----

    def items(self) -> Iterable[tuple[Term, int]]:
        return self._terms.items()

    @property
    def terms(self) -> dict[Term, int]:
        return dict(self._terms)

    def coefficient(self, xdeg: int, qdeg: int) -> int:
        return self._terms.get((xdeg, qdeg), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def min_qdeg(self) -> int:
        return min(q for _, q in self._terms) if self._terms else 0

    def max_xdeg(self) -> int:
        return max(x for x, _ in self._terms) if self._terms else 0

    def lowest(self) -> tuple[Term, int]:
        """First term in canonical (xdeg, qdeg) order."""
        return next(iter(self._terms.items()))

    def at_x_zero(self) -> "PolyXQ":
        return PolyXQ({k: c for k, c in self._terms.items() if k[0] == 0})

    def has_nonnegative_coefficients(self) -> bool:
        return all(c > 0 for c in self._terms.values())

    # ----- ring operations -----

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = PolyXQ.constant(other)
        if not isinstance(other, PolyXQ):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __add__(self, other) -> "PolyXQ":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return PolyXQ(out)

    __radd__ = __add__

    def __neg__(self) -> "PolyXQ":
        return PolyXQ({k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "PolyXQ":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "PolyXQ":
        return (-self) + other

    def __mul__(self, other) -> "PolyXQ":
        if isinstance(other, int):
            return self.scale(other)
        if not isinstance(other, PolyXQ):
            return NotImplemented
        out: dict[Term, int] = {}
        for (x1, q1), c1 in self._terms.items():
            for (x2, q2), c2 in other._terms.items():
                key = (x1 + x2, q1 + q2)
                out[key] = out.get(key, 0) + c1 * c2
        return PolyXQ(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "PolyXQ":
        if exponent < 0:
            raise ValueError("negative powers are not polynomials")
        result = ONE
        for _ in range(exponent):
            result = result * self
        return result

    def scale(self, factor: int) -> "PolyXQ":
        return PolyXQ({k: c * factor for k, c in self._terms.items()}) if factor else ZERO

    def shift_q(self, k: int) -> "PolyXQ":
        """Multiply by q^k."""
        return PolyXQ({(x, q + k): c for (x, q), c in self._terms.items()})

    def subst_x(self, s: int) -> "PolyXQ":
        """Substitute x -> x*q^s."""
        return PolyXQ({(x, q + s * x): c for (x, q), c in self._terms.items()})

    # ----- gcd and exact division (sympy ring) -----

    def _to_ring(self):
        shift = self.min_qdeg()
        elem = _RING.from_dict({(x, q - shift): c for (x, q), c in self._terms.items()})
        return elem, shift

    @classmethod
    def _from_ring(cls, elem, shift: int = 0) -> "PolyXQ":
        return cls({(int(x), int(q) + shift): int(c) for (x, q), c in elem.items()})

    def exact_div(self, other: "PolyXQ") -> "PolyXQ":
        """
        Divide exactly by another Laurent polynomial.

        Raises:
            DivisionError: If other is zero or the quotient is not a Laurent polynomial
        """
        if other.is_zero():
            raise DivisionError("division by the zero polynomial")
        if self.is_zero():
            return ZERO
        a, sa = self._to_ring()
        b, sb = other._to_ring()
        try:
            quotient = a.exquo(b)
        except ExactQuotientFailed:
            raise DivisionError(f"{self} is not divisible by {other}")
        return PolyXQ._from_ring(quotient, sa - sb)

    def gcd(self, other: "PolyXQ") -> "PolyXQ":
        """Greatest common divisor up to units (sign and powers of q), positive leading term."""
        if self.is_zero():
            return other.normalized()
        if other.is_zero():
            return self.normalized()
        a, _ = self._to_ring()
        b, _ = other._to_ring()
        return PolyXQ._from_ring(a.gcd(b))

    def normalized(self) -> "PolyXQ":
        """Associate with lowest q-degree 0 and a positive lowest term."""
        if self.is_zero():
            return self
        out = self.shift_q(-self.min_qdeg())
        return -out if out.lowest()[1] < 0 else out

    # ----- printing and parsing -----

    def __str__(self) -> str:
        """Canonical form, e.g. ``-1*x^2*q^3 + 1``: descending order, explicit coefficients."""
        if not self._terms:
            return "0"
        pieces = []
        for (x, q), c in reversed(self._terms.items()):
            mono = _monomial_text(x, q)
            body = f"{abs(c)}*{mono}" if mono else str(abs(c))
            if not pieces:
                pieces.append(f"-{body}" if c < 0 else body)
            else:
                pieces.append(f"- {body}" if c < 0 else f"+ {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"PolyXQ('{self}')"

    def pretty(self) -> str:
        """Human form in ascending order with unit coefficients elided, e.g. ``1 + x^2*q^2``."""
        if not self._terms:
            return "0"
        pieces = []
        for (x, q), c in self._terms.items():
            mono = _monomial_text(x, q)
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            if not pieces:
                pieces.append(f"-{body}" if c < 0 else body)
            else:
                pieces.append(f"- {body}" if c < 0 else f"+ {body}")
        return " ".join(pieces)

    @classmethod
    def parse(cls, text: str) -> "PolyXQ":
        """
        Parse the canonical or the human form back into a polynomial.

        Raises:
            PolyParseError: If text is not a sum of integer multiples of x^a*q^b
        """
        source = text.replace(" ", "")
        if not source:
            raise PolyParseError("empty polynomial string")
        out: dict[Term, int] = {}
        pos = 0
        while pos < len(source):
            match = _TERM_RE.match(source, pos)
            if match is None or match.end() == pos:
                raise PolyParseError(f"cannot parse '{text}' at position {pos}")
            if pos > 0 and not match.group("sign"):
                raise PolyParseError(f"missing sign between terms in '{text}'")
            if not (match.group("coef") or match.group("x") or match.group("q")):
                raise PolyParseError(f"dangling sign in '{text}'")
            coeff = int(match.group("coef") or 1)
            if match.group("sign") == "-":
                coeff = -coeff
            xdeg = int(match.group("xe") or 1) if match.group("x") else 0
            qdeg = int(match.group("qe") or 1) if match.group("q") else 0
            out[(xdeg, qdeg)] = out.get((xdeg, qdeg), 0) + coeff
            pos = match.end()
        return cls(out)


_TERM_RE = re.compile(
    r"(?P<sign>[+-])?(?P<coef>\d+)?\*?(?P<x>x(?:\^(?P<xe>\d+))?)?\*?(?P<q>q(?:\^\(?(?P<qe>-?\d+)\)?)?)?"
)


def _monomial_text(xdeg: int, qdeg: int) -> str:
    parts = []
    if xdeg:
        parts.append("x" if xdeg == 1 else f"x^{xdeg}")
    if qdeg:
        parts.append("q" if qdeg == 1 else f"q^{qdeg}")
    return "*".join(parts)


def _coerce(value) -> Optional[PolyXQ]:
    if isinstance(value, PolyXQ):
        return value
    if isinstance(value, int):
        return PolyXQ.constant(value)
    return None


ZERO = PolyXQ()
ONE = PolyXQ.constant(1)
X = PolyXQ.monomial(1, 1, 0)
Q = PolyXQ.monomial(1, 0, 1)


def poly_add(a: PolyXQ, b: PolyXQ) -> PolyXQ:
    return a + b


def poly_mul(a: PolyXQ, b: PolyXQ) -> PolyXQ:
    return a * b


def poly_scale(a: PolyXQ, factor: int) -> PolyXQ:
    return a.scale(factor)


def content(polys: Iterable[PolyXQ]) -> PolyXQ:
    """gcd of a family of polynomials; ONE for an empty or all-zero family."""
    g = ZERO
    for p in polys:
        if p.is_zero():
            continue
        g = p.normalized() if g.is_zero() else g.gcd(p)
        if g == ONE:
            break
    return g if not g.is_zero() else ONE


# ==================== Rational functions ====================

class RatXQ:
    """
    Quotient num/den of two polynomials.

    No gcd normalization happens on construction; equality is decided by
    cross-multiplication. Call ``reduced()`` for the lowest-terms representative.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: PolyXQ, den: PolyXQ = ONE):
        if den.is_zero():
            raise DivisionError("rational function with zero denominator")
        self.num = num
        self.den = den

    def __eq__(self, other) -> bool:
        if isinstance(other, PolyXQ):
            other = RatXQ(other)
        if not isinstance(other, RatXQ):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self) -> int:
        r = self.reduced()
        return hash((r.num, r.den))

    def __neg__(self) -> "RatXQ":
        return RatXQ(-self.num, self.den)

    def __add__(self, other: "RatXQ") -> "RatXQ":
        if isinstance(other, PolyXQ):
            other = RatXQ(other)
        if self.den == other.den:
            return RatXQ(self.num + other.num, self.den)
        return RatXQ(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RatXQ") -> "RatXQ":
        return self + (-other if isinstance(other, RatXQ) else RatXQ(-other))

    def __mul__(self, other: "RatXQ") -> "RatXQ":
        if isinstance(other, PolyXQ):
            other = RatXQ(other)
        return RatXQ(self.num * other.num, self.den * other.den)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def reduced(self) -> "RatXQ":
        """Lowest terms with the denominator's lowest term positive and at q-degree 0."""
        if self.num.is_zero():
            return RatXQ(ZERO, ONE)
        g = self.num.gcd(self.den)
        num = self.num.exact_div(g)
        den = self.den.exact_div(g)
        shift = den.min_qdeg()
        num, den = num.shift_q(-shift), den.shift_q(-shift)
        if den.lowest()[1] < 0:
            num, den = -num, -den
        return RatXQ(num, den)

    def is_polynomial(self) -> bool:
        return self.reduced().den == ONE

    def as_poly(self) -> PolyXQ:
        r = self.reduced()
        if r.den != ONE:
            raise DivisionError(f"{self} is not a polynomial")
        return r.num

    def __str__(self) -> str:
        r = self.reduced()
        if r.den == ONE:
            return str(r.num)
        return f"({r.num}) / ({r.den})"

    def __repr__(self) -> str:
        return f"RatXQ('{self}')"


# ==================== Truncated series ====================

class TruncSeries:
    """
    Bivariate power series sum c[k, n] x^k q^n known exactly for n <= order.

    x-degrees are never truncated. All operations return new series at the same order.
    """

    __slots__ = ("order", "_coeffs")

    def __init__(self, order: int, coeffs: Optional[Mapping[Term, int]] = None):
        if order < 0:
            raise SeriesError(f"truncation order must be non-negative, got {order}")
        clean = {}
        for (xdeg, qdeg), c in (coeffs or {}).items():
            if qdeg < 0 or xdeg < 0:
                raise SeriesError(f"negative degree ({xdeg}, {qdeg}) in a power series")
            if c and qdeg <= order:
                clean[(xdeg, qdeg)] = int(c)
        self.order = order
        self._coeffs = dict(sorted(clean.items()))

    @classmethod
    def one(cls, order: int) -> "TruncSeries":
        return cls(order, {(0, 0): 1})

    @classmethod
    def from_poly(cls, poly: PolyXQ, order: int) -> "TruncSeries":
        return cls(order, dict(poly.items()))

    @classmethod
    def from_q_list(cls, coeffs: list[int], order: Optional[int] = None) -> "TruncSeries":
        """Univariate series from b_0, b_1, ...; order defaults to len(coeffs) - 1."""
        order = len(coeffs) - 1 if order is None else order
        return cls(order, {(0, n): c for n, c in enumerate(coeffs)})

    def items(self) -> Iterable[tuple[Term, int]]:
        return self._coeffs.items()

    def coefficient(self, xdeg: int, qdeg: int) -> int:
        return self._coeffs.get((xdeg, qdeg), 0)

    def q_coefficients(self) -> list[int]:
        """Coefficients of q^0..q^order with x set to 1."""
        out = [0] * (self.order + 1)
        for (_, n), c in self._coeffs.items():
            out[n] += c
        return out

    def is_zero(self) -> bool:
        return not self._coeffs

    def valuation(self) -> Optional[int]:
        """Lowest q-degree with a nonzero coefficient, None when zero to this order."""
        return min((n for _, n in self._coeffs), default=None)

    def truncate(self, order: int) -> "TruncSeries":
        if order > self.order:
            raise SeriesError(f"cannot raise truncation order {self.order} to {order}")
        return TruncSeries(order, self._coeffs)

    def _check(self, other: "TruncSeries"):
        if self.order != other.order:
            raise SeriesError(f"truncation orders differ: {self.order} vs {other.order}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.order == other.order and self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash((self.order, tuple(self._coeffs.items())))

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check(other)
        out = dict(self._coeffs)
        for k, c in other._coeffs.items():
            out[k] = out.get(k, 0) + c
        return TruncSeries(self.order, out)

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(self.order, {k: -c for k, c in self._coeffs.items()})

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def __mul__(self, other) -> "TruncSeries":
        if isinstance(other, int):
            return TruncSeries(self.order, {k: c * other for k, c in self._coeffs.items()})
        if isinstance(other, PolyXQ):
            return self.mul_poly(other)
        self._check(other)
        return self._convolve(other._coeffs.items())

    __rmul__ = __mul__

    def mul_poly(self, poly: PolyXQ) -> "TruncSeries":
        """Multiply by a polynomial whose q-degrees are non-negative."""
        if poly.min_qdeg() < 0:
            raise SeriesError(f"cannot multiply a power series by {poly}")
        return self._convolve(poly.items())

    def _convolve(self, factor: Iterable[tuple[Term, int]]) -> "TruncSeries":
        M = self.order
        by_q = sorted(factor, key=lambda item: item[0][1])
        out: dict[Term, int] = {}
        for (x1, q1), c1 in self._coeffs.items():
            for (x2, q2), c2 in by_q:
                if q1 + q2 > M:
                    break
                key = (x1 + x2, q1 + q2)
                out[key] = out.get(key, 0) + c1 * c2
        return TruncSeries(M, out)

    def subst_x(self, s: int) -> "TruncSeries":
        """Substitute x -> x*q^s; coefficient (k, n) moves to (k, n + k*s)."""
        if s < 0:
            raise SeriesError("x -> x*q^s needs s >= 0")
        return TruncSeries(self.order, {(k, n + k * s): c for (k, n), c in self._coeffs.items()})

    def subst_x_value(self, value: int, s: int) -> "TruncSeries":
        """Substitute x -> value*q^s, collapsing to a series in q alone."""
        if s < 0:
            raise SeriesError("x -> c*q^s needs s >= 0")
        out: dict[Term, int] = {}
        for (k, n), c in self._coeffs.items():
            key = (0, n + k * s)
            out[key] = out.get(key, 0) + c * value ** k
        return TruncSeries(self.order, out)

    def mul_one_minus_q_power(self, i: int, e: int) -> "TruncSeries":
        """Multiply by (1 - q^i)^e for any integer e (negative e expands the binomial series)."""
        if i <= 0:
            raise SeriesError(f"factor (1 - q^{i}) is not a power-series unit")
        if e == 0:
            return self
        top = self.order // i
        if e > 0:
            factor = [(-1) ** j * comb(e, j) for j in range(min(e, top) + 1)]
        else:
            factor = [comb(-e + j - 1, j) for j in range(top + 1)]
        return self._convolve(((0, i * j), b) for j, b in enumerate(factor) if b)

    def __str__(self) -> str:
        body = str(PolyXQ(self._coeffs)) if self._coeffs else "0"
        return f"{body} + O(q^{self.order + 1})"

    def __repr__(self) -> str:
        return f"TruncSeries({self})"


def series_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    return a * b


def series_subst_x(a: TruncSeries, s: int) -> TruncSeries:
    return a.subst_x(s)

