"""
Primary q-contiguous equations of the double series, their instances inside an
index box, and the counting quantities used to prune the search.
"""
import logging
from dataclasses import dataclass
from functools import reduce
from math import gcd
from typing import Iterable, Iterator, Optional, Sequence

from qfe.algebra import ONE, PolyXQ
from qfe.errors import QfeError
from qfe.schemas import SeriesParams

logger = logging.getLogger(__name__)

Pair = tuple[int, int]


class BoxError(QfeError):
    """Raised for boxes or widths that do not sit on the gcd lattice."""


# ==================== Equations ====================

@dataclass(frozen=True, order=True)
class SeriesRef:
    """S_{c1,c2} evaluated at x (shift 0) or at x*q^shift."""
    c1: int
    c2: int
    shift: int = 0

    @property
    def pair(self) -> Pair:
        return (self.c1, self.c2)

    def __str__(self) -> str:
        if self.shift == 0:
            arg = "x"
        elif self.shift == 1:
            arg = "x*q"
        else:
            arg = f"x*q^{self.shift}"
        return f"S[{self.c1},{self.c2}]({arg})"


def format_sum(terms: Iterable[tuple[PolyXQ, str]]) -> str:
    """Render sum coeff*label with monomial signs pulled out, e.g. ``S[0,0](x) - x*q*S[1,0](x*q)``."""
    pieces = []
    for coeff, label in terms:
        if coeff.is_zero():
            continue
        negative = False
        if coeff.is_monomial():
            (xdeg, qdeg), c = coeff.lowest()
            negative = c < 0
            magnitude = PolyXQ.monomial(abs(c), xdeg, qdeg)
            body = label if magnitude == ONE else f"{magnitude.pretty()}*{label}"
        else:
            body = f"({coeff.pretty()})*{label}"
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(pieces) if pieces else "0"


@dataclass(frozen=True)
class FuncEquation:
    """sum of coeff * S_ref = 0, with each ref appearing once."""
    terms: tuple[tuple[PolyXQ, SeriesRef], ...]
    kind: str = ""
    seed: Optional[Pair] = None

    @classmethod
    def build(cls, terms: Iterable[tuple[PolyXQ, SeriesRef]], kind: str = "",
              seed: Optional[Pair] = None) -> "FuncEquation":
        merged: dict[SeriesRef, PolyXQ] = {}
        for coeff, ref in terms:
            merged[ref] = merged[ref] + coeff if ref in merged else coeff
        kept = tuple((c, r) for r, c in merged.items() if not c.is_zero())
        if not kept:
            raise ValueError("a functional equation needs at least one nonzero term")
        return cls(kept, kind, seed)

    def refs(self) -> list[SeriesRef]:
        return [ref for _, ref in self.terms]

    def pairs(self) -> set[Pair]:
        return {ref.pair for _, ref in self.terms}

    def coefficient(self, ref: SeriesRef) -> PolyXQ:
        for coeff, r in self.terms:
            if r == ref:
                return coeff
        return PolyXQ()

    def __str__(self) -> str:
        return f"{format_sum((c, str(r)) for c, r in self.terms)} = 0"


def primary_equations(p: SeriesParams, c1: int, c2: int) -> tuple[FuncEquation, FuncEquation, FuncEquation]:
    """
    The three primary relations at (c1, c2):

        S_{c1,c2}(x) - S_{c1+K1,c2}(x) - eps1 x^D1 q^(B11+c1) S_{c1+B11-gD1, c2+B12-gD2}(xq^g)
        S_{c1,c2}(x) - S_{c1,c2+K2}(x) - eps2 x^D2 q^(B22+c2) S_{c1+B12-gD1, c2+B22-gD2}(xq^g)
        S_{c1,c2}(x) - S_{c1-gD1, c2-gD2}(xq^g)
    """
    g = p.gamma
    gd1, gd2 = g * p.D1, g * p.D2
    here = SeriesRef(c1, c2)
    t1 = FuncEquation.build([
        (ONE, here),
        (-ONE, SeriesRef(c1 + p.K1, c2)),
        (PolyXQ.monomial(-p.eps1, p.D1, p.B11 + c1), SeriesRef(c1 + p.B11 - gd1, c2 + p.B12 - gd2, g)),
    ], "T1", (c1, c2))
    t2 = FuncEquation.build([
        (ONE, here),
        (-ONE, SeriesRef(c1, c2 + p.K2)),
        (PolyXQ.monomial(-p.eps2, p.D2, p.B22 + c2), SeriesRef(c1 + p.B12 - gd1, c2 + p.B22 - gd2, g)),
    ], "T2", (c1, c2))
    t3 = FuncEquation.build([
        (ONE, here),
        (-ONE, SeriesRef(c1 - gd1, c2 - gd2, g)),
    ], "T3", (c1, c2))
    return t1, t2, t3


# ==================== Boxes and lattice ====================

def lattice_steps(p: SeriesParams) -> tuple[int, int]:
    """(gcd(K1, B11, B12, gD1), gcd(K2, B22, B12, gD2)): index shifts stay on this lattice."""
    d1 = reduce(gcd, (p.K1, p.B11, p.B12, p.gamma * p.D1))
    d2 = reduce(gcd, (p.K2, p.B22, p.B12, p.gamma * p.D2))
    return d1, d2


@dataclass(frozen=True)
class IndexBox:
    """C1 in m1..M1 step d1, C2 in m2..M2 step d2."""
    m1: int
    M1: int
    m2: int
    M2: int
    d1: int = 1
    d2: int = 1

    def __post_init__(self):
        if self.m1 > self.M1 or self.m2 > self.M2:
            raise BoxError(f"empty box {self.bounds}")
        if self.d1 < 1 or self.d2 < 1:
            raise BoxError("lattice steps must be positive")
        if (self.M1 - self.m1) % self.d1 or (self.M2 - self.m2) % self.d2:
            raise BoxError(f"box {self.bounds} does not fit the lattice ({self.d1}, {self.d2})")

    @classmethod
    def for_params(cls, p: SeriesParams, bounds: Sequence[int]) -> "IndexBox":
        d1, d2 = lattice_steps(p)
        m1, M1, m2, M2 = bounds
        return cls(m1, M1, m2, M2, d1, d2)

    @classmethod
    def around(cls, p: SeriesParams, seed: Pair, half_width: Pair) -> "IndexBox":
        """Box reaching half_width lattice steps on each side of the seed."""
        d1, d2 = lattice_steps(p)
        h1, h2 = half_width
        c1, c2 = seed
        return cls(c1 - h1 * d1, c1 + h1 * d1, c2 - h2 * d2, c2 + h2 * d2, d1, d2)

    @property
    def bounds(self) -> tuple[int, int, int, int]:
        return (self.m1, self.M1, self.m2, self.M2)

    @property
    def widths(self) -> Pair:
        return (self.M1 - self.m1, self.M2 - self.m2)

    def contains(self, pair: Pair) -> bool:
        c1, c2 = pair
        return (
            self.m1 <= c1 <= self.M1 and self.m2 <= c2 <= self.M2
            and (c1 - self.m1) % self.d1 == 0 and (c2 - self.m2) % self.d2 == 0
        )

    def pairs(self) -> Iterator[Pair]:
        for c1 in range(self.m1, self.M1 + 1, self.d1):
            for c2 in range(self.m2, self.M2 + 1, self.d2):
                yield (c1, c2)


def enumerate_box(p: SeriesParams, box: IndexBox) -> list[FuncEquation]:
    """
    Every T1, T2 and T3 instance whose index pairs all lie in the box.

    Returns:
        T1 block, then T2, then T3; each block in lexicographic order of the seed pair
    """
    instances = [primary_equations(p, c1, c2) for c1, c2 in box.pairs()]
    out = []
    for kind in range(3):
        for triple in instances:
            eq = triple[kind]
            if all(box.contains(pair) for pair in eq.pairs()):
                out.append(eq)
    logger.debug(f"Box {box.bounds} for {p}: {len(out)} equations")
    return out


# ==================== Counting ====================

def rect_sizes(p: SeriesParams) -> tuple[int, int, int, int, int, int]:
    """Spread (x_j, y_j) of the index pairs in each of the three primary relations."""
    gd1, gd2 = p.gamma * p.D1, p.gamma * p.D2
    x1 = max(p.K1, abs(p.B11 - gd1), abs(p.K1 - p.B11 + gd1))
    y1 = abs(p.B12 - gd2)
    x2 = abs(p.B12 - gd1)
    y2 = max(p.K2, abs(p.B22 - gd2), abs(p.K2 - p.B22 + gd2))
    return x1, y1, x2, y2, gd1, gd2


def _check_widths(p: SeriesParams, dm1: int, dm2: int) -> tuple[int, int]:
    d1, d2 = lattice_steps(p)
    if dm1 < 0 or dm2 < 0 or dm1 % d1 or dm2 % d2:
        raise BoxError(f"widths ({dm1}, {dm2}) are not non-negative multiples of ({d1}, {d2})")
    return d1, d2


def count_equations(p: SeriesParams, dm1: int, dm2: int) -> int:
    """Number of relation instances fitting a box of widths (dm1, dm2); impossible rectangles count 0."""
    d1, d2 = _check_widths(p, dm1, dm2)
    x1, y1, x2, y2, x3, y3 = rect_sizes(p)
    total = 0
    for xj, yj in ((x1, y1), (x2, y2), (x3, y3)):
        if dm1 < xj or dm2 < yj:
            continue
        total += ((dm1 - xj) // d1 + 1) * ((dm2 - yj) // d2 + 1)
    return total


def count_series(p: SeriesParams, dm1: int, dm2: int) -> int:
    """Number of series S(x), S(xq^g) indexed by the box."""
    d1, d2 = _check_widths(p, dm1, dm2)
    return 2 * (dm1 // d1 + 1) * (dm2 // d2 + 1)


def feasible(p: SeriesParams, dm1: int, dm2: int, d: int) -> bool:
    """Sufficient condition for a nontrivial d-series system: more equations than unwanted series."""
    return count_equations(p, dm1, dm2) > count_series(p, dm1, dm2) - 2 * d


def dilation_filter(p: SeriesParams, include_c: bool = False) -> bool:
    """True (keep) unless all of B11, B22, B12, K1, K2 (and optionally C1, C2) share a factor."""
    values = [p.B11, p.B22, p.B12, p.K1, p.K2]
    if include_c:
        values += [p.C1, p.C2]
    return reduce(gcd, values) == 1
