"""
Euler's algorithm: write 1 + b_1 q + b_2 q^2 + ... as prod_i (1 - q^i)^(-a_i), look for
periodic exponent patterns, and scan the (C1, C2) rectangle of a parameter tuple.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

from qfe.algebra import TruncSeries
from qfe.config import settings
from qfe.contiguous import lattice_steps
from qfe.errors import QfeError
from qfe.schemas import ProductHit, ProductSpec, SeriesParams
from qfe.series import eval_series, is_admissible

logger = logging.getLogger(__name__)


class EulerError(QfeError):
    """Raised when a series cannot be written as a product of (1 - q^i) powers."""


@dataclass(frozen=True)
class ProductForm:
    """Exponents a_1..a_M with S = prod (1 - q^i)^(-a_i); period and offset when periodic."""
    exponents: tuple[int, ...]
    period: Optional[int] = None
    offset: int = 0

    @property
    def profile(self) -> Optional[ProductSpec]:
        """The periodic part as a ProductSpec (a denominator factor has exponent -1)."""
        if self.period is None:
            return None
        k = self.period
        factors = []
        for residue in range(1, k + 1):
            i = self.offset + ((residue - self.offset - 1) % k) + 1
            if i <= len(self.exponents) and self.exponents[i - 1]:
                factors.append((residue, -self.exponents[i - 1]))
        return ProductSpec(modulus=k, factors=factors)


def euler_exponents(b: Sequence[int]) -> list[int]:
    """
    Peel the exponents a_1..a_M off b_0 = 1, b_1, ..., b_M.

    At step i the working series is 1 + O(q^i); its q^i coefficient is a_i, and multiplying
    by (1 - q^i)^(a_i) clears it.

    Raises:
        EulerError: If b is empty or b_0 != 1
    """
    if not b or b[0] != 1:
        raise EulerError(f"constant term must be 1, got {b[0] if b else 'nothing'}")
    order = len(b) - 1
    work = TruncSeries.from_q_list(list(b), order)
    exponents = []
    for i in range(1, order + 1):
        a = work.coefficient(0, i)
        exponents.append(a)
        if a:
            work = work.mul_one_minus_q_power(i, a)
    if work != TruncSeries.one(order):
        raise EulerError("peeling did not reduce the series to 1")
    return exponents


def expand_exponents(exponents: Sequence[int], order: Optional[int] = None) -> list[int]:
    """Coefficients of prod (1 - q^i)^(-a_i) through q^order (default: len(exponents))."""
    order = len(exponents) if order is None else order
    series = TruncSeries.one(order)
    for i, a in enumerate(exponents[:order], start=1):
        if a:
            series = series.mul_one_minus_q_power(i, -a)
    return series.q_coefficients()


def _repeats(values: Sequence[int], k: int) -> bool:
    return len(values) >= 2 * k and all(values[i + k] == values[i] for i in range(len(values) - k))


def detect_period(exponents: Sequence[int], kmax: int) -> Optional[int]:
    """Smallest k <= kmax with a_{i+k} = a_i over the whole list; the list must hold two full periods."""
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    for k in range(1, kmax + 1):
        if _repeats(exponents, k):
            return k
    return None


def detect_eventual_period(exponents: Sequence[int], kmax: int, max_offset: int) -> Optional[tuple[int, int]]:
    """Smallest offset, then smallest period, for which a_{offset+1}, ... is periodic."""
    for offset in range(max_offset + 1):
        period = detect_period(exponents[offset:], kmax)
        if period is not None:
            return period, offset
    return None


def product_form(b: Sequence[int], kmax: int, max_offset: int = 0) -> ProductForm:
    exponents = tuple(euler_exponents(b))
    found = detect_eventual_period(exponents, kmax, max_offset)
    if found is None:
        return ProductForm(exponents)
    period, offset = found
    return ProductForm(exponents, period, offset)


@dataclass(frozen=True)
class ScanHit:
    """A periodic product found at (c1, c2) under x = q^s."""
    c1: int
    c2: int
    s: int
    form: ProductForm

    def to_record(self) -> ProductHit:
        return ProductHit(
            c1=self.c1, c2=self.c2, s=self.s,
            period=self.form.period, offset=self.form.offset,
            profile=str(self.form.profile), exponents=list(self.form.exponents),
        )


def product_scan(p: SeriesParams, order: Optional[int] = None, kmax: Optional[int] = None,
                 x_powers: Sequence[int] = (0,), discard_trivial: bool = True,
                 max_offset: int = 0) -> list[ScanHit]:
    """
    Run Euler's algorithm on every series of the rectangle [-B11, B11] x [-B22, B22].

    Pairs step along the gcd lattice. Series that are not power series with constant term 1
    under x = q^s are skipped, and so (by default) are series that collapse to 1.

    Args:
        p: Parameter tuple; its own C1, C2 are ignored
        order: Truncation order M (default from settings)
        kmax: Largest period tried (default from settings)
        x_powers: Substitutions x = q^s to try
        discard_trivial: Skip series equal to 1 through q^M
        max_offset: Allow an aperiodic prefix of this length

    Returns:
        Periodic hits in (c1, c2, s) order
    """
    order = order or settings.QFE_EULER_ORDER
    kmax = kmax or settings.QFE_EULER_KMAX
    d1, d2 = lattice_steps(p)
    hits = []
    for c1 in range(-p.B11, p.B11 + 1, d1):
        for c2 in range(-p.B22, p.B22 + 1, d2):
            candidate = p.with_c(c1, c2)
            for s in x_powers:
                if not is_admissible(candidate, s):
                    continue
                b = eval_series(candidate, order, s).q_coefficients()
                if b[0] != 1:
                    continue
                if discard_trivial and not any(b[1:]):
                    continue
                form = product_form(b, kmax, max_offset)
                if form.period is not None:
                    logger.debug(f"Periodic product at ({c1}, {c2}), x = q^{s}: {form.profile}")
                    hits.append(ScanHit(c1, c2, s, form))
    logger.info(f"Product scan of {p}: {len(hits)} periodic series")
    return hits
