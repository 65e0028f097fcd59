"""
The double series

    S_{C1,C2}(x; q) = sum_{m,n>=0} eps1^m eps2^n q^E(m,n) x^(D1 m + D2 n) / ((q^K1;q^K1)_m (q^K2;q^K2)_n),
    E(m,n) = B11 C(m+1,2) + B22 C(n+1,2) + B12 m n + C1 m + C2 n,

evaluated exactly to a q-order, and the periodic q-products it gets compared with.
"""
import logging
from functools import lru_cache
from typing import Iterator, Optional

from qfe.algebra import TruncSeries
from qfe.errors import QfeError
from qfe.schemas import ProductSpec, SeriesParams

logger = logging.getLogger(__name__)


class InadmissibleParamsError(QfeError):
    """Raised when a series is not a power series in q with constant term 1."""


def exponent(p: SeriesParams, m: int, n: int, x_power: int = 0) -> int:
    """q-exponent of the (m, n) summand, including the x = q^s twist when x_power = s."""
    return (
        p.B11 * m * (m + 1) // 2
        + p.B22 * n * (n + 1) // 2
        + p.B12 * m * n
        + (p.C1 + x_power * p.D1) * m
        + (p.C2 + x_power * p.D2) * n
    )


def _row_min(b: int, c: int) -> int:
    """min over k >= 0 of b*C(k+1,2) + c*k."""
    k, value, best = 0, 0, 0
    while True:
        step = b * (k + 1) + c
        if step >= 0:
            return best
        k += 1
        value += step
        best = min(best, value)


def _last_within(b: int, c: int, budget: int) -> int:
    """Largest k >= 0 with b*C(k+1,2) + c*k <= budget, or -1 if there is none."""
    k, value, last = 0, 0, -1
    while True:
        if value <= budget:
            last = k
        step = b * (k + 1) + c
        if step > 0 and value > budget:
            return last
        k += 1
        value += step


def summands(p: SeriesParams, order: int, x_power: int = 0) -> Iterator[tuple[int, int, int]]:
    """
    Yield (m, n, E) for every summand whose leading q-exponent E is at most order.

    Rows in m stop once E(m, 0) plus the smallest possible n-contribution exceeds the
    order; B11, B22 >= 1 make both loops finite.
    """
    c1 = p.C1 + x_power * p.D1
    c2 = p.C2 + x_power * p.D2
    m_hi = _last_within(p.B11, c1, order - _row_min(p.B22, c2))
    for m in range(m_hi + 1):
        base = p.B11 * m * (m + 1) // 2 + c1 * m
        slope = c2 + p.B12 * m
        for n in range(_last_within(p.B22, slope, order - base) + 1):
            e = base + p.B22 * n * (n + 1) // 2 + slope * n
            if e <= order:
                yield m, n, e


def is_admissible(p: SeriesParams, x_power: Optional[int] = None) -> bool:
    """
    Whether the series is a power series in q with S(0) = 1.

    With x kept symbolic (x_power None) every exponent must be >= 0; under x = q^s the
    twisted exponent must be >= 1 away from the origin.
    """
    floor = 0 if x_power is None else 1
    return all(
        e >= floor
        for m, n, e in summands(p, 0, x_power or 0)
        if m or n
    )


@lru_cache(maxsize=4096)
def _pinv(K: int, m: int, order: int) -> tuple[int, ...]:
    if m == 0:
        return (1,) + (0,) * order
    out = list(_pinv(K, m - 1, order))
    step = K * m
    for i in range(step, order + 1):
        out[i] += out[i - step]
    return tuple(out)


def _mul_lists(a: tuple[int, ...], b: tuple[int, ...], length: int) -> list[int]:
    out = [0] * length
    for i in range(length):
        ai = a[i]
        if ai:
            for j in range(length - i):
                out[i + j] += ai * b[j]
    return out


def pochhammer_inv(K: int, m: int, order: int) -> TruncSeries:
    """1/(q^K; q^K)_m truncated at q^order."""
    return TruncSeries.from_q_list(list(_pinv(K, m, order)), order)


def eval_series(p: SeriesParams, order: int, x_power: Optional[int] = None) -> TruncSeries:
    """
    Expand S_{C1,C2} exactly to q^order.

    Args:
        p: Series parameters
        order: Truncation order M
        x_power: None keeps x symbolic; an integer s substitutes x = q^s (0 gives x = 1)

    Returns:
        The truncated series

    Raises:
        InadmissibleParamsError: If a summand away from the origin has a negative
            exponent (symbolic x) or a non-positive twisted exponent (substituted x)
    """
    if order < 0:
        raise ValueError("truncation order must be non-negative")
    symbolic = x_power is None
    floor = 0 if symbolic else 1
    coeffs: dict[tuple[int, int], int] = {}
    for m, n, e in summands(p, order, x_power or 0):
        if (m or n) and e < floor:
            raise InadmissibleParamsError(
                f"series {p} has exponent {e} at (m, n) = ({m}, {n})"
                + ("" if symbolic else f" under x = q^{x_power}")
            )
        length = order - e + 1
        body = _mul_lists(_pinv(p.K1, m, order), _pinv(p.K2, n, order), length)
        sign = p.eps1 ** m * p.eps2 ** n
        xdeg = p.D1 * m + p.D2 * n if symbolic else 0
        for i, c in enumerate(body):
            if c:
                key = (xdeg, e + i)
                coeffs[key] = coeffs.get(key, 0) + sign * c
    return TruncSeries(order, coeffs)


def expand_product(spec: ProductSpec, order: int) -> TruncSeries:
    """Expand prod over residues r and j >= 0 of (1 - q^(r + j*modulus))^exponent to q^order."""
    series = TruncSeries.one(order)
    for residue, power in spec.factors:
        part = residue
        while part <= order:
            series = series.mul_one_minus_q_power(part, power)
            part += spec.modulus
    return series
