"""
From a box of contiguous equations to closed systems

    S_a(x) = sum_b f_ab(x, q) S_b(x q^gamma),   a, b in a keep-set A.

Every equation of the box gets an unknown multiplier t_j. The coefficient of each series
in sum_j t_j E_j is a linear form in the t_j; forms of series outside A must vanish. The
resulting homogeneous system is solved exactly over Z[x, q, 1/q] by fraction-free
elimination with content removal, and the surviving forms are row-reduced into the
solved shape above.
"""
import logging
from dataclasses import dataclass, field
from math import ceil
from typing import Any, Iterable, Optional, Sequence

from qfe.algebra import ONE, ZERO, PolyXQ, RatXQ, TruncSeries, content
from qfe.contiguous import BoxError, FuncEquation, IndexBox, Pair, SeriesRef, enumerate_box, format_sum
from qfe.errors import QfeError
from qfe.schemas import SeriesParams
from qfe.series import eval_series

logger = logging.getLogger(__name__)

Row = dict[int, PolyXQ]


class ExtractionError(QfeError):
    """Raised when the kept x-coefficients do not reach full rank."""

    def __init__(self, message: str, rank: int):
        super().__init__(message)
        self.rank = rank


class UniquenessError(QfeError):
    """Raised when the fixed-point iteration of a system fails or disagrees with the series."""


# ==================== Exact elimination ====================

def _primitive(row: Row) -> Row:
    """Divide out the gcd of the entries and the common power of q."""
    if not row:
        return row
    g = content(row.values())
    if g != ONE:
        row = {j: v.exact_div(g) for j, v in row.items()}
    shift = min(v.min_qdeg() for v in row.values())
    if shift:
        row = {j: v.shift_q(-shift) for j, v in row.items()}
    return row


def _combine(row: Row, pivot_row: Row, col: int) -> Row:
    """Cancel row[col] against pivot_row[col] without leaving the polynomial ring."""
    a = pivot_row[col]
    b = row[col]
    g = a.gcd(b)
    fa, fb = a.exact_div(g), b.exact_div(g)
    out = {}
    for j in set(row) | set(pivot_row):
        value = row.get(j, ZERO) * fa - pivot_row.get(j, ZERO) * fb
        if value:
            out[j] = value
    return _primitive(out)


def _sign_normalized(row: Row) -> Row:
    if row and row[min(row)].lowest()[1] < 0:
        return {j: -v for j, v in row.items()}
    return row


def echelon_form(rows: Iterable[Row], columns: Sequence[int]) -> tuple[list[Row], list[int]]:
    """
    Fraction-free row echelon form restricted to the given pivot columns.

    Pivot choice: smallest column first; among rows reaching it, the sparsest row, then
    the pivot entry with fewest terms, then the earliest row.

    Returns:
        (pivot rows, pivot columns) in elimination order
    """
    work = [_primitive(dict(r)) for r in rows if r]
    echelon: list[Row] = []
    pivots: list[int] = []
    for col in columns:
        candidates = [i for i, r in enumerate(work) if col in r]
        if not candidates:
            continue
        best = min(candidates, key=lambda i: (len(work[i]), len(work[i][col]), i))
        pivot_row = work.pop(best)
        rest = []
        for r in work:
            if col in r:
                r = _combine(r, pivot_row, col)
            if r:
                rest.append(r)
        work = rest
        echelon.append(pivot_row)
        pivots.append(col)
    return echelon, pivots


def nullspace(rows: Sequence[Row], ncols: int) -> tuple[list[tuple[PolyXQ, ...]], list[int]]:
    """
    Polynomial basis of {v : row . v = 0 for every row}.

    One vector per free column f, with v[f] != 0 and every other free entry 0, obtained by
    fraction-free back substitution; each vector is primitive with a positive first entry.

    Returns:
        (basis vectors, free columns)
    """
    echelon, pivots = echelon_form(rows, range(ncols))
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free:
        v: Row = {f: ONE}
        for row, pc in zip(reversed(echelon), reversed(pivots)):
            s = ZERO
            for j, entry in row.items():
                if j != pc and j in v:
                    s = s + entry * v[j]
            if s.is_zero():
                continue
            piv = row[pc]
            g = piv.gcd(s)
            scale = piv.exact_div(g)
            v = {j: e * scale for j, e in v.items()}
            v[pc] = -s.exact_div(g)
        v = _sign_normalized(_primitive(v))
        basis.append(tuple(v.get(j, ZERO) for j in range(ncols)))
    return basis, free


# ==================== Master combination ====================

def _t_label(j: int) -> str:
    return f"t{j + 1}"


@dataclass(frozen=True)
class MasterCombination:
    """Coefficient of every box series in sum_j t_j E_j as a sparse linear form in the t_j."""
    params: SeriesParams
    box: IndexBox
    equations: tuple[FuncEquation, ...]
    refs: tuple[SeriesRef, ...]
    forms: dict[SeriesRef, Row] = field(hash=False)

    @property
    def T(self) -> int:
        return len(self.equations)

    def form(self, ref: SeriesRef) -> Row:
        return self.forms.get(ref, {})

    def form_text(self, ref: SeriesRef) -> str:
        form = self.form(ref)
        return format_sum((form[j], _t_label(j)) for j in sorted(form))


def assemble(p: SeriesParams, box: IndexBox) -> MasterCombination:
    """
    Collect coefficients of like series in sum_j t_j E_j over the equations of the box.

    Forms are listed for all series of the box (zero forms included): first every S(x),
    then every S(x q^gamma), each block in lexicographic pair order.
    """
    equations = tuple(enumerate_box(p, box))
    pairs = list(box.pairs())
    refs = tuple(SeriesRef(c1, c2, 0) for c1, c2 in pairs) + tuple(
        SeriesRef(c1, c2, p.gamma) for c1, c2 in pairs
    )
    forms: dict[SeriesRef, Row] = {ref: {} for ref in refs}
    for j, eq in enumerate(equations):
        for coeff, ref in eq.terms:
            forms[ref][j] = coeff
    return MasterCombination(p, box, equations, refs, forms)


@dataclass(frozen=True)
class AnnihilatorBasis:
    """Polynomial vectors (t_1..t_T) spanning the multipliers that cancel every unwanted series."""
    vectors: tuple[tuple[PolyXQ, ...], ...]
    free: tuple[int, ...]
    T: int

    @property
    def dimension(self) -> int:
        return len(self.vectors)

    def vector_text(self, index: int) -> list[str]:
        """Nonzero entries as ``t4 = 1``, ``t12 = -x*q``."""
        return [f"{_t_label(j)} = {v.pretty()}" for j, v in enumerate(self.vectors[index]) if v]


def _check_keep(mc: MasterCombination, keep: Sequence[Pair]) -> list[Pair]:
    keep = [tuple(pair) for pair in keep]
    if len(set(keep)) != len(keep):
        raise ValueError(f"keep-set {keep} has repeated pairs")
    outside = [pair for pair in keep if not mc.box.contains(pair)]
    if outside:
        raise BoxError(f"keep pairs {outside} are not lattice points of box {mc.box.bounds}")
    return keep


def solve_annihilator(mc: MasterCombination, keep: Sequence[Pair]) -> AnnihilatorBasis:
    """
    Basis of the t-vectors making every linear form of a series outside the keep-set vanish.

    Both S(x) and S(x q^gamma) of every non-kept pair are annihilated.
    """
    kept = set(_check_keep(mc, keep))
    rows = [mc.form(ref) for ref in mc.refs if ref.pair not in kept and mc.form(ref)]
    vectors, free = nullspace(rows, mc.T)
    logger.debug(f"Annihilator for keep {sorted(kept)}: {len(rows)} forms, dimension {len(vectors)}")
    return AnnihilatorBasis(tuple(vectors), tuple(free), mc.T)


# ==================== Extracted systems ====================

@dataclass(frozen=True)
class SolvedEquation:
    """S_lhs(x) = sum over rhs of f * S_pair(x q^gamma)."""
    lhs: Pair
    rhs: tuple[tuple[Pair, RatXQ], ...]
    gamma: int = 1

    def is_polynomial(self) -> bool:
        return all(f.is_polynomial() for _, f in self.rhs)

    def is_nonnegative(self) -> bool:
        return all(f.is_polynomial() and f.as_poly().has_nonnegative_coefficients() for _, f in self.rhs)

    def __str__(self) -> str:
        pieces = []
        for pair, f in self.rhs:
            label = str(SeriesRef(pair[0], pair[1], self.gamma))
            r = f.reduced()
            if r.den == ONE:
                text = format_sum([(r.num, label)])
            else:
                text = f"({r.num.pretty()})/({r.den.pretty()})*{label}"
            if not pieces:
                pieces.append(text)
            elif text.startswith("-"):
                pieces.append(f"- {text[1:]}")
            else:
                pieces.append(f"+ {text}")
        lhs = SeriesRef(self.lhs[0], self.lhs[1], 0)
        return f"{lhs} = {' '.join(pieces) if pieces else '0'}"


@dataclass(frozen=True)
class ExtractedSystem:
    """A closed system for the keep-set, plus the raw specialised equations it came from."""
    params: SeriesParams
    keep: tuple[Pair, ...]
    equations: tuple[SolvedEquation, ...]
    reduced: tuple[FuncEquation, ...] = ()
    rank: int = 0

    @property
    def complete(self) -> bool:
        return len(self.equations) == len(self.keep)

    @property
    def all_polynomial(self) -> bool:
        return all(eq.is_polynomial() for eq in self.equations)

    @property
    def all_nonnegative(self) -> bool:
        return all(eq.is_nonnegative() for eq in self.equations)

    def lines(self) -> list[str]:
        return [str(eq) for eq in self.equations]

    def reduced_lines(self) -> list[str]:
        return [str(eq) for eq in self.reduced]

    def key(self) -> tuple:
        """Identity up to equation reordering."""
        return (tuple(sorted(self.keep)), tuple(sorted(self.lines())))

    def rank_key(self) -> tuple:
        """Sort key: polynomial systems first, then non-negative ones, then keep-set order."""
        return (not self.all_polynomial, not self.all_nonnegative, sorted(self.keep))

    def to_dict(self, residual_order: Optional[int] = None) -> dict[str, Any]:
        return {
            "params": self.params.model_dump(),
            "keep": [list(pair) for pair in self.keep],
            "equations": [
                {
                    "lhs": list(eq.lhs),
                    "rhs": [
                        {"pair": list(pair), "num": str(f.reduced().num), "den": str(f.reduced().den)}
                        for pair, f in eq.rhs
                    ],
                    "text": str(eq),
                }
                for eq in self.equations
            ],
            "flags": {
                "all_polynomial": self.all_polynomial,
                "all_nonnegative": self.all_nonnegative,
                "complete": self.complete,
            },
            "residual_order": residual_order,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ExtractedSystem":
        params = SeriesParams(**data["params"])
        equations = tuple(
            SolvedEquation(
                tuple(item["lhs"]),
                tuple(
                    (tuple(term["pair"]), RatXQ(PolyXQ.parse(term["num"]), PolyXQ.parse(term["den"])))
                    for term in item["rhs"]
                ),
                params.gamma,
            )
            for item in data["equations"]
        )
        return cls(params, tuple(tuple(pair) for pair in data["keep"]), equations, (), len(equations))


def _reduced_equation(row: Row, cols: Sequence[SeriesRef]) -> FuncEquation:
    return FuncEquation.build(((row[k], cols[k]) for k in sorted(row)), "reduced")


def extract_system(mc: MasterCombination, basis: AnnihilatorBasis, keep: Sequence[Pair],
                   allow_partial: bool = False) -> ExtractedSystem:
    """
    Turn the annihilator basis into solved equations S_a(x) = sum_b f_ab S_b(x q^gamma).

    Each basis vector applied to the kept forms gives one reduced equation. The stack is
    row-reduced until the S(x) columns form an identity block, one equation per kept pair.

    Args:
        mc: Master combination of the box
        basis: Annihilator basis for this keep-set
        keep: Kept index pairs; their order fixes the equation order
        allow_partial: Return the equations reached instead of failing on rank deficiency

    Returns:
        The extracted system

    Raises:
        ExtractionError: If the S(x) block has rank below the keep-set size
    """
    keep = _check_keep(mc, keep)
    d = len(keep)
    gamma = mc.params.gamma
    cols = [SeriesRef(a, b, 0) for a, b in keep] + [SeriesRef(a, b, gamma) for a, b in keep]
    forms = [mc.form(ref) for ref in cols]

    stack: list[Row] = []
    for vector in basis.vectors:
        row: Row = {}
        for k, form in enumerate(forms):
            value = ZERO
            for j, coeff in form.items():
                if vector[j]:
                    value = value + coeff * vector[j]
            if value:
                row[k] = value
        if row:
            stack.append(_sign_normalized(_primitive(row)))
    reduced = tuple(_reduced_equation(row, cols) for row in stack)

    echelon, pivots = echelon_form(stack, range(d))
    for i in range(len(echelon) - 1, -1, -1):
        pc = pivots[i]
        for k in range(i):
            if pc in echelon[k]:
                echelon[k] = _combine(echelon[k], echelon[i], pc)
    rank = len(pivots)
    if rank < d and not allow_partial:
        raise ExtractionError(f"S(x) block of keep-set {keep} has rank {rank} < {d}", rank)

    equations = []
    for row, pc in sorted(zip(echelon, pivots), key=lambda item: item[1]):
        if any(k < d and k != pc for k in row):
            continue
        lead = row[pc]
        rhs = tuple(
            (keep[k - d], RatXQ(-row[k], lead).reduced())
            for k in range(d, 2 * d) if k in row
        )
        equations.append(SolvedEquation(keep[pc], rhs, gamma))
    return ExtractedSystem(mc.params, tuple(keep), tuple(equations), reduced, rank)


def solve_keep_set(p: SeriesParams, box: IndexBox, keep: Sequence[Pair],
                   allow_partial: bool = False) -> tuple[AnnihilatorBasis, ExtractedSystem]:
    """assemble, solve_annihilator and extract_system in one call."""
    mc = assemble(p, box)
    basis = solve_annihilator(mc, keep)
    if not basis.vectors:
        raise ExtractionError(f"only the trivial combination cancels outside {list(keep)}", 0)
    return basis, extract_system(mc, basis, keep, allow_partial)


# ==================== Numeric checks ====================

@dataclass
class VerifyReport:
    """Residual order per equation; None means the residual vanishes through q^order."""
    order: int
    residual_orders: list[Optional[int]]
    lines: list[str]

    @property
    def ok(self) -> bool:
        return all(r is None for r in self.residual_orders)

    @property
    def first_residual(self) -> Optional[int]:
        found = [r for r in self.residual_orders if r is not None]
        return min(found) if found else None


def _lcm(a: PolyXQ, b: PolyXQ) -> PolyXQ:
    return (a * b).exact_div(a.gcd(b))


def verify_system(p: SeriesParams, sys: ExtractedSystem, order: int) -> VerifyReport:
    """
    Expand every series of the system and measure LHS - RHS for each equation.

    Rational coefficients are cleared by the common denominator first; the reported
    order is that of the residual itself.

    Raises:
        InadmissibleParamsError: If a kept series is not a power series in q
    """
    gamma = p.gamma
    equations = []
    for eq in sys.equations:
        dens = ONE
        for _, f in eq.rhs:
            dens = _lcm(dens, f.reduced().den)
        lhs = dens
        rhs = [(pair, f.reduced().num * dens.exact_div(f.reduced().den)) for pair, f in eq.rhs]
        low = min([lhs.min_qdeg()] + [c.min_qdeg() for _, c in rhs if c])
        if low:
            lhs = lhs.shift_q(-low)
            rhs = [(pair, c.shift_q(-low)) for pair, c in rhs]
        equations.append((eq, lhs, rhs))

    work_order = order + max((lhs.min_qdeg() for _, lhs, _ in equations), default=0)
    cache: dict[Pair, TruncSeries] = {}

    def series(pair: Pair) -> TruncSeries:
        if pair not in cache:
            cache[pair] = eval_series(p.with_c(*pair), work_order)
        return cache[pair]

    orders = []
    for eq, lhs, rhs in equations:
        residual = series(eq.lhs).mul_poly(lhs)
        for pair, c in rhs:
            if c:
                residual = residual - series(pair).subst_x(gamma).mul_poly(c)
        residual = residual.truncate(order + lhs.min_qdeg())
        v = residual.valuation()
        orders.append(None if v is None else v - lhs.min_qdeg())
    report = VerifyReport(order, orders, sys.lines())
    if not report.ok:
        logger.warning(f"System for {p} keep {list(sys.keep)} leaves residuals {orders}")
    return report


@dataclass
class UniquenessReport:
    """Outcome of the fixed-point iteration."""
    order: int
    iterations: int
    matched: list[Pair]


def verify_uniqueness(sys: ExtractedSystem, order: int, check_series: bool = True) -> UniquenessReport:
    """
    Iterate the system from S(x) = 1 and check it settles on the actual series.

    Starting from 1 for every kept series, apply the right-hand sides (arguments shifted
    to x q^gamma) until nothing changes through q^order. The error of each iterate gains
    at least gamma in q-degree per step, so ceil(order/gamma) + 2 rounds suffice.

    Raises:
        UniquenessError: If a coefficient is rational or has negative q-powers, the
            coefficients at x = 0 do not sum to 1, the iteration does not settle, or the
            limit differs from eval_series
    """
    if not sys.complete:
        raise UniquenessError(f"system has {len(sys.equations)} equations for {len(sys.keep)} series")
    gamma = sys.params.gamma
    polys: dict[Pair, list[tuple[Pair, PolyXQ]]] = {}
    for eq in sys.equations:
        terms = []
        at_zero = ZERO
        for pair, f in eq.rhs:
            if not f.is_polynomial():
                raise UniquenessError(f"rational coefficient {f} in equation for {eq.lhs}")
            poly = f.as_poly()
            if poly.min_qdeg() < 0:
                raise UniquenessError(f"coefficient {poly} has negative q-powers")
            terms.append((pair, poly))
            at_zero = at_zero + poly.at_x_zero()
        if at_zero != ONE:
            raise UniquenessError(f"equation for {eq.lhs} is inconsistent with S(0) = 1: sum at x=0 is {at_zero}")
        polys[eq.lhs] = terms

    current = {pair: TruncSeries.one(order) for pair in sys.keep}
    limit = ceil(order / gamma) + 2
    for iteration in range(1, limit + 1):
        shifted = {pair: s.subst_x(gamma) for pair, s in current.items()}
        following = {}
        for lhs, terms in polys.items():
            acc = TruncSeries(order)
            for pair, poly in terms:
                acc = acc + shifted[pair].mul_poly(poly)
            following[lhs] = acc
        if following == current:
            break
        current = following
    else:
        raise UniquenessError(f"no fixed point through q^{order} after {limit} iterations")

    matched = []
    if check_series:
        for pair in sys.keep:
            if current[pair] != eval_series(sys.params.with_c(*pair), order):
                raise UniquenessError(f"fixed point for S[{pair[0]},{pair[1]}] differs from the series")
            matched.append(pair)
    return UniquenessReport(order, iteration, matched)
