"""
Registry of reproducible reference results. The CLI ``repro`` command and the test suite
both run these checks against the same expected lines.
"""
import difflib
import logging
from dataclasses import dataclass
from typing import Callable

from qfe.contiguous import IndexBox, enumerate_box
from qfe.errors import QfeError
from qfe.euler import product_form
from qfe.partitions import count_thm11, in_thm11_class, partitions, total, verify_thm12
from qfe.schemas import ProductSpec, ReproResult, SeriesParams
from qfe.series import eval_series, expand_product
from qfe.solver import UniquenessError, solve_keep_set, verify_system, verify_uniqueness

logger = logging.getLogger(__name__)


class UnknownArtifactError(QfeError):
    """Raised for a repro name that is not registered."""


# ==================== Reference data ====================

AG_K3 = SeriesParams.from_list([4, 2, 2, -2, -1, 2, 1, 1, 1, 1])
AG_K3_BOX = (-2, 1, -1, 1)
AG_K3_KEEP = [(-2, -1), (-1, -1), (0, 0)]

THM11 = SeriesParams.from_list([6, 2, 2, -4, -1, 2, 1, 2, 1, 1])
THM11_BOX = (-4, 4, -1, 2)
THM11_KEEP = [(-4, -1), (-2, -1), (-2, 0), (0, 0)]

THM41 = SeriesParams.from_list([2, 1, 1, 0, 0, 2, 1, 1, 1, 1])
THM41_VARIANT = SeriesParams.from_list([2, 1, 1, 0, 0, 1, 1, 1, 1, 1])
THM41_BOX = (0, 2, 0, 1)
THM41_KEEP = [(0, 0), (1, 0)]

THM13_SERIES = [
    (SeriesParams.from_list([2, 2, 2, -1, -1, 1, 1, 1, 2, 1, 1, -1]), "(q^2,q^4,q^10,q^12;q^14)_inf^-1"),
    (SeriesParams.from_list([2, 2, 2, 0, 1, 1, 1, 1, 2, 1, 1, -1]), "(q^2,q^6,q^8,q^12;q^14)_inf^-1"),
    (SeriesParams.from_list([2, 2, 2, 1, 1, 1, 1, 1, 2, 1, 1, -1]), "(q^4,q^6,q^8,q^10;q^14)_inf^-1"),
]
THM13_PARITY = SeriesParams.from_list([8, 2, 4, 0, 2, 1, 1, 4, 2, 1])
THM14 = SeriesParams.from_list([9, 6, 6, -6, -5, 3, 1, 3, 2, 1, 1, -1])

AG_K3_EQUATIONS = [
    "S[-2,-1](x) - S[-1,-1](x) - x^2*q^2*S[0,0](x*q) = 0",
    "S[-2,0](x) - S[-1,0](x) - x^2*q^2*S[0,1](x*q) = 0",
    "S[-1,-1](x) - S[0,-1](x) - x^2*q^3*S[1,0](x*q) = 0",
    "S[-1,0](x) - S[0,0](x) - x^2*q^3*S[1,1](x*q) = 0",
    "S[-2,-1](x) - S[-2,0](x) - x*q*S[-2,0](x*q) = 0",
    "S[-2,0](x) - S[-2,1](x) - x*q^2*S[-2,1](x*q) = 0",
    "S[-1,-1](x) - S[-1,0](x) - x*q*S[-1,0](x*q) = 0",
    "S[-1,0](x) - S[-1,1](x) - x*q^2*S[-1,1](x*q) = 0",
    "S[0,-1](x) - S[0,0](x) - x*q*S[0,0](x*q) = 0",
    "S[0,0](x) - S[0,1](x) - x*q^2*S[0,1](x*q) = 0",
    "S[1,-1](x) - S[1,0](x) - x*q*S[1,0](x*q) = 0",
    "S[1,0](x) - S[1,1](x) - x*q^2*S[1,1](x*q) = 0",
    "S[0,0](x) - S[-2,-1](x*q) = 0",
    "S[0,1](x) - S[-2,0](x*q) = 0",
    "S[1,0](x) - S[-1,-1](x*q) = 0",
    "S[1,1](x) - S[-1,0](x*q) = 0",
]

AG_K3_REDUCED = [
    "S[-2,-1](x) - S[-1,-1](x) - x^2*q^2*S[0,0](x*q) = 0",
    "S[-1,-1](x) - S[0,0](x) - x*q*S[-1,-1](x*q) = 0",
    "S[0,0](x) - S[-2,-1](x*q) = 0",
]

AG_K3_SYSTEM = [
    "S[-2,-1](x) = S[-2,-1](x*q) + x*q*S[-1,-1](x*q) + x^2*q^2*S[0,0](x*q)",
    "S[-1,-1](x) = S[-2,-1](x*q) + x*q*S[-1,-1](x*q)",
    "S[0,0](x) = S[-2,-1](x*q)",
]

THM11_SYSTEM = [
    "S[-4,-1](x) = S[-4,-1](x*q) + x*q*S[-2,0](x*q) + x^2*q^2*S[0,0](x*q)",
    "S[-2,-1](x) = S[-4,-1](x*q) + x*q*S[-2,0](x*q)",
    "S[-2,0](x) = S[-4,-1](x*q)",
    "S[0,0](x) = S[-2,-1](x*q)",
]

THM41_SYSTEM = [
    "S[0,0](x) = (1 + x^2*q^2)*S[0,0](x*q) + (x*q + x^2*q^3)*S[1,0](x*q)",
    "S[1,0](x) = S[0,0](x*q) + (x*q + x^2*q^3)*S[1,0](x*q)",
]

THM41_VARIANT_SYSTEM = [
    "S[0,0](x) = S[0,0](x*q) + (x*q + x*q^2)*S[1,0](x*q)",
    "S[1,0](x) = S[0,0](x*q) + x*q*S[1,0](x*q)",
]

PRODUCT_ORDER = 50
CHECK_ORDER = 25


# ==================== Checks ====================

def _system_lines(p: SeriesParams, bounds: tuple[int, int, int, int], keep: list[tuple[int, int]],
                  with_reduced: bool = False) -> list[str]:
    basis, system = solve_keep_set(p, IndexBox.for_params(p, bounds), keep)
    lines = []
    if with_reduced:
        lines.append(f"basis dimension: {basis.dimension}")
        lines += sorted(system.reduced_lines())
    lines += system.lines()
    report = verify_system(p, system, CHECK_ORDER)
    lines.append("verify: ok" if report.ok else f"verify: residual at q^{report.first_residual}")
    try:
        verify_uniqueness(system, CHECK_ORDER)
        lines.append("uniqueness: ok")
    except UniquenessError as exc:
        lines.append(f"uniqueness: {exc}")
    return lines


def _checks_ok() -> list[str]:
    return ["verify: ok", "uniqueness: ok"]


def _product_line(p: SeriesParams, product: str, order: int = PRODUCT_ORDER) -> str:
    series = eval_series(p, order, 0).q_coefficients()
    expected = expand_product(ProductSpec.parse(product), order).q_coefficients()
    label = f"S[{p.C1},{p.C2}](1) of ({p.B11},{p.B22},{p.B12}) = {product}"
    mismatch = next((n for n, (a, b) in enumerate(zip(series, expected)) if a != b), None)
    return f"{label} through q^{order}: " + ("ok" if mismatch is None else f"differs at q^{mismatch}")


def _euler_line(p: SeriesParams, order: int = PRODUCT_ORDER, kmax: int = 24) -> str:
    form = product_form(eval_series(p, order, 0).q_coefficients(), kmax)
    if form.period is None:
        return "euler: no period"
    return f"euler: period {form.period}, {form.profile}"


def _ok(label: str, product: str) -> str:
    return f"{label} = {product} through q^{PRODUCT_ORDER}: ok"


@dataclass(frozen=True)
class Artifact:
    """A named check: build() produces lines that must equal expected."""
    name: str
    description: str
    build: Callable[[], list[str]]
    expected: Callable[[], list[str]]


ARTIFACTS: dict[str, Artifact] = {a.name: a for a in [
    Artifact(
        "ag-k3-16eqs",
        "Contiguous equations of the running example in the box [-2,1] x [-1,1]",
        lambda: [str(eq) for eq in enumerate_box(AG_K3, IndexBox.for_params(AG_K3, AG_K3_BOX))],
        lambda: AG_K3_EQUATIONS,
    ),
    Artifact(
        "ag-k3-system",
        "Three-series system of the running example, keep {(-2,-1), (-1,-1), (0,0)}",
        lambda: _system_lines(AG_K3, AG_K3_BOX, AG_K3_KEEP, with_reduced=True),
        lambda: ["basis dimension: 3"] + sorted(AG_K3_REDUCED) + AG_K3_SYSTEM + _checks_ok(),
    ),
    Artifact(
        "thm11-system",
        "Four-series system for the multiplicity-two partition class",
        lambda: _system_lines(THM11, THM11_BOX, THM11_KEEP),
        lambda: THM11_SYSTEM + _checks_ok(),
    ),
    Artifact(
        "thm11-n14",
        "Partitions of 14 in the multiplicity-two class, split by repeated parts, and the matching series coefficient",
        lambda: [
            f"partitions of 14: {total(count_thm11, 14, 'full')}",
            f"four parts: {count_thm11(4, 14, 'full')}",
            f"without a repeated part: {sum(1 for p in partitions(14, 1) if in_thm11_class(p))}",
            f"q^14 coefficient of S[-4,-1](1): {eval_series(THM11, 14, 0).q_coefficients()[14]}",
        ],
        lambda: [
            "partitions of 14: 26",
            "four parts: 8",
            "without a repeated part: 12",
            "q^14 coefficient of S[-4,-1](1): 26",
        ],
    ),
    Artifact(
        "thm41-system",
        "Two-series system for (2,1,1), D = (2,1)",
        lambda: _system_lines(THM41, THM41_BOX, THM41_KEEP),
        lambda: THM41_SYSTEM + _checks_ok(),
    ),
    Artifact(
        "thm41-variant",
        "Two-series system for (2,1,1), D = (1,1)",
        lambda: _system_lines(THM41_VARIANT, THM41_BOX, THM41_KEEP),
        lambda: THM41_VARIANT_SYSTEM + _checks_ok(),
    ),
    Artifact(
        "thm13-products",
        "Alternating series with mod 14 product sides",
        lambda: [_product_line(p, product) for p, product in THM13_SERIES],
        lambda: [
            _ok(f"S[{p.C1},{p.C2}](1) of (2,2,2)", product) for p, product in THM13_SERIES
        ],
    ),
    Artifact(
        "thm13-parity",
        "Positive (8,2,4) rewrite of the third alternating series",
        lambda: [_product_line(THM13_PARITY, THM13_SERIES[2][1]), _product_line(*THM13_SERIES[2])],
        lambda: [_ok("S[0,2](1) of (8,2,4)", THM13_SERIES[2][1]), _ok("S[1,1](1) of (2,2,2)", THM13_SERIES[2][1])],
    ),
    Artifact(
        "thm14-product",
        "(9,6,6) alternating series against (q,q^5;q^6)_inf",
        lambda: [_product_line(THM14, "(q^1,q^5;q^6)_inf^1"), _euler_line(THM14)],
        lambda: [_ok("S[-6,-5](1) of (9,6,6)", "(q^1,q^5;q^6)_inf^1"), "euler: period 6, (q^1,q^5;q^6)_inf^1"],
    ),
    Artifact(
        "regular3-product",
        "S[0,0](1) for (2,1,1) against (q^4;q^4)_inf / (q;q)_inf",
        lambda: [_product_line(THM41, "(q^1,q^2,q^3;q^4)_inf^-1"), _euler_line(THM41)],
        lambda: [_ok("S[0,0](1) of (2,1,1)", "(q^1,q^2,q^3;q^4)_inf^-1"), "euler: period 4, (q^1,q^2,q^3;q^4)_inf^-1"],
    ),
    Artifact(
        "thm12-counts",
        "At most three copies of a part against both bicolored classes, n <= 25",
        lambda: _thm12_lines(25),
        lambda: ["n=4: 4 4 4", "n <= 25: ok"],
    ),
]}


def _thm12_lines(N: int) -> list[str]:
    report = verify_thm12(N)
    _, a, b, c = report.rows[4]
    status = "ok" if report.ok else f"mismatch at n={report.first_mismatch}"
    return [f"n=4: {a} {b} {c}", f"n <= {N}: {status}"]


def artifact_names() -> list[str]:
    return list(ARTIFACTS)


def run_artifact(name: str) -> ReproResult:
    """
    Run one registered check.

    Raises:
        UnknownArtifactError: If name is not registered
    """
    artifact = ARTIFACTS.get(name)
    if artifact is None:
        raise UnknownArtifactError(f"unknown artifact '{name}'; known: {', '.join(ARTIFACTS)}")
    output = artifact.build()
    expected = artifact.expected()
    passed = output == expected
    diff = [] if passed else list(difflib.unified_diff(expected, output, "expected", "actual", lineterm=""))
    if passed:
        logger.info(f"✅ {name} reproduced")
    else:
        logger.warning(f"⚠️ {name} differs from the reference")
    return ReproResult(name=name, description=artifact.description, passed=passed, output=output, diff=diff)
