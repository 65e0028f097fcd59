"""
Pydantic schemas for series parameters, search configuration, persisted records
and request/response validation.
"""
import re
from typing import Literal, Optional, Any
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# ==================== Series Schemas ====================

class SeriesParams(BaseModel):
    """Integer data (B, C, D, K, gamma, eps) of one double series S_{C1,C2}(x; q)."""
    B11: int = Field(ge=1)
    B22: int = Field(ge=1)
    B12: int = Field(ge=1)
    C1: int = 0
    C2: int = 0
    D1: int = Field(1, ge=1)
    D2: int = Field(1, ge=1)
    K1: int = Field(1, ge=1)
    K2: int = Field(1, ge=1)
    gamma: int = Field(1, ge=1)
    eps1: int = 1
    eps2: int = 1

    model_config = ConfigDict(frozen=True)

    @field_validator("eps1", "eps2")
    @classmethod
    def _unit_sign(cls, value: int) -> int:
        if value not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {value}")
        return value

    @classmethod
    def from_list(cls, values: list[int]) -> "SeriesParams":
        """
        Build from the flat list B11,B22,B12,C1,C2,D1,D2,K1,K2,gamma[,eps1,eps2].

        Raises:
            ValueError: If the list has neither 10 nor 12 entries
        """
        if len(values) not in (10, 12):
            raise ValueError(f"expected 10 or 12 integers, got {len(values)}")
        names = ["B11", "B22", "B12", "C1", "C2", "D1", "D2", "K1", "K2", "gamma", "eps1", "eps2"]
        return cls(**dict(zip(names, values)))

    @classmethod
    def parse(cls, text: str) -> "SeriesParams":
        """Parse the CLI form ``4,2,2,-2,-1,2,1,1,1,1`` (signs optional)."""
        values = [int(v) for v in re.split(r"[,\s]+", text.strip().strip("()")) if v]
        return cls.from_list(values)

    def as_tuple(self) -> tuple[int, ...]:
        return (self.B11, self.B22, self.B12, self.C1, self.C2, self.D1, self.D2,
                self.K1, self.K2, self.gamma, self.eps1, self.eps2)

    def with_c(self, c1: int, c2: int) -> "SeriesParams":
        return self.model_copy(update={"C1": c1, "C2": c2})

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.as_tuple())


class ProductSpec(BaseModel):
    """Periodic product prod_{r, j} (1 - q^{r + j*modulus})^{exponent}."""
    modulus: int = Field(ge=1)
    factors: list[tuple[int, int]] = []

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _residues_in_range(self) -> "ProductSpec":
        for residue, _ in self.factors:
            if not 1 <= residue <= self.modulus:
                raise ValueError(f"residue {residue} outside 1..{self.modulus}")
        return self

    def __str__(self) -> str:
        groups: dict[int, list[int]] = {}
        for residue, exponent in sorted(self.factors):
            if exponent:
                groups.setdefault(exponent, []).append(residue)
        if not groups:
            return "1"
        pieces = []
        for exponent in sorted(groups):
            residues = ",".join(f"q^{r}" for r in groups[exponent])
            pieces.append(f"({residues};q^{self.modulus})_inf^{exponent}")
        return " * ".join(pieces)

    @classmethod
    def parse(cls, text: str) -> "ProductSpec":
        """
        Parse ``(q^2,q^4;q^14)_inf^-1 * (q^1;q^14)_inf^2``; ``1`` is the empty product.

        Raises:
            ValueError: If groups disagree on the modulus or the text is malformed
        """
        text = text.strip()
        if text == "1":
            return cls(modulus=1, factors=[])
        modulus = None
        factors = []
        for chunk in text.split("*"):
            match = _PRODUCT_RE.fullmatch(chunk.strip())
            if match is None:
                raise ValueError(f"malformed product factor '{chunk.strip()}'")
            k = int(match.group("k"))
            if modulus is not None and k != modulus:
                raise ValueError("all product groups must share one modulus")
            modulus = k
            exponent = int(match.group("e"))
            for residue in match.group("res").split(","):
                factors.append((int(residue.strip().lstrip("q^").strip("{}")), exponent))
        return cls(modulus=modulus, factors=factors)


_PRODUCT_RE = re.compile(
    r"\((?P<res>\s*q\^\{?\d+\}?(?:\s*,\s*q\^\{?\d+\}?)*)\s*;\s*q\^\{?(?P<k>\d+)\}?\s*\)_inf\^\{?(?P<e>-?\d+)\}?"
)


# ==================== Search Schemas ====================

IntRange = tuple[int, int]


class SearchConfig(BaseModel):
    """Parameter sweep, pruning and keep-set policy for one search run."""
    schema_version: int = 1
    B11: IntRange = (1, 8)
    B22: IntRange = (1, 8)
    B12: IntRange = (1, 8)
    D1: IntRange = (1, 4)
    D2: IntRange = (1, 4)
    K1: IntRange = (1, 4)
    K2: IntRange = (1, 4)
    gamma: IntRange = (1, 4)
    eps1: list[int] = [1]
    eps2: list[int] = [1]
    seed_c1: IntRange = (-2, 0)
    seed_c2: IntRange = (-2, 0)
    half_width: IntRange = (2, 1)  # in lattice steps around the seed
    box: Optional[tuple[int, int, int, int]] = None  # absolute m1,M1,m2,M2; overrides half_width
    sizes: list[int] = [2, 3, 4]
    count_cap: Optional[int] = None
    pruning: Literal["strict", "heuristic"] = "heuristic"
    keep_cap: Optional[int] = None
    require_polynomial: bool = True
    first_hit_only: bool = False
    dilation_include_c: bool = False
    verify_order: Optional[int] = None
    uniqueness_order: int = 25
    euler_scan: bool = False
    euler_order: Optional[int] = None
    kmax: Optional[int] = None
    x_powers: list[int] = [0]
    jobs: Optional[int] = None
    record_timestamps: bool = False

    @field_validator("B11", "B22", "B12", "D1", "D2", "K1", "K2", "gamma", "seed_c1", "seed_c2")
    @classmethod
    def _nonempty_range(cls, value: IntRange) -> IntRange:
        if value[0] > value[1]:
            raise ValueError(f"empty range {value}")
        return value

    @field_validator("eps1", "eps2")
    @classmethod
    def _signs(cls, value: list[int]) -> list[int]:
        if not value or any(v not in (1, -1) for v in value):
            raise ValueError("sign choices must be a nonempty list of +1/-1")
        return sorted(set(value), reverse=True)

    @field_validator("sizes")
    @classmethod
    def _positive_sizes(cls, value: list[int]) -> list[int]:
        if not value or any(v < 1 for v in value):
            raise ValueError("system sizes must be positive")
        return sorted(set(value))

    @field_validator("count_cap", "keep_cap", "jobs", "verify_order", "euler_order", "kmax")
    @classmethod
    def _positive_cap(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError("caps and orders must be positive")
        return value


class ProductHit(BaseModel):
    """A periodic product found by the Euler scan."""
    c1: int
    c2: int
    s: int
    period: int
    offset: int = 0
    profile: str
    exponents: list[int]


class HitRecord(BaseModel):
    """One verified system found by the search driver."""
    schema_version: int = 1
    status: Literal["hit"] = "hit"
    params: SeriesParams
    box: tuple[int, int, int, int]
    keep: list[tuple[int, int]]
    system: dict[str, Any]
    residual_order: Optional[int] = None  # None: residuals vanish to verify_order
    verify_order: int
    uniqueness: Literal["pass", "fail", "skipped"]
    products: list[ProductHit] = []
    timestamps: Optional[dict[str, str]] = None


class FailureRecord(BaseModel):
    """A candidate that was pruned or produced no verified system."""
    schema_version: int = 1
    status: Literal["skipped", "failed"]
    params: SeriesParams
    box: Optional[tuple[int, int, int, int]] = None
    stage: str
    reason: str
    stage_counts: dict[str, int] = {}


class SearchSummary(BaseModel):
    """Totals reported at the end of a search run."""
    tasks: int = 0
    resumed: int = 0
    hits: int = 0
    skipped: int = 0
    failed: int = 0
    hit_file: Optional[str] = None
    failure_file: Optional[str] = None


# ==================== Request/Response Schemas ====================

class ExpandRequest(BaseModel):
    """Schema for expanding a double series."""
    params: SeriesParams
    order: int = Field(20, ge=0, le=400)
    x_power: Optional[int] = Field(None, ge=0)


class SeriesResponse(BaseModel):
    """Schema for a truncated series: [xdeg, qdeg, coefficient] triples plus q-coefficients at x=1."""
    order: int
    terms: list[tuple[int, int, int]]
    q_coefficients: list[int]


class ProductRequest(BaseModel):
    """Schema for expanding a periodic product."""
    product: str
    order: int = Field(50, ge=0, le=1000)


class BoxRequest(BaseModel):
    """Schema for enumerating the contiguous equations of an index box."""
    params: SeriesParams
    box: tuple[int, int, int, int]


class EquationsResponse(BaseModel):
    """Schema for an enumerated box."""
    equations: list[str]
    count_equations: Optional[int] = None
    count_series: int
    rect_sizes: tuple[int, int, int, int, int, int]


class SolveRequest(BaseModel):
    """Schema for solving a keep-set inside a box."""
    params: SeriesParams
    box: tuple[int, int, int, int]
    keep: list[tuple[int, int]]
    verify_order: Optional[int] = Field(None, ge=0, le=200)


class SystemResponse(BaseModel):
    """Schema for an extracted system and its numeric checks."""
    basis_dimension: int
    reduced: list[str]
    equations: list[str]
    system: dict[str, Any]
    residual_orders: list[Optional[int]]
    verified: bool


class EulerScanRequest(BaseModel):
    """Schema for an Euler product scan."""
    params: SeriesParams
    order: Optional[int] = Field(None, ge=1, le=400)
    kmax: Optional[int] = Field(None, ge=1)
    x_powers: list[int] = [0]


class PartitionReport(BaseModel):
    """Schema for the three-way partition count comparison."""
    N: int
    rows: list[tuple[int, int, int, int]]
    ok: bool
    first_mismatch: Optional[int] = None


class ReproResult(BaseModel):
    """Schema for a golden-artifact check."""
    name: str
    description: str
    passed: bool
    output: list[str]
    diff: list[str] = []
