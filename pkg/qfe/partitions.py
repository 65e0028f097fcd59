"""
Brute-force enumerators for the partition classes whose generating functions are the
double series, used as ground truth for series coefficients.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterator, Optional

logger = logging.getLogger(__name__)


class Color(str, Enum):
    RED = "red"
    BLUE = "blue"


# ==================== Partition types ====================

@dataclass(frozen=True)
class Partition:
    """Weakly increasing positive parts."""
    parts: tuple[int, ...]

    def __post_init__(self):
        if any(p < 1 for p in self.parts) or list(self.parts) != sorted(self.parts):
            raise ValueError(f"parts must be positive and weakly increasing: {self.parts}")

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def multiplicities(self) -> Counter:
        return Counter(self.parts)


def _color_key(part: tuple[int, Color]) -> tuple[int, int]:
    size, color = part
    return (size, 0 if color == Color.RED else 1)


@dataclass(frozen=True)
class BicoloredPartition:
    """Parts (size, color) sorted by size with red before blue on ties."""
    parts: tuple[tuple[int, Color], ...]

    def __post_init__(self):
        if any(size < 1 for size, _ in self.parts):
            raise ValueError("part sizes must be positive")
        if list(self.parts) != sorted(self.parts, key=_color_key):
            raise ValueError(f"parts are not in canonical order: {self.parts}")

    @classmethod
    def of(cls, red: tuple[int, ...] = (), blue: tuple[int, ...] = ()) -> "BicoloredPartition":
        parts = [(r, Color.RED) for r in red] + [(b, Color.BLUE) for b in blue]
        return cls(tuple(sorted(parts, key=_color_key)))

    @property
    def weight(self) -> int:
        return sum(size for size, _ in self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def sizes(self, color: Color) -> list[int]:
        return [size for size, c in self.parts if c == color]

    def __str__(self) -> str:
        return " + ".join(f"{c.value}{size}" for size, c in self.parts) or "0"


# ==================== Generators ====================

def partitions(n: int, max_multiplicity: Optional[int] = None, smallest: int = 1) -> Iterator[tuple[int, ...]]:
    """Partitions of n as weakly increasing tuples, each size used at most max_multiplicity times."""
    if n == 0:
        yield ()
        return
    for size in range(smallest, n + 1):
        top = n // size
        if max_multiplicity is not None:
            top = min(top, max_multiplicity)
        for mult in range(1, top + 1):
            for rest in partitions(n - size * mult, max_multiplicity, size + 1):
                yield (size,) * mult + rest


def bicolored_distinct(n: int) -> Iterator[BicoloredPartition]:
    """Bicolored partitions of n in which no colored size repeats."""
    for red_weight in range(n + 1):
        for red in partitions(red_weight, 1):
            for blue in partitions(n - red_weight, 1):
                yield BicoloredPartition.of(red, blue)


# ==================== Class predicates ====================

THM11_VARIANTS = ("full", "repeats_ge2", "no_ones", "shifted")


def in_thm11_class(parts: tuple[int, ...], variant: str = "full") -> bool:
    """
    Multiplicity <= 2, distinct sizes at least 2 apart, repeated sizes at least 3 apart.

    Variants refine the class: repeats_ge2 (repeated parts >= 2), no_ones (no part 1),
    shifted (single parts >= 2 and repeated parts >= 3).
    """
    counts = Counter(parts)
    if any(c > 2 for c in counts.values()):
        return False
    sizes = sorted(counts)
    if any(b - a < 2 for a, b in zip(sizes, sizes[1:])):
        return False
    repeated = [s for s in sizes if counts[s] == 2]
    if any(b - a < 3 for a, b in zip(repeated, repeated[1:])):
        return False
    singles = [s for s in sizes if counts[s] == 1]
    if variant == "full":
        return True
    if variant == "repeats_ge2":
        return all(s >= 2 for s in repeated)
    if variant == "no_ones":
        return 1 not in counts
    if variant == "shifted":
        return all(s >= 2 for s in singles) and all(s >= 3 for s in repeated)
    raise ValueError(f"unknown variant '{variant}'")


def _has_matching(reds: list[int], blues: list[int]) -> bool:
    """Every red b gets its own blue of size b or b + 1 (augmenting paths)."""
    owner: dict[int, int] = {}

    def assign(red: int, seen: set[int]) -> bool:
        for blue in (red, red + 1):
            if blue in blues_set and blue not in seen:
                seen.add(blue)
                if blue not in owner or assign(owner[blue], seen):
                    owner[blue] = red
                    return True
        return False

    blues_set = set(blues)
    return all(assign(red, set()) for red in reds)


def in_match_class(bp: BicoloredPartition, variant: str = "t1") -> bool:
    """Distinct sizes per color, and an injection from red b to blue b or b + 1; t2 also forbids red 1 with blue 1."""
    reds, blues = bp.sizes(Color.RED), bp.sizes(Color.BLUE)
    if len(set(reds)) != len(reds) or len(set(blues)) != len(blues):
        return False
    if not _has_matching(reds, blues):
        return False
    if variant == "t2" and 1 in reds and 1 in blues:
        return False
    return variant in ("t1", "t2")


def _breaks_gap_pattern(parts: tuple[tuple[int, Color], ...], index: int) -> bool:
    """True if some run of red parts just before the blue at index has differences 1, 2, ..., 2."""
    previous = parts[index][0]
    i = index - 1
    # a red part of the blue's own size sits just before it and is not part of the run
    while i >= 0 and parts[i] == (previous, Color.RED):
        i -= 1
    while i >= 0 and parts[i][1] == Color.RED:
        diff = previous - parts[i][0]
        if diff == 1:
            return True
        if diff != 2:
            return False
        previous = parts[i][0]
        i -= 1
    return False


def in_gap_class(bp: BicoloredPartition, variant: str = "t1") -> bool:
    """
    Distinct sizes per color, no red 1, no red b+1 or b+2 next to a blue b, and no list of
    successive red parts ending in a blue b with differences [1, 2, ..., 2]; t2 also
    forbids red 2.
    """
    reds, blues = bp.sizes(Color.RED), bp.sizes(Color.BLUE)
    if len(set(reds)) != len(reds) or len(set(blues)) != len(blues):
        return False
    red_set = set(reds)
    if 1 in red_set:
        return False
    if any(b + 1 in red_set or b + 2 in red_set for b in blues):
        return False
    for index, (_, color) in enumerate(bp.parts):
        if color == Color.BLUE and _breaks_gap_pattern(bp.parts, index):
            return False
    if variant == "t2":
        return 2 not in red_set
    return variant == "t1"


# ==================== Count tables ====================

@lru_cache(maxsize=None)
def _thm11_table(n: int) -> dict[str, Counter]:
    table = {variant: Counter() for variant in THM11_VARIANTS}
    for parts in partitions(n, 2):
        for variant in THM11_VARIANTS:
            if in_thm11_class(parts, variant):
                table[variant][len(parts)] += 1
    return table


@lru_cache(maxsize=None)
def _bicolored_table(n: int) -> dict[tuple[str, str], Counter]:
    table = {(kind, v): Counter() for kind in ("match", "gap") for v in ("t1", "t2")}
    for bp in bicolored_distinct(n):
        for v in ("t1", "t2"):
            if in_match_class(bp, v):
                table[("match", v)][bp.length] += 1
            if in_gap_class(bp, v):
                table[("gap", v)][bp.length] += 1
    return table


def count_thm11(m: int, n: int, variant: str = "full") -> int:
    """Partitions of n into m parts in the class (or refined class) described by in_thm11_class."""
    if variant not in THM11_VARIANTS:
        raise ValueError(f"unknown variant '{variant}'")
    return _thm11_table(n)[variant][m]


def count_bicolored_match(m: int, n: int, variant: str = "t1") -> int:
    if variant not in ("t1", "t2"):
        raise ValueError(f"unknown variant '{variant}'")
    return _bicolored_table(n)[("match", variant)][m]


def count_bicolored_gap(m: int, n: int, variant: str = "t1") -> int:
    if variant not in ("t1", "t2"):
        raise ValueError(f"unknown variant '{variant}'")
    return _bicolored_table(n)[("gap", variant)][m]


def total(counter_fn, n: int, variant: str) -> int:
    """Sum over the number of parts m of counter_fn(m, n, variant)."""
    return sum(counter_fn(m, n, variant) for m in range(n + 1))


@lru_cache(maxsize=None)
def count_at_most_3(n: int) -> int:
    """Partitions of n where no size appears more than three times."""
    return sum(1 for _ in partitions(n, 3))


@lru_cache(maxsize=None)
def count_gordon(n: int, k: int = 3, i: int = 3) -> int:
    """Partitions of n with f_j + f_{j+1} <= k - 1 for all j and at most i - 1 ones."""
    count = 0
    for parts in partitions(n, k - 1):
        f = Counter(parts)
        if f[1] > i - 1:
            continue
        if all(f[j] + f[j + 1] <= k - 1 for j in f):
            count += 1
    return count


@dataclass
class Thm12Report:
    """Three-way comparison of the at-most-three, matching and gap classes for n = 0..N."""
    N: int
    rows: list[tuple[int, int, int, int]] = field(default_factory=list)
    first_mismatch: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.first_mismatch is None


def verify_thm12(N: int) -> Thm12Report:
    """
    For n <= N compare: at most three copies of each part; the matching class; the gap class.

    Returns:
        Report with one (n, a, b, c) row per n and the first n where the counts differ
    """
    report = Thm12Report(N)
    for n in range(N + 1):
        row = (
            n,
            count_at_most_3(n),
            total(count_bicolored_match, n, "t1"),
            total(count_bicolored_gap, n, "t1"),
        )
        report.rows.append(row)
        if report.first_mismatch is None and not row[1] == row[2] == row[3]:
            report.first_mismatch = n
            logger.warning(f"⚠️ Partition classes disagree at n={n}: {row[1:]}")
    return report
