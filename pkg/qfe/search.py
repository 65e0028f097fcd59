"""
Search driver: sweep parameter tuples, prune, solve keep-sets, verify and persist hits.

Each parameter tuple (seed C included) is one task. Tasks run in a process pool, their
records stream into ``<out>.partial`` with the finished task keys in ``<out>.ledger``, and
a final merge writes hits and failures in sorted order so that the output files do not
depend on scheduling.
"""
import json
import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from datetime import datetime, timezone
from itertools import combinations, product
from pathlib import Path
from typing import Iterator, Optional, Sequence, Union

from qfe.config import settings
from qfe.contiguous import BoxError, IndexBox, Pair, count_equations, count_series, dilation_filter, feasible
from qfe.euler import product_scan
from qfe.schemas import FailureRecord, HitRecord, SearchConfig, SearchSummary, SeriesParams
from qfe.series import is_admissible
from qfe.solver import (
    ExtractedSystem, ExtractionError, MasterCombination, UniquenessError,
    assemble, extract_system, solve_annihilator, verify_system, verify_uniqueness,
)

logger = logging.getLogger(__name__)

Record = Union[HitRecord, FailureRecord]


# ==================== Candidates ====================

def iter_params(cfg: SearchConfig) -> Iterator[SeriesParams]:
    """Every parameter tuple of the sweep, in lexicographic order of the ranges."""
    def span(r: tuple[int, int]) -> range:
        return range(r[0], r[1] + 1)

    for (b11, b22, b12, d1, d2, k1, k2, g, e1, e2, c1, c2) in product(
        span(cfg.B11), span(cfg.B22), span(cfg.B12), span(cfg.D1), span(cfg.D2),
        span(cfg.K1), span(cfg.K2), span(cfg.gamma), cfg.eps1, cfg.eps2,
        span(cfg.seed_c1), span(cfg.seed_c2),
    ):
        yield SeriesParams(
            B11=b11, B22=b22, B12=b12, C1=c1, C2=c2, D1=d1, D2=d2,
            K1=k1, K2=k2, gamma=g, eps1=e1, eps2=e2,
        )


def search_box(p: SeriesParams, cfg: SearchConfig) -> IndexBox:
    seed = (p.C1, p.C2)
    if cfg.box is not None:
        box = IndexBox.for_params(p, cfg.box)
        if not box.contains(seed):
            raise BoxError(f"seed {seed} is not a lattice point of box {cfg.box}")
        return box
    return IndexBox.around(p, seed, cfg.half_width)


def keep_sets(p: SeriesParams, box: IndexBox, d: int, seed: Optional[Pair] = None,
              cap: Optional[int] = None) -> list[tuple[Pair, ...]]:
    """
    Keep-sets of size d among the admissible lattice pairs of the box.

    With a seed, only sets containing it are listed, closest to the seed first (sum of
    lattice-step distances, then lexicographic). Without one, all sets in lexicographic order.
    """
    pairs = [pair for pair in box.pairs() if is_admissible(p.with_c(*pair))]
    if seed is None:
        found = [tuple(c) for c in combinations(pairs, d)]
    else:
        if seed not in pairs:
            return []
        others = [pair for pair in pairs if pair != seed]

        def distance(pair: Pair) -> int:
            return abs(pair[0] - seed[0]) // box.d1 + abs(pair[1] - seed[1]) // box.d2

        found = sorted(
            (tuple(sorted((seed,) + c)) for c in combinations(others, d - 1)),
            key=lambda keep: (sum(distance(pair) for pair in keep), keep),
        )
    return found[:cap] if cap else found


# ==================== One task ====================

def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _try_keep(mc: MasterCombination, keep: Sequence[Pair], cfg: SearchConfig, verify_order: int,
              counts: dict[str, int]) -> Optional[tuple[ExtractedSystem, Optional[int], str]]:
    """Run one keep-set through annihilator, extraction and both checks; counts record how far it got."""
    basis = solve_annihilator(mc, keep)
    if not basis.vectors:
        return None
    counts["annihilator"] += 1
    try:
        system = extract_system(mc, basis, keep)
    except ExtractionError as exc:
        logger.debug(f"Keep {list(keep)}: {exc}")
        return None
    counts["extracted"] += 1
    if cfg.require_polynomial and not system.all_polynomial:
        return None
    counts["polynomial"] += 1
    report = verify_system(mc.params, system, verify_order)
    if not report.ok:
        return None
    counts["verified"] += 1
    uniqueness = "skipped"
    if system.all_polynomial:
        try:
            verify_uniqueness(system, cfg.uniqueness_order)
            uniqueness = "pass"
            counts["unique"] += 1
        except UniquenessError as exc:
            logger.debug(f"Keep {list(keep)}: {exc}")
            uniqueness = "fail"
    return system, report.first_residual, uniqueness


def run_task(p: SeriesParams, cfg: SearchConfig) -> list[Record]:
    """
    Search one parameter tuple.

    Returns:
        HitRecords for every verified system, or a single FailureRecord naming the stage
        the candidate stopped at
    """
    def failure(status: str, stage: str, reason: str, box: Optional[IndexBox] = None,
                counts: Optional[dict[str, int]] = None) -> list[Record]:
        logger.debug(f"{p}: {status} at {stage}: {reason}")
        return [FailureRecord(
            status=status, params=p, box=box.bounds if box else None,
            stage=stage, reason=reason, stage_counts=counts or {},
        )]

    if not dilation_filter(p, cfg.dilation_include_c):
        return failure("skipped", "dilation", "parameters are a dilation of a smaller tuple")
    if not is_admissible(p):
        return failure("skipped", "admissible", "seed series has negative q-exponents")
    try:
        box = search_box(p, cfg)
    except BoxError as exc:
        return failure("failed", "box", str(exc))

    dm1, dm2 = box.widths
    n_eq, n_ser = count_equations(p, dm1, dm2), count_series(p, dm1, dm2)
    cap = cfg.count_cap or settings.QFE_COUNT_CAP
    if n_eq > cap or n_ser > cap:
        return failure("skipped", "count_cap", f"{n_eq} equations, {n_ser} series exceed {cap}", box)
    if n_eq == 0:
        return failure("skipped", "box_empty", "no relation fits the box", box)

    sizes = [d for d in cfg.sizes if 2 * d <= n_ser]
    if cfg.pruning == "strict":
        sizes = [d for d in sizes if feasible(p, dm1, dm2, d)]
        if not sizes:
            return failure("skipped", "feasibility", f"{n_eq} equations do not beat {n_ser} series", box)
    else:
        sizes.sort(key=lambda d: not feasible(p, dm1, dm2, d))

    verify_order = cfg.verify_order or settings.QFE_ORDER
    keep_cap = cfg.keep_cap or settings.QFE_KEEP_CAP
    counts = dict.fromkeys(("keep_sets", "annihilator", "extracted", "polynomial", "verified", "unique"), 0)
    mc = assemble(p, box)
    seen: set[tuple] = set()
    found: list[tuple[ExtractedSystem, Optional[int], str]] = []
    for d in sizes:
        for keep in keep_sets(p, box, d, (p.C1, p.C2), keep_cap):
            counts["keep_sets"] += 1
            outcome = _try_keep(mc, keep, cfg, verify_order, counts)
            if outcome is None or outcome[0].key() in seen:
                continue
            seen.add(outcome[0].key())
            found.append(outcome)
            if cfg.first_hit_only:
                break
        if found and cfg.first_hit_only:
            break

    if not found:
        stage = next((s for s in ("unique", "verified", "polynomial", "extracted", "annihilator")
                      if counts[s]), "keep_sets")
        return failure("failed", stage, "no verified system", box, counts)

    products = []
    if cfg.euler_scan:
        hits = product_scan(p, cfg.euler_order, cfg.kmax, cfg.x_powers)
        products = [hit.to_record() for hit in hits]

    found.sort(key=lambda item: item[0].rank_key())
    records: list[Record] = []
    for system, residual, uniqueness in found:
        records.append(HitRecord(
            params=p, box=box.bounds, keep=list(system.keep),
            system=system.to_dict(residual), residual_order=residual,
            verify_order=verify_order, uniqueness=uniqueness, products=products,
            timestamps={"found": _now()} if cfg.record_timestamps else None,
        ))
    logger.info(f"✅ {p}: {len(records)} verified systems")
    return records


def _run_task_safe(p: SeriesParams, cfg: SearchConfig) -> list[Record]:
    try:
        return run_task(p, cfg)
    except Exception as exc:
        logger.error(f"Unexpected error for {p}: {exc}")
        return [FailureRecord(status="failed", params=p, stage="error", reason=str(exc))]


# ==================== Persistence ====================

def _record_line(record: Record) -> str:
    return record.model_dump_json()


def _load_record(line: str) -> Record:
    data = json.loads(line)
    return HitRecord(**data) if data["status"] == "hit" else FailureRecord(**data)


def _sort_key(record: Record) -> tuple:
    if isinstance(record, HitRecord):
        return (record.params.as_tuple(), 0, tuple(map(tuple, record.keep)))
    return (record.params.as_tuple(), 1, record.stage)


def _paths(out: Path) -> tuple[Path, Path, Path]:
    return (
        out.with_name(out.name + ".partial"),
        out.with_name(out.name + ".ledger"),
        out.with_name(out.stem + ".failures.jsonl"),
    )


def _resume(partial: Path, ledger: Path) -> set[str]:
    """Completed task keys; partial records of unfinished tasks are dropped."""
    if not ledger.exists():
        partial.unlink(missing_ok=True)
        return set()
    done = {line.strip() for line in ledger.read_text().splitlines() if line.strip()}
    if partial.exists():
        kept = [
            line for line in partial.read_text().splitlines()
            if line.strip() and str(_load_record(line).params) in done
        ]
        partial.write_text("".join(line + "\n" for line in kept))
    return done


def merge_results(partial: Path, out: Path, failure_file: Path) -> tuple[int, int, int]:
    """Sort the streamed records and write hits and failures; returns (hits, skipped, failed)."""
    records = [_load_record(line) for line in partial.read_text().splitlines() if line.strip()]
    records.sort(key=_sort_key)
    hits = [r for r in records if isinstance(r, HitRecord)]
    failures = [r for r in records if isinstance(r, FailureRecord)]
    out.write_text("".join(_record_line(r) + "\n" for r in hits))
    failure_file.write_text("".join(_record_line(r) + "\n" for r in failures))
    skipped = sum(1 for r in failures if r.status == "skipped")
    return len(hits), skipped, len(failures) - skipped


def run_search(cfg: SearchConfig, out: Union[str, Path], resume: bool = True) -> SearchSummary:
    """
    Run the whole sweep and write ``out`` (hits) and ``<stem>.failures.jsonl``.

    Args:
        cfg: Search configuration
        out: Hit file path (JSON lines)
        resume: Reuse the ledger and partial file of an interrupted run

    Returns:
        Totals for the run
    """
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    partial, ledger, failure_file = _paths(out)
    if not resume:
        partial.unlink(missing_ok=True)
        ledger.unlink(missing_ok=True)
    done = _resume(partial, ledger)

    tasks = [p for p in iter_params(cfg) if str(p) not in done]
    jobs = cfg.jobs or settings.QFE_JOBS
    logger.info(f"Search: {len(tasks)} tasks ({len(done)} resumed) on {jobs} workers")

    with partial.open("a") as sink, ledger.open("a") as book:
        def store(p: SeriesParams, records: list[Record]):
            for record in records:
                sink.write(_record_line(record) + "\n")
            sink.flush()
            book.write(str(p) + "\n")
            book.flush()

        if jobs == 1:
            for p in tasks:
                store(p, _run_task_safe(p, cfg))
        else:
            with ProcessPoolExecutor(max_workers=jobs) as executor:
                futures = {executor.submit(_run_task_safe, p, cfg): p for p in tasks}
                for future in as_completed(futures):
                    store(futures[future], future.result())

    hits, skipped, failed = merge_results(partial, out, failure_file)
    partial.unlink()
    ledger.unlink()
    logger.info(f"✅ Search finished: {hits} hits, {skipped} skipped, {failed} failed -> {out}")
    return SearchSummary(
        tasks=len(tasks) + len(done), resumed=len(done), hits=hits, skipped=skipped,
        failed=failed, hit_file=str(out), failure_file=str(failure_file),
    )


def load_hits(path: Union[str, Path]) -> list[HitRecord]:
    return [HitRecord(**json.loads(line)) for line in Path(path).read_text().splitlines() if line.strip()]


# ==================== Exhaustive listing ====================

def list_all_systems(p: SeriesParams, box: IndexBox, d: int, seed: Optional[Pair] = None,
                     cap: Optional[int] = None) -> list[ExtractedSystem]:
    """
    Every complete system on d kept series inside the box.

    Keep-sets are all admissible d-subsets (or those containing seed); systems equal up to
    equation order are listed once, ranked polynomial first, then non-negative.
    """
    mc = assemble(p, box)
    systems: dict[tuple, ExtractedSystem] = {}
    for keep in keep_sets(p, box, d, seed, cap):
        basis = solve_annihilator(mc, keep)
        if not basis.vectors:
            continue
        try:
            system = extract_system(mc, basis, keep)
        except ExtractionError:
            continue
        systems.setdefault(system.key(), system)
    ranked = sorted(systems.values(), key=lambda s: s.rank_key())
    logger.info(f"{p}: {len(ranked)} systems of size {d} in box {box.bounds}")
    return ranked
