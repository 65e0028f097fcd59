from pytest import fixture, raises

from qfe.contiguous import BoxError, IndexBox
from qfe.golden import AG_K3_KEEP, AG_K3_SYSTEM, THM41_KEEP, THM41_SYSTEM, THM41_VARIANT_SYSTEM
from qfe.schemas import FailureRecord, SearchConfig
from qfe.search import (
    _resume, iter_params, keep_sets, list_all_systems, load_hits, run_search, run_task, search_box,
)
from qfe.solver import ExtractedSystem, verify_system


def _config(**overrides) -> SearchConfig:
    values = dict(
        B11=(2, 2), B22=(1, 1), B12=(1, 1), D1=(2, 2), D2=(1, 1), K1=(1, 1), K2=(1, 1),
        gamma=(1, 1), seed_c1=(0, 0), seed_c2=(0, 0), box=(0, 2, 0, 1), sizes=[2],
        euler_scan=True, euler_order=40, kmax=12, jobs=1,
    )
    values.update(overrides)
    return SearchConfig(**values)


@fixture
def thm41_config() -> SearchConfig:
    return _config()


def test_iter_params_covers_ranges():
    cfg = _config(seed_c1=(0, 1), gamma=(1, 2))
    found = list(iter_params(cfg))
    assert len(found) == 4
    assert [(p.gamma, p.C1) for p in found] == [(1, 0), (1, 1), (2, 0), (2, 1)]


def test_keep_sets_contain_seed_and_sort_by_distance(thm41, thm41_box):
    sets = keep_sets(thm41, thm41_box, 2, (0, 0))
    assert len(sets) == 5
    assert all((0, 0) in keep for keep in sets)
    assert sets[:2] == [((0, 0), (0, 1)), ((0, 0), (1, 0))]
    assert len(keep_sets(thm41, thm41_box, 2, (0, 0), cap=3)) == 3
    assert len(keep_sets(thm41, thm41_box, 2)) == 15
    assert keep_sets(thm41, thm41_box, 2, (5, 5)) == []


def test_search_box_rejects_outside_seed(thm41):
    assert search_box(thm41, _config()).bounds == (0, 2, 0, 1)
    with raises(BoxError):
        search_box(thm41.with_c(3, 0), _config())


def test_run_task_finds_regular_three_system(thm41, thm41_config):
    records = run_task(thm41, thm41_config)
    keeps = [record.keep for record in records]
    assert THM41_KEEP in keeps
    hit = records[keeps.index(THM41_KEEP)]
    assert ExtractedSystem.from_dict(hit.system).lines() == THM41_SYSTEM
    assert hit.uniqueness == "pass"
    assert hit.residual_order is None
    assert hit.timestamps is None
    assert any(p.c1 == 0 and p.c2 == 0 and p.period == 4 for p in hit.products)


def test_run_task_reports_failure_stage(thm41):
    (record,) = run_task(thm41, _config(box=(1, 2, 0, 1)))
    assert isinstance(record, FailureRecord)
    assert (record.status, record.stage) == ("failed", "box")

    (record,) = run_task(thm41.with_c(-5, 0), _config())
    assert (record.status, record.stage) == ("skipped", "admissible")

    (record,) = run_task(thm41, _config(box=(0, 0, 0, 0)))
    assert (record.status, record.stage, record.reason) == ("skipped", "box_empty", "no relation fits the box")
    assert record.box == (0, 0, 0, 0)


def test_running_example_search(ag_k3):
    cfg = SearchConfig(
        B11=(4, 4), B22=(2, 2), B12=(2, 2), D1=(2, 2), D2=(1, 1), K1=(1, 1), K2=(1, 1),
        gamma=(1, 1), seed_c1=(-2, -2), seed_c2=(-1, -1), box=(-2, 1, -1, 1),
        sizes=[3], keep_cap=16, jobs=1,
    )
    records = run_task(ag_k3, cfg)
    hit = next(r for r in records if r.keep == AG_K3_KEEP)
    assert ExtractedSystem.from_dict(hit.system).lines() == AG_K3_SYSTEM


def test_run_search_writes_sorted_files(tmp_path, thm41_config):
    cfg = thm41_config.model_copy(update={"seed_c1": (0, 1)})
    out = tmp_path / "hits.jsonl"
    summary = run_search(cfg, out)
    assert summary.tasks == 2
    assert summary.hits >= 1
    assert summary.failure_file == str(tmp_path / "hits.failures.jsonl")
    assert not (tmp_path / "hits.jsonl.partial").exists()
    assert not (tmp_path / "hits.jsonl.ledger").exists()
    hits = load_hits(out)
    assert len(hits) == summary.hits
    keys = [(h.params.as_tuple(), h.keep) for h in hits]
    assert keys == sorted(keys)


def test_stored_hits_verify_again(tmp_path, thm41_config):
    out = tmp_path / "hits.jsonl"
    run_search(thm41_config.model_copy(update={"seed_c1": (0, 1)}), out)
    hits = load_hits(out)
    assert hits
    for hit in hits:
        system = ExtractedSystem.from_dict(hit.system)
        assert verify_system(hit.params, system, 30).ok, hit.keep


def test_search_output_is_deterministic(tmp_path, thm41_config):
    cfg = thm41_config.model_copy(update={"seed_c1": (0, 1)})
    first, second, pooled = tmp_path / "a.jsonl", tmp_path / "b.jsonl", tmp_path / "c.jsonl"
    run_search(cfg, first)
    run_search(cfg, second)
    run_search(cfg.model_copy(update={"jobs": 2}), pooled)
    assert first.read_bytes() == second.read_bytes() == pooled.read_bytes()
    assert (tmp_path / "a.failures.jsonl").read_bytes() == (tmp_path / "c.failures.jsonl").read_bytes()


def test_failures_file(tmp_path, thm41_config):
    out = tmp_path / "hits.jsonl"
    summary = run_search(thm41_config.model_copy(update={"box": (1, 2, 0, 1)}), out)
    assert (summary.hits, summary.failed) == (0, 1)
    assert out.read_text() == ""
    assert '"stage":"box"' in (tmp_path / "hits.failures.jsonl").read_text()


def test_resume_drops_unfinished_tasks(tmp_path, thm41):
    partial, ledger = tmp_path / "hits.jsonl.partial", tmp_path / "hits.jsonl.ledger"
    done = FailureRecord(status="skipped", params=thm41, stage="dilation", reason="x")
    pending = FailureRecord(status="skipped", params=thm41.with_c(1, 0), stage="dilation", reason="y")
    partial.write_text(done.model_dump_json() + "\n" + pending.model_dump_json() + "\n")
    ledger.write_text(str(thm41) + "\n")

    assert _resume(partial, ledger) == {str(thm41)}
    assert partial.read_text() == done.model_dump_json() + "\n"

    ledger.unlink()
    assert _resume(partial, ledger) == set()
    assert not partial.exists()


def test_list_all_systems(thm41, thm41_box):
    systems = list_all_systems(thm41, thm41_box, 2)
    assert any(s.lines() == THM41_SYSTEM for s in systems)
    assert len({s.key() for s in systems}) == len(systems)
    ranks = [s.rank_key() for s in systems]
    assert ranks == sorted(ranks)
    seeded = list_all_systems(thm41, IndexBox.for_params(thm41, (0, 2, 0, 1)), 2, seed=(0, 0))
    assert all((0, 0) in s.keep for s in seeded)


def test_list_all_systems_of_running_example(ag_k3, ag_k3_box):
    systems = list_all_systems(ag_k3, ag_k3_box, 3, seed=(-2, -1))
    assert any(s.lines() == AG_K3_SYSTEM for s in systems)


def test_list_all_systems_of_variant(thm41_variant):
    box = IndexBox.for_params(thm41_variant, (0, 2, 0, 1))
    systems = list_all_systems(thm41_variant, box, 2)
    assert any(s.lines() == THM41_VARIANT_SYSTEM for s in systems)
