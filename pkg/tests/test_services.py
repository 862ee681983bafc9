import json

import pytest

from slocc.core.decide import VerdictKind
from slocc.core.realign import RealignmentShape
from slocc.core.state import StateShape, StateTensor
from slocc.errors import ParseError
from slocc.fixtures import psi_lambda
from slocc.models.responses import ItemStatus
from slocc.parsers.base import ParsedState
from slocc.services.batch_runner import INDEX_NAME, BatchRunner, write_atomic
from slocc.services.classifier import ClassifierService
from slocc.services.result_store import ResultStore
from slocc.utils.formatting import literals_to_matrix
from slocc.utils.hashing import state_digest


def test_classify_worked_state(service, samples_dir):
    report = service.classify_file(samples_dir / "worked_2432.ket")
    assert report.verified
    assert report.standard_form.blocks == ["L1", "L2", "N1"]
    assert report.arrangement.composite_side == "columns"
    assert report.local_ranks == [2, 4, 3, 2]
    assert report.genuine
    assert report.invariants == []


def test_classify_psi_reports_family_parameter(service, samples_dir):
    report = service.classify_file(samples_dir / "psi_2.json")
    assert report.invariants == ["-1"]
    assert report.family_parameters == ["-1"]
    assert report.arrangement.single_axis == 4
    assert report.arrangement.composite_side == "rows"


def test_classify_marks_rank_deficient_state(service):
    tensor = StateTensor.create(StateShape.of(2, 2, 2, 2), {(1, 1, 1, 1): 1, (2, 2, 1, 1): 1})
    report = service.classify(ParsedState(tensor))
    assert report.local_ranks == [2, 2, 1, 1]
    assert not report.genuine
    assert "particle(s) 3, 4" in report.genuine_explanation


def test_route_reaches_standard_form(service, samples_dir):
    report = service.classify_file(samples_dir / "worked_2432.ket")
    parsed = service.load_state(samples_dir / "worked_2432.ket")
    assert literals_to_matrix(report.route.t).shape == (2, 2)
    assert literals_to_matrix(report.standard_form.e_part).shape == (4, 6)
    assert parsed.tensor.shape.dims == (2, 4, 3, 2)


def test_unsupported_state_file(service, tmp_path):
    path = tmp_path / "state.csv"
    path.write_text("1,2")
    with pytest.raises(ParseError):
        service.load_state(path)


def test_compare_files(service, samples_dir):
    first = service.load_state(samples_dir / "psi_2.json")
    second = service.load_state(samples_dir / "psi_minus1.json")
    report = service.compare(first, second)
    assert report.verdict == VerdictKind.INEQUIVALENT
    assert report.exit_code == 10


def test_compare_scrambled_state(service, samples_dir):
    first = service.load_state(samples_dir / "psi_2.json")
    scrambled = ParsedState(service.scramble(first, seed=3))
    report = service.compare(first, scrambled)
    assert report.verdict == VerdictKind.EQUIVALENT
    assert report.witness is not None
    assert len(report.witness.a4) == 4


def test_census_with_extra_table(service, samples_dir):
    report = service.census(StateShape.of(2, 4, 3, 2), service.load_census_table(samples_dir / "omega_extra.json"))
    assert report.count == 39
    assert (report.single_dim, report.low, report.high) == (4, 3, 6)


def test_realign_and_orbit(service, samples_dir):
    report = service.realign_file(samples_dir / "p_f.mat", RealignmentShape.square(2, 2))
    assert report.rank == 4
    assert report.left is None and report.right is None
    assert report.realigned[3][3] == "2"

    orbit = service.orbit("2")
    assert orbit.orbit == ["-1", "1/2", "2"]


def test_canon_pair(service, samples_dir):
    report = service.canon_file(samples_dir / "pair_2432.mat")
    assert report.verified
    assert report.blocks == ["L1", "L2", "J1(0)"]


def test_random_state_round_trips_through_state_file(service):
    tensor = service.random_state(StateShape.of(2, 3, 2, 2), seed=5, entry_bound=3)
    data = ClassifierService.to_state_file(tensor, 1, 2)
    assert data["qubit_axis"] == 1 and "ket" not in data
    parsed = service.get_parser("json").parse_data(json.loads(json.dumps(data)))
    assert parsed.tensor == tensor


def test_state_digest_depends_on_axes():
    psi = psi_lambda(2)
    assert state_digest(psi) == state_digest(psi)
    assert state_digest(psi, 1, 4) != state_digest(psi, 1, 2)


async def test_result_store_round_trip(service, store, samples_dir):
    report = service.classify_file(samples_dir / "worked_2432.ket")
    assert await store.get_report("abc") is None
    await store.save_report("abc", report)
    assert await store.get_report("abc") == report
    await store.save_report("abc", report.model_copy(update={"source": "again"}))
    assert (await store.get_report("abc")).source == "again"


async def test_classify_cached_hits_the_store(settings, store, samples_dir):
    service = ClassifierService(settings=settings, store=store)
    report, digest, hit = await service.classify_cached(samples_dir / "batch" / "ghz.ket")
    assert not hit
    again, digest_again, hit_again = await service.classify_cached(samples_dir / "batch" / "ghz.ket")
    assert hit_again and digest_again == digest
    assert again.signature == report.signature


async def test_batch_runner(settings, store, samples_dir, tmp_path):
    broken = tmp_path / "inputs"
    broken.mkdir()
    for path in (samples_dir / "batch").iterdir():
        (broken / path.name).write_text(path.read_text())
    (broken / "empty.ket").write_text("shape: 2 2 2 2\n|1111> - |1111>\n")
    (broken / "notes.md").write_text("ignored")

    service = ClassifierService(settings=settings, store=store)
    runner = BatchRunner(service, output_dir=tmp_path / "reports", workers=2)
    summary = await runner.run(broken)
    assert summary.count == 4
    assert summary.failed == 1
    assert summary.completed == 3
    failed = next(item for item in summary.items if item.status == ItemStatus.FAILED)
    assert failed.source == "empty.ket"
    assert (tmp_path / "reports" / "ghz.report.json").exists()
    index = json.loads((tmp_path / "reports" / INDEX_NAME).read_text())
    assert index["count"] == 4

    rerun = await runner.run(broken)
    assert rerun.cached == 3


def test_write_atomic_replaces_file(tmp_path):
    path = tmp_path / "out" / "report.json"
    write_atomic(path, "first")
    write_atomic(path, "second")
    assert path.read_text() == "second"
    assert [p.name for p in path.parent.iterdir()] == ["report.json"]


async def test_store_default_path(settings):
    store = ResultStore(settings.store_path)
    await store.initialize()
    assert settings.store_path.exists()
