import json

import pytest

from slocc.cli import main, parse_dims, shape_from_dims
from slocc.config import get_settings
from slocc.core.state import StateShape
from slocc.errors import ParseError


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    monkeypatch.setenv("SLOCC_DATA_DIR", str(tmp_path / "data"))
    monkeypatch.setenv("SLOCC_SAMPLES", "16")
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def test_parse_dims_and_shapes():
    assert parse_dims(["2x4x3x2"]) == [2, 4, 3, 2]
    assert parse_dims(["4", "3", "2"]) == [4, 3, 2]
    assert shape_from_dims([4, 3, 2]) == StateShape.of(2, 4, 3, 2)
    with pytest.raises(ParseError):
        shape_from_dims([2, 2])


def test_classify_text(samples_dir, capsys):
    assert main(["classify", str(samples_dir / "worked_2432.ket")]) == 0
    out = capsys.readouterr().out
    assert "signature: L1,L2,N1;" in out
    assert "verified: yes" in out
    assert "P0 (4x4):" in out


def test_classify_json(samples_dir, capsys):
    assert main(["classify", "--format", "json", str(samples_dir / "psi_2.json")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["invariants"] == ["-1"]
    assert report["arrangement"]["composite_side"] == "rows"


def test_classify_needs_input(capsys):
    assert main(["classify"]) == 2
    assert "classify needs" in capsys.readouterr().err


def test_classify_missing_file(tmp_path, capsys):
    assert main(["classify", str(tmp_path / "absent.ket")]) == 2


def test_compare_exit_code(samples_dir, capsys):
    code = main(["compare", str(samples_dir / "psi_2.json"), str(samples_dir / "psi_minus1.json")])
    assert code == 10
    assert "verdict: Inequivalent" in capsys.readouterr().out


def test_scrambled_state_compares_equivalent(samples_dir, tmp_path, capsys):
    scrambled = tmp_path / "scrambled.json"
    assert main(["random", "--scramble", str(samples_dir / "psi_2.json"), "--seed", "9",
                 "--format", "json", "--output", str(scrambled)]) == 0
    assert main(["compare", "--format", "json", str(samples_dir / "psi_2.json"), str(scrambled)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] == "Equivalent"
    assert len(report["witness"]["a1"]) == 2


@pytest.mark.parametrize("args", [["4", "3", "2"], ["2x4x3x2"], ["2", "4", "3", "2"]])
def test_census(args, capsys):
    assert main(["census", *args]) == 0
    assert capsys.readouterr().out.rstrip().endswith("= 39")


def test_census_missing_omega(capsys):
    assert main(["census", "5", "3", "3"]) == 2
    assert "--omega-table" in capsys.readouterr().err


def test_census_json(capsys):
    assert main(["census", "--format", "json", "4", "4", "4"]) == 0
    assert json.loads(capsys.readouterr().out)["count"] == 37


def test_orbit(capsys):
    assert main(["orbit", "2"]) == 0
    assert capsys.readouterr().out.strip() == "orbit of 2: {-1, 1/2, 2}"
    assert main(["orbit", "--", "-1/2"]) == 0
    assert capsys.readouterr().out.strip() == "orbit of -1/2: {-2, -1/2, 1/3, 2/3, 3/2, 3}"


def test_orbit_degenerate(capsys):
    assert main(["orbit", "1"]) == 2
    assert "degenerate" in capsys.readouterr().err


def test_realign(samples_dir, capsys):
    assert main(["realign", str(samples_dir / "p_f.mat"), "2", "2"]) == 0
    out = capsys.readouterr().out
    assert "rank: 4" in out
    assert "not a Kronecker product" in out


def test_canon(samples_dir, capsys):
    assert main(["canon", str(samples_dir / "pair_2432.mat")]) == 0
    assert "blocks: L1 L2 J1(0)" in capsys.readouterr().out


def test_random_state_can_be_classified(tmp_path, capsys):
    path = tmp_path / "random.ket"
    assert main(["random", "2", "3", "2", "2", "--seed", "4", "--bound", "2", "--output", str(path)]) == 0
    assert path.read_text().startswith("shape: 2x3x2x2")
    assert main(["classify", str(path)]) == 0


def test_random_needs_shape(capsys):
    assert main(["random"]) == 2


def test_random_and_census_read_three_dims_alike(tmp_path, capsys):
    path = tmp_path / "three.ket"
    assert main(["random", "4", "3", "2", "--seed", "1", "--output", str(path)]) == 0
    assert path.read_text().startswith("shape: 2x4x3x2")
    assert main(["census", "4", "3", "2", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["shape"] == [2, 4, 3, 2]


def test_realign_rectangular_cut(tmp_path, capsys):
    path = tmp_path / "wide.mat"
    path.write_text("1 2 3\n4 5 6\n")
    assert main(["realign", str(path), "1", "2", "3", "1"]) == 0
    out = capsys.readouterr().out
    assert "realigned (1x3 blocks of 2x1)" in out
    assert "rank: 1" in out
    assert main(["realign", str(path), "2", "3", "4"]) == 2


def test_catalog(tmp_path, capsys):
    assert main(["catalog"]) == 0
    out = capsys.readouterr().out
    assert "2222-ghz" in out and "2432-worked" in out

    path = tmp_path / "ghz.ket"
    assert main(["catalog", "2222-ghz", "--output", str(path)]) == 0
    assert main(["classify", str(path)]) == 0


def test_catalog_unknown_name(capsys):
    assert main(["catalog", "nope"]) == 2


def test_invalid_samples(samples_dir, capsys):
    assert main(["compare", "--samples", "0", str(samples_dir / "psi_2.json"),
                 str(samples_dir / "psi_2.json")]) == 2


def test_batch(samples_dir, tmp_path, capsys):
    out_dir = tmp_path / "reports"
    assert main(["classify", "--batch", str(samples_dir / "batch"), "--out", str(out_dir), "--no-cache"]) == 0
    assert (out_dir / "index.json").exists()
    assert "3 files: 3 classified, 0 cached, 0 failed" in capsys.readouterr().out


def test_batch_uses_store(samples_dir, tmp_path, capsys):
    out_dir = tmp_path / "reports"
    args = ["classify", "--batch", str(samples_dir / "batch"), "--out", str(out_dir)]
    assert main(args) == 0
    capsys.readouterr()
    assert main(args) == 0
    assert "3 cached" in capsys.readouterr().out
    assert (tmp_path / "data" / "results.db").exists()


def test_unknown_subcommand():
    with pytest.raises(SystemExit):
        main(["explode"])
