import json

import pytest

from stabkit import cli
from stabkit import entanglement as ent_module
from stabkit import stabilizer as stab

BELL = "n=2\n+XX\n+ZZ\n"
GHZ3 = "n=3\n+XXX\n+ZZI\n+IZZ\n"
PRODUCT = "n=2\n+ZI\n+IZ\n"


@pytest.fixture
def bell_file(tmp_path):
    p = tmp_path / "bell.txt"
    p.write_text(BELL)
    return str(p)


@pytest.fixture
def ghz_file(tmp_path):
    p = tmp_path / "ghz.txt"
    p.write_text(GHZ3)
    return str(p)


def test_entangle_bell(bell_file, capsys):
    rc = cli.main(["entangle", bell_file, "--parties", "0:A,1:B", "--format", "json"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert data["epr"] == 1


def test_entangle_product(tmp_path, capsys):
    p = tmp_path / "prod.txt"
    p.write_text(PRODUCT)
    rc = cli.main(["entangle", str(p), "--parties", "0:A,1:B", "--format", "json"])
    assert rc == 0
    assert json.loads(capsys.readouterr().out)["epr"] == 0


def test_entangle_ghz_merged_parties_with_oracle(ghz_file, capsys):
    rc = cli.main(
        ["entangle", ghz_file, "--parties", "0:A,1-2:B", "--oracle", "--format", "json"]
    )
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert data["epr"] == 1
    assert data["oracle_agrees"] is True
    assert abs(data["oracle_value"] - 1.0) < 1e-9


def test_ghz_subcommand(ghz_file, capsys):
    rc = cli.main(["ghz", ghz_file, "--parties", "0:A,1:B,2:C", "--oracle", "--format", "json"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert data["ghz"] == 1 and data["oracle_agrees"] is True


def test_mixed_subcommand(tmp_path, capsys):
    p = tmp_path / "m.txt"
    p.write_text("n=2\n+ZI\n")
    rc = cli.main(["mixed", str(p), "--parties", "0:A,1:B", "--format", "json"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert data["mixed_lower_bound"] == 0


def test_parse_error_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.txt"
    p.write_text("n=2\n+XQ\n")
    rc = cli.main(["entangle", str(p), "--parties", "0:A,1:B"])
    assert rc == 2
    assert "line 2" in capsys.readouterr().err


def test_validity_error_exit_3(tmp_path, capsys):
    p = tmp_path / "anti.txt"
    p.write_text("n=1\n+X\n+Z\n")
    rc = cli.main(["entangle", str(p), "--parties", "0:A"])
    assert rc == 3


def test_partition_overlap_exit_2(bell_file):
    assert cli.main(["entangle", bell_file, "--parties", "0:A,0:B"]) == 2


def test_missing_file_exit_2(capsys):
    assert cli.main(["entangle", "/nonexistent/file.txt", "--parties", "0:A"]) == 2


def test_sample_round_trips_through_entangle(tmp_path, capsys):
    out = tmp_path / "state.txt"
    rc = cli.main(["sample", "--n", "4", "--seed", "7", "--out", str(out)])
    assert rc == 0
    S = stab.load(out)
    assert S.n == 4 and S.dim == 4
    rc = cli.main(["entangle", str(out), "--parties", "0-1:A,2-3:B", "--format", "json"])
    assert rc == 0


def test_sample_deterministic(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    cli.main(["sample", "--n", "5", "--k", "2", "--seed", "9", "--out", str(a)])
    cli.main(["sample", "--n", "5", "--k", "2", "--seed", "9", "--out", str(b)])
    assert a.read_text() == b.read_text()


def test_sample_prints_seed_when_unset(capsys, tmp_path):
    rc = cli.main(["sample", "--n", "2"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "seed=" in out
    seed = int(out.split("seed=")[1].splitlines()[0])
    assert seed >= 0


def test_distance_subcommand(tmp_path, capsys):
    a, b = tmp_path / "c1.txt", tmp_path / "c2.txt"
    cli.main(["sample", "--n", "3", "--clifford", "--seed", "1", "--out", str(a)])
    cli.main(["sample", "--n", "3", "--clifford", "--seed", "2", "--out", str(b)])
    capsys.readouterr()
    rc = cli.main(["distance", str(a), str(b)])
    assert rc == 0
    d = int(capsys.readouterr().out.strip())
    assert 0 <= d <= 6
    rc = cli.main(["distance", str(a), str(a)])
    assert int(capsys.readouterr().out.strip()) == 0 and rc == 0


def test_experiment_purity_exhaustive_exit_codes(capsys):
    rc = cli.main(
        ["experiment", "purity", "--na", "1", "--nb", "1", "--exhaustive", "--seed", "1",
         "--format", "text"]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "mean: 0.8" in out


def test_experiment_writes_json_and_csv(tmp_path, capsys):
    out = tmp_path / "rep.json"
    rc = cli.main(
        ["experiment", "pure-bipartite", "--na", "3", "--nb", "3", "--trials", "80",
         "--seed", "5", "--out", str(out)]
    )
    assert rc == 0
    data = json.loads(out.read_text())
    assert data["kind"] == "pure-bipartite" and data["trials"] == 80
    csv_out = tmp_path / "rep.csv"
    rc = cli.main(
        ["experiment", "pure-bipartite", "--na", "3", "--nb", "3", "--trials", "80",
         "--seed", "5", "--delta-grid", "1,2", "--out", str(csv_out), "--format", "csv"]
    )
    assert rc == 0
    assert csv_out.read_text().startswith("form,")
    assert (tmp_path / "rep.csv.hist.csv").read_text().startswith("value,")


def test_experiment_reports_are_replayable(tmp_path):
    out = tmp_path / "rep.json"
    args = ["experiment", "concentration", "--na", "3", "--nb", "3", "--trials", "60",
            "--seed", "17", "--delta-grid", "1,2,4", "--out", str(out)]
    assert cli.main(args) == 0
    d1 = json.loads(out.read_text())
    assert cli.main(args) == 0
    d2 = json.loads(out.read_text())
    assert d1["extra"]["invocation"] == args
    assert d1["seed"] == 17 and d1["schema_version"] == "1"
    d1.pop("runtime_seconds"), d2.pop("runtime_seconds")
    assert d1 == d2


def test_experiment_config_error_exit_2(capsys):
    rc = cli.main(["experiment", "ghz-tripartite", "--na", "1", "--nb", "1", "--nc", "5",
                   "--trials", "5", "--seed", "1"])
    assert rc == 2


def test_experiment_ghz_multipartite(capsys, tmp_path):
    out = tmp_path / "m.json"
    rc = cli.main(
        ["experiment", "ghz-multipartite", "--m", "4", "--parties", "2", "--trials", "50",
         "--seed", "3", "--epsilon", "0.5", "--out", str(out)]
    )
    assert rc == 0
    data = json.loads(out.read_text())
    assert data["pass_flags"]["tails_dominated"]


def test_verify_passes_within_budget(capsys):
    import time

    t0 = time.perf_counter()
    rc = cli.main(["verify"])
    elapsed = time.perf_counter() - t0
    out = capsys.readouterr().out
    assert rc == 0
    assert "10/10 checks passed" in out
    assert "FAIL" not in out
    assert elapsed < 60.0


def test_verify_negative_control(monkeypatch, capsys):
    # Mutating the entanglement formula must trip the matching check only.
    real = ent_module.pure_bipartite_entanglement

    def broken(S, partition):
        return real(S, partition) + 1

    monkeypatch.setattr(ent_module, "pure_bipartite_entanglement", broken)
    rc = cli.main(["verify"])
    out = capsys.readouterr().out
    assert rc == 1
    assert "FAIL  pure-entanglement-oracle" in out
    assert "PASS  sampler-census" in out