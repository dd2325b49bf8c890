import json

import pytest
from click.testing import CliRunner

from mosskit.cli import main

from conftest import FIXTURE_EDGES, edges_to_text, random_gnp


@pytest.fixture
def runner():
    return CliRunner()


def _write_graph(tmp_path, edges, name="g.txt"):
    path = tmp_path / name
    path.write_text(edges_to_text(edges))
    return str(path)


def _gnp_path(tmp_path, seed=19, n=14, p=0.4):
    g = random_gnp(n, p, seed)
    return _write_graph(tmp_path, list(g.edges()), name=f"gnp{seed}.txt")


def test_stats_k4(runner, tmp_path):
    path = _write_graph(tmp_path, FIXTURE_EDGES["k4"])
    res = runner.invoke(main, ["stats", "--input", path])
    assert res.exit_code == 0
    out = dict(line.split(None, 1) for line in res.output.splitlines())
    assert out["gamma"] == "48"
    assert out["gamma_check"] == "14"
    assert out["lambda3"] == "4"
    assert out["nodes"] == "4" and out["edges"] == "6"


def test_stats_warns_on_inapplicable(runner, tmp_path):
    path = _write_graph(tmp_path, FIXTURE_EDGES["path3"])
    res = runner.invoke(main, ["stats", "--input", path])
    assert res.exit_code == 0
    assert "inapplicable" in res.stderr


def test_exact_k5(runner, tmp_path):
    path = _write_graph(tmp_path, FIXTURE_EDGES["k5"])
    res = runner.invoke(main, ["exact", "--input", path, "-k", "5"])
    assert res.exit_code == 0
    obj = json.loads(res.output)
    assert obj["exact"]["counts"] == {"21": 1}
    assert obj["provenance"]["tool"] == "mosskit"


def test_exact_csv_header(runner, tmp_path):
    path = _write_graph(tmp_path, FIXTURE_EDGES["k4"])
    res = runner.invoke(main, ["exact", "--input", path, "-k", "4",
                               "--format", "csv"])
    assert res.exit_code == 0
    lines = [x for x in res.output.splitlines() if not x.startswith("#")]
    assert lines[0] == "motif_id,estimate,variance,stderr,nrmse,ci_low,ci_high"
    assert lines[1] == "6,1,0.0,0.0,0.0,1,1"


def test_sample_is_deterministic_in_seed(runner, tmp_path):
    path = _gnp_path(tmp_path)
    args = ["sample", "--input", path, "--method", "moss4",
            "--budget", "2000", "--seed", "7"]
    a = runner.invoke(main, args)
    b = runner.invoke(main, args)
    assert a.exit_code == 0
    assert a.output == b.output
    c = runner.invoke(main, args[:-1] + ["8"])
    assert json.loads(c.output)["report"]["estimates"] != \
        json.loads(a.output)["report"]["estimates"]


def test_sample_all_methods_and_csv(runner, tmp_path):
    path = _gnp_path(tmp_path)
    for method in ("moss4", "moss4min", "moss5", "t5", "path5"):
        res = runner.invoke(main, ["sample", "--input", path, "--method",
                                   method, "--budget", "500", "--format", "csv"])
        assert res.exit_code == 0, res.output
        lines = res.output.splitlines()
        assert lines[0].startswith("# tool=mosskit")
        body = [x for x in lines if not x.startswith("#")]
        assert body[0] == "motif_id,estimate,variance,stderr,nrmse,ci_low,ci_high"


def test_sample_workers_partition_reproducibly(runner, tmp_path):
    path = _gnp_path(tmp_path)
    args = ["sample", "--input", path, "--method", "t5", "--budget", "999",
            "--seed", "3", "--workers", "4"]
    a = runner.invoke(main, args)
    b = runner.invoke(main, args)
    assert a.exit_code == 0 and a.output == b.output


def test_tape_roundtrip_direct_to_vertex(runner, tmp_path):
    path = _gnp_path(tmp_path)
    tape = str(tmp_path / "tape.json")
    for method in ("moss4", "moss4min", "t5", "path5"):
        base = ["--input", path, "--method", method, "--budget", "200",
                "--seed", "5", "--tape", tape]
        a = runner.invoke(main, ["sample"] + base + ["--engine", "direct"])
        assert a.exit_code == 0, a.output
        b = runner.invoke(main, ["sample"] + base + ["--engine", "vertex"])
        assert b.exit_code == 0, b.output
        assert json.loads(a.output)["report"]["estimates"] == \
            json.loads(b.output)["report"]["estimates"]


def test_exit_codes(runner, tmp_path):
    path = _write_graph(tmp_path, FIXTURE_EDGES["path3"])
    res = runner.invoke(main, ["sample", "--input", path, "--method", "moss4",
                               "--budget", "10"])
    assert res.exit_code == 3      # inapplicable method
    res = runner.invoke(main, ["sample", "--input", path, "--method", "moss4",
                               "--budget", "0"])
    assert res.exit_code == 2      # config error
    dense = _gnp_path(tmp_path, seed=4, n=14, p=0.6)
    res = runner.invoke(main, ["exact", "--input", dense, "-k", "5",
                               "--cap", "5"])
    assert res.exit_code == 4      # scale cap
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\nnot an edge\n")
    res = runner.invoke(main, ["stats", "--input", str(bad)])
    assert res.exit_code == 2      # parse error


def test_plan(runner, tmp_path):
    path = _gnp_path(tmp_path)
    res = runner.invoke(main, ["plan", "--input", path, "--method", "moss4",
                               "--pilot-budget", "5000"])
    assert res.exit_code == 0, res.output
    obj = json.loads(res.output)
    assert set(obj["planned_budget"]) == {"1", "3", "4", "5", "6"}
    assert obj["max_budget"] == max(obj["planned_budget"].values())
    assert all(v >= 1 for v in obj["planned_budget"].values())


def test_experiment_with_ground_truth(runner, tmp_path):
    path = _gnp_path(tmp_path)
    truth = str(tmp_path / "truth.json")
    res = runner.invoke(main, ["exact", "--input", path, "-k", "4",
                               "--output", truth])
    assert res.exit_code == 0
    res = runner.invoke(main, ["experiment", "--input", path, "--method",
                               "moss4", "--budget", "2000", "--repeats", "5",
                               "--ground-truth", truth])
    assert res.exit_code == 0, res.output
    obj = json.loads(res.output)
    assert obj["repeats"] == 5
    rows = {row["motif_id"]: row for row in obj["rows"]}
    assert rows and any(row["nrmse"] is not None for row in rows.values())


def test_output_file_written(runner, tmp_path):
    path = _write_graph(tmp_path, FIXTURE_EDGES["k4"])
    out = tmp_path / "out.json"
    res = runner.invoke(main, ["exact", "--input", path, "-k", "4",
                               "--output", str(out)])
    assert res.exit_code == 0
    assert json.loads(out.read_text())["exact"]["counts"] == {"6": 1}
