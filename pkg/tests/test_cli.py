import json

import pytest

from tilinglab.cli import main
from tilinglab.graph import PartiteGraph


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_writes_graph_and_grid_sidecar(tmp_path, capsys):
    path = tmp_path / "g.json"
    code, _, _ = run(capsys, "gen", "blowup", "-k", "3", "-r", "3", "-t", "2",
                     "-o", str(path))
    assert code == 0
    g = PartiteGraph.from_json(path.read_text())
    assert g.part_sizes == (6, 6, 6)
    sidecar = json.loads((tmp_path / "g.json.grid.json").read_text())
    assert sidecar["rows"] == 3


def test_gen_gamma3_is_refused(tmp_path, capsys):
    with pytest.raises(SystemExit):
        main(["gen", "gamma3", "-n", "6", "-o", str(tmp_path / "x.json")])
    assert not (tmp_path / "x.json").exists()


def test_gen_to_stdout(capsys):
    code, out, _ = run(capsys, "gen", "complete", "-k", "3", "-n", "2")
    assert code == 0
    assert PartiteGraph.from_json(out).edge_count() == 12


def test_solve_and_verify_roundtrip(tmp_path, capsys):
    gpath, cpath = tmp_path / "g.json", tmp_path / "cert.json"
    run(capsys, "gen", "complete", "-k", "3", "-n", "3", "-o", str(gpath))
    code, out, _ = run(capsys, "solve", str(gpath), "-o", str(cpath))
    assert code == 0 and "decision: found" in out
    code, out, _ = run(capsys, "verify", str(cpath), "--graph", str(gpath),
                       "--cover", "all")
    assert code == 0 and "verify: PASS" in out


def test_verify_flags_bad_certificate(tmp_path, capsys):
    gpath, cpath = tmp_path / "g.json", tmp_path / "cert.json"
    run(capsys, "gen", "complete", "-k", "3", "-n", "2", "-o", str(gpath))
    cpath.write_text(json.dumps(
        {"matching": [[[1, 0], [2, 0], [3, 0]], [[1, 0], [2, 1], [3, 1]]]}))
    code, out, _ = run(capsys, "verify", str(cpath), "--graph", str(gpath))
    assert code == 0 and "verify: FAIL" in out


def test_solve_rejects_unbalanced(tmp_path, capsys):
    gpath = tmp_path / "g.json"
    gpath.write_text(PartiteGraph(3, [1, 1, 2], []).to_json())
    with pytest.raises(SystemExit):
        main(["solve", str(gpath)])


def test_solve_rejects_garbage_input(tmp_path, capsys):
    bad = tmp_path / "nope.json"
    bad.write_text("{not json")
    with pytest.raises(SystemExit):
        main(["solve", str(bad)])


def test_absorb_reports_bounds(tmp_path, capsys):
    gpath, spath = tmp_path / "g.json", tmp_path / "state.json"
    run(capsys, "gen", "complete", "-k", "3", "-n", "9", "-o", str(gpath))
    code, out, _ = run(capsys, "absorb", str(gpath), "--target-family", "3",
                       "--seed", "1", "-o", str(spath))
    assert code == 0
    assert "status: ok" in out
    assert "vacuous at this n" in out  # paper bounds collapse at n = 9
    state = json.loads(spath.read_text())
    assert state["type"] == "absorber-state"
    assert len(state["carriers"]) == state["stats"]["family_size"]


def test_analyze_theta_and_extremal(tmp_path, capsys):
    gpath, cpath = tmp_path / "g.json", tmp_path / "cert.json"
    run(capsys, "gen", "blowup", "-k", "3", "-r", "3", "-t", "2",
        "-o", str(gpath))
    code, out, _ = run(capsys, "analyze", str(gpath), "--mode", "theta",
                       "-r", "3", "--epsilon", "0", "--delta", "0",
                       "-o", str(cpath))
    assert code == 0 and "size_slack=0" in out
    assert json.loads(cpath.read_text())["type"] == "theta-approximation"
    code, out, _ = run(capsys, "analyze", str(gpath), "--mode", "extremal",
                       "--delta", "0")
    assert code == 0 and "certificate max_density=0" in out


def test_analyze_theta_not_found_labels_refutation(tmp_path, capsys):
    gpath = tmp_path / "g.json"
    run(capsys, "gen", "complete", "-k", "3", "-n", "4", "-o", str(gpath))
    code, out, _ = run(capsys, "analyze", str(gpath), "--mode", "theta",
                       "-r", "2", "--epsilon", "0", "--delta", "0.25")
    assert code == 0 and "exhaustively refuted" in out


def test_analyze_minimize(tmp_path, capsys):
    gpath, opath = tmp_path / "g.json", tmp_path / "min.json"
    run(capsys, "gen", "complete", "-k", "3", "-n", "4", "-o", str(gpath))
    code, out, _ = run(capsys, "analyze", str(gpath), "--mode", "minimize",
                       "--floor", "2", "-o", str(opath))
    assert code == 0
    out_g = PartiteGraph.from_json(opath.read_text())
    assert out_g.min_partite_degree() >= 2


def test_pipeline_record(tmp_path, capsys):
    gpath, rpath = tmp_path / "g.json", tmp_path / "run.json"
    run(capsys, "gen", "complete", "-k", "3", "-n", "6", "-o", str(gpath))
    code, out, _ = run(capsys, "pipeline", str(gpath), "-o", str(rpath))
    assert code == 0 and "outcome: factor" in out
    rec = json.loads(rpath.read_text())
    assert rec["outcome"] == "factor" and len(rec["matching"]) == 6


def test_fuzz_then_report(tmp_path, capsys):
    csv_path, sum_path = tmp_path / "fuzz.csv", tmp_path / "summary.csv"
    code, _, err = run(capsys, "fuzz", "-k", "3", "-n", "4", "--floor", "4",
                       "--trials", "5", "--seed", "9", "-o", str(csv_path))
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "# tilinglab fuzz csv schema 1"
    assert lines[1].split(",")[:3] == ["trial", "seed", "k"]
    assert len(lines) == 7
    code, out, _ = run(capsys, "report", str(csv_path), "-o", str(sum_path))
    assert code == 0 and "records: 5" in out
    assert "found: 5" in out  # floor = n means complete graphs
    assert "outcome,count" in sum_path.read_text()


def test_fuzz_archives_factorless_instances(tmp_path, capsys):
    # floor 0 with 3 vertices per part: factorless instances show up fast
    csv_path = tmp_path / "fuzz.csv"
    code, _, err = run(capsys, "fuzz", "-k", "3", "-n", "3", "--floor", "0",
                       "--trials", "10", "--seed", "0", "-o", str(csv_path))
    assert code == 0
    archived = list(tmp_path.glob("fuzz-exception-*.json"))
    rows = [ln for ln in csv_path.read_text().splitlines()[2:] if ln]
    none_rows = [r for r in rows if r.split(",")[5] == "none"]
    assert len(archived) == len(none_rows)
    if archived:
        assert "WARNING" in err
        g = PartiteGraph.from_json(archived[0].read_text())
        assert g.part_sizes == (3, 3, 3)


def test_fuzz_rejects_bad_arguments(capsys):
    with pytest.raises(SystemExit):
        main(["fuzz", "--floor", "5", "-n", "4", "--trials", "1"])
    with pytest.raises(SystemExit):
        main(["fuzz", "--floor", "1", "--trials", "0"])


def test_report_rejects_missing_columns(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(SystemExit):
        main(["report", str(bad)])
