from __future__ import annotations

import json

import pytest

from hardlab import FIXTURES
from hardlab.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, resolve_path, thread_count, UsageError
from hardlab.graph_core import load_graph


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_no_arguments_is_usage(capsys):
    assert main([]) == EXIT_USAGE


def test_unknown_option_is_usage(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["graph", "verify", "--bogus"])
    assert exc.value.code == EXIT_USAGE


def test_missing_file_is_usage(capsys):
    code, _, err = run(capsys, "graph", "spectrum", "--graph", "no/such.s6")
    assert code == EXIT_USAGE and "no such file" in err


def test_fixture_lookup():
    assert resolve_path("fixtures/avg/g4mc.s6") == FIXTURES / "avg" / "g4mc.s6"
    assert resolve_path("k3_I0.gad") == FIXTURES / "gadgets" / "k3_I0.gad"
    with pytest.raises(UsageError):
        resolve_path("nothing.gad")


def test_graph_verify(capsys):
    code, rep = run_json(capsys, "graph", "verify", "--graph", "g4mc.s6", "--witness", "g4mc.witness",
                         "--kind", "cut")
    assert code == EXIT_OK
    assert rep["verdict"] == "ramanujan" and rep["mode"] == "exact"
    assert rep["fraction"] == "113/124" and rep["schema_version"] == 1


def test_graph_verify_non_ramanujan(tmp_path, capsys):
    from hardlab.graph_core import MultiGraph, write_sparse6
    # the 3-cube is bipartite, so -3 is a nontrivial eigenvalue
    cube = MultiGraph.from_pairs(8, [(u, u ^ b) for u in range(8) for b in (1, 2, 4) if u < u ^ b])
    (tmp_path / "cube.s6").write_bytes(write_sparse6(cube, header=True))
    (tmp_path / "w").write_text("0 3 5 6\n")
    code, out, _ = run(capsys, "graph", "verify", "--graph", str(tmp_path / "cube.s6"),
                       "--witness", str(tmp_path / "w"), "--kind", "is")
    assert code == EXIT_FAIL and out.startswith("FAIL")


def test_graph_verify_bad_witness(tmp_path, capsys):
    g = load_graph(FIXTURES / "avg" / "g3is.s6")
    u, v = g.edge_pairs()[0]
    (tmp_path / "w").write_text(f"{u} {v}\n")
    code, rep = run_json(capsys, "graph", "verify", "--graph", "g3is.s6", "--witness", str(tmp_path / "w"),
                         "--kind", "independent_set", "--mode", "float")
    assert code == EXIT_FAIL and rep["witness_valid"] is False


def test_graph_spectrum(capsys, tmp_path):
    out_file = tmp_path / "spectrum.json"
    code, out, _ = run(capsys, "graph", "spectrum", "--graph", "g4mc.s6", "--out", str(out_file))
    assert code == EXIT_OK and "largest 4.0" in out
    rep = json.loads(out_file.read_text())
    assert max(rep["eigenvalues"]) == pytest.approx(4.0)


def test_gadget_params(capsys):
    code, rep = run_json(capsys, "gadget", "params", "--gadget", "k3_I0.gad", "--residue", "0")
    assert code == EXIT_OK and rep["authoritative"]
    assert (rep["c"], rep["c_prime"], rep["s"], rep["t"]) == ("18", "18", "16", "18")


def test_gadget_params_timeout(capsys):
    code, rep = run_json(capsys, "gadget", "params", "--gadget", "k4_I0.gad", "--residue", "0",
                         "--deadline-ms", "1")
    assert code == EXIT_FAIL and rep["authoritative"] is False


def test_bad_gadget_file(tmp_path, capsys):
    (tmp_path / "g.gad").write_text("k=3 vars=6\n1 2 x\n")
    code, _, err = run(capsys, "gadget", "params", "--gadget", str(tmp_path / "g.gad"), "--residue", "0")
    assert code == EXIT_USAGE and "line 2" in err


def test_solve(tmp_path, capsys):
    (tmp_path / "i.txt").write_text("k=3 vars=6\n1 2 1\n2 3 2\n1 3 3\n4 5 1\nfix 1 2\n")
    for backend in ("bnb", "brute"):
        code, rep = run_json(capsys, "solve", "--instance", str(tmp_path / "i.txt"), "--backend", backend)
        assert code == EXIT_OK and rep["value"] == "7"
        assert rep["assignment"][0] == 2


def test_reduce(capsys):
    code, rep = run_json(capsys, "reduce", "--k", "3", "--gadget", "k3_I0.gad", "--gadget", "k3_I1.gad",
                         "--rotate-last")
    assert code == EXIT_OK and rep["ratio"] == "55/57"
    code, _, err = run(capsys, "reduce", "--k", "3", "--gadget", "k3_I0.gad")
    assert code == EXIT_USAGE
    code, _, _ = run(capsys, "reduce", "--k", "4", "--gadget", "k3_I0.gad")
    assert code == EXIT_USAGE


def test_lp_bound(capsys, tmp_path):
    code, rep = run_json(capsys, "lp-bound", "--objective", "mc", "--d", "4", "--L", "1",
                         "--export-dir", str(tmp_path))
    assert code == EXIT_OK and rep["bound"] == pytest.approx(0.934)
    assert rep["slow"] is False and rep["hoffman"] == pytest.approx(0.933, abs=1e-3)
    assert list(tmp_path.glob("*.lp"))
    code, rep = run_json(capsys, "lp-bound", "--objective", "is", "--d", "3", "--L", "1", "--unpruned")
    assert code == EXIT_OK and rep["bound"] == pytest.approx(0.486)


def test_bench_gen_and_run(capsys, tmp_path, monkeypatch):
    data = tmp_path / "d.json"
    code, _, _ = run(capsys, "bench", "gen", "--k", "3", "--m", "6", "--count", "4", "--seed", "2",
                     "--out", str(data))
    assert code == EXIT_OK and len(json.loads(data.read_text())) == 4
    monkeypatch.setenv("HARDLAB_THREADS", "1")
    code, rep = run_json(capsys, "bench", "run", "--dataset", str(data))
    assert code == EXIT_OK and rep["agree"] and rep["concurrency"] == 1
    code, rep = run_json(capsys, "bench", "run", "--dataset", str(data), "--threads", "2")
    assert code == EXIT_OK and rep["concurrency"] == 2
    code, _, _ = run(capsys, "bench", "run", "--dataset", str(data), "--backends", "nope")
    assert code == EXIT_USAGE


def test_thread_count(monkeypatch):
    monkeypatch.setenv("HARDLAB_THREADS", "3")
    assert thread_count(None) == 3
    assert thread_count(5) == 5
    monkeypatch.setenv("HARDLAB_THREADS", "x")
    with pytest.raises(UsageError):
        thread_count(None)
    with pytest.raises(UsageError):
        thread_count(0)


def test_search_gadget(capsys, tmp_path):
    code, rep = run_json(capsys, "search", "gadget", "--k", "3", "--naux", "0", "--budget-evals", "5",
                         "--seed", "1", "--init", "k3_I0.gad", "--init", "k3_I1.gad", "--freeze", "0",
                         "--out-dir", str(tmp_path))
    assert code == EXIT_OK and rep["valid"] and rep["evaluations"] == 5
    assert sorted(p.name for p in tmp_path.iterdir()) == ["k3_I0.gad", "k3_I1.gad", "k3_I2.gad"]
    assert (tmp_path / "k3_I0.gad").read_text() == (FIXTURES / "gadgets" / "k3_I0.gad").read_text()


def test_search_graph(capsys, tmp_path):
    prefix = str(tmp_path / "best")
    code, rep = run_json(capsys, "search", "graph", "--d", "3", "--objective", "mc", "--n-max", "16",
                         "--budget-evals", "40", "--seed", "0", "--out-prefix", prefix)
    assert code == EXIT_OK and rep["valid"]
    code, back = run_json(capsys, "graph", "verify", "--graph", prefix + ".s6", "--witness", prefix + ".witness",
                          "--kind", "cut")
    assert code == EXIT_OK and back["fraction"] == rep["score"]
