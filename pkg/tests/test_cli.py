import csv
import io
import json

import pytest

from edcsim.cli import (EXPERIMENTS, ConfigError, Context, main, parse_config, parse_seeds,
                        resolve, run_experiment)
from edcsim.io import parse_graph, read_graph

GOLDEN_HEADERS = {
    "edcs-validate": "instance,seed,n,m,beta,beta_minus,order,start,steps,step_bound,"
                     "edcs_edges,phi_increasing,violations",
    "ddl-gap": "instance,seed,m,beta,beta_minus,gap,bound,within_bound,violations",
    "coreset-matching": "instance,seed,m,k,union_edges,max_coreset_edges,matching,oracle_mm,"
                        "ratio,fitted_lambda,violations",
    "coreset-vc": "instance,seed,m,cover,fixed,maximal_matching,ratio_to_bound,feasible,"
                  "violations",
    "maxmatching-coreset": "instance,seed,m,k,union_edges,matching,oracle_mm,ratio,violations",
    "lowerbound-demo": "instance,seed,mm,maxmatching_mm,edcs_mm,maxmatching_ratio,edcs_ratio,"
                       "flagged_parts,k_within_hypothesis,violations",
    "mpc-full": "instance,seed,m,matching,cover,cover_per_match,depth,depth_bound,"
                "delta_decreasing,leaks,rounds,peak_memory,messages,memory_violations,"
                "feasible,violations",
    "mpc-iterate": "instance,seed,m,eps,alpha,iterations,matching,oracle_mm,ratio,rounds,"
                   "memory_violations,violations",
    "stream": "instance,seed,m,variant,k,union_edges,matching,oracle_mm,ratio,peak_space,"
              "space_bound,within_space,violations",
    "concentration-demo": "instance,seed,mm,sample_p,samples,mean_sample_mm,std_sample_mm,"
                          "scale,violations",
}

# small instances so the whole sweep stays quick
SMALL = {
    "edcs-validate": {"instance": "er", "n": "20"},
    "ddl-gap": {"n": "60", "avg_degree": "8", "beta": "8"},
    "coreset-matching": {"n_left": "40", "n_right": "40"},
    "coreset-vc": {"n_left": "40", "n_right": "40"},
    "maxmatching-coreset": {"n_left": "40", "n_right": "40"},
    "lowerbound-demo": {"n": "80", "k": "4"},
    "mpc-full": {"n": "200", "d": "24"},
    "mpc-iterate": {"n_left": "40", "n_right": "40", "p": "0.1"},
    "stream": {"n_left": "40", "n_right": "40", "beta": "8", "beta_minus": "7"},
    "concentration-demo": {"n_left": "30", "n_right": "30", "samples": "5"},
}


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_every_experiment_has_a_golden_header():
    assert set(GOLDEN_HEADERS) == set(EXPERIMENTS) == set(SMALL)


@pytest.mark.parametrize("name", sorted(EXPERIMENTS))
def test_headers_and_determinism(name):
    a, va = run_experiment(name, SMALL[name], [0, 1])
    b, vb = run_experiment(name, SMALL[name], [0, 1])
    assert a.splitlines()[0] == GOLDEN_HEADERS[name]
    assert a == b and va == vb == 0
    assert len(rows(a)) == 2


def test_triangle_fixture_validates():
    text, violations = run_experiment("edcs-validate", {}, [0])
    (row,) = rows(text)
    assert row["instance"] == "triangle" and row["violations"] == "0"
    assert row["edcs_edges"] == "1" and violations == 0


def test_rows_sorted_by_seed():
    text, _ = run_experiment("edcs-validate", {}, [3, 1, 2])
    assert [r["seed"] for r in rows(text)] == ["1", "2", "3"]


def test_cell_formats():
    (row,) = rows(run_experiment("edcs-validate", {}, [0])[0])
    assert row["phi_increasing"] == "true"
    (row,) = rows(run_experiment("coreset-matching", SMALL["coreset-matching"], [0])[0])
    assert len(row["ratio"].split(".")[1]) == 6


# -- config ---------------------------------------------------------------------------------------

def test_parse_config():
    assert parse_config("# comment\n\nbeta = 8  # trailing\nk=3\n") == {"beta": "8", "k": "3"}
    with pytest.raises(ConfigError, match="line|:2:"):
        parse_config("beta=8\nnot a pair\n", "c.txt")


def test_resolve_types_and_unknown_keys():
    cfg = resolve({"k": 1, "p": 0.5, "flag": False, "name": "x"},
                  {"k": "4", "p": "0.25", "flag": "true"})
    assert cfg == {"k": 4, "p": 0.25, "flag": True, "name": "x"}
    with pytest.raises(ConfigError, match="unknown config keys"):
        resolve({"k": 1}, {"kk": "2"})
    with pytest.raises(ConfigError, match="cannot read"):
        resolve({"k": 1}, {"k": "four"})


def test_parse_seeds():
    assert parse_seeds("2..4") == [2, 3, 4]
    assert parse_seeds("7") == [7]
    for bad in ("4..2", "a..b"):
        with pytest.raises(ConfigError):
            parse_seeds(bad)


# -- entry point -------------------------------------------------------------------------------------

def test_gen_examples(tmp_path, capsys):
    out = tmp_path / "lb.txt"
    assert main(["gen", "lowerbound", "8", "4", "--out", str(out)]) == 0
    g = read_graph(out)
    assert (g.n, g.m) == (18, 32)
    assert main(["gen", "bipartite", "3", "3", "1.0"]) == 0
    g, _ = parse_graph(capsys.readouterr().out)
    assert g.m == 9
    assert main(["gen", "er", "5", "0.0"]) == 0
    assert parse_graph(capsys.readouterr().out)[0].m == 0


def test_gen_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen", "lowerbound", "10", "4"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["gen", "er", "five", "0.1"])
    assert exc.value.code == 2 and "bad parameters" in capsys.readouterr().err


def test_run_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("beta 3\n")
    with pytest.raises(SystemExit) as exc:
        main(["run", "--experiment", "edcs-validate", "--config", str(cfg)])
    assert exc.value.code == 2 and "expected key=value" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        main(["run", "--experiment", "edcs-validate", "--set", "gamma=1"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["run", "--experiment", "no-such-thing"])
    assert exc.value.code == 2


def test_run_writes_csv_and_trace(tmp_path):
    cfg = tmp_path / "mpc.cfg"
    cfg.write_text("n=200\nd=24\n")
    out, trace = tmp_path / "rows.csv", tmp_path / "trace.json"
    code = main(["run", "--experiment", "mpc-full", "--config", str(cfg), "--seeds", "0..1",
                 "--out", str(out), "--trace-out", str(trace)])
    assert code == 0
    assert out.read_text().splitlines()[0] == GOLDEN_HEADERS["mpc-full"]
    data = json.loads(trace.read_text())
    assert set(data) == {"0", "1"}
    for t in data.values():
        assert set(t) == {"rounds", "per_round", "violations", "notes"}
        assert t["rounds"] == len(t["per_round"])


def test_theory_mode_context():
    text, violations = run_experiment("mpc-full", SMALL["mpc-full"], [0], Context(mode="theory"))
    (row,) = rows(text)
    assert row["depth"] == "0" and row["rounds"] == "2" and violations == 0


def test_exit_code_reflects_violations(tmp_path, monkeypatch):
    out = tmp_path / "r.csv"
    args = ["run", "--experiment", "edcs-validate", "--out", str(out)]
    assert main(args) == 0
    exp = EXPERIMENTS["edcs-validate"]

    def broken(cfg, seed, ctx):
        return [dict(exp.run(cfg, seed, ctx)[0], violations=1)]

    monkeypatch.setitem(EXPERIMENTS, "edcs-validate", type(exp)(broken, exp.defaults, exp.columns))
    assert main(args) == 1
    assert rows(out.read_text())[0]["violations"] == "1"
