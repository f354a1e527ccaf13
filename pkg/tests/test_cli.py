import json
import random
import subprocess
import sys

import pytest

from conftest import FIXTURES
from oracle import oracle_optimum
from shopbound.cli import run
from shopbound.instance import make_instance, serialize

TA45 = str(FIXTURES / "instances" / "taillard" / "ta45.txt")
TA45_ORDERS = str(FIXTURES / "paper_solutions" / "ta45.txt")
REGISTRY = FIXTURES / "registry"


@pytest.fixture
def chain_file(tmp_path):
    path = tmp_path / "chain.txt"
    path.write_text("1 2\n0 3 1 2\n")
    return str(path)


def test_solve_chain(chain_file, tmp_path):
    out, trace = tmp_path / "sol.json", tmp_path / "trace.csv"
    res = run(["solve", "--instance", chain_file, "--format", "jssp", "--mode", "opt",
               "--out", str(out), "--trace", str(trace)])
    assert res.exit_code == 0
    assert json.loads(res.stdout) == {"status": "Optimal", "lb": 5, "ub": 5}
    assert json.loads(out.read_text())["makespan"] == 5
    lines = trace.read_text().splitlines()
    assert lines[0] == "elapsed_s,lb,ub"
    assert lines[1].endswith(",5,") or lines[1].split(",")[2] == ""
    # pipeline closure
    assert run(["verify", "--instance", chain_file, "--solution", str(out)]).exit_code == 0


def test_solve_sat_below_optimum_exits_1(tmp_path):
    rng = random.Random(3)
    inst = make_instance("r", 3, [[[(m, rng.randint(1, 9))] for m in rng.sample(range(3), 3)] for _ in range(3)])
    best, _ = oracle_optimum(inst)
    path = tmp_path / "r.txt"
    path.write_text(serialize(inst))
    res = run(["solve", "--instance", str(path), "--mode", "sat", "--threshold", str(best - 1)])
    assert res.exit_code == 1
    assert json.loads(res.stdout)["status"] == "Infeasible"
    res = run(["solve", "--instance", str(path), "--mode", "sat", "--threshold", str(best)])
    assert res.exit_code == 0 and json.loads(res.stdout)["ub"] == best


def test_solve_usage_errors(chain_file, tmp_path):
    assert run(["solve", "--instance", chain_file, "--mode", "sat"]).exit_code == 2
    assert run(["solve", "--instance", chain_file, "--workers", "0"]).exit_code == 2
    assert run(["solve", "--instance", chain_file, "--mode", "best"]).exit_code == 2
    assert run(["solve", "--instance", str(tmp_path / "missing.txt")]).exit_code == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2\n0 3\n")
    assert run(["solve", "--instance", str(bad), "--format", "jssp"]).exit_code == 2
    assert run([]).exit_code == 2


def test_verify_ta45_orders():
    res = run(["verify", "--instance", TA45, "--orders", TA45_ORDERS])
    assert res.exit_code == 0
    out = json.loads(res.stdout)
    assert out["feasible"] and out["makespan"] == 1997
    assert out["machine_end_times"] == out["published_end_times"]


def test_verify_swapped_tokens_cycle(tmp_path):
    inst = make_instance("x", 2, [[[(0, 1)], [(1, 1)]], [[(1, 1)], [(0, 1)]]])
    (tmp_path / "x.txt").write_text(serialize(inst))
    (tmp_path / "ok.txt").write_text("0.0 1.1\n1.0 0.1\n")
    (tmp_path / "bad.txt").write_text("1.1 0.0\n0.1 1.0\n")
    assert run(["verify", "--instance", str(tmp_path / "x.txt"), "--orders", str(tmp_path / "ok.txt")]).exit_code == 0
    res = run(["verify", "--instance", str(tmp_path / "x.txt"), "--orders", str(tmp_path / "bad.txt")])
    assert res.exit_code == 1
    assert json.loads(res.stdout)["error"] == "CyclicOrders"


def test_verify_infeasible_solution(chain_file, tmp_path):
    sol = tmp_path / "s.json"
    sol.write_text(json.dumps({"instance": "chain", "makespan": 4, "assignments": [
        {"job": 0, "op": 0, "machine": 0, "start": 0, "end": 3},
        {"job": 0, "op": 1, "machine": 1, "start": 2, "end": 4}]}))
    res = run(["verify", "--instance", chain_file, "--solution", str(sol)])
    assert res.exit_code == 1
    assert json.loads(res.stdout)["violations"][0]["kind"] == "precedence"


def test_bounds_commands(tmp_path):
    reg = str(REGISTRY / "bounds.csv")
    assert run(["bounds", "--registry", reg, "--instance", "Ta33"]).stdout == "1791 1791 optimal\n"
    res = run(["bounds", "--registry", str(REGISTRY / "results_new.csv"), "--diff", str(REGISTRY / "results_old.csv")])
    assert res.exit_code == 0
    mk10 = next(line for line in res.stdout.splitlines() if line.startswith("mk10"))
    assert mk10.endswith("25%")
    same = run(["bounds", "--registry", reg, "--diff", reg])
    assert same.exit_code == 0 and same.stdout == ""
    assert "closed" in run(["bounds", "--registry", reg]).stdout
    bad = tmp_path / "bad.csv"
    bad.write_text("instance,lb,ub,lb_source,ub_source,optimal\nx,10,5,a,b,false\n")
    assert run(["bounds", "--registry", str(bad)]).exit_code == 2
    assert run(["bounds", "--registry", reg, "--instance", "nope"]).exit_code == 2


def test_gantt_command(tmp_path):
    out = tmp_path / "g.svg"
    res = run(["gantt", "--instance", TA45, "--solution", TA45_ORDERS, "--format", "svg", "--out", str(out)])
    assert res.exit_code == 0 and out.read_text().startswith("<svg")
    text = run(["gantt", "--instance", TA45, "--solution", TA45_ORDERS, "--format", "text"])
    assert text.exit_code == 0 and text.stdout.startswith("ta45 makespan=1997")


def test_gantt_rejects_infeasible(chain_file, tmp_path):
    sol = tmp_path / "s.json"
    sol.write_text(json.dumps({"instance": "chain", "makespan": 4, "assignments": [
        {"job": 0, "op": 0, "machine": 0, "start": 0, "end": 3},
        {"job": 0, "op": 1, "machine": 1, "start": 2, "end": 4}]}))
    assert run(["gantt", "--instance", chain_file, "--solution", str(sol), "--format", "text"]).exit_code == 1


def test_module_entry_point(chain_file):
    proc = subprocess.run([sys.executable, "-m", "shopbound", "solve", "--instance", chain_file],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["ub"] == 5
