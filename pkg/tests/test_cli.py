import json
import subprocess
import sys

import pytest

from sumcast.cli import main
from sumcast.instances import demo_network, random_2s, structured_3s3t, two_color_fixture
from sumcast.netgraph import SOURCE, TERMINAL, Edge, Network, Node


def write_net(tmp_path, net, name="net.json"):
    path = tmp_path / name
    path.write_text(net.dumps())
    return str(path)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_check_on_demo(tmp_path, capsys):
    code, out = run(["check", "--input", write_net(tmp_path, demo_network())], capsys)
    assert code == 0
    assert len(out["max_flow"]) == 9
    assert min(out["max_flow"].values()) >= 1
    assert not out["hypotheses"]["three_by_three"]


def test_check_two_source_instance(tmp_path, capsys):
    code, out = run(["check", "--input", write_net(tmp_path, random_2s(3))], capsys)
    assert code == 0 and out["hypotheses"]["two_sources"]


def test_assign_then_verify(tmp_path, capsys):
    net = random_2s(4)
    netp = write_net(tmp_path, net)
    codep = str(tmp_path / "code.json")
    code, out = run(["assign", "--strategy", "auto", "--input", netp, "--output", codep], capsys)
    assert code == 0 and out["verified"]
    assert json.loads((tmp_path / "code.json").read_text())["meta"]["strategy"] == "greedy2s"
    code, out = run(["verify", "--input", netp, "--code", codep], capsys)
    assert code == 0
    assert all(t["decodable"] for t in out["terminals"])


def test_verify_reports_failure(tmp_path, capsys):
    net = Network(
        (Node("s1", SOURCE, 1), Node("s2", SOURCE, 2), Node("t1", TERMINAL, 1)),
        (Edge(0, "s1", "t1"), Edge(1, "s2", "t1")),
    )
    netp = write_net(tmp_path, net)
    codep = tmp_path / "code.json"
    codep.write_text(json.dumps({"field": "prime:2", "edges": [{"id": 0, "local": [{"input": "source", "coef": 1}]}]}))
    code, out = run(["verify", "--input", netp, "--code", str(codep)], capsys)
    assert code == 1
    assert out["terminals"][0]["decodable"] is False


def test_assign_random_branch_is_reproducible(tmp_path, capsys):
    netp = write_net(tmp_path, two_color_fixture())
    outs = []
    for k in range(2):
        p = tmp_path / f"c{k}.json"
        assert main(["assign", "--input", netp, "--seed", "7", "--output", str(p)]) == 0
        outs.append(p.read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["meta"]["seed"] == 7


def test_outputs_byte_identical(tmp_path, capsys):
    netp = write_net(tmp_path, structured_3s3t("case2", 1))
    for cmd in (["transform"], ["decompose"], ["assign"], ["check"]):
        texts = []
        for _ in range(2):
            assert main(cmd + ["--input", netp]) == 0
            texts.append(capsys.readouterr().out)
        assert texts[0] == texts[1]


def test_decompose_reports_dispatch(tmp_path, capsys):
    netp = write_net(tmp_path, structured_3s3t("case3/3-colors/222/one-source-pair", 0))
    code, out = run(["decompose", "--input", netp], capsys)
    assert code == 0
    assert out["dispatch"]["branch"] == "case3/3-colors/222/one-source-pair"


def test_transform_output_is_a_network(tmp_path, capsys):
    netp = write_net(tmp_path, structured_3s3t("case0", 0))
    code, out = run(["transform", "--input", netp], capsys)
    assert code == 0
    assert {"nodes", "edges"} <= set(out["network"])


def test_unsupported_regime_error_json(tmp_path, capsys):
    nodes = [Node(f"s{i}", SOURCE, i) for i in range(1, 5)] + [Node(f"t{j}", TERMINAL, j) for j in range(1, 4)]
    edges = [Edge(k, f"s{i}", f"t{j}") for k, (i, j) in enumerate((i, j) for i in range(1, 5) for j in range(1, 4))]
    netp = write_net(tmp_path, Network(tuple(nodes), tuple(edges)))
    code, out = run(["assign", "--input", netp], capsys)
    assert code == 2
    assert out["error"] == "unsupported"


def test_precondition_error_json(tmp_path, capsys):
    net = Network(
        (Node("s1", SOURCE, 1), Node("s2", SOURCE, 2), Node("t1", TERMINAL, 1), Node("t2", TERMINAL, 2)),
        (Edge(0, "s1", "t1"), Edge(1, "s2", "t1"), Edge(2, "s1", "t2")),
    )
    code, out = run(["assign", "--strategy", "greedy2s", "--input", write_net(tmp_path, net)], capsys)
    assert code == 2
    assert out["error"] == "precondition" and out["pair"] == [2, 2]


def test_bad_inputs(tmp_path, capsys):
    code, out = run(["check", "--input", str(tmp_path / "missing.json")], capsys)
    assert code == 2 and out["error"] == "io"
    bad = tmp_path / "cyc.json"
    bad.write_text(
        json.dumps(
            {
                "nodes": [{"id": "s1", "role": "source", "index": 1}, {"id": "t1", "role": "terminal", "index": 1}],
                "edges": [{"id": 0, "tail": "s1", "head": "t1"}, {"id": 1, "tail": "t1", "head": "s1"}],
            }
        )
    )
    code, out = run(["check", "--input", str(bad)], capsys)
    assert code == 2 and out["error"] == "cycle"
    code, out = run(["check"], capsys)
    assert code == 2
    with pytest.raises(SystemExit):
        main(["assign", "--field", "prime:4"])
    with pytest.raises(SystemExit):
        main(["assign", "--seed", "-1"])
    capsys.readouterr()


def test_demo_counterexample(capsys):
    code, out = run(["demo", "counterexample-3s3t"], capsys)
    assert code == 0
    assert out["all_pairs_connected"] and out["some_pair_below_two"]
    for res in out["functionality"].values():
        assert res["functional"] is False and len(res["collision"]) == 2
    assert out["exhaustive_search"]["feasible"] is False


def test_demo_vector(capsys):
    code, out = run(["demo", "vector-2s2t", "--field", "prime:3"], capsys)
    assert code == 0
    assert out["both_terminals"]["result"] == "infeasible"
    assert out["both_terminals"]["enumerated"] == 3**16
    assert out["single_terminal"]["result"] == "feasible"


def test_selftest(capsys):
    code, out = run(["selftest", "--count", "4"], capsys)
    assert code == 0
    for res in out.values():
        assert res["passed"] == res["total"] > 0


def test_console_entry_point(tmp_path):
    netp = write_net(tmp_path, random_2s(0))
    proc = subprocess.run(
        [sys.executable, "-m", "sumcast.cli", "check", "--input", netp], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["sources"] == 2
