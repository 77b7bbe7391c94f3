import json

import pytest
from click.testing import CliRunner

from cbreduce.cli import EXAMPLES, main, planted_protocol_instance
from cbreduce.protocol import bounds_query, build_query, gmap_of, induced_set_map, oracle_answer
from cbreduce.textio import matrix_document

from conftest import FIXTURES
from oracles import GOLDEN


def run(*args):
    result = CliRunner().invoke(main, list(args))
    return result.exit_code, result.output


def report(*args):
    code, out = run(*args)
    return code, json.loads(out)


def pair_args(name):
    return ["--left", str(FIXTURES / f"{name}_left.json"), "--right", str(FIXTURES / f"{name}_right.json")]


@pytest.mark.parametrize("example", EXAMPLES)
def test_demo_matches_golden(example):
    code, doc = report("demo", "--example", example)
    assert code == 0
    assert doc == json.loads((GOLDEN / f"demo_{example.replace('.', '_')}.json").read_text())


def test_demo_1_2_content():
    _, doc = report("demo", "--example", "1.2")
    assert doc["cited_curvature"]["value"] == [-2]
    assert doc["degrees"] == [0, 1]
    assert doc["reduction"]["verdict"] == "NotReduced"


def test_demo_5_3_content():
    _, doc = report("demo", "--example", "5.3")
    assert doc["Q"] == "e1 - e3"
    assert doc["D"] == "e1^2 - 6*e1*e3 + e3^2"
    assert doc["resonance_d1_2_d2_1"] is True


def test_expand_identity_pair(tmp_path):
    ident = tmp_path / "id.json"
    ident.write_text(json.dumps({"rows": 3, "cols": 3, "entries": ["1", "0", "0", "0", "1", "0", "0", "0", "1"]}))
    code, doc = report("expand", "-l", str(ident), "-r", str(ident))
    assert code == 0
    assert doc["terms"] == [{"subset": [1, 2, 3], "h": "1", "exponent": []}]
    assert doc["determinant"] == "1"


def test_check_reduction_exit_codes():
    code, doc = report("check-reduction", *pair_args("ex1_2"))
    assert code == 2 and doc["verdict"] == "NotReduced"
    assert doc["witness"]["kind"] == "curvature"


def test_check_reduction_reduced_and_hypothesis(tmp_path):
    left = tmp_path / "l.json"
    right = tmp_path / "r.json"
    left.write_text(json.dumps({"rows": 1, "cols": 4, "d": 1, "vars": ["t"], "entries": ["1", "t", "0", "t^3"]}))
    right.write_text(json.dumps({"rows": 4, "cols": 1, "d": 1, "vars": ["t"], "entries": ["1", "2", "3", "4"]}))
    code, doc = report("check-reduction", "-l", str(left), "-r", str(right))
    assert code == 0 and doc["verdict"] == "Reduced" and doc["gauge"]["free"] == [3]
    left.write_text(json.dumps({"rows": 2, "cols": 4, "d": 1, "vars": ["t"], "entries": ["1", "0", "t", "0", "0", "t^2", "0", "t^-1"]}))
    right.write_text(json.dumps({"rows": 4, "cols": 2, "entries": ["1", "2", "3", "1", "2", "5", "1", "4"]}))
    code, doc = report("check-reduction", "-l", str(left), "-r", str(right))
    assert code == 3 and doc["verdict"] == "HypothesisFailed"


def test_curvature_at_and_scan():
    code, doc = report("curvature", *pair_args("ex1_2"), "--at", "3,4,5,6|1,2,7,8")
    assert code == 0 and doc["evaluation"]["value"] == [-2]
    code, doc = report("curvature", *pair_args("ex5_9"), "--scan", "--limit", "2")
    assert doc["nonzero_witnesses"] > 0 and len(doc["witnesses"]) == 2
    code, _ = run("curvature", *pair_args("ex1_2"), "--at", "3,4|1,2")
    assert code == 4


def test_classify_y_on_example_5_9():
    code, doc = report("classify-y", *pair_args("ex5_9"))
    assert code == 0
    assert doc["radical_discriminants"] == ["r^2 + 1"]
    assert doc["counts"]["Radical"] == len(doc["contexts"]) > 0
    code, every = report("classify-y", *pair_args("ex5_9"), "--all")
    assert len(every["contexts"]) == every["counts"]["observable"]


@pytest.mark.parametrize(
    "content,needle",
    [
        ('{"rows": 2,', "line 1"),
        ('{"rows": 2, "cols": 2, "entries": ["1"]}', "expected 4 entries"),
        ('{"rows": 1, "cols": 2, "entries": ["1", "x +"]}', "entry 1"),
        ('{"cols": 2, "entries": []}', "missing field"),
    ],
)
def test_input_errors_exit_4(tmp_path, content, needle):
    bad = tmp_path / "bad.json"
    bad.write_text(content)
    result = CliRunner().invoke(main, ["expand", "-l", str(bad), "-r", str(bad)])
    assert result.exit_code == 4
    assert str(bad) in result.output and needle in result.output


def test_simulate_protocol_random_is_deterministic():
    first = run("simulate-protocol", "--random", "2,7", "--seed", "4")
    second = run("simulate-protocol", "--random", "2,7", "--seed", "4")
    assert first == second and first[0] == 0
    doc = json.loads(first[1])
    assert doc["induced"] and doc["psi"] == doc["planted"]["psi"]


def test_simulate_protocol_with_files(tmp_path):
    a, q, psi = planted_protocol_instance(2, 6, 9)
    (tmp_path / "a.json").write_text(json.dumps(matrix_document(a)))
    (tmp_path / "q.json").write_text(json.dumps(matrix_document(q)))
    (tmp_path / "psi.json").write_text(json.dumps({"psi": [psi[x] for x in range(1, 7)]}))
    args = ["-l", str(tmp_path / "a.json"), "-r", str(tmp_path / "q.json"), "-p", str(tmp_path / "psi.json")]
    code, doc = report("simulate-protocol", *args)
    assert code == 0 and doc["psi"] == {str(x): y for x, y in psi.items()}
    code, doc = report("simulate-protocol", *args, "--shortcut")
    assert code == 0 and doc["mode"] == "shortcut"

    reference = gmap_of(a, q)
    sm = induced_set_map(psi, reference)
    first = oracle_answer(a, q, sm, (1,) * 6)
    b = bounds_query(first.values)
    answer = oracle_answer(a, q, sm, build_query(b, 6, 2, len(reference)))
    (tmp_path / "ans.json").write_text(json.dumps({
        "t0": [str(x) for x in answer.t0],
        "values": [str(x) for x in answer.values],
        "values_at_one": [str(x) for x in first.values],
    }))
    code, doc = report("simulate-protocol", "-l", str(tmp_path / "a.json"), "-r", str(tmp_path / "q.json"),
                       "--answer-file", str(tmp_path / "ans.json"))
    assert code == 0 and doc["psi"] == {str(x): y for x, y in psi.items()}

    swapped = sorted(reference)
    sm_bad = dict(zip(swapped, swapped[1:] + swapped[:1]))
    (tmp_path / "bad.json").write_text(json.dumps({"set_map": [[list(x), list(y)] for x, y in sm_bad.items()]}))
    code, doc = report("simulate-protocol", "-l", str(tmp_path / "a.json"), "-r", str(tmp_path / "q.json"),
                       "-p", str(tmp_path / "bad.json"))
    assert code == 2 and not doc["induced"]


def test_timings_only_on_request(tmp_path):
    _, doc = report("demo", "-e", "5.3")
    assert "timings" not in doc
    out = tmp_path / "r.json"
    code, _ = run("demo", "-e", "5.3", "--timings", "-o", str(out))
    assert code == 0 and "timings" in json.loads(out.read_text())
