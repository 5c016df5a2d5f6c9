import json

import numpy as np
import pytest

from dmgwalk.cli import main
from dmgwalk.documents import (
    DocumentError, GraphDocument, SystemDocument, lambda_key, to_dot,
)
from dmgwalk.graph import new_graph
from dmgwalk.linear import random_weights
from dmgwalk.testbench import FIG1, FIG1B, FIG3


@pytest.fixture
def fig1_file(tmp_path):
    p = tmp_path / "fig1.json"
    p.write_text(json.dumps(FIG1.to_dict()))
    return str(p)


@pytest.fixture
def fig1b_system(tmp_path):
    p = tmp_path / "fig1b.json"
    p.write_text(json.dumps(SystemDocument.from_system(random_weights(FIG1B, 11)).to_dict()))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def as_json(text):
    return json.loads(text)


def test_info(capsys, fig1_file):
    code, out, _ = run(capsys, "info", fig1_file)
    data = as_json(out)
    assert code == 0 and data["flags"]["canonical"]
    assert data["districts"] == [["V1", "V4", "V5"], ["V2"], ["V3"]]


def test_info_empty_graph(capsys, tmp_path):
    p = tmp_path / "e.json"
    p.write_text('{"vertices": []}')
    code, out, _ = run(capsys, "info", str(p))
    assert code == 0 and as_json(out)["vertices"] == 0 and as_json(out)["directed_edges"] == 0


def test_malformed_json(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"vertices": [\n  "A",\n}')
    code, _, err = run(capsys, "info", str(p))
    assert code == 2 and "line 3" in err


def test_bad_label(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"vertices": ["A-B"]}')
    assert run(capsys, "info", str(p))[0] == 2


def test_separate_exit_codes(capsys, fig1_file):
    code, out, _ = run(capsys, "separate", fig1_file, "--j", "V2", "--k", "V4",
                       "--given", "V1,V3")
    assert code == 0 and as_json(out)["separated"]
    code, out, _ = run(capsys, "separate", fig1_file, "--j", "V4", "--k", "V5",
                       "--given", "V2,V3")
    assert code == 1
    assert as_json(out)["witness"] == "V4 <-> V1 -> V3 <- V1 <-> V5"
    assert run(capsys, "separate", fig1_file, "--j", "V2", "--k", "V4", "--given", "V2")[0] == 2
    assert run(capsys, "separate", fig1_file, "--j", "V9", "--k", "V4")[0] == 2


def test_marginalize_fig3(capsys, fig1_file):
    for panel in ("b", "d"):
        keep, directed, bidirected = FIG3[panel]
        code, out, _ = run(capsys, "marginalize", fig1_file, "--keep", ",".join(keep), "--trim")
        doc = as_json(out)
        assert code == 0
        assert {tuple(p) for p in doc["directed"]} == directed
        assert {tuple(p) for p in doc["bidirected"]} == bidirected


def test_marginalize_keep_all_and_admg(capsys, fig1_file):
    code, out, _ = run(capsys, "marginalize", fig1_file, "--keep", "V1,V2,V3,V4,V5")
    assert as_json(out) == FIG1.to_dict()
    code, out, _ = run(capsys, "marginalize", fig1_file, "--keep", "V2,V4,V5", "--trim", "--admg")
    assert code == 0 and {tuple(p) for p in as_json(out)["bidirected"]} == {("V4", "V5")}
    assert run(capsys, "marginalize", fig1_file, "--keep", "V2,V4", "--admg")[0] == 2


def test_walks(capsys, fig1_file):
    code, out, _ = run(capsys, "walks", fig1_file, "--kind", "trek", "--from", "V1", "--to", "V4")
    data = as_json(out)
    assert data["walks"] == ["V1 <-> V4", "V1 <-> V1 -> V3 -> V4"] and data["exact"]
    code, out, _ = run(capsys, "walks", fig1_file, "--kind", "directed", "--from", "V5",
                       "--to", "V1")
    assert as_json(out)["walks"] == []


def test_walks_truncation_warning(capsys, tmp_path):
    p = tmp_path / "cyc.json"
    p.write_text(json.dumps({"vertices": ["A", "B"], "directed": [["A", "B"], ["B", "A"]],
                             "bidirected": [["A", "A"]]}))
    code, out, err = run(capsys, "walks", str(p), "--kind", "mconn", "--max-len", "2")
    assert code == 0 and as_json(out)["exact"] is False and "warning" in err


def test_walks_unknown_kind(capsys, fig1_file):
    with pytest.raises(SystemExit) as e:
        main(["walks", fig1_file, "--kind", "zig"])
    assert e.value.code == 2


def test_covariance_methods_agree(capsys, fig1b_system):
    mats = []
    for method in ("closed", "trek", "path"):
        code, out, _ = run(capsys, "covariance", fig1b_system, "--method", method)
        assert code == 0
        mats.append(np.array(as_json(out)["matrix"]))
    assert np.allclose(mats[0], mats[1], atol=1e-9) and np.allclose(mats[0], mats[2], atol=1e-9)


def test_covariance_symbolic(capsys, fig1b_system):
    code, out, _ = run(capsys, "covariance", fig1b_system, "--method", "trek", "--symbolic")
    terms = as_json(out)["terms"]
    assert "V1 <-> V4" in terms["V1,V4"]


def test_covariance_path_on_cyclic(capsys, tmp_path):
    doc = {"vertices": ["A", "B"], "directed": [["A", "B"], ["B", "A"]],
           "bidirected": [["A", "A"], ["B", "B"]],
           "beta": {"A->B": 0.2, "B->A": 0.3}, "lambda": {"A<->A": 1, "B<->B": 1}}
    p = tmp_path / "cyc.json"
    p.write_text(json.dumps(doc))
    assert run(capsys, "covariance", str(p), "--method", "path")[0] == 2
    assert run(capsys, "covariance", str(p), "--method", "closed")[0] == 0


def test_covariance_needs_weights(capsys, fig1_file):
    assert run(capsys, "covariance", fig1_file)[0] == 2


def test_adjust(capsys, fig1b_system, tmp_path):
    code, out, _ = run(capsys, "adjust", fig1b_system, "--cause", "V1", "--effect", "V4")
    data = as_json(out)
    assert code == 0 and data["thm5"][0] is False and "gamma" in data
    doc = {"vertices": ["A", "B"], "directed": [["A", "B"]],
           "bidirected": [["A", "A"], ["B", "B"]], "beta": {"A->B": 0.7},
           "lambda": {"A<->A": 1.0, "B<->B": 2.0}}
    p = tmp_path / "toy.json"
    p.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "adjust", str(p), "--cause", "A", "--effect", "B")
    data = as_json(out)
    assert all(data["prop10"]) and all(data["thm5"]) and data["symmetric"]
    assert data["gamma"] == pytest.approx(0.7)


def test_adjust_graph_only(capsys, fig1_file):
    code, out, _ = run(capsys, "adjust", fig1_file, "--cause", "V2", "--effect", "V4")
    assert code == 0 and "gamma" not in as_json(out)


def test_augment(capsys, tmp_path):
    p = tmp_path / "col.json"
    p.write_text(json.dumps({"vertices": ["A", "B", "C"], "directed": [["A", "C"], ["B", "C"]]}))
    code, out, err = run(capsys, "augment", str(p))
    assert code == 0 and "warning" in err
    assert sorted(map(tuple, as_json(out)["edges"])) == [("A", "B"), ("A", "C"), ("B", "C")]


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--trials", "0")
    assert code == 0
    code, out, _ = run(capsys, "verify", "--trials", "3", "--d-max", "4", "--json",
                       "--only", "oracle_m,trek_rule")
    assert code == 0 and [d["property"] for d in as_json(out)] == ["oracle_m", "trek_rule"]


def test_verify_injected_failure(capsys):
    code, out, _ = run(capsys, "verify", "--trials", "20", "--d-max", "5", "--seed", "1",
                       "--only", "separation_chain", "--inject-collider-bug")
    assert code == 1 and "counterexample" in out


def test_verify_unknown_property(capsys):
    assert run(capsys, "verify", "--only", "nope")[0] == 2


def test_graph_document_roundtrip():
    doc = GraphDocument.from_graph(FIG1)
    assert doc.to_graph() == FIG1
    assert GraphDocument.from_dict(doc.to_dict()).to_dict() == doc.to_dict()


def test_system_document_canonical_keys():
    data = {"vertices": ["B", "A"], "directed": [["B", "A"]],
            "bidirected": [["B", "A"], ["A", "A"]],
            "beta": {"B->A": 0.5}, "lambda": {"B<->A": 0.1, "A <-> A": 1.0}}
    doc = SystemDocument.from_dict(data)
    assert set(doc.lam) == {"A<->B", "A<->A"}
    again = SystemDocument.from_dict(doc.to_dict())
    assert again.to_dict() == doc.to_dict()
    s = doc.to_system()
    assert s.lambda_matrix[0, 1] == 0.1
    assert lambda_key("Z", "A") == "A<->Z"


@pytest.mark.parametrize("bad", [
    {"vertices": ["A"], "beta": {"A=>B": 1}},
    {"vertices": ["A", "B"], "beta": {"A->B": 1}},
    {"vertices": ["A", "B"], "bidirected": [["A", "B"]], "lambda": {"A<->B": "x"}},
    {"vertices": ["A", "B"], "bidirected": [["A", "B"]], "lambda": {"A<->B": 1, "B<->A": 2}},
    {"directed": []},
])
def test_system_document_errors(bad):
    with pytest.raises(DocumentError):
        SystemDocument.from_dict(bad).to_system()


def test_dot_export():
    dot = to_dot(new_graph(["A", "B"], [("A", "B")], [("A", "A"), ("A", "B")]))
    assert '"A" -> "B";' in dot
    assert '"A" -> "A" [dir=both, style=dashed];' in dot
