import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from artifact.calculi import LKSTAR, apply_weakening, axiom, check_derivation
from artifact.correctness import annotate, check_annotated
from artifact.expansion_nets import alpha_equal, same_forest
from artifact.formula_core import Atom
from artifact.io_cli import (FAULT, FALSE, INPUT_ERROR, OK, InputError, annotated_from_json, annotated_to_json,
                             derivation_from_json, derivation_to_json, dump, export_dot, load, main, net_with_ids,
                             parse_order)
from artifact.syntax import parse_net

from nets import AXIOM, BADEMPIRES, PIERCE, RUNNING, YANK, sample_derivation

GOLDEN = Path(__file__).parent / "golden"
CYCLIC = r"{({x} >< {y})} : (p /\ q), {({~x} >< {~y})} : (~p /\ ~q)"


def run(tmp_path, *argv, text=None):
    args = list(argv)
    if text is not None:
        src = tmp_path / "in.txt"
        src.write_text(text)
        args.append(str(src))
    out = io.StringIO()
    code = main(args, out)
    return code, out.getvalue()


def test_entry_point_runs_as_subprocess(tmp_path):
    src = tmp_path / "pierce.net"
    src.write_text(PIERCE)
    cmd = [sys.executable, "-m", "artifact.io_cli", "check", "--oracle", str(src)]
    res = subprocess.run(cmd, capture_output=True, text=True)
    assert res.returncode == OK
    assert json.loads(res.stdout) == {"ac_correct": True, "oracle": True, "agree": True}


def test_stdin_input():
    cmd = [sys.executable, "-m", "artifact.io_cli", "parse"]
    res = subprocess.run(cmd, input=AXIOM, capture_output=True, text=True)
    assert res.returncode == OK and res.stdout.strip() == AXIOM


def test_check_exit_codes(tmp_path):
    assert run(tmp_path, "check", text=PIERCE)[0] == OK
    code, out = run(tmp_path, "check", "--oracle", text=CYCLIC)
    assert code == FALSE
    report = json.loads(out)
    assert report["agree"] and report["cycle"]


def test_input_errors(tmp_path):
    assert run(tmp_path, "check", text="{}")[0] == INPUT_ERROR
    assert run(tmp_path, "check", text="{x + x} : p, {~x} : ~p")[0] == INPUT_ERROR
    assert run(tmp_path, "frobnicate")[0] == INPUT_ERROR
    assert run(tmp_path, "check", "--bogus", text=PIERCE)[0] == INPUT_ERROR
    assert run(tmp_path, "check", str(tmp_path / "missing.net"))[0] == INPUT_ERROR
    assert run(tmp_path, "subnet", "--node", "0.x", text=PIERCE)[0] == INPUT_ERROR
    assert run(tmp_path, "subnet", "--node", "0.9", text=PIERCE)[0] == INPUT_ERROR
    assert run(tmp_path, "deseq", text="{}")[0] == INPUT_ERROR


def test_oracle_refusal_is_an_input_error(tmp_path):
    big = ", ".join(f"({{x{i}}} \\/ {{y{i}}}) : (p \\/ q), {{~x{i}}} : ~p, {{~y{i}}} : ~q" for i in range(17))
    assert run(tmp_path, "check", "--oracle", text=big)[0] == INPUT_ERROR


def test_internal_fault(tmp_path, monkeypatch):
    import artifact.io_cli as cli

    def boom(*a, **k):
        raise RuntimeError("broken")

    monkeypatch.setattr(cli, "ac_correct_poly", boom)
    assert run(tmp_path, "check", text=PIERCE)[0] == FAULT


def test_seq_deseq_round_trip(tmp_path):
    code, out = run(tmp_path, "seq", text=PIERCE)
    assert code == OK
    assert json.loads(out)["kind"] == "annotated"
    code, back = run(tmp_path, "deseq", text=out)
    assert code == OK
    assert alpha_equal(parse_net(back), parse_net(PIERCE))


def test_seq_rejects_incorrect_net(tmp_path):
    assert run(tmp_path, "seq", text=CYCLIC)[0] == FALSE


def test_translate(tmp_path):
    a, b = Atom("a"), Atom("b")
    d = apply_weakening(axiom(a, (0, 1)), b, 2)
    code, out = run(tmp_path, "translate", text=dump("derivation", derivation_to_json(d)))
    assert code == OK
    body = json.loads(out)
    assert body["weak"] == ["b"]
    tr = derivation_from_json(body["derivation"])
    assert check_derivation(tr, LKSTAR)


def test_cutelim(tmp_path):
    code, out = run(tmp_path, "cutelim", text=YANK)
    assert code == OK
    assert out.strip() == "{y + z} : p, {({~y} >< {~z})} : (~p /\\ ~p)"


def test_cutelim_trace(tmp_path):
    code, out = run(tmp_path, "cutelim", "--trace", text=RUNNING)
    assert code == OK
    trace = json.loads(out)
    assert [s["kind"] for s in trace][:3] == ["LogicalAndOr", "LogicalAtomic", "Contraction"]
    assert trace[0]["target"] == "2"


def test_cutelim_on_incorrect_net(tmp_path):
    assert run(tmp_path, "cutelim", text=CYCLIC)[0] == FALSE


def test_subnet_ce(tmp_path):
    code, out = run(tmp_path, "subnet", "--node", "1.0.0", "--kind", "ce", text=BADEMPIRES)
    assert code == OK
    body = json.loads(out)
    assert body["nodes"] == sorted(["0", "0.0", "1.0.0", "1.0.0.0"])


def test_subnet_dot(tmp_path):
    code, out = run(tmp_path, "subnet", "--node", "0", "--dot", text=AXIOM)
    assert code == OK and out.count("fillcolor") == 3


def test_subnet_star_is_an_input_error(tmp_path):
    assert run(tmp_path, "subnet", "--node", "0.0.0.1", text=PIERCE)[0] == INPUT_ERROR


def test_nnet(tmp_path):
    code, out = run(tmp_path, "nnet", text=AXIOM)
    assert code == OK
    assert json.loads(out) == [{"positive": [0, []], "negative": [1, []]}]
    assert run(tmp_path, "nnet", text=YANK)[0] == INPUT_ERROR


def test_render_pierce_golden(tmp_path):
    code, out = run(tmp_path, "render", text=PIERCE)
    assert code == OK
    assert out == (GOLDEN / "pierce.dot").read_text()


def test_dot_of_axiom_net():
    dot = export_dot(parse_net(AXIOM))
    assert dot.count(" [label=") == 4
    assert dot.count("->") == 3 and dot.count("dashed") == 1


def test_annotated_json_round_trip():
    d = annotate(sample_derivation())
    back = annotated_from_json(load(dump("annotated", annotated_to_json(d)), "annotated"))
    assert check_annotated(back)
    assert same_forest(back.conclusion, d.conclusion)
    assert back.rules_used() == d.rules_used()


def test_derivation_json_round_trip():
    d = sample_derivation()
    assert derivation_from_json(json.loads(json.dumps(derivation_to_json(d)))) == d


def test_load_rejects_wrong_kind():
    with pytest.raises(InputError):
        load(dump("annotated", {}), "derivation")
    with pytest.raises(InputError):
        load('{"kind": "annotated"}', "annotated")


def test_net_with_ids_keeps_node_ids():
    f = parse_net(RUNNING, start_nid=40)
    g = net_with_ids(str(f), parse_order(f))
    assert same_forest(f, g)
