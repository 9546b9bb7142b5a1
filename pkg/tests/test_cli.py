import io
import json
import subprocess
import sys
from importlib import resources

import pytest

from condsplit.cli import main

SENT_908 = "Include the date if the opt-out period expires."
LINE_908 = json.dumps({"id": 908, "text": SENT_908,
                       "labels": [[0, 16, "Action"], [17, 47, "Condition"]]})


def golden_path():
    return str(resources.files("condsplit.data").joinpath("golden.jsonl"))


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


# -- split --

def test_split_opt_out_sentence(tmp_path, capsys):
    code, out, _ = run(capsys, "split", "-i", write(tmp_path, "in.txt", SENT_908 + "\n"))
    assert code == 0
    rec = json.loads(out)
    assert rec["id"] == 1 and rec["text"] == SENT_908 and rec["model"] == "rule-based"
    assert rec["labels"] == [[0, 16, "Action"], [17, 46, "Condition"]]


def test_split_from_stdin_skips_blank_lines(capsys, monkeypatch):
    code, out, _ = run(capsys, "split", stdin="\nChildren stay home.\n", monkeypatch=monkeypatch)
    rec = json.loads(out)
    assert code == 0 and rec["id"] == 2
    assert rec["labels"] == [[0, 19, "No Condition"]]


def test_split_empty_input(tmp_path, capsys):
    code, out, _ = run(capsys, "split", "-i", write(tmp_path, "empty.txt", ""))
    assert (code, out) == (0, "")


def test_split_unreadable_path(tmp_path, capsys, caplog):
    code, out, _ = run(capsys, "split", "-i", str(tmp_path / "missing.txt"))
    assert code == 1 and out == "" and "missing.txt" in caplog.text


def test_split_doccano_input_and_output_file(tmp_path, capsys):
    out_path = tmp_path / "pred.jsonl"
    code, out, _ = run(capsys, "split", "--format", "doccano", "-i", write(tmp_path, "g.jsonl", LINE_908 + "\n"),
                       "-o", str(out_path))
    assert code == 0 and out == ""
    assert json.loads(out_path.read_text())["id"] == 908


def test_split_doccano_strict_and_lenient(tmp_path, capsys, caplog):
    path = write(tmp_path, "g.jsonl", "{broken\n" + LINE_908 + "\n")
    code, _, _ = run(capsys, "split", "--format", "doccano", "-i", path)
    assert code == 2 and "line 1" in caplog.text
    code, out, _ = run(capsys, "split", "--format", "doccano", "--lenient", "-i", path)
    assert code == 0 and len(out.splitlines()) == 1 and "skipping line 1" in caplog.text


def test_split_extended_patterns_and_trace(tmp_path, capsys):
    path = write(tmp_path, "in.txt", "Come now and I'll give you the book.\n")
    _, out, _ = run(capsys, "split", "-i", path)
    assert json.loads(out)["labels"][0][2] == "No Condition"
    _, out, _ = run(capsys, "split", "--extended-patterns", "--trace", "-i", path)
    rec = json.loads(out)
    assert [lab[2] for lab in rec["labels"]] == ["Condition", "Consequence"]
    assert rec["meta"]["trace"][0][1].startswith("scope.ext")


def test_split_config_file(tmp_path, capsys):
    cfg = write(tmp_path, "c.ini", "[splitter]\nothers_label = Action\n")
    path = write(tmp_path, "in.txt", "Unless it rains, children can go out.\n")
    _, out, _ = run(capsys, "split", "--config", cfg, "-i", path)
    rec = json.loads(out)
    assert rec["labels"][1][2] == "Action" and rec["meta"]["low_confidence"] is True
    bad = write(tmp_path, "bad.ini", "[splitter]\ncolour = blue\n")
    assert run(capsys, "split", "--config", bad, "-i", path)[0] == 2


def test_split_lexicon_dir(tmp_path, capsys):
    lex = tmp_path / "lex"
    lex.mkdir()
    (lex / "subordinators.txt").write_text("supposing\n")
    path = write(tmp_path, "in.txt", "Supposing it rains, stay home.\n")
    _, out, _ = run(capsys, "split", "--lexicon-dir", str(lex), "-i", path)
    assert json.loads(out)["labels"][0] == [0, 18, "Condition"]
    assert run(capsys, "split", "--lexicon-dir", str(tmp_path / "nope"), "-i", path)[0] == 1


def test_split_rejects_bad_jobs(tmp_path, capsys):
    assert run(capsys, "split", "--jobs", "0", "-i", write(tmp_path, "in.txt", "x\n"))[0] == 2


# -- convert --

def test_convert_908_to_iob(tmp_path, capsys):
    code, out, _ = run(capsys, "convert", "-i", write(tmp_path, "g.jsonl", LINE_908 + "\n"))
    assert code == 0
    assert out == ("Include\tB-Action\nthe\tI-Action\ndate\tI-Action\nif\tB-Condition\nthe\tI-Condition\n"
                   "opt-out\tI-Condition\nperiod\tI-Condition\nexpires\tI-Condition\n.\tO\n\n")


def test_convert_illegal_tag_names_line(tmp_path, capsys, caplog):
    path = write(tmp_path, "bad.iob", "a\tO\nb\tI-Action\n\n")
    code, _, _ = run(capsys, "convert", "--format", "iob", "-i", path)
    assert code == 2 and "line 2" in caplog.text


def test_convert_iob_doccano_iob_fixed_point_on_golden(tmp_path, capsys):
    _, iob1, _ = run(capsys, "convert", "-i", golden_path())
    _, doc, _ = run(capsys, "convert", "--format", "iob", "-i", write(tmp_path, "a.iob", iob1))
    _, iob2, _ = run(capsys, "convert", "-i", write(tmp_path, "b.jsonl", doc))
    assert iob1.encode() == iob2.encode()


def test_convert_with_comments_keeps_ids(tmp_path, capsys):
    _, iob, _ = run(capsys, "convert", "--iob-comments", "-i", write(tmp_path, "g.jsonl", LINE_908 + "\n"))
    assert iob.startswith("# id = 908\n# text = " + SENT_908 + "\n")
    _, doc, _ = run(capsys, "convert", "--format", "iob", "-i", write(tmp_path, "a.iob", iob))
    assert json.loads(doc)["id"] == 908


# -- evaluate --

def test_evaluate_identity_table(capsys):
    code, out, _ = run(capsys, "evaluate", "--gold", golden_path(), "--pred", golden_path())
    assert code == 0
    rows = [line.split() for line in out.splitlines()[2:] if not line.startswith("-")]
    assert [r[0] for r in rows] == ["Condition", "Action", "Consequence", "Average"]
    assert all(r[-4:-1] == ["100.00"] * 3 for r in rows)


def test_evaluate_two_span_mismatch_json(tmp_path, capsys):
    pred = json.dumps({"id": 908, "text": SENT_908, "labels": [[0, 12, "Action"], [17, 47, "Condition"]]})
    code, out, _ = run(capsys, "evaluate", "--report", "json", "--errors",
                       "--gold", write(tmp_path, "g.jsonl", LINE_908 + "\n"),
                       "--pred", write(tmp_path, "p.jsonl", pred + "\n"))
    assert code == 0
    doc = json.JSONDecoder().raw_decode(out)[0]
    micro = doc["micro_average"]
    assert (micro["precision"], micro["recall"], micro["f1"]) == (50.0, 50.0, 50.0)
    assert "908\tboundary_error\tgold [0,16) AC\tpred [0,12) AC" in out


def test_evaluate_missing_pred_file(tmp_path, capsys):
    code, _, _ = run(capsys, "evaluate", "--gold", golden_path(), "--pred", str(tmp_path / "none.jsonl"))
    assert code == 1


def test_evaluate_misaligned_ids(tmp_path, capsys, caplog):
    other = json.dumps({"id": 7, "text": SENT_908, "labels": [[0, 16, "Action"]]})
    args = ["evaluate", "--gold", write(tmp_path, "g.jsonl", LINE_908 + "\n" + other + "\n"),
            "--pred", write(tmp_path, "p.jsonl", LINE_908 + "\n")]
    assert run(capsys, *args)[0] == 2
    caplog.clear()
    code, _, _ = run(capsys, *args, "--lenient")
    assert code == 0 and "[7]" in caplog.text


def test_evaluate_label_selection(tmp_path, capsys):
    path = write(tmp_path, "g.jsonl", LINE_908 + "\n")
    _, out, _ = run(capsys, "evaluate", "--labels", "CD", "--report", "json", "--gold", path, "--pred", path)
    assert list(json.loads(out)["per_label"]) == ["Condition"]


# -- graph --

def test_split_piped_into_graph():
    text = ("Greet the guest.\n"
            "Refer to the author if you are in any doubt about the currency of this document.\n")
    p = subprocess.run([sys.executable, "-m", "condsplit", "split"], input=text,
                       capture_output=True, text=True, check=True)
    dot = subprocess.run([sys.executable, "-m", "condsplit", "graph"], input=p.stdout,
                         capture_output=True, text=True, check=True).stdout
    assert dot.count("shape=diamond") == 1 and dot.count("style=dashed") == 1
    assert dot.count("shape=box") == 2
    assert p.stderr == ""


def test_graph_json_consequence(tmp_path, capsys):
    path = write(tmp_path, "in.txt", "If the entered password is matched with the one stored in system, "
                                     "the user is authenticated.\n")
    pred = tmp_path / "pred.jsonl"
    run(capsys, "split", "-i", path, "-o", str(pred))
    code, out, _ = run(capsys, "graph", "--format", "json", "-i", str(pred))
    doc = json.loads(out)
    assert code == 0
    assert [n["kind"] for n in doc["nodes"]] == ["condition", "step"]
    assert doc["nodes"][1]["terminal"] is True
    assert doc["edges"] == [{"from": "s0.condition", "to": "s0.resultant", "style": "dashed"}]


def test_graph_empty_input(tmp_path, capsys):
    code, out, _ = run(capsys, "graph", "-i", write(tmp_path, "e.jsonl", ""))
    assert code == 0 and "shape" not in out


# -- stats --

def test_stats_golden(capsys):
    code, out, _ = run(capsys, "stats", "--report", "json", "-i", "golden=" + golden_path())
    assert code == 0
    assert json.loads(out)["golden"] == {"CD": 24, "AC": 10, "CS": 14, "OC": 0, "NC": 4, "UA": 1}


def test_stats_synthetic_splits(tmp_path, capsys):
    train = write(tmp_path, "train.jsonl", LINE_908 + "\n")
    dev = write(tmp_path, "dev.jsonl", "")
    code, out, _ = run(capsys, "stats", "-i", train, "-i", dev)
    lines = out.splitlines()
    assert code == 0
    assert lines[2].split() == ["Train", "|", "1", "|", "0", "|", "1", "|", "0", "|", "0", "|", "0"]
    assert lines[3].split() == ["Dev", "|", "0", "|", "0", "|", "0", "|", "0", "|", "0", "|", "0"]
    assert lines[-1].split()[0] == "Total"


def test_stats_iob_input(tmp_path, capsys):
    _, iob, _ = run(capsys, "convert", "-i", write(tmp_path, "g.jsonl", LINE_908 + "\n"))
    code, out, _ = run(capsys, "stats", "--format", "iob", "--report", "json",
                       "-i", write(tmp_path, "t.iob", iob))
    assert code == 0 and json.loads(out)["t"]["CD"] == 1


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["split", "--format", "xml"])
    assert exc.value.code == 2
