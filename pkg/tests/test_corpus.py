import io
import json
import random
import re
from importlib import resources

import pytest

from condsplit.corpus import (
    CorpusError,
    IobSequence,
    SpanAlignmentError,
    corpus_stats,
    doccano_line,
    format_iob,
    from_iob,
    load_golden,
    read_doccano,
    read_iob,
    to_iob,
    write_doccano,
    write_iob,
)
from condsplit.linguistics import tokenize
from condsplit.model import AnnotatedSentence, ClauseSpan, Label

from fuzz import random_aligned_sentence

LINE_908 = ('{"id": 908, "text": "Include the date if the opt-out period expires.", "meta": {}, '
            '"annotation_approver": "admin", "labels": [[0, 16, "Action"], [17, 47, "Condition"]]}')
TAGS_908 = [("Include", "B-Action"), ("the", "I-Action"), ("date", "I-Action"),
            ("if", "B-Condition"), ("the", "I-Condition"), ("opt-out", "I-Condition"),
            ("period", "I-Condition"), ("expires", "I-Condition"), (".", "O")]
CD, AC, CS = Label.CONDITION, Label.ACTION, Label.CONSEQUENCE


def s908():
    (s,) = read_doccano([LINE_908])
    return s


def test_read_doccano_record_908():
    s = s908()
    assert s.id == 908
    assert s.spans == (ClauseSpan(0, 16, AC), ClauseSpan(17, 47, CD))
    assert s.sentence_label is None


@pytest.mark.parametrize("name,label", [
    ("Condition", CD), ("Action", AC), ("Consequence", CS),
    ("Unconditional-Action", Label.UNCONDITIONAL_ACTION),
])
def test_clause_label_names(name, label):
    line = json.dumps({"id": 1, "text": "abc def", "labels": [[0, 3, name]]})
    assert read_doccano([line])[0].spans[0].label is label


@pytest.mark.parametrize("name,label", [("Only-Condition", Label.ONLY_CONDITION),
                                        ("No Condition", Label.NO_CONDITION)])
def test_sentence_label_names(name, label):
    line = json.dumps({"id": 1, "text": "abc def", "labels": [[0, 7, name]]})
    s = read_doccano([line])[0]
    assert s.sentence_label is label and s.spans == ()


def test_read_sorts_spans():
    line = json.dumps({"id": 2, "text": "abc def", "labels": [[4, 7, "Action"], [0, 3, "Condition"]]})
    assert [sp.start for sp in read_doccano([line])[0].spans] == [0, 4]


def test_underspecified_record_strict_and_lenient():
    line = json.dumps({"id": 3, "text": "abc", "labels": []})
    with pytest.raises(CorpusError) as err:
        read_doccano([line])
    assert err.value.line == 1
    skipped = []
    assert read_doccano([LINE_908, line], strict=False, skipped=skipped) == [s908()]
    assert [n for n, _ in skipped] == [2]


def test_malformed_json_names_line():
    with pytest.raises(CorpusError, match="line 2"):
        read_doccano([LINE_908, "{not json"])


@pytest.mark.parametrize("record", [
    {"id": "x", "text": "abc", "labels": [[0, 1, "Condition"]]},
    {"id": 1, "text": "abc", "labels": [[0, 1]]},
    {"id": 1, "text": "abc", "labels": [[0, 1, "Bogus"]]},
    {"id": 1, "text": "abc", "labels": [[0, 9, "Condition"]]},
    {"id": 1, "text": "abc", "labels": [[0, 2, "Condition"], [1, 3, "Action"]]},
    {"id": 1, "text": "abc", "labels": [[0, 3, "No Condition"], [0, 3, "Only-Condition"]]},
    [1, 2],
])
def test_invalid_records(record):
    with pytest.raises(CorpusError):
        read_doccano([json.dumps(record)])


def test_to_iob_908():
    assert to_iob(s908()).pairs() == TAGS_908


def test_to_iob_908_file_bytes():
    buf = io.StringIO()
    write_iob([s908()], buf)
    expected = "".join(f"{tok}\t{tag}\n" for tok, tag in TAGS_908) + "\n"
    assert buf.getvalue().encode("utf-8") == expected.encode("utf-8")


def test_to_iob_no_spans():
    s = AnnotatedSentence(1, "Children stay home.", (), Label.NO_CONDITION)
    assert set(to_iob(s).tags) == {"O"}


def test_to_iob_adjacent_spans_restart():
    text = "if a if b then c"
    s = AnnotatedSentence(1, text, (ClauseSpan(0, 4, CD), ClauseSpan(5, 9, CD), ClauseSpan(10, 16, AC)))
    tags = to_iob(s).tags
    assert tags == ("B-Condition", "I-Condition", "B-Condition", "I-Condition", "B-Action", "I-Action")
    IobSequence(to_iob(s).tokens, tags)  # legal


def test_to_iob_straddling_span():
    s = AnnotatedSentence(1, "Include the date", (ClauseSpan(0, 14, AC),))
    with pytest.raises(SpanAlignmentError):
        to_iob(s)


def test_from_iob_908_sequence():
    text = "Include the date if the opt-out period expires."
    seq = IobSequence(tokenize(text), [tag for _, tag in TAGS_908])
    s = from_iob(seq, text, 908)
    assert s.spans == (ClauseSpan(0, 16, AC), ClauseSpan(17, 46, CD))
    assert text[17:46] == "if the opt-out period expires"


def test_from_iob_all_o():
    text = "Children stay home."
    s = from_iob(IobSequence(tokenize(text), ["O"] * 4), text)
    assert s.spans == () and s.sentence_label is Label.NO_CONDITION


def test_illegal_transition_rejected():
    toks = tokenize("a b")
    with pytest.raises(CorpusError):
        IobSequence(toks, ["B-Action", "I-Condition"])
    with pytest.raises(CorpusError):
        IobSequence(toks, ["O", "I-Action"])
    with pytest.raises(CorpusError):
        IobSequence(toks, ["B-Other", "O"])


def test_read_iob_reports_line_of_illegal_tag():
    data = "a\tB-Action\nb\tI-Action\n\nc\tO\nd\tI-Condition\n\n"
    with pytest.raises(CorpusError) as err:
        read_iob(data.splitlines(True))
    assert err.value.line == 5


def test_read_iob_with_comments_keeps_text_and_id():
    s = s908()
    buf = io.StringIO()
    write_iob([s], buf, comments=True)
    (rec,) = read_iob(buf.getvalue().splitlines(True))
    assert rec.id == 908 and rec.text == s.text
    back = from_iob(rec.seq, rec.text, rec.id)
    assert back.spans == (ClauseSpan(0, 16, AC), ClauseSpan(17, 46, CD))


def test_read_iob_without_text_rebuilds_it():
    (rec,) = read_iob(format_iob(to_iob(s908())).splitlines(True))
    assert rec.text == "Include the date if the opt-out period expires."


def _aligned_corpus(n, seed):
    rng = random.Random(seed)
    return [random_aligned_sentence(rng, i) for i in range(n)]


def test_round_trip_a_on_fuzz():
    for s in _aligned_corpus(1000, 1):
        back = from_iob(to_iob(s), s.text, s.id)
        assert back.spans == s.spans


def test_round_trip_b_on_fuzz():
    corpus = _aligned_corpus(1000, 2)
    buf = io.StringIO()
    write_doccano(corpus, buf)
    assert read_doccano(buf.getvalue().splitlines()) == corpus


def test_to_iob_output_is_always_legal():
    for s in _aligned_corpus(500, 4):
        seq = to_iob(s)
        IobSequence(seq.tokens, seq.tags)


def test_doccano_line_keeps_meta_and_model():
    s = AnnotatedSentence(1, "ab", (ClauseSpan(0, 2, CD),), None, {"k": 1})
    obj = json.loads(doccano_line(s, model="m"))
    assert obj == {"id": 1, "text": "ab", "labels": [[0, 2, "Condition"]], "meta": {"k": 1}, "model": "m"}


def test_non_ascii_offsets_are_code_points():
    text = "Если café, pay now"
    line = json.dumps({"id": 1, "text": text, "labels": [[5, 9, "Condition"], [11, 18, "Action"]]},
                      ensure_ascii=False)
    (s,) = read_doccano([line])
    assert s.spans[0].text_of(text) == "café"
    assert doccano_line(s) == json.dumps(json.loads(line), ensure_ascii=False)


# -- statistics --

def test_stats_synthetic():
    sents = [
        AnnotatedSentence(1, "a b c", (ClauseSpan(0, 1, CD), ClauseSpan(2, 3, CD), ClauseSpan(4, 5, AC))),
        AnnotatedSentence(2, "x", (), Label.NO_CONDITION),
    ]
    stats = corpus_stats({"train": sents})
    c = stats.counts["train"]
    assert (c[CD], c[AC], c[Label.NO_CONDITION]) == (2, 1, 1)
    assert c[CS] == c[Label.ONLY_CONDITION] == c[Label.UNCONDITIONAL_ACTION] == 0


def test_stats_empty():
    stats = corpus_stats({})
    assert all(v == 0 for v in stats.total.values())
    assert corpus_stats({"dev": []}).counts["dev"][CD] == 0


def test_stats_totals_sum_splits():
    corpus = _aligned_corpus(60, 8)
    stats = corpus_stats({"train": corpus[:40], "test": corpus[40:50], "dev": corpus[50:]})
    for label in Label:
        assert stats.total[label] == sum(c[label] for c in stats.counts.values())


def test_stats_render_layout():
    stats = corpus_stats({"train": [AnnotatedSentence(1, "x", (ClauseSpan(0, 1, CD),))]})
    lines = stats.render().splitlines()
    assert lines[0].split() == ["Data", "|", "CD", "|", "CS", "|", "AC", "|", "OC", "|", "NC", "|", "UA"]
    assert lines[2].split()[0] == "Train" and lines[-1].split()[0] == "Total"


def _golden_counts_from_raw():
    """Count labels straight from the shipped file's text, bypassing the reader."""
    raw = resources.files("condsplit.data").joinpath("golden.jsonl").read_text()
    counts = {}
    for name in re.findall(r'\[\d+, \d+, "([^"]+)"\]', raw):
        counts[name] = counts.get(name, 0) + 1
    return counts


GOLDEN_COUNTS = {"CD": 24, "AC": 10, "CS": 14, "OC": 0, "NC": 4, "UA": 1}


def test_golden_counts_frozen():
    raw = _golden_counts_from_raw()
    names = {"CD": "Condition", "AC": "Action", "CS": "Consequence", "OC": "Only-Condition",
             "NC": "No Condition", "UA": "Unconditional-Action"}
    assert {code: raw.get(name, 0) for code, name in names.items()} == GOLDEN_COUNTS
    total = corpus_stats({"golden": load_golden()}).total
    assert {label.value: total[label] for label in Label} == GOLDEN_COUNTS


def test_golden_corpus_is_token_aligned():
    for s in load_golden():
        to_iob(s)
