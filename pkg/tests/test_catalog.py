import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sixr import catalog as C
from sixr.kinematics import InvalidInput

# reference lists, transcribed item by item
H2_REF = "(0,0), 2(0,0), (0,0)+2(1,0), 2(1,0), 4(1,0), 2(0,1), 2(1,1), 2(2,1)"
H3_REF = (
    "(11,14,0,0) + (1,0,0,0), (10,14,0,0) + 2(1,0,0,0), (9,14,0,0) + 3(1,0,0,0), "
    "(8,14,0,0) + 4(1,0,0,0), (7,14,0,0) + 5(1,0,0,0), (6,14,0,0) + 6(1,0,0,0), "
    "(5,14,0,0) + 7(1,0,0,0), (4,14,0,0) + 8(1,0,0,0), (3,14,0,0) + 9(1,0,0,0), "
    "(2,14,0,0) + 10(1,0,0,0), (1,14,0,0) + 11(1,0,0,0), (12,13,0,0) + (0,1,0,0), "
    "(12,12,0,0) + 2(0,1,0,0), (12,11,0,0) + 3(0,1,0,0), (12,10,0,0) + 4(0,1,0,0), "
    "(12,9,0,0) + 5(0,1,0,0), (12,8,0,0) + 6(0,1,0,0), (12,7,0,0) + 7(0,1,0,0), "
    "(12,6,0,0) + 8(0,1,0,0), (12,5,0,0) + 9(0,1,0,0), (12,4,0,0) + 10(0,1,0,0), "
    "(12,3,0,0) + 11(0,1,0,0), (12,2,0,0) + 12(0,1,0,0), (12,1,0,0) + 13(0,1,0,0)"
)
H4_REF = (
    "(0,0,7,10) + (0,0,1,0), (0,0,6,10) + 2(0,0,1,0), (0,0,5,10) + 3(0,0,1,0), "
    "(0,0,4,10) + 4(0,0,1,0), (0,0,3,10) + 5(0,0,1,0), (0,0,2,10) + 6(0,0,1,0), "
    "(0,0,1,10) + 7(0,0,1,0), (0,0,8,9) + (0,0,0,1), (0,0,8,8) + 2(0,0,0,1), "
    "(0,0,8,7) + 3(0,0,0,1), (0,0,8,6) + 4(0,0,0,1), (0,0,8,5) + 5(0,0,0,1), "
    "(0,0,8,4) + 6(0,0,0,1), (0,0,8,3) + 7(0,0,0,1), (0,0,8,2) + 8(0,0,0,1), "
    "(0,0,8,1) + 9(0,0,0,1)"
)


def items(ref):
    return [re.sub(r"\s+", "", t) for t in re.split(r",\s(?=\d*\()", ref)]


def tokens(text):
    return re.findall(r"\d+|[()+,]", text)


@pytest.mark.parametrize("cat,ref,count", [
    (C.h2_catalog, H2_REF, 8), (C.h3_catalog, H3_REF, 24), (C.h4_catalog, H4_REF, 16),
])
def test_catalog_reproduces_reference_lists(cat, ref, count):
    entries = cat()
    assert len(entries) == count
    want = items(ref)
    assert len(want) == count
    for entry, item in zip(entries, want):
        assert tokens(entry.text) == tokens(item)
        assert entry.separating
        assert entry.rule in {"H2-list", "H3-list", "H4-list"}


def test_h2_membership():
    labels = [e.label for e in C.h2_catalog()]
    assert C.HomotopyLabel.parse("2(2,1)") in labels
    assert C.HomotopyLabel.parse("(1,0)") not in labels


def test_h3_h4_members():
    h3 = [e.label for e in C.h3_catalog()]
    h4 = [e.label for e in C.h4_catalog()]
    assert C.HomotopyLabel.parse("(3,14,0,0)+9(1,0,0,0)") in h3
    assert C.HomotopyLabel.parse("(12,1,0,0)+13(0,1,0,0)") in h3
    assert C.HomotopyLabel.parse("(0,0,8,1)+9(0,0,0,1)") in h4
    assert C.HomotopyLabel.parse("(0,0,7,9)+(0,0,1,0)+(0,0,0,1)") not in h4


@pytest.mark.parametrize("text,status,rule", [
    ("(0,0,0,0)", C.SEPARATING, "rule-1"),
    ("2(0,0,0,0)", C.SEPARATING, "rule-2"),
    ("4(0,0,0,0)", C.SEPARATING, "rule-2"),
    ("5(0,0,0,0)", C.FORBIDDEN, "rule-2"),
    ("(0,2,0,0)", C.FORBIDDEN, "helix"),
    ("(0,0,0,3)", C.FORBIDDEN, "helix"),
    ("(0,0,9,0)", C.FORBIDDEN, "bounds"),
    ("(13,1,0,0)", C.FORBIDDEN, "bounds"),
    ("(0,0,6,8)+(0,0,1,0)", C.UNKNOWN, None),
    ("(0,0,7,9)+(0,0,1,0)+(0,0,0,1)", C.FORBIDDEN, "intersecting"),
    ("(3,14,0,0)+9(1,0,0,0)", C.SEPARATING, "H3-list"),
    ("(0,0,8,1)+9(0,0,0,1)", C.SEPARATING, "H4-list"),
    ("(2,1,0,0)+(2,1,0,0)+(0,0,3,4)", C.SEPARATING, "rule-3"),
    ("(1,0,0,0)", C.NON_SEPARATING, None),
    ("(0,0,0,1)", C.NON_SEPARATING, None),
])
def test_validate_combination(text, status, rule):
    v = C.validate_combination(text)
    assert (v.status, v.rule) == (status, rule)
    assert v.reason


def test_rule3_composites_are_separating():
    for label in C.rule3_examples():
        assert C.validate_combination(label).status == C.SEPARATING


@pytest.mark.parametrize("bad", ["", "(1,2", "2(1,2,3)", "(a,b,c,d)", "0(0,0,0,0)",
                                 "(0,0)+(0,0,0,0)", "(-1,0,0,0)"])
def test_malformed_labels(bad):
    with pytest.raises(InvalidInput):
        C.validate_combination(bad)


def test_label_roundtrip_and_canonical_order():
    lab = C.HomotopyLabel.parse("(1,0,0,0) + (0,0,0,0)+(0,0,0,0)")
    assert str(lab) == "2(0,0,0,0) + (1,0,0,0)"
    assert C.HomotopyLabel.parse(str(lab)) == lab
    assert lab.size == 3


tup = st.tuples(*[st.integers(0, 14)] * 4)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(tup, st.integers(1, 5)), min_size=1, max_size=4), st.randoms())
def test_verdict_is_order_independent(terms, rnd):
    text = " + ".join(f"{k}({','.join(map(str, t))})" for t, k in terms)
    shuffled = list(terms)
    rnd.shuffle(shuffled)
    other = "+".join(f"{k}({','.join(map(str, t))})" for t, k in shuffled)
    a, b = C.validate_combination(text), C.validate_combination(other)
    assert a == b
    if a.status == C.FORBIDDEN:
        assert a.reason and a.rule
    if a.status == C.SEPARATING:
        assert a.rule


class _B:
    def __init__(self, i, lab):
        self.id = i
        self.class_label = lab


class _R:
    def __init__(self, labels):
        self.branches = [_B(i, lab) for i, lab in enumerate(labels)]


def test_validate_report():
    verdicts, summary = C.validate_report(_R([(0, 0, 0, 0), (0, 0, 0, 0)]))
    assert verdicts[0][2].status == C.SEPARATING and summary["defects"] == []
    _, summary = C.validate_report(_R([(0, 0, 9, 0)]))
    assert summary["defects"]
    verdicts, summary = C.validate_report(_R([]))
    assert verdicts == [] and summary["summary"] == "no singular set"
