"""Separating homotopy-class catalogs and admissibility rules for branch combinations.

Labels follow the grammar ``k(I2,I3,I4,I5)`` joined by ``+`` (``k`` omitted
when 1); 2-entry tuples denote classes on a single 2-torus.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .kinematics import InvalidInput

# per-entry wrap bounds for (I2, I3, I4, I5)
WRAP_BOUNDS = (12, 14, 8, 10)
MAX_TRIVIAL_BRANCHES = 4

SEPARATING = "separating-admissible"
NON_SEPARATING = "non-separating"
FORBIDDEN = "forbidden"
UNKNOWN = "unknown"

H2_TEXT = ("(0,0)", "2(0,0)", "(0,0)+2(1,0)", "2(1,0)", "4(1,0)", "2(0,1)", "2(1,1)", "2(2,1)")

_TERM = re.compile(r"^\s*(\d*)\s*\(\s*(\d+(?:\s*,\s*\d+)*)\s*\)\s*$")


@dataclass(frozen=True)
class HomotopyLabel:
    """Multiset of branch classes, kept in canonical (sorted) order."""

    terms: tuple  # ((tuple, multiplicity), ...)

    def __post_init__(self):
        counts = Counter()
        width = None
        for tup, k in self.terms:
            tup = tuple(int(v) for v in tup)
            if width is None:
                width = len(tup)
            if len(tup) != width or width not in (2, 4):
                raise InvalidInput(f"mixed or unsupported tuple widths in label: {self.terms}")
            if any(v < 0 for v in tup) or int(k) < 1:
                raise InvalidInput(f"negative entry or multiplicity in label: {self.terms}")
            counts[tup] += int(k)
        if not counts:
            raise InvalidInput("empty label")
        object.__setattr__(self, "terms", tuple(sorted(counts.items())))

    @classmethod
    def parse(cls, text: str) -> "HomotopyLabel":
        if not isinstance(text, str) or not text.strip():
            raise InvalidInput(f"malformed label {text!r}")
        terms = []
        for part in text.split("+"):
            m = _TERM.match(part)
            if not m:
                raise InvalidInput(f"malformed label term {part.strip()!r} in {text!r}")
            k = int(m.group(1)) if m.group(1) else 1
            terms.append((tuple(int(v) for v in m.group(2).split(",")), k))
        return cls(tuple(terms))

    @classmethod
    def from_branches(cls, labels) -> "HomotopyLabel":
        return cls(tuple((tuple(lab), 1) for lab in labels))

    @property
    def width(self) -> int:
        return len(self.terms[0][0])

    @property
    def counts(self) -> Counter:
        return Counter(dict(self.terms))

    @property
    def size(self) -> int:
        return sum(k for _, k in self.terms)

    def __str__(self):
        out = []
        for tup, k in self.terms:
            body = "(" + ",".join(map(str, tup)) + ")"
            out.append(body if k == 1 else f"{k}{body}")
        return " + ".join(out)


@dataclass(frozen=True)
class CatalogEntry:
    label: HomotopyLabel
    text: str
    separating: bool
    rule: str


@dataclass(frozen=True)
class Verdict:
    status: str
    reason: str
    rule: str | None = None

    def as_dict(self):
        return {"status": self.status, "rule": self.rule, "reason": self.reason}


def _term(tup, k):
    body = "(" + ",".join(map(str, tup)) + ")"
    return body if k == 1 else f"{k}{body}"


@lru_cache(maxsize=None)
def h2_catalog() -> tuple:
    return tuple(CatalogEntry(HomotopyLabel.parse(t), t, True, "H2-list") for t in H2_TEXT)


def _family(head, unit, js):
    entries = []
    for j in js:
        h = head(j)
        text = f"{_term(h, 1)} + {_term(unit, j)}"
        entries.append((HomotopyLabel(((h, 1), (unit, j))), text))
    return entries


@lru_cache(maxsize=None)
def h3_catalog() -> tuple:
    fam = _family(lambda j: (12 - j, 14, 0, 0), (1, 0, 0, 0), range(1, 12))
    fam += _family(lambda j: (12, 14 - j, 0, 0), (0, 1, 0, 0), range(1, 14))
    return tuple(CatalogEntry(lab, text, True, "H3-list") for lab, text in fam)


@lru_cache(maxsize=None)
def h4_catalog() -> tuple:
    fam = _family(lambda j: (0, 0, 8 - j, 10), (0, 0, 1, 0), range(1, 8))
    fam += _family(lambda j: (0, 0, 8, 10 - j), (0, 0, 0, 1), range(1, 10))
    return tuple(CatalogEntry(lab, text, True, "H4-list") for lab, text in fam)


CATALOGS = {"h2": h2_catalog, "h3": h3_catalog, "h4": h4_catalog}


@lru_cache(maxsize=None)
def _h2_counters():
    return [e.label.counts for e in h2_catalog()]


def _is_h2(counts: Counter) -> bool:
    return any(counts == c for c in _h2_counters())


def _single(counts: Counter) -> bool:
    return sum(counts.values()) == 1


def _rule3(counts: Counter) -> bool:
    """(H2,0,0) + (0,0,I4,I5), (I2,I3,0,0) + (0,0,H2) or (H2,0,0) + (0,0,H2)."""
    zero = (0, 0, 0, 0)
    trivial = counts.get(zero, 0)
    left = Counter()
    right = Counter()
    for tup, k in counts.items():
        if tup == zero:
            continue
        if tup[2] == 0 and tup[3] == 0:
            left[tup[:2]] += k
        elif tup[0] == 0 and tup[1] == 0:
            right[tup[2:]] += k
        else:
            return False
    # (0,0,0,0) branches may sit on either factor torus
    for to_left in range(trivial + 1):
        a = left.copy()
        b = right.copy()
        if to_left:
            a[(0, 0)] += to_left
        if trivial - to_left:
            b[(0, 0)] += trivial - to_left
        a_h2, b_h2 = _is_h2(a), _is_h2(b)
        if (a_h2 and (b_h2 or _single(b))) or (b_h2 and _single(a)):
            return True
    return False


def _validate_t2(label: HomotopyLabel) -> Verdict:
    counts = label.counts
    if _is_h2(counts):
        return Verdict(SEPARATING, "member of the eight-class 2-torus list", "H2-list")
    if _single(counts) and sum(next(iter(counts))) == 1:
        return Verdict(NON_SEPARATING, "a lone unit class cannot divide the torus", None)
    return Verdict(UNKNOWN, "not among the enumerated 2-torus classes", None)


def validate_combination(label) -> Verdict:
    """Admissibility verdict for a branch-class combination."""
    if isinstance(label, str):
        label = HomotopyLabel.parse(label)
    if not isinstance(label, HomotopyLabel):
        raise InvalidInput(f"expected a HomotopyLabel, got {type(label).__name__}")
    if label.width == 2:
        return _validate_t2(label)
    counts = label.counts
    names = ("I2", "I3", "I4", "I5")
    for tup in counts:
        for name, v, cap in zip(names, tup, WRAP_BOUNDS):
            if v > cap:
                return Verdict(FORBIDDEN, f"{name} = {v} exceeds the bound {name} <= {cap} in {_term(tup, 1)}",
                               "bounds")
    for tup in counts:
        nonzero = [v for v in tup if v]
        if len(nonzero) == 1 and nonzero[0] > 1:
            return Verdict(FORBIDDEN, f"{_term(tup, 1)}: a single-generator helix with wrap > 1 "
                                      "must self-intersect", "helix")
    trivial = counts.get((0, 0, 0, 0), 0)
    if trivial > MAX_TRIVIAL_BRANCHES:
        return Verdict(FORBIDDEN, f"{trivial} coexisting (0,0,0,0) branches exceed 8 generator "
                                  "intersections", "rule-2")
    if _single(counts):
        tup = next(iter(counts))
        if sum(tup) == 1:
            return Verdict(NON_SEPARATING, f"{_term(tup, 1)} alone cannot divide the torus", None)
    if set(counts) == {(0, 0, 0, 0)}:
        if trivial == 1:
            return Verdict(SEPARATING, "a single (0,0,0,0) branch is separating", "rule-1")
        return Verdict(SEPARATING, f"{trivial}(0,0,0,0) branches are separating", "rule-2")
    for entry in h3_catalog() + h4_catalog():
        if entry.label.counts == counts:
            return Verdict(SEPARATING, f"listed in {entry.rule[:2]}", entry.rule)
    if _rule3(counts):
        return Verdict(SEPARATING, "2-torus catalog class combined across the factor tori", "rule-3")
    if (
        all(t[0] == 0 and t[1] == 0 for t in counts)
        and counts.get((0, 0, 1, 0), 0) >= 1
        and counts.get((0, 0, 0, 1), 0) >= 1
    ):
        return Verdict(FORBIDDEN, "(0,0,1,0) and (0,0,0,1) branches must intersect", "intersecting")
    return Verdict(UNKNOWN, "combination not enumerated", None)


def validate_report(report) -> tuple:
    """Verdicts for the label multiset and each branch, plus a summary.

    Any forbidden finding on a resolved report is a pipeline defect.
    """
    labels = [b.class_label for b in report.branches if b.class_label is not None]
    if not labels:
        return [], {"summary": "no singular set", "defects": []}
    combo = HomotopyLabel.from_branches(labels)
    overall = validate_combination(combo)
    verdicts = [("multiset", str(combo), overall)]
    for b in report.branches:
        lab = HomotopyLabel(((b.class_label, 1),))
        verdicts.append((f"branch {b.id}", str(lab), validate_combination(lab)))
    defects = [f"{who}: {text}: {v.reason}" for who, text, v in verdicts if v.status == FORBIDDEN]
    summary = {"summary": overall.status, "label": str(combo), "rule": overall.rule, "defects": defects}
    return verdicts, summary


def rule3_examples():
    """(H2,0,0) + (0,0,H2) composites, mechanically expanded."""
    out = []
    for a, b in product(h2_catalog(), repeat=2):
        terms = [((t[0], t[1], 0, 0), k) for t, k in a.label.terms]
        terms += [((0, 0, t[0], t[1]), k) for t, k in b.label.terms]
        out.append(HomotopyLabel(tuple(terms)))
    return out
