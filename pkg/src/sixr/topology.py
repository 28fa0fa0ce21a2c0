"""Branches of the discretized singular surface and their homotopy labels.

Works on periodic sign fields of any dimension (4 for 6R arms, 2 for 3R
positioners). Cell ``i`` spans nodes ``i .. i+1`` on every axis; a cell is a
zero cell when its corners carry both signs. Two zero cells are joined when
the face they share carries both signs, so every sign-change edge (and every
mixed plaquette) lies inside a single branch.

Labels are wrap counts: within each 2-torus factor (x2, x3) and
(x4, x5) the wrap count around one generator is the signed intersection
with circles of the partner generator.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels


@dataclass
class ZeroCellSet:
    grid: object
    mask: np.ndarray
    faces: list

    @property
    def cells(self) -> np.ndarray:
        """Cell multi-indices in lexicographic order."""
        return np.argwhere(self.mask)

    def __len__(self):
        return int(np.count_nonzero(self.mask))


@dataclass
class Branch:
    id: int
    cells: np.ndarray  # flat cell indices, ascending
    class_signed: tuple | None = None
    class_label: tuple | None = None
    separating: bool | None = None
    crossing_total: tuple | None = None
    parity_even: bool | None = None
    consistent: bool | None = None
    sides: int | None = None
    flags: list = field(default_factory=list)

    @property
    def cell_count(self) -> int:
        return int(self.cells.size)

    def as_dict(self):
        return {
            "id": self.id,
            "class_label": list(self.class_label) if self.class_label is not None else None,
            "class_signed": list(self.class_signed) if self.class_signed is not None else None,
            "separating": self.separating,
            "cell_count": self.cell_count,
            "crossings": list(self.crossing_total) if self.crossing_total is not None else None,
            "parity_even": self.parity_even,
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class SheetDecomposition:
    count: int
    sizes: tuple

    def as_dict(self):
        return {"count": self.count, "sizes": list(self.sizes)}


def wrap_permutation(dims: int) -> tuple:
    """Axis whose crossings give label entry k (partner generator in the same 2-torus)."""
    return (1, 0, 3, 2) if dims == 4 else (1, 0)


def wrap_label(class_signed) -> tuple:
    perm = wrap_permutation(len(class_signed))
    return tuple(abs(int(class_signed[p])) for p in perm)


def crossings(signs, axis: int) -> np.ndarray:
    """+1 / -1 / 0 on the edge from node i to i + e_axis (+1 means - to +)."""
    s = signs.signs.astype(np.int8)
    return ((np.roll(s, -1, axis=axis) - s) // 2).astype(np.int8)


def _corner_extrema(s, axes):
    lo = s
    hi = s
    for a in axes:
        lo = np.minimum(lo, np.roll(lo, -1, axis=a))
        hi = np.maximum(hi, np.roll(hi, -1, axis=a))
    return lo, hi


def extract_zero_cells(signs) -> ZeroCellSet:
    s = signs.signs
    d = s.ndim
    lo, hi = _corner_extrema(s, range(d))
    mask = lo != hi
    faces = []
    for k in range(d):
        flo, fhi = _corner_extrema(s, [a for a in range(d) if a != k])
        faces.append(np.roll(flo != fhi, -1, axis=k))
    return ZeroCellSet(signs.grid, mask, faces)


def label_cells(cells: ZeroCellSet, backend=None):
    """(flat labels, count); labels ordered by smallest member cell, -1 elsewhere."""
    kern = kernels if backend is None else backend
    links = np.stack([f.ravel() for f in cells.faces]).astype(np.uint8)
    return kern.grid_components(cells.mask.ravel().astype(np.uint8), links, cells.mask.shape)


def branches(cells: ZeroCellSet, labels=None) -> list[Branch]:
    """Face-connected components of the zero cells (classes unfilled)."""
    if labels is None:
        labels, count = label_cells(cells)
    else:
        labels, count = labels
    members = np.flatnonzero(labels >= 0)
    order = np.argsort(labels[members], kind="stable")
    members = members[order]
    bounds = np.searchsorted(labels[members], np.arange(count + 1))
    return [Branch(b, members[bounds[b]: bounds[b + 1]]) for b in range(count)]


def _circle_index(flat, shape, axis):
    coords = np.unravel_index(flat, shape)
    rest = [c for j, c in enumerate(coords) if j != axis]
    rest_shape = [n for j, n in enumerate(shape) if j != axis]
    return np.ravel_multi_index(rest, rest_shape), int(np.prod(rest_shape))


def _circle_sums(signs, owner_of):
    """Per axis: dict branch -> (signed sums, unsigned counts, circles met)."""
    shape = signs.signs.shape
    out = []
    for k in range(len(shape)):
        c = crossings(signs, k).ravel()
        nz = np.flatnonzero(c)
        owner = owner_of(nz)
        keep = owner >= 0
        nz, owner = nz[keep], owner[keep]
        circ, ncirc = _circle_index(nz, shape, k)
        key = owner * ncirc + circ
        uniq, inv = np.unique(key, return_inverse=True)
        signed = np.bincount(inv, weights=c[nz]).astype(np.int64)
        unsigned = np.bincount(inv).astype(np.int64)
        ob = uniq // ncirc
        per = {}
        starts = np.flatnonzero(np.r_[True, ob[1:] != ob[:-1]]) if ob.size else np.array([], int)
        ends = np.r_[starts[1:], ob.size]
        for a, b in zip(starts, ends):
            per[int(ob[a])] = (signed[a:b], unsigned[a:b], ncirc)
        out.append(per)
    return out


def _class_from_sums(sums_per_axis, bid, dims):
    signed_class = []
    totals = []
    consistent = True
    parity = True
    for k in range(dims):
        entry = sums_per_axis[k].get(bid)
        if entry is None:
            signed_class.append(0)
            totals.append(0)
            continue
        signed, unsigned, ncirc = entry
        values = set(signed.tolist())
        if len(signed) < ncirc:
            values.add(0)
        if len(values) != 1:
            consistent = False
            value = Counter(signed.tolist()).most_common(1)[0][0]
        else:
            value = values.pop()
        signed_class.append(int(value))
        totals.append(int(unsigned.max()))
        parity &= bool(np.all(unsigned % 2 == 0))
    return tuple(signed_class), tuple(totals), consistent, parity


def branch_class(branch: Branch, signs) -> tuple:
    """Signed intersection count of the branch with generator circles, per axis.

    Fills ``class_signed``, ``class_label``, ``crossing_total``,
    ``parity_even`` and ``consistent`` on the branch and returns
    ``class_signed``. Disagreement among parallel circles sets an
    ambiguity flag.
    """
    member = np.zeros(signs.signs.size, dtype=bool)
    member[branch.cells] = True
    sums = _circle_sums(signs, lambda nz: np.where(member[nz], branch.id, -1))
    _apply_class(branch, sums, signs.signs.ndim)
    return branch.class_signed


def _apply_class(branch, sums, dims):
    cs, totals, consistent, parity = _class_from_sums(sums, branch.id, dims)
    branch.class_signed = cs
    branch.class_label = wrap_label(cs)
    branch.crossing_total = totals
    branch.parity_even = parity
    branch.consistent = consistent
    if not consistent:
        branch.flags.append("circle-inconsistent")


def _neighbour(flat, shape, axis):
    coords = list(np.unravel_index(flat, shape))
    coords[axis] = (coords[axis] + 1) % shape[axis]
    return np.ravel_multi_index(coords, shape)


def node_components(signs, removed=None, backend=None):
    """Components of the node graph after deleting edges flagged in ``removed[k]``."""
    kern = kernels if backend is None else backend
    shape = signs.signs.shape
    links = np.ones((len(shape), signs.signs.size), dtype=np.uint8)
    if removed is not None:
        for k in range(len(shape)):
            links[k][np.asarray(removed[k]).ravel()] = 0
    active = np.ones(signs.signs.size, dtype=np.uint8)
    return kern.grid_components(active, links, shape)


def is_separating(branch: Branch, signs, labels=None) -> bool:
    """True if deleting the branch's crossing edges disconnects the node graph."""
    member = np.zeros(signs.signs.size, dtype=bool)
    member[branch.cells] = True
    removed = []
    for k in range(signs.signs.ndim):
        removed.append((crossings(signs, k).ravel() != 0) & member)
    _, count = node_components(signs, removed)
    return count >= 2


def sheet_labels(signs):
    """Node labels of the singularity-free regions (all sign-change edges removed)."""
    removed = [crossings(signs, k).ravel() != 0 for k in range(signs.signs.ndim)]
    return node_components(signs, removed)


def _decomposition(labels, count) -> SheetDecomposition:
    sizes = np.sort(np.bincount(labels, minlength=count))[::-1]
    return SheetDecomposition(int(count), tuple(int(v) for v in sizes))


def count_sheets(signs) -> SheetDecomposition:
    return _decomposition(*sheet_labels(signs))


def _sheet_adjacency(signs, sheet_labels, cell_labels):
    """Unique (sheet a, sheet b, owning branch) triples across sign-change edges."""
    shape = signs.signs.shape
    triples = []
    for k in range(len(shape)):
        nz = np.flatnonzero(crossings(signs, k).ravel())
        nb = _neighbour(nz, shape, k)
        a = sheet_labels[nz]
        b = sheet_labels[nb]
        triples.append(np.stack([np.minimum(a, b), np.maximum(a, b), cell_labels[nz]], axis=1))
    if not triples:
        return np.zeros((0, 3), dtype=np.int64)
    return np.unique(np.concatenate(triples), axis=0)


def _components_without(adjacency, nsheets, skip):
    parent = list(range(nsheets))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    count = nsheets
    for a, b, owner in adjacency:
        if owner == skip:
            continue
        ra, rb = find(int(a)), find(int(b))
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
            count -= 1
    return count


@dataclass
class BranchAnalysis:
    """Everything derived from one sign field."""

    cells: ZeroCellSet
    branches: list
    sheets: SheetDecomposition
    flags: list


def analyze_signs(signs) -> BranchAnalysis:
    """Zero cells, branches, classes, separating flags and sheets in one pass.

    Separation uses the sheet quotient graph: removing one branch's edges
    leaves the sheets joined by the crossings of all other branches.
    """
    dims = signs.signs.ndim
    cells = extract_zero_cells(signs)
    labels, count = label_cells(cells)
    found = branches(cells, (labels, count))
    sums = _circle_sums(signs, lambda nz: labels[nz])
    node_labels, nsheets = sheet_labels(signs)
    sheets = _decomposition(node_labels, nsheets)
    adjacency = _sheet_adjacency(signs, node_labels, labels)
    flags = []
    total = np.zeros(dims, dtype=np.int64)
    for br in found:
        _apply_class(br, sums, dims)
        total += np.array(br.class_signed)
        br.sides = _components_without(adjacency, sheets.count, br.id)
        br.separating = br.sides >= 2
        if br.separating != br.parity_even:
            br.flags.append("parity-mismatch")
        elif br.separating and any(br.class_signed):
            br.flags.append("separating-nonzero-class")
    if any(total):
        flags.append(f"homology-sum-nonzero {tuple(int(v) for v in total)}")
    return BranchAnalysis(cells, found, sheets, flags)


def label_multiset(labels) -> str:
    """Canonical ``k(a,b,..) + ...`` string, terms sorted by tuple."""
    counts = Counter(tuple(int(v) for v in lab) for lab in labels)
    terms = []
    for tup in sorted(counts):
        body = "(" + ",".join(str(v) for v in tup) + ")"
        k = counts[tup]
        terms.append(body if k == 1 else f"{k}{body}")
    return " + ".join(terms)
