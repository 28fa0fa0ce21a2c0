"""Pure numpy implementation of the hot kernels.

Mirrors ``_ckernels.pyx`` operation for operation: every floating point
expression is evaluated in the same order, so both backends produce the
same bits on IEEE-754 hardware (the extension is compiled without FMA
contraction). Keep the two files in sync.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

BACKEND = "python"


def _det_chain(params, ct, st, scale3, positional):
    """Normalized Jacobian determinant for broadcastable trig inputs.

    ``params`` rows are (cos alpha, sin alpha, a, d); ``ct[j]``/``st[j]``
    hold cos/sin of the full joint angle of joint j.
    """
    njoint = len(params)
    shape = np.broadcast_shapes(*[np.shape(c) for c in ct])
    one = np.ones(shape)
    zero = np.zeros(shape)
    R = [[one, zero, zero], [zero, one, zero], [zero, zero, one]]
    p = [zero, zero, zero]
    axes = []
    origins = []
    for j in range(njoint):
        ca, sa, a, d = (float(v) for v in params[j])
        c = ct[j]
        s = st[j]
        axes.append((R[0][2], R[1][2], R[2][2]))
        origins.append((p[0], p[1], p[2]))
        A = [[c, (-s) * ca, s * sa], [s, c * ca, (-c) * sa], [0.0, sa, ca]]
        t = (a * c, a * s, d)
        p = [R[r][0] * t[0] + R[r][1] * t[1] + R[r][2] * t[2] + p[r] for r in range(3)]
        R = [
            [R[r][0] * A[0][k] + R[r][1] * A[1][k] + R[r][2] * A[2][k] for k in range(3)]
            for r in range(3)
        ]

    cols = []
    for j in range(njoint):
        z = axes[j]
        o = origins[j]
        w0 = p[0] - o[0]
        w1 = p[1] - o[1]
        w2 = p[2] - o[2]
        v = (z[1] * w2 - z[2] * w1, z[2] * w0 - z[0] * w2, z[0] * w1 - z[1] * w0)
        if positional:
            cols.append(v)
        else:
            cols.append((z[0], z[1], z[2], v[0], v[1], v[2]))

    m = len(cols)
    M = [[np.broadcast_to(cols[c][r], shape).astype(float) for c in range(m)] for r in range(m)]
    return _pivoted_det(M, m, shape) / scale3


def _pivoted_det(M, m, shape):
    det = np.ones(shape)
    odd = np.zeros(shape, dtype=bool)
    dead = np.zeros(shape, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        for k in range(m):
            piv = np.full(shape, k)
            best = np.abs(M[k][k])
            for r in range(k + 1, m):
                cand = np.abs(M[r][k])
                better = cand > best
                best = np.where(better, cand, best)
                piv = np.where(better, r, piv)
            dead |= best == 0.0
            for r in range(k + 1, m):
                swap = piv == r
                if not swap.any():
                    continue
                odd ^= swap
                for c in range(k, m):
                    top = M[k][c]
                    M[k][c] = np.where(swap, M[r][c], top)
                    M[r][c] = np.where(swap, top, M[r][c])
            pk = M[k][k]
            for r in range(k + 1, m):
                f = M[r][k] / pk
                for c in range(k + 1, m):
                    M[r][c] = M[r][c] - f * M[k][c]
            det = det * pk
    det = np.where(odd, -det, det)
    return np.where(dead, 0.0, det)


def det_points(params, ct, st, scale3, positional=False):
    """Determinant at N configurations; ``ct``/``st`` have shape (N, J)."""
    ct = np.asarray(ct, dtype=float)
    st = np.asarray(st, dtype=float)
    return _det_chain(params, list(ct.T), list(st.T), scale3, positional)


def det_grid(params, ct_tables, st_tables, counts, scale3, positional=False, threads=1):
    """Determinant on the tensor grid of per-joint angle tables.

    ``ct_tables[j][:counts[j]]`` are the cosines for joint j; the flat
    result is row-major over joints (last joint fastest).
    """
    counts = [int(m) for m in counts]
    njoint = len(counts)
    lead = next((j for j, m in enumerate(counts) if m > 1), None)
    if lead is None:
        ct = [np.array([ct_tables[j][0]]) for j in range(njoint)]
        st = [np.array([st_tables[j][0]]) for j in range(njoint)]
        return _det_chain(params, ct, st, scale3, positional).ravel()

    rest = counts[lead + 1:]

    def slab(i):
        ct, st = [], []
        for j in range(njoint):
            if j < lead:
                ct.append(float(ct_tables[j][0]))
                st.append(float(st_tables[j][0]))
            elif j == lead:
                ct.append(float(ct_tables[j][i]))
                st.append(float(st_tables[j][i]))
            else:
                shp = [1] * len(rest)
                shp[j - lead - 1] = counts[j]
                ct.append(np.asarray(ct_tables[j][: counts[j]], dtype=float).reshape(shp))
                st.append(np.asarray(st_tables[j][: counts[j]], dtype=float).reshape(shp))
        if not rest:
            ct = [np.array([c]) for c in ct]
            st = [np.array([s]) for s in st]
        return _det_chain(params, ct, st, scale3, positional).ravel()

    n_lead = counts[lead]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            slabs = list(pool.map(slab, range(n_lead)))
    else:
        slabs = [slab(i) for i in range(n_lead)]
    return np.concatenate(slabs)


def grid_components(active, links, shape):
    """Connected components of a periodic grid graph.

    ``active`` flags vertices, ``links[k]`` flags the edge from vertex i to
    its +1 neighbour along axis k. Returns (labels, count) with labels
    numbered by smallest member index and -1 on inactive vertices.
    """
    shape = tuple(int(n) for n in shape)
    N = int(np.prod(shape))
    active = np.asarray(active, dtype=bool).ravel()
    index = np.arange(N, dtype=np.int64).reshape(shape)
    rows, cols = [], []
    for k in range(len(shape)):
        nbr = np.roll(index, -1, axis=k).ravel()
        ok = np.asarray(links[k], dtype=bool).ravel() & active
        ok &= active[nbr]
        src = np.flatnonzero(ok)
        rows.append(src)
        cols.append(nbr[src])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(N, N))
    _, raw = connected_components(graph, directed=False)
    labels = np.full(N, -1, dtype=np.int64)
    members = np.flatnonzero(active)
    if members.size == 0:
        return labels, 0
    uniq, first = np.unique(raw[members], return_index=True)
    order = np.argsort(first, kind="stable")
    remap = np.empty(uniq.size, dtype=np.int64)
    remap[order] = np.arange(uniq.size)
    labels[members] = remap[np.searchsorted(uniq, raw[members])]
    return labels, int(uniq.size)
