"""Acceptance suite: one recorded pass/fail line per criterion (see the terminal summary)."""
import time

import numpy as np

import oracles
from conftest import GENERIC_3R, GENERIC_6R, random_model, record, report, report_3r
from sixr import catalog
from sixr import classify as cl
from sixr import kinematics as K
from sixr import torus_field as T
from sixr.io import fixture
from sixr.io import report_json
from test_catalog import H2_REF, H3_REF, H4_REF, items, tokens


def test_criterion_01_catalog_fidelity():
    t0 = time.perf_counter()
    ok = True
    counts = []
    for cat, ref in ((catalog.h2_catalog, H2_REF), (catalog.h3_catalog, H3_REF),
                     (catalog.h4_catalog, H4_REF)):
        entries = cat()
        want = items(ref)
        counts.append(len(entries))
        ok &= len(entries) == len(want)
        ok &= all(tokens(e.text) == tokens(w) for e, w in zip(entries, want))
    ok &= counts == [8, 24, 16]
    ms = 1e3 * (time.perf_counter() - t0)
    record(1, ok, f"catalog sizes {counts} (want [8, 24, 16]), token-for-token match, {ms:.1f} ms")


def test_criterion_02_degree_bounds():
    worst = {a: 0 for a in T.AXES}
    ok = True
    for name in GENERIC_6R:
        for axis in T.AXES:
            rep = T.fourier_degree(fixture(name), axis, circles=16, samples_per_circle=64,
                                   rel_tol=1e-8)
            worst[axis] = max(worst[axis], rep.max_harmonic)
            ok &= rep.passed
    bounds = tuple(T.HARMONIC_BOUND[a] for a in T.AXES)
    record(2, ok and len(GENERIC_6R) >= 3,
           f"{len(GENERIC_6R)} fixtures, max harmonics {tuple(worst.values())} <= {bounds}, "
           "16 circles, rel_tol 1e-8")


def test_criterion_03_crossing_bounds():
    worst = {a: 0 for a in T.AXES}
    for name in GENERIC_6R:
        s = T.sign_field(T.sample_field(fixture(name), T.GridSpec.uniform(64)))
        for axis, v in T.max_crossings(s).items():
            worst[axis] = max(worst[axis], v)
    limits = tuple(T.CROSSING_MAX[a] for a in T.AXES)
    ok = all(worst[a] <= T.CROSSING_MAX[a] for a in T.AXES)
    record(3, ok, f"n=64 max crossings {tuple(worst.values())} <= {limits} over {len(GENERIC_6R)} fixtures")


def test_criterion_04_x1_x6_invariance():
    rng = np.random.Generator(np.random.Philox(4))
    worst = 0.0
    for name in GENERIC_6R:
        m = fixture(name)
        xs = rng.uniform(-np.pi, np.pi, (1000, 6))
        full = np.array([K.det_jacobian(m, x) for x in xs])
        red = np.array([K.det_jacobian(m, [0.0, *x[1:5], 0.0]) for x in xs])
        worst = max(worst, float(np.max(np.abs(full - red)) / np.max(np.abs(red))))
    record(4, worst <= 1e-9, f"1000 samples x {len(GENERIC_6R)} fixtures, max rel deviation "
                             f"{worst:.2e} <= 1e-9")


def test_criterion_05_jacobian_correctness():
    rng = np.random.Generator(np.random.Philox(5))
    fd_worst = det_worst = 0.0
    for _ in range(100):
        m = random_model(rng)
        x = rng.uniform(-np.pi, np.pi, 6)
        J = K.spatial_jacobian(m, x)
        F = oracles.fd_jacobian(m.as_table(), x, eps=1e-5)
        fd_worst = max(fd_worst, float(np.max(np.linalg.norm(J - F, axis=0)
                                              / np.linalg.norm(J, axis=0))))
        want = oracles.cofactor_det(J) / m.length_scale ** 3
        det_worst = max(det_worst, abs(K.det_jacobian(m, x) - want) / abs(want))
    record(5, fd_worst <= 1e-6 and det_worst <= 1e-9,
           f"100 random pairs: finite-difference rel err {fd_worst:.2e} <= 1e-6, "
           f"cofactor det rel err {det_worst:.2e} <= 1e-9")


def test_criterion_06_topology_invariants():
    problems = []
    slowest = 0.0
    for name in GENERIC_6R:
        t0 = time.perf_counter()
        r = report(name, 64)
        slowest = max(slowest, time.perf_counter() - t0)
        total = np.sum([b.class_signed for b in r.branches], axis=0)
        if np.any(total):
            problems.append(f"{name}: class sum {tuple(total)}")
        mism = [b.id for b in r.branches if b.separating != b.parity_even]
        if mism:
            problems.append(f"{name}: parity mismatch on {mism}")
        if r.status != cl.RESOLVED or not r.generic:
            problems.append(f"{name}: {r.status} / {r.genericity.verdict}")
        if r.branches and r.sheets.count < 2:
            problems.append(f"{name}: {r.sheets.count} sheet(s)")
    ok = not problems and slowest < 300
    detail = "; ".join(problems) if problems else "class sums zero, no parity mismatches, sheets >= 2"
    record(6, ok, f"{detail} ({len(GENERIC_6R)} fixtures at n=64, slowest {slowest:.1f} s < 300 s)")


def _cell_agreement(model):
    """Fine (n=64) vs coarse (n=32, aligned) mixed cells; coarse nodes are every other fine node."""
    from sixr.topology import extract_zero_cells
    coarse = extract_zero_cells(T.sign_field(T.sample_field(model, T.GridSpec.uniform(32, phase=(0.25,) * 4))))
    fine = extract_zero_cells(T.sign_field(T.sample_field(model, T.GridSpec.uniform(64))))
    fc = fine.cells
    parents = fc // 2
    forward = float(np.mean(coarse.mask[tuple(parents.T)]))
    child = np.zeros(coarse.mask.shape, dtype=bool)
    child[tuple(parents.T)] = True
    backward = float(np.mean(child[coarse.mask]))
    return forward, backward


def test_criterion_07_refinement_stability():
    rows = []
    ok = True
    for name in GENERIC_6R:
        a, b = report(name, 48), report(name, 64)
        same = (a.label_multiset, a.sheets.count) == (b.label_multiset, b.sheets.count)
        ok &= same and a.status == b.status == cl.RESOLVED
        rows.append(f"{name} {b.label_multiset}/{b.sheets.count}")
    fwd, bwd = _cell_agreement(fixture(GENERIC_6R[0]))
    ok &= fwd >= 0.99 and bwd >= 0.99
    record(7, ok, "n=48 == n=64 for " + ", ".join(rows)
           + f"; cell agreement 32->64 {fwd:.4f}/{bwd:.4f} >= 0.99")


def test_criterion_08_2d_oracle():
    ok = len(GENERIC_3R) >= 5
    seen = []
    for name in GENERIC_3R:
        r = report_3r(name)
        signs = T.sign_field(T.sample_field(fixture(name), r.grid)).signs
        curves, _ = oracles.trace_contours(signs)
        got = sorted((b.class_label, b.separating) for b in r.branches)
        want = sorted(((abs(c["winding"][0]), abs(c["winding"][1])), c["winding"] == (0, 0))
                      for c in curves)
        in_h2 = catalog.validate_combination(r.label_multiset).rule == "H2-list"
        ok &= got == want and in_h2 and r.status == cl.RESOLVED
        seen.append(r.label_multiset)
    record(8, ok, f"{len(GENERIC_3R)} 3R fixtures match the contour oracle, all in H2: {seen}")


def test_criterion_09_genericity_guard():
    wrist = cl.classify(fixture("wrist"), T.GridSpec.uniform(32))
    pert = cl.classify(fixture("wrist_perturbed"), T.GridSpec.uniform(32))
    witness = [w for w in wrist.genericity.witnesses if w.corank >= 2]
    ok = (wrist.status == cl.NOT_APPLICABLE and bool(witness)
          and pert.status == cl.RESOLVED and pert.generic)
    record(9, ok, f"spherical wrist -> {wrist.genericity.verdict} ({len(witness)} corank>=2 "
                  f"witnesses), perturbed -> {pert.genericity.verdict}")


def test_criterion_10_determinism():
    name = GENERIC_6R[0]
    grid = T.GridSpec.uniform(48)
    texts = [report_json(report(name, 48))]
    texts.append(report_json(cl.classify(fixture(name), grid, cl.Options(threads=1))))
    texts.append(report_json(cl.classify(fixture(name), grid, cl.Options(threads=8))))
    ok = texts[0] == texts[1] == texts[2]
    record(10, ok, f"{name} n=48 report bytes identical over 2 runs and threads {{1, 8}} "
                   f"({len(texts[0])} bytes)")
