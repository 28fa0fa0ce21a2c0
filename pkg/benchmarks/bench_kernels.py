"""Compare the compiled and numpy kernels on field sampling and component labeling.

    python3 benchmarks/bench_kernels.py --n 32 --repeat 3
"""
import argparse
import time

import numpy as np

from sixr import _backend
from sixr import topology as top
from sixr import torus_field as T
from sixr.io import fixture
from sixr.kinematics import kernel_params


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=32, help="grid resolution per axis")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--model", default="arm_a")
    args = p.parse_args()

    model = fixture(args.model)
    grid = T.GridSpec.uniform(args.n)
    ct, st, counts, positional = T._layout(model, grid)
    params = kernel_params(model)
    scale3 = model.length_scale ** 3
    signs = T.sign_field(T.sample_field(model, grid))
    cells = top.extract_zero_cells(signs)
    links = np.stack([f.ravel() for f in cells.faces]).astype(np.uint8)
    active = cells.mask.ravel().astype(np.uint8)

    names = [b for b in ("cython", "python") if b in _backend.available()]
    print(f"grid {args.n}^4 = {grid.size} nodes, {len(cells)} zero cells, threads={args.threads}")
    print(f"{'kernel':<18}" + "".join(f"{b:>12}" for b in names) + ("     speedup" if len(names) == 2 else ""))
    results = {}
    for label, call in (
        ("det_grid", lambda k: k.det_grid(params, ct, st, counts, scale3, positional, args.threads)),
        ("grid_components", lambda k: k.grid_components(active, links, cells.mask.shape)),
    ):
        row = {}
        for b in names:
            row[b], results[(label, b)] = best_of(lambda: call(_backend.get(b)), args.repeat)
        line = f"{label:<18}" + "".join(f"{row[b]:>11.3f}s" for b in names)
        if len(names) == 2:
            line += f"{row['python'] / row['cython']:>11.1f}x"
        print(line)
    if len(names) == 2:
        same_field = np.asarray(results[("det_grid", "cython")]).tobytes() == \
            np.asarray(results[("det_grid", "python")]).tobytes()
        la, lb = results[("grid_components", "cython")], results[("grid_components", "python")]
        same_labels = la[1] == lb[1] and np.array_equal(la[0], lb[0])
        print(f"outputs identical: field={same_field} labels={same_labels}")


if __name__ == "__main__":
    main()
