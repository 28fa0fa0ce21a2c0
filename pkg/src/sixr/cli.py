"""Command-line front end: ``sixr analyze | degrees | catalog | search``.

Exit codes: 0 resolved generic classification (or success), 1 bad input,
2 non-generic arm, 3 unresolved ambiguity, 4 search exhausted.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import catalog
from .classify import NOT_APPLICABLE, RESOLVED, Options, classify, classify_3r
from .io import load_model, load_ranges, report_csv, report_json, save_model
from .kinematics import InvalidInput, ManipulatorModel
from .search import search_class
from .torus_field import AXES, GridSpec, fourier_degree, sample_field, write_field

EXIT_OK, EXIT_INPUT, EXIT_NON_GENERIC, EXIT_UNRESOLVED, EXIT_NOT_FOUND = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    resolution: tuple
    eps: float = 1e-9
    corank_tol: float = 1e-8
    fourier_rel_tol: float = 1e-8
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        for name in ("eps", "corank_tol", "fourier_rel_tol"):
            if not getattr(self, name) > 0:
                raise InvalidInput(f"--{name.replace('_', '-')} must be positive")
        if any(n < 16 or n % 2 for n in self.resolution):
            raise InvalidInput("resolutions must be even and >= 16")
        if self.threads < 1:
            raise InvalidInput("--threads must be >= 1")

    def options(self, refine=True) -> Options:
        return Options(eps=self.eps, corank_tol=self.corank_tol, seed=self.seed,
                       threads=self.threads, refine=refine)

    def report_config(self) -> dict:
        # threads deliberately excluded: reports must not depend on them
        out = asdict(self)
        out.pop("threads")
        out["resolution"] = list(self.resolution)
        return out


def _resolution(text, dims):
    parts = [int(p) for p in text.split(",")]
    if len(parts) == 1:
        parts = parts * dims
    if len(parts) != dims:
        raise InvalidInput(f"--resolution needs 1 or {dims} values, got {len(parts)}")
    return tuple(parts)


def _threads(text):
    if text == "auto":
        return os.cpu_count() or 1
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("threads must be an integer or 'auto'") from None


def _config(args, dims, default_n):
    res = _resolution(args.resolution or str(default_n), dims)
    return RunConfig(
        resolution=res,
        eps=args.eps,
        corank_tol=getattr(args, "corank_tol", 1e-8),
        fourier_rel_tol=getattr(args, "rel_tol", 1e-8),
        seed=args.seed,
        threads=args.threads,
    )


def _common(p, resolution=True):
    if resolution:
        p.add_argument("--resolution", help="n or n2,n3,n4,n5 (n2,n3 for a 3R file)")
    p.add_argument("--eps", type=float, default=1e-9, help="relative zero band of the sign field")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=_threads, default=1, help="integer or 'auto'")


def cmd_analyze(args) -> int:
    model = load_model(args.model)
    six = isinstance(model, ManipulatorModel)
    cfg = _config(args, 4 if six else 2, 64 if six else 128)
    grid = GridSpec(cfg.resolution)
    opts = cfg.options(refine=not args.no_refine)
    report = classify(model, grid, opts) if six else classify_3r(model, grid, opts)
    if args.dump_field:
        if not six:
            raise InvalidInput("--dump-field is only available for 6R models")
        write_field(args.dump_field, sample_field(model, grid, cfg.threads))

    text = report_json(report, cfg.report_config())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        stem = Path(args.model).stem
        if args.format in ("json", "both"):
            (out / f"{stem}.report.json").write_text(text)
        if args.format in ("csv", "both"):
            (out / f"{stem}.branches.csv").write_text(report_csv(report))
    elif args.format == "csv":
        sys.stdout.write(report_csv(report))
    else:
        sys.stdout.write(text)

    if report.status == NOT_APPLICABLE:
        print(f"{model.name or args.model}: non-generic", file=sys.stderr)
        return EXIT_NON_GENERIC
    label = report.label_multiset or "no singular set"
    print(f"{model.name or args.model}: {report.status}: {label}, {report.sheets.count} sheet(s)",
          file=sys.stderr)
    return EXIT_OK if report.status == RESOLVED else EXIT_UNRESOLVED


def _injected(axis, harmonic):
    j = AXES.index(axis)
    return lambda *xs: np.cos(harmonic * np.asarray(xs[j]))


def cmd_degrees(args) -> int:
    model = load_model(args.model)
    if not isinstance(model, ManipulatorModel):
        raise InvalidInput("degrees needs a 6R model")
    if not args.rel_tol > 0:
        raise InvalidInput("--rel-tol must be positive")
    axes = [args.axis] if args.axis else list(AXES)
    ok = True
    for axis in axes:
        func = _injected(axis, args.inject) if args.inject is not None else None
        rep = fourier_degree(model, axis, circles=args.circles,
                             samples_per_circle=args.samples_per_circle, rel_tol=args.rel_tol,
                             seed=args.seed, func=func)
        ok &= rep.passed
        print(f"{rep.axis} max_harmonic={rep.max_harmonic} bound={rep.bound} "
              f"suppressed={rep.max_suppressed:.3e} {'pass' if rep.passed else 'FAIL'}")
    return EXIT_OK if ok else EXIT_INPUT


def cmd_catalog(args) -> int:
    key = args.what.lower()
    if key in catalog.CATALOGS:
        for entry in catalog.CATALOGS[key]():
            print(entry.text)
        return EXIT_OK
    verdict = catalog.validate_combination(args.what)
    if verdict.rule:
        print(f"{verdict.status} ({verdict.rule.replace('-', ' ')})")
    else:
        print(verdict.status)
    print(f"  {verdict.reason}")
    return EXIT_OK


def cmd_search(args) -> int:
    ranges = load_ranges(args.ranges) if args.ranges else None
    cfg = _config(args, 4, 32)
    result = search_class(args.target, args.attempts, args.seed, ranges, GridSpec(cfg.resolution),
                          cfg.options())
    if result.found:
        print(f"found {result.target} at attempt {result.attempt}")
        if args.out:
            save_model(args.out, result.model)
            print(f"model written to {args.out}")
        return EXIT_OK
    print(f"not found after {result.attempts} attempt(s); classes seen:")
    for label, count in sorted(result.histogram.items()):
        print(f"  {count:4d}  {label}")
    return EXIT_NOT_FOUND


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sixr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="classify the singular surface of an arm")
    p.add_argument("--model", required=True)
    _common(p)
    p.add_argument("--corank-tol", type=float, default=1e-8)
    p.add_argument("--out", help="directory for report files (stdout when omitted)")
    p.add_argument("--format", choices=("json", "csv", "both"), default="both")
    p.add_argument("--dump-field", help="write the sampled field as an SGF4 binary")
    p.add_argument("--no-refine", action="store_true", help="skip the refinement pass")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("degrees", help="check per-axis harmonic degree bounds")
    p.add_argument("--model", required=True)
    p.add_argument("--axis", choices=AXES)
    p.add_argument("--circles", type=int, default=16)
    p.add_argument("--samples-per-circle", type=int, default=64)
    p.add_argument("--rel-tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject", type=int, metavar="K", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_degrees)

    p = sub.add_parser("catalog", help="print h2/h3/h4 or judge a label string")
    p.add_argument("what", help="h2, h3, h4 or a label such as '2(0,0,0,0)'")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("search", help="random DH search for a target class combination")
    p.add_argument("--target", required=True)
    p.add_argument("--ranges", help="JSON sampling box (default: alpha in [-pi,pi], a,d in [-1,1])")
    p.add_argument("--attempts", type=int, default=20)
    _common(p)
    p.add_argument("--out", help="where to write the found model")
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
