"""Command-line front end: ``halfloop verify | spectra | oracle | fixtures``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ValidationError
from .modelfile import ModelSyntaxError, parse_model


def _emit(report, args) -> int:
    timings = not args.no_timings
    sys.stdout.write(report.render(args.format, timings))
    if args.json:
        Path(args.json).write_text(report.render("json", timings))
    return 0 if report.passed else 1


def cmd_verify(args) -> int:
    from .suites import run_verify

    model = parse_model(args.model)
    report = run_verify(model.spec, all_pairs=args.all_pairs, truncation=args.truncation, seed=args.seed)
    return _emit(report, args)


def cmd_spectra(args) -> int:
    from .spectra import run_spectra

    model = parse_model(args.model)
    if model.kind == "dunkl":
        raise ValidationError("gaudin-only", "spectra applies to inner-gaudin and outer-gaudin models")
    report = run_spectra(model.spec, tol=args.tol, seed=args.seed)
    return _emit(report, args)


def cmd_oracle(args) -> int:
    """Dense brute-force Hamiltonians, printed or compared against the sparse assembly."""
    from . import dense
    from .gaudin import hamiltonians

    model = parse_model(args.model)
    if model.kind == "dunkl":
        raise ValidationError("gaudin-only", "the oracle covers inner-gaudin and outer-gaudin models")
    ref = dense.hamiltonians(model.spec)
    if args.subop == "hamiltonians":
        out = {f"H{k + 1}": dense.render(H) for k, H in enumerate(ref)}
        sys.stdout.write(json.dumps(out, indent=2) + "\n")
        return 0
    bad = []
    for k, (H, D) in enumerate(zip(hamiltonians(model.spec), ref)):
        same = dense.equal(dense.to_dense(H), D)
        print(f"H{k + 1}: {'match' if same else 'MISMATCH'}")
        if not same:
            bad.append(k)
    return 1 if bad else 0


def cmd_fixtures(args) -> int:
    from .fixtures import FIXTURES, compare_golden, write_goldens

    if args.check:
        failed = 0
        for name in FIXTURES:
            r = compare_golden(name, Path(args.dir) if args.dir else None)
            print(f"{r.status.upper():4} {r.name}")
            if r.witness:
                print(r.witness)
            failed += not r.passed
        return 1 if failed else 0
    try:
        paths = write_goldens(Path(args.dir) if args.dir else None, force=args.force)
    except FileExistsError as exc:
        print(f"halfloop: {exc}", file=sys.stderr)
        return 2
    for p in paths:
        print(f"wrote {p}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    from . import __version__

    ap = argparse.ArgumentParser(prog="halfloop", description="Exact verification of twisted Gaudin and Dunkl models.")
    ap.add_argument("--version", action="version", version=f"halfloop {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def output_flags(p):
        p.add_argument("--json", metavar="PATH", help="also write the JSON report to PATH")
        p.add_argument("--format", choices=("text", "json"), default="text", help="stdout format")
        p.add_argument("--no-timings", action="store_true", help="omit wall times so reports are byte-identical")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("verify", help="run the exact verification suite for a model file")
    p.add_argument("model")
    p.add_argument("--truncation", type=int, default=None, help="series order for dunkl models")
    p.add_argument("--all-pairs", action="store_true", help="check every commutator pair, not only neighbours")
    output_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spectra", help="floating-point simultaneous diagonalization")
    p.add_argument("model")
    p.add_argument("--tol", type=float, default=1e-8)
    output_flags(p)
    p.set_defaults(func=cmd_spectra)

    p = sub.add_parser("oracle", help=argparse.SUPPRESS)
    p.add_argument("subop", choices=("hamiltonians", "compare"))
    p.add_argument("model")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("fixtures", help="regenerate or check the golden fixture files")
    p.add_argument("--dir", default=None, help="golden directory (default: the packaged one)")
    p.add_argument("--force", action="store_true", help="overwrite existing golden files")
    p.add_argument("--check", action="store_true", help="compare the engine against the goldens instead")
    p.set_defaults(func=cmd_fixtures)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ModelSyntaxError, ValidationError) as exc:
        print(f"halfloop: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"halfloop: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
