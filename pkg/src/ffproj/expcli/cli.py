"""Command-line entry point: ``ffproj <subcommand> ...``.

Exit codes: 0 success, 1 a verification check failed, 2 invalid input,
3 size guard exceeded (raise it with FFPROJ_MAX_POINTS or --override).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .. import errors
from ..constructions import parse_construct
from ..ffourier import GridFunction, dft, dual_oracle, high_low_split, idft, plancherel_residual, subspace_indicator
from ..fpcore import decode_point
from ..grassmann import dual, enumerate_subspaces, format_subspace, gaussian_binomial, parse_subspace
from ..projlab import PointSet, exceptional_set, project
from .sweep import load_config, records_to_csv, records_to_json, run_sweep, summarize
from .verify import verify_falconer, verify_hyper_lemmas, verify_theorem


def _load_set(args) -> PointSet:
    if bool(args.points) == bool(args.construct):
        raise errors.InvalidInputError("give exactly one of --points FILE or --construct SPEC")
    if args.points:
        return PointSet.load(args.points, override=args.override)
    return parse_construct(args.construct).build().A


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_enumerate(args) -> int:
    if args.count:
        print(gaussian_binomial(args.n, args.k, args.p))
        return 0
    for v in enumerate_subspaces(args.p, args.n, args.k, override=args.override):
        line = format_subspace(v)
        if args.dual:
            line += "\t" + format_subspace(dual(v))
        print(line)
    return 0


def cmd_project(args) -> int:
    A = _load_set(args)
    v = parse_subspace(args.subspace, A.p, A.n)
    planes = sorted(project(v, A), key=lambda w: w.rep)
    _emit({
        "subspace": format_subspace(v),
        "count": len(planes),
        "reps": [list(decode_point(w.rep, A.p, A.n)) for w in planes],
    })
    return 0


def cmd_exceptional(args) -> int:
    A = _load_set(args)
    report = exceptional_set(A, args.k, args.s, override=args.override, workers=args.workers)
    _emit(report.to_dict())
    return 0


def cmd_fourier_check(args) -> int:
    p, n = args.p, args.n
    errors.check_points(p, n, args.override)
    worst_indicator = 0.0
    mismatches = 0
    for k in range(n + 1):
        for v in enumerate_subspaces(p, n, k, override=args.override):
            d = dual(v)
            want = np.zeros(p**n)
            want[d.points()] = p**k
            worst_indicator = max(worst_indicator, float(np.max(np.abs(dft(subspace_indicator(v)).values - want))))
            mismatches += dual_oracle(v, override=args.override) != d
    rng = np.random.default_rng(args.seed)
    worst_plancherel = worst_roundtrip = worst_mean = 0.0
    for _ in range(args.samples):
        f = GridFunction(p, n, rng.normal(size=p**n) + 1j * rng.normal(size=p**n))
        scale = f.norm2()
        worst_plancherel = max(worst_plancherel, plancherel_residual(f) / scale)
        err = np.max(np.abs(idft(dft(f)).values - f.values)) / (p**n * np.max(np.abs(f.values)))
        worst_roundtrip = max(worst_roundtrip, float(err))
        worst_mean = max(worst_mean, float(abs(dft(high_low_split(f)[1]).values[0])))
    ok = worst_indicator < 1e-6 and mismatches == 0 and worst_plancherel < 1e-8 and worst_roundtrip < 1e-9 and worst_mean < 1e-6
    _emit({
        "p": p, "n": n, "indicator_max_error": worst_indicator, "dual_mismatches": mismatches,
        "plancherel_max_relative_residual": worst_plancherel, "roundtrip_max_relative_error": worst_roundtrip,
        "high_part_max_zero_mode": worst_mean, "ok": ok,
    })
    return 0 if ok else 1


def cmd_construct(args) -> int:
    res = parse_construct(args.construct).build()
    text = res.A.to_text()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    info = {
        "note": res.note,
        "cardinality": res.A.cardinality,
        "k": res.k,
        "predicted_directions": [format_subspace(v) for v in res.predicted_directions],
        "predicted_count_bound": res.predicted_count_bound,
    }
    print(json.dumps(info), file=sys.stderr if not args.out else sys.stdout)
    return 0


def cmd_verify(args) -> int:
    A = _load_set(args)
    report = exceptional_set(A, args.k, args.s, override=args.override, workers=args.workers)
    out: dict = {}
    if args.what in ("theorem", "all"):
        out["theorem"] = verify_theorem(A, args.k, args.s, report=report).as_dict()
    if args.what in ("falconer", "all"):
        out["falconer"] = verify_falconer(A, args.k, args.s, report=report)._asdict()
    if args.what in ("hyper", "all"):
        out["hyper"] = verify_hyper_lemmas(A, args.k, args.s, report=report).to_dict()
    _emit(out)
    return 0


def cmd_sweep(args) -> int:
    records = run_sweep(load_config(args.config), workers=args.workers)
    csv_text = records_to_csv(records)
    summary = summarize(records)
    if args.csv:
        Path(args.csv).write_text(csv_text)
    if args.json:
        Path(args.json).write_text(records_to_json(records, summary))
    if not args.csv and not args.json:
        sys.stdout.write(csv_text)
    else:
        _emit(summary)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ffproj", description="Exceptional sets of projections over F_p^n")
    ap.add_argument("--override", action="store_true", help="ignore the exhaustive-scan size guard")
    sub = ap.add_subparsers(dest="command", required=True)

    def set_source(sp):
        sp.add_argument("--points", help="point-set file ('p n' header, one point per line)")
        sp.add_argument("--construct", help="construction, e.g. st_product:p=101,a=1.2,s=0.8")

    sp = sub.add_parser("enumerate", help="stream G(k, F_p^n) in canonical order")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--count", action="store_true", help="print only the Gaussian binomial")
    sp.add_argument("--dual", action="store_true", help="append the dual subspace")
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("project", help="pi_V(A) for one subspace V")
    set_source(sp)
    sp.add_argument("--subspace", required=True, help="RREF rows, e.g. '1,0,2;0,1,1'")
    sp.set_defaults(func=cmd_project)

    sp = sub.add_parser("exceptional", help="full exceptional-set report as JSON")
    set_source(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_exceptional)

    sp = sub.add_parser("fourier-check", help="indicator, Plancherel and high-low checks")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_fourier_check)

    sp = sub.add_parser("construct", help="emit a constructed point set")
    sp.add_argument("--construct", required=True)
    sp.add_argument("--out", help="write the point set here instead of stdout")
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("verify", help="theorem / Falconer / slice-lemma checks")
    set_source(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--what", choices=("theorem", "falconer", "hyper", "all"), default="all")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sweep", help="run a config file, emit CSV/JSON")
    sp.add_argument("--config", required=True)
    sp.add_argument("--csv")
    sp.add_argument("--json")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except errors.GuardExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (errors.InvalidInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
