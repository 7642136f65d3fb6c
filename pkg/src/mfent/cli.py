"""Command-line interface for sampling, measuring, predicting, and the
figure-reproduction pipelines.

Every artifact-writing run records its resolved configuration (including the
seed) in ``<out>.config.json`` so results can be reproduced bit for bit.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
from pathlib import Path

import numpy as np

from . import experiments, statistics, theory
from .ensembles import EnsembleSpec, load_moduli_csv
from .entanglement import Bipartition
from .errors import CapacityError, InvalidArgumentError, MissingMomentError, NumericError
from .statistics import ensemble_average, fit_scaling, fractal_dimension, write_csv, write_json

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_USAGE = 2

OUTDIR_ENV = "MFENT_OUTDIR"


def _out_path(value: str) -> Path:
    path = Path(value)
    if not path.is_absolute() and OUTDIR_ENV in os.environ:
        path = Path(os.environ[OUTDIR_ENV]) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _parse_range(text: str) -> list[int]:
    """'4..9' -> [4..9]; '6' -> [6]; '4,6,8' -> [4, 6, 8]."""
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in text.split(",")]


def _resolve_seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbits(32)
    return args.seed


def _build_spec(args, n_r: int) -> EnsembleSpec:
    moduli = None
    if args.ensemble == "exchangeable":
        if args.moduli_file:
            moduli = tuple(load_moduli_csv(args.moduli_file))
        else:
            moduli = tuple(np.full(2**n_r, 1.0 / 2**n_r))
    return EnsembleSpec(
        kind=args.ensemble,
        n_r=n_r,
        seed=args.seed,
        gamma=args.gamma if args.ensemble == "intermediate" else None,
        delta0=args.delta0,
        disorder=args.disorder,
        coupling=args.coupling,
        moduli=moduli,
        shuffle=args.shuffle,
        randomize_phases=args.randomize_phases,
    )


def _write_config(out: Path, args, command: str) -> None:
    config = {"command": command}
    for key, value in sorted(vars(args).items()):
        if key == "func":
            continue
        config[key] = str(value) if isinstance(value, Path) else value
    with open(out.with_suffix(out.suffix + ".config.json"), "w") as fh:
        json.dump(config, fh, indent=2)


def _add_ensemble_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--ensemble", choices=("cue", "intermediate", "manybody", "exchangeable"),
                        default="cue")
    parser.add_argument("--gamma", default="1/3", help="exact rational, e.g. 1/3 (intermediate)")
    parser.add_argument("--delta0", type=float, default=1.0, help="many-body energy scale")
    parser.add_argument("--disorder", type=float, default=1.0, help="many-body disorder width")
    parser.add_argument("--coupling", type=float, default=1.5, help="many-body coupling bound J")
    parser.add_argument("--moduli-file", default=None,
                        help="CSV (one value per line) of moduli^2 for the exchangeable kind")
    parser.add_argument("--shuffle", action=argparse.BooleanOptionalAction, default=False)
    parser.add_argument("--randomize-phases", action=argparse.BooleanOptionalAction, default=False)
    parser.add_argument("--seed", type=int, default=None)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_theory(args) -> int:
    if args.quantity == "page":
        value = theory.page_entropy(args.N)
    elif args.quantity == "tangle":
        value = theory.mean_tangle_pred(args.N, args.p2)
    elif args.quantity == "linear":
        value = theory.mean_linear_entropy_pred(args.N, args.nu, args.p2)
    elif args.quantity == "entropy1":
        value = theory.first_order_entropy_pred(args.N, args.nu, args.p2)
    else:  # taun
        table = statistics.MomentTable({
            (2,): statistics.Stat(args.p2, 0.0, 0),
            (3,): statistics.Stat(args.p3, 0.0, 0),
            (4,): statistics.Stat(args.p4, 0.0, 0),
            (2, 2): statistics.Stat(args.p2sq if args.p2sq is not None else args.p2**2, 0.0, 0),
        })
        value = theory.mean_tangle_power_pred(args.n, args.N, table)
    print(f"{value:.6f}")
    return EXIT_OK


def cmd_sample(args) -> int:
    _resolve_seed(args)
    spec = _build_spec(args, args.nr)
    states = []
    for batch in spec.sample_batches(args.count):
        states.extend(batch)
    payload = {
        "spec": json.loads(spec.to_json()),
        "states": [[[z.real, z.imag] for z in psi] for psi in states],
    }
    if args.out:
        out = _out_path(args.out)
        with open(out, "w") as fh:
            json.dump(payload, fh)
        _write_config(out, args, "sample")
        print(f"wrote {len(states)} states to {out}")
    else:
        print(json.dumps(payload))
    return EXIT_OK


def _measure_rows(args, sizes) -> list[tuple]:
    labels = args.observables.split(",")
    rows = []
    for n_r in sizes:
        spec = _build_spec(args, n_r)
        bip = Bipartition.first(n_r, args.nu)
        stats = ensemble_average(spec, labels, args.samples, bip)
        for lbl in labels:
            st = stats[lbl]
            rows.append((n_r, lbl, st.mean, st.stderr, st.count))
    return rows


def _emit_rows(args, rows, command: str) -> None:
    if args.out:
        out = _out_path(args.out)
        if args.format == "json" or out.suffix == ".json":
            write_json(out, rows)
        else:
            write_csv(out, rows)
        _write_config(out, args, command)
        print(f"wrote {len(rows)} rows to {out}")
    for row in rows:
        print(f"n_r={row[0]} {row[1]}: {row[2]:.6g} +/- {row[3]:.2g} ({row[4]} samples)")


def cmd_measure(args) -> int:
    _resolve_seed(args)
    _emit_rows(args, _measure_rows(args, [int(args.nr)]), "measure")
    return EXIT_OK


def cmd_scan(args) -> int:
    _resolve_seed(args)
    _emit_rows(args, _measure_rows(args, _parse_range(args.nr)), "scan")
    return EXIT_OK


def cmd_fit(args) -> int:
    rows = statistics.read_csv(args.input)
    selected = [r for r in rows if r["observable"] == args.observable]
    if len(selected) < 3:
        raise InvalidArgumentError(
            f"need >= 3 rows of observable {args.observable!r}, found {len(selected)}"
        )
    selected.sort(key=lambda r: r["n_r"])
    fit = fit_scaling(
        [r["n_r"] for r in selected],
        [r["mean"] for r in selected],
        [r["stderr"] for r in selected],
        weighted=args.weighted,
    )
    print(f"slope = {fit.slope:.4f} +/- {fit.slope_stderr:.4f} (exponent of N)")
    if args.q is not None:
        print(f"D_{args.q} = {fractal_dimension(args.q, fit):.4f}")
    return EXIT_OK


def cmd_validate(args) -> int:
    seed = args.seed if args.seed is not None else 0
    cases, failures = experiments.validate_oracle(seed=seed, tolerance=args.tolerance)
    worst = max(c.relative_error for c in cases)
    print(f"checked {len(cases)} oracle-vs-theory cases; worst relative error {worst:.3e}")
    for case in failures:
        print(
            f"MISMATCH N={case.size} n={case.n} trial={case.trial}: "
            f"oracle={case.oracle!r} predicted={case.predicted!r}"
        )
    if failures:
        return EXIT_NUMERIC
    print("all tangle-power predictions match the brute-force oracle")
    return EXIT_OK


def cmd_fig1(args) -> int:
    _resolve_seed(args)
    sizes = _parse_range(args.nr)
    points = experiments.fig1_pipeline(args.ensemble, sizes, args.samples, args.seed, args.gamma)
    rows = []
    for p in points:
        rows.append((p.n_r, f"S[nu={p.nu}]", p.mean_entropy.mean, p.mean_entropy.stderr, p.mean_entropy.count))
        rows.append((p.n_r, f"S1_pred[nu={p.nu}]", p.s1_pred, 0.0, p.mean_entropy.count))
        rows.append((p.n_r, f"xi[nu={p.nu}]", p.mean_ipr.mean, p.mean_ipr.stderr, p.mean_ipr.count))
    _emit_rows(args, rows, "fig1")
    return EXIT_OK


def cmd_fig2(args) -> int:
    _resolve_seed(args)
    sizes = _parse_range(args.nr)
    report = experiments.fig2_pipeline(args.gamma, sizes, args.samples, args.seed)
    rows = []
    for r in report.results:
        for lbl in ("S", "p2", "p2sq"):
            st = r.stats[lbl]
            rows.append((r.n_r, lbl, st.mean, st.stderr, st.count))
        rows.append((r.n_r, "S1_pred", r.s1_pred, 0.0, report.samples))
        rows.append((r.n_r, "S2_pred", r.s2_pred, 0.0, report.samples))
        rows.append((r.n_r, "S2_pred_factorized", r.s2_pred_factorized, 0.0, report.samples))
        rows.append((r.n_r, "dev_S1", r.deviation("s1"), 0.0, report.samples))
        rows.append((r.n_r, "dev_S2", r.deviation("s2"), 0.0, report.samples))
    _emit_rows(args, rows, "fig2")
    if report.s1_fit is not None:
        print(f"gamma={report.gamma}: 1-<S1>/<S> ~ N^({report.s1_fit.slope:.3f} "
              f"+/- {report.s1_fit.slope_stderr:.3f})")
    else:
        print(f"gamma={report.gamma}: first-order deviation not positive at all "
              f"sizes; no scaling fit (increase --samples)")
    if report.s2_fit is not None:
        print(f"gamma={report.gamma}: 1-<S2>/<S> ~ N^({report.s2_fit.slope:.3f} "
              f"+/- {report.s2_fit.slope_stderr:.3f})")
    print(f"gamma={report.gamma}: <p2^2> ~ N^({report.p2sq_fit.slope:.3f} "
          f"+/- {report.p2sq_fit.slope_stderr:.3f})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mfent",
                                     description="entanglement of random states: "
                                                 "measures, predictions, scaling")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theory", help="evaluate a closed-form prediction")
    p.add_argument("quantity", choices=("page", "tangle", "linear", "entropy1", "taun"))
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--nu", type=int, default=1)
    p.add_argument("--n", type=int, default=1, help="tangle power (taun)")
    p.add_argument("--p2", type=float, default=None)
    p.add_argument("--p3", type=float, default=None)
    p.add_argument("--p4", type=float, default=None)
    p.add_argument("--p2sq", type=float, default=None)
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("sample", help="draw states and dump them as JSON")
    _add_ensemble_args(p)
    p.add_argument("--nr", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sample)

    for name, helptext in (("measure", "average observables at one size"),
                           ("scan", "average observables over a size range")):
        p = sub.add_parser(name, help=helptext)
        _add_ensemble_args(p)
        p.add_argument("--nr", required=True,
                       help="qubit count (measure) or range like 4..8 (scan)")
        p.add_argument("--nu", type=int, default=1)
        p.add_argument("--samples", type=int, default=10000)
        p.add_argument("--observables", default="p2,xi,tau,S,S_L")
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.set_defaults(func=cmd_measure if name == "measure" else cmd_scan)

    p = sub.add_parser("fit", help="fit the size scaling of one observable in an artifact")
    p.add_argument("--input", required=True)
    p.add_argument("--observable", required=True)
    p.add_argument("--q", type=float, default=None, help="report D_q for this q")
    p.add_argument("--weighted", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("validate", help="run the oracle-vs-theory exactness suite")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("fig1", help="mean entropy vs IPR overlay data")
    _add_ensemble_args(p)
    p.add_argument("--nr", default="4..8")
    p.add_argument("--samples", type=int, default=20000, help="samples per size")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_fig1)

    p = sub.add_parser("fig2", help="entropy truncation scaling for the intermediate ensemble")
    p.add_argument("--gamma", default="1/3")
    p.add_argument("--nr", default="4..9")
    p.add_argument("--samples", type=int, default=100000, help="samples per size")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_fig2)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidArgumentError, CapacityError, MissingMomentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
