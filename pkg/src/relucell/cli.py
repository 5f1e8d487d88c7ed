"""Command-line entry points.

    relucell generate  --seed S --widths 3,4,4,2 --out model.json
    relucell enumerate --model M [--domain D] --mode serial|parallel|master|worker
                       [--workers K] [--layer1 exh|inc] --out DIR [--resume]
                       [--host H] [--port P]
    relucell verify    --model M --report DIR [--samples N] [--seed S]
    relucell analyze   --report DIR --which counts|dims|times|decay|accuracy
                       [--model M] [--dataset F] [--out DIR]

Exit codes: 0 success, 2 usage error, 3 verification failure, 4 solver
failure. All tabular outputs are comma-separated with a header row.
"""

import argparse
import csv
import math
import os
import sys

from . import analysis, distrib, generators, modelio, reporting, verify
from .engine import layerwise_serial, par_layerwise1
from .witness import SolverError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFY = 3
EXIT_SOLVER = 4


class VerificationFailure(Exception):
    pass


def _parse_widths(text):
    try:
        widths = [int(w) for w in text.split(",")]
    except ValueError:
        raise ValueError(f"widths must be comma-separated integers, got {text!r}")
    if len(widths) < 3 or any(w < 1 for w in widths):
        raise ValueError("widths must be n0,n1[,...],m with every entry >= 1")
    return widths


def cmd_generate(args):
    widths = _parse_widths(args.widths)
    if args.style == "concurrent":
        mlp = generators.concurrent_first_layer_mlp(
            widths[1], widths[0], args.seed, deep_widths=tuple(widths[2:-1]),
            m=widths[-1])
    else:
        mlp = generators.random_mlp(widths, args.seed,
                                    centered=args.style == "centered")
    modelio.save_weights(mlp, args.out)
    print(f"wrote {args.out} (widths {mlp.widths}, hash {modelio.model_hash(mlp)[:12]})")
    return EXIT_OK


def cmd_enumerate(args):
    mlp = modelio.load_weights(args.model)
    domain = modelio.resolve_domain(args.domain, mlp.input_dim)

    if args.mode == "worker":
        if args.port is None:
            raise ValueError("--mode worker needs --port (and usually --host)")
        completed = distrib.run_worker(mlp, domain, args.host, args.port)
        print(f"worker finished: {completed} tasks")
        return EXIT_OK

    if args.out is None:
        raise ValueError("--out DIR is required for serial/parallel/master modes")

    if args.mode == "serial":
        report = layerwise_serial(mlp, domain, layer1_subroutine=args.layer1,
                                  run_dir=args.out, resume=args.resume)
    elif args.mode == "parallel":
        report = par_layerwise1(mlp, domain, workers=args.workers,
                                run_dir=args.out, resume=args.resume)
    elif args.mode == "master":
        if args.port is None:
            raise ValueError("--mode master needs --port")
        report = distrib.serve_master(mlp, domain, args.out, host=args.host,
                                      port=args.port, resume=args.resume)
    else:
        raise ValueError(f"unknown mode {args.mode!r}")

    print(f"{report.total_cells} cells; per-layer counts {report.layer_counts}; "
          f"report in {args.out}")
    return EXIT_OK


def cmd_verify(args):
    mlp = modelio.load_weights(args.model)
    report = reporting.read_report(args.report)
    if report.config.get("model_hash") != modelio.model_hash(mlp):
        raise ValueError("report was produced from a different model")
    domain = modelio.resolve_domain(args.domain, mlp.input_dim)
    result = verify.verify_report(mlp, domain, report, samples=args.samples,
                                  seed=args.seed)
    print(result.summary())
    if not result.ok:
        raise VerificationFailure()
    return EXIT_OK


def _write_csv(path, header, rows):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {path}")


def _collect_reports(report_dir):
    """The report at report_dir, or every report in its subdirectories."""
    if os.path.exists(os.path.join(report_dir, "report.json")):
        return [(os.path.basename(os.path.normpath(report_dir)) or report_dir,
                 reporting.read_report(report_dir))]
    found = []
    for name in sorted(os.listdir(report_dir)):
        sub = os.path.join(report_dir, name)
        if os.path.isdir(sub) and os.path.exists(os.path.join(sub, "report.json")):
            found.append((name, reporting.read_report(sub)))
    if not found:
        raise ValueError(f"no report.json under {report_dir}")
    return found


def cmd_analyze(args):
    out_dir = args.out or os.path.join(args.report, "analysis")
    reports = _collect_reports(args.report)

    if args.which == "counts":
        rows = [(name, rep.config.get("model_hash", "")[:12], rep.total_cells,
                 rep.config.get("wall_time"), rep.config.get("lp_calls"))
                for name, rep in reports]
        _write_csv(os.path.join(out_dir, "counts.csv"),
                   ["run", "model_hash", "total_cells", "wall_time_seconds", "lp_calls"],
                   rows)

    elif args.which == "dims":
        name, rep = reports[0]
        stats = analysis.subcell_histogram(rep)
        if not stats.has_histogram:
            raise ValueError("dimension histogram needs a network with >= 2 hidden layers")
        rows = [(b.dimension, b.n_cells, b.total_subcells,
                 f"{b.mean_subcells:.6f}",
                 "" if math.isnan(b.mean_task_time) else f"{b.mean_task_time:.6f}")
                for b in stats.bins.values()]
        _write_csv(os.path.join(out_dir, "dims.csv"),
                   ["dimension", "n_cells", "total_subcells", "mean_subcells",
                    "mean_task_time_seconds"],
                   rows)

    elif args.which == "times":
        name, rep = reports[0]
        stats = analysis.task_time_stats(rep)
        _write_csv(os.path.join(out_dir, "times.csv"),
                   ["n_tasks", "mean_seconds", "std_seconds", "skew", "zero_variance"],
                   [(stats.n, f"{stats.mean:.6f}", f"{stats.std:.6f}",
                     f"{stats.skew:.6f}", int(stats.zero_variance))])

    elif args.which == "decay":
        point_rows = []
        fit_points = []
        for name, rep in reports:
            for layer, width, ratio in analysis.max_subcell_ratios(rep):
                point_rows.append((name, layer, width, f"{ratio:.8f}"))
                if layer == 2:
                    fit_points.append((width, ratio))
        _write_csv(os.path.join(out_dir, "decay_points.csv"),
                   ["run", "layer", "width", "max_subcell_ratio"], point_rows)
        fit = analysis.fit_decay(fit_points)
        rmse = float((fit.residuals ** 2).mean() ** 0.5)
        _write_csv(os.path.join(out_dir, "decay_fit.csv"),
                   ["amplitude", "rate", "n_points", "rmse_log"],
                   [(f"{fit.amplitude:.8f}", f"{fit.rate:.8f}",
                     len(fit_points), f"{rmse:.8f}")])

    elif args.which == "accuracy":
        if args.model is None or args.dataset is None:
            raise ValueError("accuracy analysis needs --model and --dataset")
        name, rep = reports[0]
        mlp = modelio.load_weights(args.model)
        inputs, labels = modelio.load_dataset(args.dataset)
        acc = analysis.accuracy_eval(mlp, inputs, labels)
        _write_csv(os.path.join(out_dir, "accuracy.csv"),
                   ["model_hash", "total_cells", "accuracy"],
                   [(rep.config.get("model_hash", "")[:12], rep.total_cells,
                     f"{acc:.6f}")])
    else:
        raise ValueError(f"unknown analysis {args.which!r}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="relucell",
                                     description="Exact ReLU activation-region enumeration")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a seeded random weights file")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--widths", required=True,
                     help="comma-separated n0,n1[,...],m")
    gen.add_argument("--style", choices=["centered", "plain", "concurrent"],
                     default="centered")
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_generate)

    enum_p = sub.add_parser("enumerate", help="enumerate activation regions")
    enum_p.add_argument("--model", required=True)
    enum_p.add_argument("--domain", default=None,
                        help="halfspace file; default unit box of the input dimension")
    enum_p.add_argument("--mode", choices=["serial", "parallel", "master", "worker"],
                        default="serial")
    enum_p.add_argument("--workers", type=int, default=2)
    enum_p.add_argument("--layer1", choices=["exh", "inc"], default="exh")
    enum_p.add_argument("--out", default=None, help="run directory")
    enum_p.add_argument("--resume", action="store_true",
                        help="skip tasks already in the run directory manifest")
    enum_p.add_argument("--host", default="127.0.0.1")
    enum_p.add_argument("--port", type=int, default=None)
    enum_p.set_defaults(func=cmd_enumerate)

    ver = sub.add_parser("verify", help="sampling soundness + re-witnessing of a report")
    ver.add_argument("--model", required=True)
    ver.add_argument("--report", required=True)
    ver.add_argument("--domain", default=None)
    ver.add_argument("--samples", type=int, default=10000)
    ver.add_argument("--seed", type=int, default=0)
    ver.set_defaults(func=cmd_verify)

    ana = sub.add_parser("analyze", help="tabular analyses of finished reports")
    ana.add_argument("--report", required=True,
                     help="run directory, or a directory of run directories")
    ana.add_argument("--which", required=True,
                     choices=["counts", "dims", "times", "decay", "accuracy"])
    ana.add_argument("--model", default=None)
    ana.add_argument("--dataset", default=None)
    ana.add_argument("--out", default=None)
    ana.set_defaults(func=cmd_analyze)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VerificationFailure:
        return EXIT_VERIFY
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
