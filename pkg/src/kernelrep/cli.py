"""Command-line entry point: run experiments, generate datasets, validate configs."""

import argparse
import csv
import os
import sys

from . import datasets as ds
from .harness import ExperimentConfig, run_experiment, write_aggregates, write_results

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the CLI contract reserves 2 for
    # runtime failures, so remap usage errors to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_CONFIG)


def _build_parser():
    parser = _Parser(prog="kernelrep", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment from a JSON config")
    run.add_argument("--config", required=True, help="path to the JSON config")
    run.add_argument("--out", default=None, help="output directory (overrides config)")
    run.add_argument("--seed-override", default=None,
                     help="comma-separated seeds replacing the config's list")
    run.add_argument("--quiet", action="store_true", help="suppress per-cell progress lines")

    gen = sub.add_parser("generate", help="write a synthetic dataset to CSV")
    gen.add_argument("--dataset", required=True, choices=sorted(ds.GENERATORS))
    gen.add_argument("--out", required=True, help="output CSV path")
    gen.add_argument("--n", type=int, default=200)
    gen.add_argument("--seed", type=int, default=0)

    val = sub.add_parser("validate-config", help="check a JSON config and exit")
    val.add_argument("config", help="path to the JSON config")
    return parser


def _cmd_run(args):
    try:
        config = ExperimentConfig.from_json(args.config)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        config.out_dir = args.out
    if args.seed_override:
        try:
            config.seeds = tuple(int(s) for s in args.seed_override.split(","))
        except ValueError:
            print(f"config error: bad seed list {args.seed_override!r}", file=sys.stderr)
            return EXIT_CONFIG
        if not config.seeds:
            print("config error: empty seed override", file=sys.stderr)
            return EXIT_CONFIG

    log = (lambda msg: None) if args.quiet else (lambda msg: print(msg, file=sys.stderr))
    try:
        records, aggregates = run_experiment(config, log=log)
        results_path = os.path.join(config.out_dir, "results.csv")
        aggregate_path = os.path.join(config.out_dir, "aggregate.csv")
        write_results(records, results_path)
        write_aggregates(aggregates, aggregate_path)
    except Exception as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    log(f"wrote {results_path} and {aggregate_path}")
    return EXIT_OK


def _cmd_generate(args):
    try:
        data = ds.GENERATORS[args.dataset](n=args.n, seed=args.seed)
    except (ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        directory = os.path.dirname(os.path.abspath(args.out))
        os.makedirs(directory, exist_ok=True)
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"f{j}" for j in range(data.n_features)] + ["label"])
            for x, label in zip(data.X, data.y):
                writer.writerow([repr(float(v)) for v in x] + [str(int(label))])
    except OSError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _cmd_validate(args):
    try:
        ExperimentConfig.from_json(args.config)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print("config ok")
    return EXIT_OK


def cli_main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_CONFIG
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "generate":
        return _cmd_generate(args)
    return _cmd_validate(args)


def main():
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
