"""``cogbeam`` command line: list, validate and run experiments.

Exit codes: 0 success, 2 configuration or usage error, 1 runtime error.
"""
import argparse
import logging
import sys

from .errors import ConfigError, InvalidInputError
from .harness import DESCRIPTIONS, EXPERIMENTS, default_spec, run_experiment
from .scenario import SystemConfig

log = logging.getLogger("cogbeam")


def _parse_floats(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="cogbeam", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list available experiments")

    val = sub.add_parser("validate", help="check a config file")
    val.add_argument("--config", required=True)

    run = sub.add_parser("run", help="run an experiment and write CSV")
    run.add_argument("experiment", choices=sorted(EXPERIMENTS))
    run.add_argument("--config", help="key = value config file (default: experiment preset)")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--trials", type=int)
    run.add_argument("--out", help="CSV path (default: stdout)")
    run.add_argument("--sweep", type=_parse_floats, help="comma-separated sweep values")
    run.add_argument("--gammas", type=_parse_floats, help="comma-separated gamma values")
    run.add_argument("--estimator", choices=["known_noise", "unknown_noise", "oracle"])
    run.add_argument("--constraint", choices=["peak", "average"], default="peak")
    run.add_argument("--estimate-rank", action="store_true",
                     help="split subspaces at the estimated rank instead of the true one")
    run.add_argument("--workers", type=int, default=1)
    return parser


def _spec_from_args(args):
    overrides = {"seed": args.seed, "constraint_mode": args.constraint,
                 "assume_true_rank": not args.estimate_rank}
    if args.config:
        overrides["config"] = SystemConfig.from_file(args.config)
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.sweep:
        values = args.sweep
        if default_spec(args.experiment).sweep_name in ("n", "tau"):
            values = tuple(int(v) if float(v).is_integer() else v for v in values)
        overrides["sweep_values"] = values
    if args.gammas:
        overrides["gammas"] = args.gammas
    if args.estimator:
        overrides["estimator"] = args.estimator
    return default_spec(args.experiment, **overrides).validate()


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        if args.command == "list":
            for name in sorted(EXPERIMENTS):
                print(f"{name}\t{DESCRIPTIONS[name]}")
            return 0
        if args.command == "validate":
            cfg = SystemConfig.from_file(args.config)
            print(f"{args.config}: ok ({cfg.pr_mode}, m_t={cfg.m_t}, d_eff<={cfg.d_1 + cfg.d_2})")
            return 0
        spec = _spec_from_args(args)
        log.info("running %s with %d trials", spec.name, spec.trials)
        table = run_experiment(spec, workers=args.workers)
        if args.out:
            table.write_csv(args.out)
        else:
            sys.stdout.write(table.to_csv())
        return 0
    except (ConfigError, InvalidInputError) as exc:
        key = f" [{exc.key}]" if getattr(exc, "key", None) else ""
        print(f"cogbeam: config error{key}: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"cogbeam: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
