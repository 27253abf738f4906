"""Command-line entry point: ``schattenp <subcommand> [options]``.

Exit status is 0 on success, 2 when a verified bound is violated and 1 on
usage or configuration errors.
"""

import argparse
import json
import sys

from .harness import ConfigError, ExperimentConfig, run

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2

_SUBCOMMANDS = {
    "thresholds": ("thresholds", "tabulate RIP thresholds for a p grid"),
    "curve": ("curve", "threshold curves and their crossing point"),
    "phase": ("phase", "pSNM vs NNM success rates over a measurement grid"),
    "verify-bounds": ("verify-bounds", "check the stability bounds on gated instances"),
    "nsp": ("nsp", "null space property falsification runs"),
    "rip": ("rip", "restricted isometry constants, exact and estimated"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _list_of(kind):
    def parse(text):
        try:
            return tuple(kind(v) for v in text.replace(" ", ",").split(",") if v)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a comma-separated list, got {text!r}")
    return parse


def build_parser():
    parser = _Parser(prog="schattenp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in _SUBCOMMANDS.items():
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("--config", help="JSON experiment config")
        sp.add_argument("--seed", type=int, help="master seed (non-negative integer)")
        sp.add_argument("--out", help="output directory (default: results/<subcommand>)")
        sp.add_argument("--trials", type=int, help="trials per cell")
        sp.add_argument("--p", type=_list_of(float), help="p grid, e.g. 0.5,0.8")
        sp.add_argument("--rank", type=_list_of(int), help="ranks or sparsities, e.g. 1,2")
        sp.add_argument("--measurements", type=_list_of(int), help="measurement counts")
    return parser


def _config_from_args(args):
    doc = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise ConfigError(f"{args.config}: expected a JSON object")
    kind = _SUBCOMMANDS[args.command][0]
    if doc.get("kind", kind) != kind:
        raise ConfigError(f"config kind {doc['kind']!r} does not match subcommand {args.command!r}")
    doc["kind"] = kind
    overrides = {"seed": args.seed, "trials": args.trials, "p_grid": args.p,
                 "ranks": args.rank, "measurements": args.measurements}
    doc.update({k: v for k, v in overrides.items() if v is not None})
    if args.rank is not None and kind == "curve" and "pairs" not in doc:
        doc["pairs"] = [(r, r + 1) for r in args.rank]
    doc["out"] = args.out or doc.get("out") or f"results/{args.command}"
    return ExperimentConfig.from_dict(doc)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        result = run(config)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"schattenp {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for path in sorted(result.files):
        print(f"wrote {config.out}/{path}")
    summary = {k: v for k, v in result.summary.items() if k != "cells"}
    print(json.dumps(summary, indent=2, sort_keys=True, default=str))
    if result.violations:
        print(f"{result.violations} bound violation(s)", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
