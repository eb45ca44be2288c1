"""Command-line entry point.

Exit status is 0 when every asserted envelope holds, 1 when a check fails and
2 for configuration or input errors.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from .errors import ConfigError, ProxFlowError
from .harness import OUTPUT_ENV, load_config, run_scenario, verify_all
from .measures import read_measure_csv
from .transport import wasserstein2

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

# subcommands that pin the experiment kind; ``simulate`` runs whatever the file declares
_PINNED = {"aggregate": "aggregate", "instability": "instability", "evi": "evi_check"}


def _scenario(args) -> int:
    cfg = load_config(args.config, seed_override=args.seed)
    want = _PINNED.get(args.command)
    if want is not None and cfg.kind != want:
        raise ConfigError([("experiment.kind", f"`{args.command}` expects kind {want!r}, file declares {cfg.kind!r}")])
    report = run_scenario(cfg, args.output_root)
    return EXIT_OK if report.passed else EXIT_FAIL


def _wasserstein(args) -> int:
    mu = read_measure_csv(args.a)
    nu = read_measure_csv(args.b)
    if mu.dim != nu.dim:
        raise ConfigError([("input", f"dimension mismatch: {mu.dim} vs {nu.dim}")])
    d, plan = wasserstein2(mu, nu)
    print(repr(d))
    if args.plan:
        with open(args.plan, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["i", "j", "mass"])
            for i, j, m in plan.entries():
                w.writerow([i, j, repr(m)])
    return EXIT_OK


def _verify(args) -> int:
    report = verify_all(corrupt_eta=args.corrupt_eta, quick=args.quick)
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="proxflow", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=None, help="override the seed in the config file")
    p.add_argument("--output-root", type=Path, default=None,
                   help=f"directory for run outputs (default: ${OUTPUT_ENV} or ./runs)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in (("simulate", "run the experiment declared in a config file"),
                       ("aggregate", "run an aggregation scenario"),
                       ("instability", "run the non-prox-regular separation scenario"),
                       ("evi", "spot-check the evolution variational inequality")):
        s = sub.add_parser(name, help=text)
        s.add_argument("config", type=Path)
        s.set_defaults(func=_scenario)
    s = sub.add_parser("wasserstein", help="exact d_W between two measure CSV files")
    s.add_argument("a", type=Path)
    s.add_argument("b", type=Path)
    s.add_argument("--plan", type=Path, help="write the optimal plan as i,j,mass rows")
    s.set_defaults(func=_wasserstein)
    s = sub.add_parser("verify", help="run every property suite with fixed seeds")
    s.add_argument("--corrupt-eta", type=float, default=None, metavar="FACTOR",
                   help="scale the declared constant of DiskWithBite (sanity check of the sampler)")
    s.add_argument("--quick", action="store_true", help="smaller sample counts")
    s.set_defaults(func=_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ProxFlowError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
