#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-

import argparse
import os
import sys

from ..errors import LabInputError
from ..inputs_to_lab import ExperimentConfig, read_config
from .experiments import run
from .scenarios import list_scenarios, scenario_names

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


def _parser():
    parser = argparse.ArgumentParser(
        prog="lab", description="Numerical experiments on Hadamard model spaces"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the experiment of a configuration file")
    p_run.add_argument("config", help="path of the key = value configuration")
    p_run.add_argument("--verbose", action="store_true", help="print progress")

    p_verify = sub.add_parser("verify", help="run the verify suite over the scenario catalog")
    p_verify.add_argument("--output", default=".", help="directory for verify.csv")
    p_verify.add_argument("--seed", type=int, default=0, help="random seed")
    p_verify.add_argument("--verbose", action="store_true", help="print progress")

    sub.add_parser("scenarios", help="print the scenario catalog")
    return parser


def _print_error(e):
    print("Configuration error:", file=sys.stderr)
    for line in e.args:
        print(f"  {line}", file=sys.stderr)


def main(argv=None):
    """
    Entry point of the ``lab`` command; returns the exit code
    """
    args = _parser().parse_args(argv)

    if args.command == "scenarios":
        sys.stdout.write(list_scenarios())
        return EXIT_PASS

    try:
        if args.command == "run":
            config = read_config(args.config, scenario_names())
            verbose = args.verbose or None
        else:
            if args.seed < 0:
                raise LabInputError(f"Option --seed: Must be non-negative, got {args.seed}.")
            config = ExperimentConfig(
                "verify-suite", seed=args.seed, output=os.path.join(args.output, "verify.csv")
            )
            verbose = args.verbose
        record = run(config, verbose=verbose)
    except (LabInputError, FileNotFoundError) as e:
        if isinstance(e, FileNotFoundError):
            print(f"Configuration error: {e}", file=sys.stderr)
        else:
            _print_error(e)
        return EXIT_CONFIG

    print(f"{'PASS' if record.passed else 'FAIL'}: " + ", ".join(f"{k}={v}" for k, v in record.verdicts.items()))
    return record.exit_code
