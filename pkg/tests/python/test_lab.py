#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-

import os

import pandas as pd
import pytest

from hadamardlab.errors import LabInputError
from hadamardlab.inputs_to_lab import ExperimentConfig
from hadamardlab.lab import OPERATIONS, get_scenario, list_scenarios, run, scenario_names
from hadamardlab.lab.cli import EXIT_CONFIG, EXIT_PASS, main
from hadamardlab.lab.experiments import RowSink, _run_scenario, coverage_frame
from hadamardlab.reports import REQUIRES_DEGENERACY

FLAG_CONFIG = "schema = 1\nexperiment = complex\nscenario = flag-Z1Z2Z3\noutput = {}\n"


def _write(fn, text):
    with open(fn, "w") as f:
        f.write(text)
    return fn


def test_catalog_listing():
    """
    The catalog text is stable and names every scenario.
    """
    text = list_scenarios()
    assert text == list_scenarios()
    for name in scenario_names():
        assert name in text
    assert "product-H2xH2-Z2" in scenario_names()
    with pytest.raises(KeyError):
        get_scenario("nowhere")


def test_cli_scenarios(capsys):
    """
    ``lab scenarios`` prints the catalog and succeeds.
    """
    assert main(["scenarios"]) == EXIT_PASS
    assert "heisenberg-chain" in capsys.readouterr().out


def test_cli_rejects_bad_config():
    """
    A malformed configuration exits with code 2 and writes nothing.
    """
    fn = _write("bad.in", "schema = 1\nexperiment = complex\nscenario = flag-Z1Z2Z3\nfoo = 3\n")
    assert main(["run", fn]) == EXIT_CONFIG
    assert not os.path.exists("lab.csv")
    assert main(["run", "missing.in"]) == EXIT_CONFIG
    assert main(["verify", "--seed", "-1"]) == EXIT_CONFIG


def test_unsupported_experiment():
    """
    Scenarios only run the experiments they list.
    """
    with pytest.raises(LabInputError, match="does not support"):
        run(ExperimentConfig("tracking", scenario="flag-Z1Z2Z3", output="t.csv"))
    assert not os.path.exists("t.csv")


def test_complex_run():
    """
    The flag scenario passes, flags its full flag and writes CSV and summary.
    """
    fn = _write("flag.in", FLAG_CONFIG.format("out/flag.csv"))
    assert main(["run", fn]) == EXIT_PASS
    df = pd.read_csv("out/flag.csv")
    assert list(df.columns) == ["scenario", "audit", "key", "measured", "bound", "verdict"]
    assert set(df["scenario"]) == {"flag-Z1Z2Z3"}
    assert (df["verdict"] == REQUIRES_DEGENERACY).sum() == 1
    assert os.path.isfile("out/flag_summary.txt")


def test_run_is_deterministic():
    """
    Two runs of the same configuration write byte-identical CSV files.
    """
    first = run(ExperimentConfig("complex", scenario="heisenberg-chain", output="a.csv"))
    second = run(ExperimentConfig("complex", scenario="heisenberg-chain", output="b.csv"))
    with open("a.csv", "rb") as a, open("b.csv", "rb") as b:
        assert a.read() == b.read()
    assert first.passed
    assert first.exit_code == 0
    assert first.config_hash != second.config_hash
    assert len(first.config_hash) == 64
    assert first.outputs == ["a.csv", "a_summary.txt"]
    assert first.verdicts == second.verdicts


def test_operation_registry():
    """
    Every module has operations and a complex run covers the complex ones.
    """
    assert len(OPERATIONS) == 7
    sink = RowSink()
    _run_scenario(get_scenario("heisenberg-chain"), ("complex",), ExperimentConfig("complex"), sink)
    cov = coverage_frame(sink)
    covered = set(cov.loc[cov["covered"] == 1, "operation"])
    assert {"center_of", "zeta_map", "build_class_complex", "half_dimension_report"} <= covered
    assert sink.passed


if __name__ == "__main__":
    test_catalog_listing()
    test_run_is_deterministic()
