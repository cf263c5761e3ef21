#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-

import numpy as np
import pytest

from hadamardlab.errors import LabInputError, LabInputWarning
from hadamardlab.inputs_to_lab import format_instances, read_config, read_instances
from hadamardlab.LabInputParser import GroupInstanceParser, LabInputParser
from hadamardlab.lab.scenarios import scenario_names


def _write(fn, text):
    with open(fn, "w") as f:
        f.write(text)
    return fn


def test_valid_config():
    """
    Comments and blank lines are skipped, defaults fill the remaining keys.
    """
    fn = _write(
        "lab.in",
        "# simplex run\n\nSchema = 1\nexperiment = Simplex\n"
        "scenario = H2-parabolic-cusp\nr_schedule = 10, 20, 40\nOutput = Runs/Cusp.csv\n",
    )
    config = read_config(fn, scenario_names())
    assert config.experiment == "simplex"
    assert config.scenario == "H2-parabolic-cusp"
    assert config.r_schedule == (10.0, 20.0, 40.0)
    assert config.grid == 8
    assert config.output == "Runs/Cusp.csv"
    assert config.digest() == read_config(fn, scenario_names()).digest()
    assert config.digest() != config.replace(seed=1).digest()


def test_unknown_and_duplicate_keys():
    """
    Unknown and repeated keys are rejected with their line number.
    """
    fn = _write("unknown.in", "schema = 1\nexperiment = simplex\nfoo = 1\n")
    with pytest.raises(LabInputError, match="Line 3: Parameter 'foo' does not exist"):
        LabInputParser().parse(fn)
    fn = _write("twice.in", "schema = 1\ngrid = 2\ngrid = 3\n")
    with pytest.raises(LabInputError, match="already set on line 2"):
        LabInputParser().parse(fn)
    fn = _write("broken.in", "schema = 1\nexperiment simplex\n")
    with pytest.raises(LabInputError) as e:
        LabInputParser().parse(fn)
    assert e.value.with_traceback


def test_missing_schema_and_invalid_values():
    """
    All validation messages are collected before failing.
    """
    fn = _write("bad.in", "experiment = simplex\ngrid = -1\nr_schedule = 20, 10\n")
    with pytest.raises(LabInputError) as e:
        LabInputParser().parse(fn)
    messages = e.value.args
    assert "Parameter 'schema' is required." in messages
    assert any("'grid': Must be positive" in m for m in messages)
    assert any("'r_schedule': Must be strictly increasing" in m for m in messages)


def test_config_conversion_errors():
    """
    Unknown scenarios and short radius schedules are configuration errors.
    """
    fn = _write("scenario.in", "schema = 1\nexperiment = simplex\nscenario = nowhere\n")
    with pytest.raises(LabInputError, match="not in the catalog"):
        read_config(fn, scenario_names())
    fn = _write(
        "short.in", "schema = 1\nexperiment = simplex\nscenario = H2-parabolic-cusp\nr_schedule = 10, 20\n"
    )
    with pytest.raises(LabInputError, match="at least 3 radii"):
        read_config(fn, scenario_names())
    with pytest.raises(FileNotFoundError):
        read_config("missing.in")


def test_verify_suite_ignores_scenario():
    """
    A scenario given to the verify suite only raises a warning.
    """
    fn = _write("verify.in", "schema = 1\nexperiment = verify-suite\nscenario = flag-Z1Z2Z3\n")
    with pytest.warns(LabInputWarning):
        config = read_config(fn, scenario_names())
    assert config.scenario == ""


INSTANCES = """\
! Heisenberg chain
group H 3
generator 1 0 0
generator 0 0 1
embed Hbig H 4 1
group Z 4 radius 3
generator 0 0 1 0 0 0
power Zsq Z 2
chain Zsq Z ambient 6
chain H
"""


def test_group_instances():
    """
    Groups, derived groups and chains are read into matrix groups.
    """
    fn = _write("groups.in", INSTANCES)
    inst = read_instances(fn)
    assert sorted(inst.groups) == ["h", "hbig", "z", "zsq"]
    assert inst.chains == [["zsq", "z"], ["h"]]
    assert inst.ambient == [6, None]
    assert inst.groups["z"].radius == 3
    assert np.array_equal(inst.groups["zsq"].generators[0][0], [1, 0, 0, 2])
    big = inst.groups["hbig"].generators[0]
    assert big.shape == (4, 4)
    assert big[1, 2] == 1


def test_format_instances_is_canonical():
    """
    Formatted instances parse back to the same text.
    """
    fn = _write("groups.in", INSTANCES)
    text = format_instances(read_instances(fn))
    again = format_instances(read_instances(_write("again.in", text)))
    assert text == again
    assert "chain zsq z ambient 6" in text


def test_group_instance_errors():
    """
    Malformed statements and undefined groups are configuration errors.
    """
    with pytest.raises(LabInputError, match="expected 3 entries"):
        GroupInstanceParser().parse(_write("a.in", "group h 3\ngenerator 1 0\n"))
    with pytest.raises(LabInputError, match="does not exist"):
        GroupInstanceParser().parse(_write("b.in", "subgroup h 3\n"))
    with pytest.raises(LabInputError, match="outside a group block"):
        GroupInstanceParser().parse(_write("c.in", "generator 1 0 0\n"))
    with pytest.raises(LabInputError, match="is not defined"):
        read_instances(_write("d.in", "group h 3\ngenerator 1 0 0\nchain h g\n"))


if __name__ == "__main__":
    test_valid_config()
    test_group_instances()
