#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-

import hashlib
from dataclasses import asdict, dataclass

import numpy as np

from .complexes import (
    DEFAULT_BALL_RADIUS,
    GroupInstances,
    NilpotentGroupData,
    embed_block,
    power_generators,
)
from .errors import LabInputError
from .LabInputParser import GroupInstanceParser, LabInputParser


@dataclass(frozen=True)
class ExperimentConfig:
    """Typed lab configuration; every knob already range checked."""

    experiment: str
    scenario: str = ""
    r_schedule: tuple = (10.0, 20.0, 40.0, 80.0, 160.0, 320.0, 640.0, 1280.0)
    grid: int = 8
    seed: int = 0
    samples: int = 200
    k_max: int = 10_000
    sphere_tol: float = 1e-8
    kkt_tol: float = 1e-7
    output: str = "lab.csv"
    verbose: bool = False
    schema: int = 1

    def digest(self):
        """sha256 of the canonical ``key=value`` listing."""
        text = "\n".join(f"{k}={v!r}" for k, v in sorted(asdict(self).items()))
        return hashlib.sha256(text.encode()).hexdigest()

    def replace(self, **changes):
        values = asdict(self)
        values.update(changes)
        return ExperimentConfig(**values)


def experiment_config(parsed, known_scenarios=None):
    """
    Function that converts a dictionary in the LabInputParser format into an ExperimentConfig
    :param parsed: dictionary of validated values
    :param known_scenarios: scenario names accepted for the ``scenario`` key
    :return: ExperimentConfig
    """
    values = dict(parsed)
    values["r_schedule"] = tuple(values["r_schedule"])
    if values["experiment"] == "verify-suite":
        values["scenario"] = ""
    elif known_scenarios is not None and values["scenario"] not in known_scenarios:
        raise LabInputError(
            "Parameter 'scenario': '"
            + values["scenario"]
            + "' is not in the catalog ("
            + ", ".join(known_scenarios)
            + ")."
        )
    if values["experiment"] == "simplex" and len(values["r_schedule"]) < 3:
        raise LabInputError("Parameter 'r_schedule': the simplex experiment needs at least 3 radii.")
    return ExperimentConfig(**values)


def read_config(config_file, known_scenarios=None):
    """
    Function that reads a lab configuration file
    :param config_file: file name of the ``key = value`` configuration
    :param known_scenarios: scenario names accepted for the ``scenario`` key
    :return: ExperimentConfig
    """
    parser = LabInputParser()
    return experiment_config(parser.parse(config_file), known_scenarios)


def _matrix(size, entries):
    m = np.eye(size, dtype=np.int64)
    m[np.triu_indices(size, 1)] = entries
    return m


def group_instances(described):
    """
    Function that converts a GroupInstanceParser description into groups and chains
    :param described: dictionary with ``groups``, ``derived`` and ``chains``
    :return: GroupInstances
    """
    out = GroupInstances()
    for name, block in described["groups"].items():
        radius = DEFAULT_BALL_RADIUS if block["radius"] is None else block["radius"]
        gens = tuple(_matrix(block["size"], e) for e in block["generators"])
        out.groups[name] = NilpotentGroupData(gens, name, radius)
    for kind, name, source, arg, line in described["derived"]:
        if source not in out.groups:
            raise LabInputError(f"Line {line}: group '{source}' is not defined.")
        if kind == "power":
            g = power_generators(out.groups[source], arg)
            out.groups[name] = NilpotentGroupData(g.generators, name, g.radius)
        else:
            out.groups[name] = embed_block(out.groups[source], arg[0], arg[1], name)
    for names, ambient, line in described["chains"]:
        for n in names:
            if n not in out.groups:
                raise LabInputError(f"Line {line}: group '{n}' is not defined.")
        out.chains.append(list(names))
        out.ambient.append(ambient)
    return out


def read_instances(instance_file):
    """
    Function that reads groups and chains from an instance file
    :param instance_file: file name of the instance description
    :return: GroupInstances
    """
    parser = GroupInstanceParser()
    return group_instances(parser.parse(instance_file))


def format_instances(instances):
    """Canonical text of GroupInstances; parsing it back yields the same groups and chains."""
    lines = []
    for name in sorted(instances.groups):
        g = instances.groups[name]
        lines.append(f"group {name} {g.size} radius {g.radius}")
        for m in g.generators:
            lines.append("generator " + " ".join(str(int(v)) for v in m[np.triu_indices(g.size, 1)]))
    for chain, ambient in zip(instances.chains, instances.ambient):
        tail = "" if ambient is None else f" ambient {ambient}"
        lines.append("chain " + " ".join(chain) + tail)
    return "\n".join(lines) + "\n"
