#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-
import os
import re
import warnings

from .errors import LabInputError, LabInputWarning

EXPERIMENTS = ("simplex", "tracking", "center", "projection-audit", "complex", "verify-suite")


class LabInputParser:
    """
    Simple lab configuration parser.
    It expects a single ``key = value`` pair per line.
    """

    def __init__(self):
        self.__pattern = r"^([a-z_]+)=(.*)$"

        # key: (type, conditions, default); None marks a mandatory key
        self.schema = {
            "schema": ("int", ["equals_one"], None),
            "experiment": ("str", ["experiment"], None),
            "scenario": ("str", [], ""),
            "r_schedule": ("float_list", ["positive", "increasing"], "10,20,40,80,160,320,640,1280"),
            "grid": ("int", ["positive"], "8"),
            "seed": ("int", ["non_negative"], "0"),
            "samples": ("int", ["positive"], "200"),
            "k_max": ("int", ["at_least_two"], "10000"),
            "sphere_tol": ("float", ["positive"], "1e-8"),
            "kkt_tol": ("float", ["positive"], "1e-7"),
            "output": ("path", [], "lab.csv"),
            "verbose": ("bool", [], "false"),
        }

        self.__raw = {}
        self.__lines = {}
        self.__values = {}

    def nonblank_lines(self, f):
        for ln in f:
            line = ln.strip()
            if line:
                yield line

    def _noWhitespace(self, string):
        return re.sub(r"\s+", "", string)

    def parse(self, fn):
        """
        fn (str)    filename

        """

        if not os.path.isfile(fn):
            raise FileNotFoundError(f"File '{fn}' not found!")

        nLine = 0

        with open(fn, "r") as f:
            for raw in self.nonblank_lines(f):
                nLine += 1
                if raw[0] in "!#":
                    # this is a comment
                    continue

                key, sep, value = raw.partition("=")
                key = self._noWhitespace(key).casefold()
                if not sep or not re.match(self.__pattern, key + "=" + value):
                    raise LabInputError(
                        ("Error at line " + str(nLine), "Parsed line: " + raw),
                        with_traceback=True,
                    )
                if key not in self.schema:
                    raise LabInputError(
                        "Line "
                        + str(nLine)
                        + ": Parameter "
                        + "'"
                        + key
                        + "'"
                        + " does not exist for lab configuration."
                    )
                if key in self.__raw:
                    raise LabInputError(
                        "Line "
                        + str(nLine)
                        + ": Parameter '"
                        + key
                        + "' already set on line "
                        + str(self.__lines[key])
                        + "."
                    )
                value = value.strip()
                if key == "scenario":
                    value = self._noWhitespace(value)
                elif key != "output":
                    value = self._noWhitespace(value).casefold()
                self.__raw[key] = value
                self.__lines[key] = nLine

        errors = self.validate()
        if errors:
            raise LabInputError(tuple(errors))
        return self.getParameters()

    @staticmethod
    def validate_against(input_value, value_type, additional_conditions=None):
        """
        Validates the input value against the desired type and additional conditions.
        :param input_value: The value to validate.
        :param value_type: The desired type ('int', 'float', 'float_list', 'bool', 'str', 'path').
        :param additional_conditions: A list of additional conditions to validate.
        :return: A tuple of the converted value and a list of error messages.
        """
        errors = []
        value = None

        if value_type == "int":
            try:
                value = int(input_value)
            except ValueError:
                errors.append("Must be an integer")
        elif value_type == "float":
            try:
                value = float(input_value)
            except ValueError:
                errors.append("Must be a float")
        elif value_type == "float_list":
            try:
                value = [float(v) for v in input_value.split(",") if v]
            except ValueError:
                errors.append("Must be a comma separated list of floats")
            if value == []:
                errors.append("Must not be empty")
        elif value_type == "bool":
            if input_value in ("true", "yes", "1"):
                value = True
            elif input_value in ("false", "no", "0"):
                value = False
            else:
                errors.append("Must be true or false")
        elif value_type in ("str", "path"):
            value = str(input_value)
            if value_type == "path" and not value:
                errors.append("Must not be empty")
        else:
            errors.append("Unknown type")

        if errors == [] and additional_conditions:
            values = value if isinstance(value, list) else [value]
            for condition in additional_conditions:
                if condition == "positive" and any(v <= 0 for v in values):
                    errors.append("Must be positive")
                if condition == "non_negative" and any(v < 0 for v in values):
                    errors.append("Must be non-negative")
                if condition == "at_least_two" and value < 2:
                    errors.append("Must be at least 2")
                if condition == "equals_one" and value != 1:
                    errors.append("Unsupported schema version (expected 1)")
                if condition == "increasing" and any(b <= a for a, b in zip(values, values[1:])):
                    errors.append("Must be strictly increasing")
                if condition == "experiment" and value not in EXPERIMENTS:
                    errors.append("Must be one of " + ", ".join(EXPERIMENTS))

        return value, errors

    def validate(self):
        """All messages for missing or invalid keys; an empty list if the input is valid."""
        messages = []
        self.__values = {}
        for key, (value_type, conditions, default) in self.schema.items():
            if key not in self.__raw:
                if default is None:
                    messages.append(f"Parameter '{key}' is required.")
                    continue
                raw, where = default, "default"
            else:
                raw, where = self.__raw[key], "Line " + str(self.__lines[key])
            value, errors = self.validate_against(raw, value_type, conditions)
            for e in errors:
                messages.append(f"{where}: Parameter '{key}': {e}.")
            self.__values[key] = value
        if self.__values.get("experiment") == "verify-suite" and self.__raw.get("scenario"):
            warnings.warn(
                "Parameter 'scenario' is ignored by the verify-suite experiment",
                LabInputWarning,
            )
        return messages

    def getParameters(self):
        return dict(self.__values)

    def __str__(self):
        return "\n".join(f"{k} = {v}" for k, v in self.getParameters().items())


class GroupInstanceParser(LabInputParser):
    """
    Parser for group instance files.

    Canonical form, one statement per line::

        group <name> <size> [radius <r>]
        generator <d(d-1)/2 strictly upper entries, row-major>
        power <name> <group> <exponent>
        embed <name> <group> <size> <offset>
        chain <group> <group> ... [ambient <n>]
    """

    def __init__(self):
        super().__init__()
        self.__groups = {}
        self.__derived = []
        self.__chains = []

    def parse(self, fn):
        """
        fn (str)    filename

        """

        if not os.path.isfile(fn):
            raise FileNotFoundError(f"File '{fn}' not found!")

        nLine = 0
        current = None

        with open(fn, "r") as f:
            for raw in self.nonblank_lines(f):
                nLine += 1
                line = raw.casefold()
                if line[0] in "!#":
                    continue
                words = line.split()
                try:
                    if words[0] == "group":
                        name, size = words[1], int(words[2])
                        radius = int(words[4]) if len(words) > 4 and words[3] == "radius" else None
                        if name in self.__groups:
                            raise LabInputError(f"Line {nLine}: group '{name}' defined twice.")
                        current = {"name": name, "size": size, "radius": radius, "generators": []}
                        self.__groups[name] = current
                    elif words[0] == "generator":
                        if current is None:
                            raise LabInputError(f"Line {nLine}: generator outside a group block.")
                        entries = [int(v) for v in words[1:]]
                        d = current["size"]
                        if len(entries) != d * (d - 1) // 2:
                            raise LabInputError(
                                f"Line {nLine}: expected {d * (d - 1) // 2} entries for size {d}, "
                                f"got {len(entries)}."
                            )
                        current["generators"].append(entries)
                    elif words[0] == "power":
                        self.__derived.append(("power", words[1], words[2], int(words[3]), nLine))
                        current = None
                    elif words[0] == "embed":
                        self.__derived.append(
                            ("embed", words[1], words[2], (int(words[3]), int(words[4])), nLine)
                        )
                        current = None
                    elif words[0] == "chain":
                        names = words[1:]
                        ambient = None
                        if "ambient" in names:
                            i = names.index("ambient")
                            ambient = int(names[i + 1])
                            names = names[:i]
                        if not names:
                            raise LabInputError(f"Line {nLine}: empty chain.")
                        self.__chains.append((names, ambient, nLine))
                        current = None
                    else:
                        raise LabInputError(
                            f"Line {nLine}: Statement '{words[0]}' does not exist for group instances."
                        )
                except (IndexError, ValueError):
                    raise LabInputError(
                        ("Error at line " + str(nLine), "Parsed line: " + raw),
                        with_traceback=True,
                    )
        return self.getInstances()

    def getInstances(self):
        """Plain description: groups, derived groups and chains, in file order."""
        return {
            "groups": dict(self.__groups),
            "derived": list(self.__derived),
            "chains": list(self.__chains),
        }
