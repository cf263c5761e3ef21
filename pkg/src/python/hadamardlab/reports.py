#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-
"""
Audit records shared by every report-valued operation.

An audit never raises for a violated inequality: it records the measured
side, the bound and a verdict, and the batch runner turns the records into
CSV rows.
"""

import math
from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
INAPPLICABLE = "inapplicable"
INCONCLUSIVE = "inconclusive"
REQUIRES_DEGENERACY = "requires degeneracy"
DEGENERATE = "degenerate"
INFO = "info"

# verdicts that do not fail a run
SOFT_VERDICTS = (PASS, INAPPLICABLE, INCONCLUSIVE, REQUIRES_DEGENERACY, DEGENERATE, INFO)


@dataclass(frozen=True)
class AuditRecord:
    """One measured-vs-bound comparison."""

    audit: str
    key: str
    measured: float
    bound: float
    verdict: str

    @property
    def passed(self):
        return self.verdict in SOFT_VERDICTS

    def as_row(self, scenario=""):
        return {
            "scenario": scenario,
            "audit": self.audit,
            "key": self.key,
            "measured": self.measured,
            "bound": self.bound,
            "verdict": self.verdict,
        }


def check(audit, key, measured, bound, slack=0.0):
    """``measured <= bound + slack`` as a record; NaN on either side fails."""
    measured = float(measured)
    bound = float(bound)
    if math.isnan(measured) or math.isnan(bound):
        verdict = FAIL
    else:
        verdict = PASS if measured <= bound + slack else FAIL
    return AuditRecord(audit, key, measured, bound, verdict)


def note(audit, key, measured, bound=float("nan"), verdict=INFO):
    return AuditRecord(audit, key, float(measured), float(bound), verdict)


@dataclass
class Report:
    """
    Result of an audit operation.

    Attributes
    ----------
    audit : str
        Name of the audited property.
    verdict : str
        Overall verdict; ``fail`` if any record failed unless set otherwise.
    records : list of AuditRecord
    details : dict
        Operation specific measurements (points, ratios, flags).
    """

    audit: str
    records: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    verdict: str = ""

    def __post_init__(self):
        if not self.verdict:
            self.verdict = self.summarize()

    def summarize(self):
        if any(not r.passed for r in self.records):
            return FAIL
        return PASS

    @property
    def passed(self):
        return self.verdict in SOFT_VERDICTS

    def add(self, record):
        self.records.append(record)
        if not record.passed:
            self.verdict = FAIL
        return record

    def __getitem__(self, key):
        return self.details[key]


def inapplicable(audit, reason, **details):
    details["reason"] = reason
    return Report(
        audit,
        [AuditRecord(audit, "precondition", float("nan"), float("nan"), INAPPLICABLE)],
        details,
        INAPPLICABLE,
    )
