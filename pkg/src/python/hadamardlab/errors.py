#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-


class HadamardLabError(Exception):
    pass


class GeometryError(HadamardLabError):
    """Invalid geometric input: mismatched spaces, points off the model, ..."""

    pass


class ConvergenceError(HadamardLabError):
    """
    An iterative solver hit its iteration cap.

    The best iterate and its residual travel with the exception so callers
    can report them as failed rows.
    """

    def __init__(self, message, best=None, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.best = best
        self.residual = residual
        self.iterations = iterations


class InfeasibleError(HadamardLabError):
    pass


class PreconditionError(HadamardLabError):
    """A mathematical hypothesis of the requested construction fails."""

    pass


class OrbitOverflowError(HadamardLabError):
    pass


class LatticeError(HadamardLabError):
    pass


class LabInputError(HadamardLabError):
    def __init__(self, args, with_traceback=False):
        super().__init__(*(args if isinstance(args, tuple) else (args,)))
        self.with_traceback = with_traceback


class LabInputWarning(UserWarning):
    pass


class InconclusiveLimitWarning(UserWarning):
    pass


class SamplingWarning(UserWarning):
    pass
