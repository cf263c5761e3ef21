#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-

import numpy as np
import pytest

from hadamardlab.complexes import (
    AbelianLattice,
    NilpotentGroupData,
    build_class_complex,
    center_dimension,
    center_of,
    check_chain,
    free_abelian,
    half_dimension_report,
    heisenberg,
    power_generators,
    saturation,
    virtual_class_of,
    zeta_map,
)
from hadamardlab.errors import LatticeError
from hadamardlab.lab.scenarios import get_scenario
from hadamardlab.reports import INAPPLICABLE, PASS, REQUIRES_DEGENERACY


def test_heisenberg_center():
    """
    The Heisenberg group has a rank one center; free abelian groups are their own center.
    """
    h3 = heisenberg()
    assert center_dimension(h3) == 1
    assert center_of(h3).rank == 1
    assert center_dimension(free_abelian(3)) == 3
    assert h3.center.rank == 1


def test_saturation():
    """
    Saturation divides out the content and is idempotent.
    """
    A = AbelianLattice(np.array([[2, 4, 0]]))
    S = saturation(A)
    assert S.canonical() == ((1, 2, 0),)
    assert saturation(S) == S
    assert S.contains(A)
    assert not A.contains(S)
    assert A.spans(S)
    assert virtual_class_of(A) == virtual_class_of(S)


def test_lattice_errors():
    """
    Dependent bases and malformed generators are rejected.
    """
    with pytest.raises(LatticeError):
        AbelianLattice(np.array([[1, 2], [2, 4]]))
    with pytest.raises(ValueError):
        NilpotentGroupData((np.array([[1, 0], [1, 1]]),), "lower")
    with pytest.raises(ValueError):
        power_generators(heisenberg(), 0)


def test_chain_checks():
    """
    Chains must share a matrix size and be nested.
    """
    with pytest.raises(ValueError):
        check_chain([heisenberg(), free_abelian(2, size=4)])
    with pytest.raises(LatticeError):
        check_chain([free_abelian(2, size=4), free_abelian(1, size=4)])
    z = zeta_map([free_abelian(1, size=4), free_abelian(3, size=4)])
    assert z.rank == 3


def test_heisenberg_chain_complex():
    """
    A Heisenberg block inside H3 x H3 gives an edge of classes of rank 1 and 2.
    """
    inst = get_scenario("heisenberg-chain").build().instances
    model = build_class_complex(inst.chain_groups(), inst.ambient)
    assert model.report.verdict == PASS
    assert [v.rank for v in model.vertices] == [1, 2]
    assert model.dimension == 1
    assert half_dimension_report(model).verdict == PASS


def test_flag_complex():
    """
    The full flag in dimension 4 needs a degenerate simplex; a finite-index
    chain collapses to a single class.
    """
    inst = get_scenario("flag-Z1Z2Z3").build().instances
    model = build_class_complex(inst.chain_groups(), inst.ambient)
    assert model.report.verdict == PASS
    assert model.dimension == 2
    assert model.f_vector == [3, 3, 1]
    assert model.collapsed == [("Z1", str(model.vertices[0]))]
    rep = half_dimension_report(model)
    assert rep.verdict == REQUIRES_DEGENERACY
    assert len(rep["flagged"]) == 1
    assert rep.records[-1].verdict == INAPPLICABLE


def test_power_generators_name():
    """
    Powers keep the group name with the exponent.
    """
    assert power_generators(free_abelian(1), 2).name == "Z1^2"


if __name__ == "__main__":
    test_heisenberg_center()
    test_saturation()
    test_flag_complex()
