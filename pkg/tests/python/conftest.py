# -*- coding: utf-8 -*-

import os

import pytest
from hypothesis import settings

# bounded and reproducible property tests
settings.register_profile("lab", max_examples=25, deadline=None, derandomize=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "lab"))

# base path for input files
basepath = os.getcwd()


@pytest.fixture(autouse=True, scope="function")
def lab_workdir(tmpdir, monkeypatch):
    monkeypatch.delenv("LAB_THREADS", raising=False)
    with tmpdir.as_cwd():
        yield
