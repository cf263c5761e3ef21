#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-
#
# Configuration of the Sphinx documentation; executed with the current
# directory set to its containing dir.

import os
import sys

import sphinx_rtd_theme  # noqa

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "../../src/python"))

# -- General configuration ------------------------------------------------

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
    "sphinx.ext.napoleon",
    "sphinx.ext.viewcode",
    "sphinx_copybutton",
    "sphinx_rtd_theme",
]

templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = "hadamardlab"
copyright = "2024-2025, hadamardlab contributors"
author = "hadamardlab contributors"

# The short X.Y version and the full release.
version = "25.01"
release = "25.01"

language = "en"
exclude_patterns = []
pygments_style = "sphinx"
todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

html_theme = "sphinx_rtd_theme"
numfig = True
html_static_path = ["_static"]
htmlhelp_basename = "hadamardlabdoc"

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {}
latex_documents = [
    (
        master_doc,
        "hadamardlab.tex",
        "hadamardlab Documentation",
        "hadamardlab contributors",
        "manual",
    ),
]

# -- Options for autodoc --------------------------------------------------

autodoc_member_order = "bysource"
