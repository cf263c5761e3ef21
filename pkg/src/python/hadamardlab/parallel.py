#!/usr/bin/env python3
#
# Copyright 2024-2025 The hadamardlab Community
# Authors: hadamardlab contributors
# License: BSD-3-Clause
#
# -*- coding: utf-8 -*-

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count():
    """Worker cap from LAB_THREADS; 1 (sequential) when unset."""
    raw = os.environ.get("LAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"Input Error: LAB_THREADS must be an integer, got '{raw}'")
    if n < 1:
        raise ValueError(f"Input Error: LAB_THREADS must be positive, got {n}")
    return n


def parallel_map(func, items, threads=None):
    """
    Apply func to every item; results come back in input order.

    The first exception raised by a work item propagates after all
    submitted work has finished.
    """
    items = list(items)
    n = thread_count() if threads is None else threads
    if n <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as executor:
        futures = [executor.submit(func, item) for item in items]
        return [f.result() for f in futures]
