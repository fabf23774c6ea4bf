#!/usr/bin/env python3
# coding: utf-8
# Copyright (c) 2026 znjet developers
"""
テストで共有する領域と設定。
"""
import sys
from os.path import abspath, dirname

import pytest

sys.path.insert(0, dirname(dirname(abspath(__file__))))

# pylint: disable=wrong-import-position
from znjet.cli import load_config  # noqa: E402
from znjet.gmorphism import make_domain  # noqa: E402
from znjet.grading import coordinate_system  # noqa: E402

Q_COORDS = [('x', (0, 0)), ('z', (1, 1)), ('a', (0, 1)), ('b', (1, 0))]


@pytest.fixture
def quaternionic():
    """x:(0,0), z:(1,1), a:(0,1), b:(1,0) 、cap=4"""
    return make_domain(coordinate_system(2, Q_COORDS), 4, 'R')


@pytest.fixture
def xz_domain():
    """1|(1,0,0): x:(0,0), z:(1,1)"""
    return make_domain(coordinate_system(2, [('x', (0, 0)), ('z', (1, 1))]), 4, 'U')


@pytest.fixture
def yw_domain():
    return make_domain(coordinate_system(2, [('y', (0, 0)), ('w', (1, 1))]), 4, 'V')


@pytest.fixture
def config():
    return load_config()
