#!/usr/bin/env python3
"""
Test configuration and fixtures for motivic-infogeo tests
"""

import os

import numpy as np
import pytest

# Keep test runs independent of a developer's .env
os.environ.pop("MOTIVIC_ENUM_BUDGET", None)
os.environ.setdefault("MOTIVIC_LOG_LEVEL", "WARNING")

from motivic_infogeo.ffield import ff_make
from motivic_infogeo.variety import affine_space, point, projective_space


@pytest.fixture
def f2():
    """F_2"""
    return ff_make(2)


@pytest.fixture
def f3():
    """F_3"""
    return ff_make(3)


@pytest.fixture
def f5():
    """F_5"""
    return ff_make(5)


@pytest.fixture
def f4():
    """F_4 = F_2[x]/(x^2 + x + 1)"""
    return ff_make(2, 2)


@pytest.fixture
def spec_f2(f2):
    """Spec F_2"""
    return point(f2)


@pytest.fixture
def line_f3(f3):
    """A^1 over F_3"""
    return affine_space(f3, 1)


@pytest.fixture
def plane_f3(f3):
    """A^2 over F_3"""
    return affine_space(f3, 2)


@pytest.fixture
def p1_f2(f2):
    """P^1 over F_2"""
    return projective_space(f2, 1)


@pytest.fixture
def rng():
    """Seeded numpy generator"""
    return np.random.default_rng(12345)


@pytest.fixture
def small_budget(monkeypatch):
    """Enumeration budget of 1000 items"""
    monkeypatch.setenv("MOTIVIC_ENUM_BUDGET", "1000")
    return 1000
