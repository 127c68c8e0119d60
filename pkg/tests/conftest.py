"""Shared fixtures and hypothesis profiles."""

import os
from pathlib import Path

import hypothesis
import numpy as np
import pytest

from src.models.base import VectorSystem

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=300, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

CONFIG_DIR = Path(__file__).resolve().parent.parent / "config"


@pytest.fixture
def config_dir() -> Path:
    return CONFIG_DIR


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def standard_basis_c2() -> VectorSystem:
    return VectorSystem.from_columns([(1, 0), (0, 1)])


@pytest.fixture
def generic_c2_four() -> VectorSystem:
    """G(0, 1, 1/2) in disguise: no coincidences, so it does 3-PR."""
    return VectorSystem.from_columns([(1, 0), (0, 1), (1, 1), (1, 2)])
