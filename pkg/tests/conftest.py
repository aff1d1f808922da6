"""
Shared fixtures: the two running example arrangements and seeded generators.
"""

from pathlib import Path

import numpy as np
import pytest

from src.core.arrangement import ArrangementMatrix, example_boundary, example_intro
from src.utils.config import TrackerConfig

INSTANCE_DIR = Path(__file__).resolve().parent.parent / "data" / "instances"


@pytest.fixture
def intro() -> ArrangementMatrix:
    return example_intro()


@pytest.fixture
def boundary() -> ArrangementMatrix:
    return example_boundary()


@pytest.fixture
def disconnected() -> ArrangementMatrix:
    """Two disjoint triple-point circuits plus a coloop."""
    return ArrangementMatrix.from_rows([
        [1, 0, 0, 0, 0, 0, 0],
        [1, 1, 0, 1, 0, 0, 0],
        [0, 0, 1, 1, 0, 0, 0],
        [0, 0, 0, 0, 1, 0, 1],
        [0, 0, 0, 0, 0, 1, 1],
    ])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(2024)


@pytest.fixture
def tracker() -> TrackerConfig:
    return TrackerConfig(seed=7)


@pytest.fixture
def instance_dir() -> Path:
    return INSTANCE_DIR
