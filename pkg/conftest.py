# conftest.py - shared fixtures; sits at the root so tests import the top-level modules

import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from evidence_core import EvidenceBody
from interval_scale import Interval, default_scale

settings.register_profile("default", max_examples=200, deadline=None)
settings.register_profile(
    "fast",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

DATA_DIR = Path(__file__).resolve().parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def scale():
    return default_scale()


@pytest.fixture
def worked_bodies():
    """The two-source example: combines to {[0.23,0.33]: 0.6, [0.67,0.77]: 0.4} with K = 0.5."""
    students = EvidenceBody.build("students", [(Interval(0.0, 0.33), 0.6), (Interval(0.67, 1.0), 0.4)])
    teachers = EvidenceBody.build("teachers", [(Interval(0.23, 0.33), 0.5), (Interval(0.67, 0.77), 0.5)])
    return [students, teachers]
