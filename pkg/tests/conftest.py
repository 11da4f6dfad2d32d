from __future__ import annotations

import pytest

from lrtrial import TrialDesign


@pytest.fixture
def reference_design() -> TrialDesign:
    """The configuration used throughout: delta 0.5, z_crit 2.0, 20 / 0.05."""
    return TrialDesign(delta=0.5, z_crit=2.0)


@pytest.fixture
def default_design() -> TrialDesign:
    return TrialDesign(delta=0.5)
