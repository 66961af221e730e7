from pathlib import Path

import pytest

from dynrel.dsl import parse_model

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def dbw_dft():
    return parse_model((FIXTURES / "dbw_dft.drm").read_text())


@pytest.fixture
def dbw_drbd():
    return parse_model((FIXTURES / "dbw_drbd.drm").read_text())
