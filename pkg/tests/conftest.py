from __future__ import annotations

import pytest

from dodiff import validation


@pytest.fixture(scope="session")
def suite():
    """Three single orders, three bands, one tabulated density."""
    return validation.test_suite()


@pytest.fixture(scope="session")
def band():
    return validation.bands()[0]
