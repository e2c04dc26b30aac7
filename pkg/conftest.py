"""
Shared pytest setup: every test starts from the default settings
"""

import pytest

from carlitz_config import DEFAULT_SETTINGS, use_settings


@pytest.fixture(autouse=True)
def default_settings():
    use_settings(DEFAULT_SETTINGS)
    yield
    use_settings(DEFAULT_SETTINGS)
